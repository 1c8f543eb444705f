"""
Küre/arka plan yama görevinde yama boyutu taraması.
s=23 yakınsamayan boyut olarak işaretlenir.

Kullanım:
    python scripts/run_patch_sweep.py --sizes 7 11 15 --n 400
"""

from typing import Optional, Tuple

import click

from _common import console, print_table

from config.runtime import runtime_settings
from models.schemas import CnnConfig, TrainSchedule
from neural.trainer import evaluate, train_patch_cnn
from phantom.patches import make_sphere_patch_dataset
from utils.logging_setup import setup_logging
from utils.rng import derive_seed


@click.command()
@click.option("--sizes", type=int, multiple=True, default=(7, 11, 15, 19, 23), show_default=True)
@click.option("--n", "n_patches", type=int, default=400, show_default=True, help="Eğitim yaması sayısı")
@click.option("--epochs", type=int, default=12, show_default=True)
@click.option("--seed", type=int, default=0)
def main(sizes: Tuple[int, ...], n_patches: int, epochs: int, seed: int):
    setup_logging(runtime_settings.log_level, runtime_settings.log_json, runtime_settings.log_file)
    rows = []
    for s in sizes:
        config = CnnConfig(
            patch_size=s,
            channels=(8, 8, 16, 16, 16),
            fc_width=16,
            schedule=TrainSchedule(adam_epochs=min(epochs, 8), max_epochs=epochs, patience=4),
        )
        train = make_sphere_patch_dataset(n_patches, s, derive_seed(seed, "train", s))
        val = make_sphere_patch_dataset(n_patches // 4, s, derive_seed(seed, "val", s))
        test = make_sphere_patch_dataset(n_patches // 4, s, derive_seed(seed, "test", s))
        result = train_patch_cnn(train, val, config, seed=seed)
        loss, accuracy = evaluate(result.model, test)
        rows.append((s, result.best_epoch, result.best_val_loss, loss, accuracy, "evet" if result.flagged else ""))
    print_table("Yama boyutu taraması", ["s", "En iyi epoch", "Doğr. kaybı", "Test kaybı", "Test doğruluğu", "İşaretli"], rows)
    console.print("[OK] Tarama tamamlandı")


if __name__ == "__main__":
    main()
