"""
Hedef özellik sayısına (12..30) göre orman test doğruluğu.

Kullanım:
    python scripts/run_feature_sweep.py --n 8
"""

from pathlib import Path
from typing import Optional

import click

from _common import console, print_table

from config.runtime import runtime_settings
from models.schemas import load_config
from phantom.suite import standard_suite
from pipeline.ablation import build_phantoms, case_ids, desk_scale_config, training_case
from pipeline.training import build_region_dataset, feature_count_sweep
from utils.logging_setup import setup_logging


@click.command()
@click.option("--n", "n_phantoms", type=int, default=8, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path), default=None)
def main(n_phantoms: int, seed: Optional[int], config_path: Optional[Path]):
    setup_logging(runtime_settings.log_level, runtime_settings.log_json, runtime_settings.log_file)
    config = desk_scale_config(load_config(config_path))
    seed = config.seed if seed is None else seed
    phantoms = build_phantoms(standard_suite(n_phantoms, seed))
    cases = [training_case(p, case_id) for p, case_id in zip(phantoms, case_ids(len(phantoms)))]
    half = len(cases) // 2
    train = build_region_dataset(cases[:half], config, seed)
    test = build_region_dataset(cases[half:], config, seed)
    rows = feature_count_sweep(train, test, config.featsel, config.forest, seed=seed, workers=config.workers)
    print_table(
        "Özellik sayısı duyarlılığı",
        ["Hedef", "Seçilen", "Doğruluk"],
        [(r["target"], r["n_features"], r["accuracy"]) for r in rows],
    )
    console.print(f"[OK] {len(train.y)} eğitim / {len(test.y)} test bölgesi")


if __name__ == "__main__":
    main()
