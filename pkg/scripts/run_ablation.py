"""
Standart fantom takımında kümülatif aşama ablasyonu.

Kullanım:
    python scripts/run_ablation.py --n 20 --folds 2
    python scripts/run_ablation.py --n 6 --out runs/ablation.json
"""

from pathlib import Path
from typing import Optional

import click

from _common import console, print_acceptance, print_table

from config.runtime import runtime_settings
from models.schemas import load_config
from phantom.suite import standard_suite
from pipeline.ablation import desk_scale_config, run_ablation
from utils.logging_setup import setup_logging
from utils.serialization import write_json


@click.command()
@click.option("--n", "n_phantoms", type=int, default=20, show_default=True, help="Fantom sayısı")
@click.option("--folds", type=int, default=2, show_default=True, help="Vaka düzeyinde kat sayısı")
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--full-scale", is_flag=True, help="Küçültülmüş ayarlar yerine varsayılanlar")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Sonuç JSON")
def main(n_phantoms: int, folds: int, seed: Optional[int], config_path: Optional[Path], full_scale: bool, out: Optional[Path]):
    setup_logging(runtime_settings.log_level, runtime_settings.log_json, runtime_settings.log_file)
    config = load_config(config_path)
    if not full_scale:
        config = desk_scale_config(config)
    seed = config.seed if seed is None else seed
    result = run_ablation(standard_suite(n_phantoms, seed), config, k=folds, seed=seed)

    print_table(
        "Ablasyon (ortalama ± std)",
        ["Satır", "Dice", "Dice std", "Duyarlılık", "PPV"],
        [
            (r.name, r.to_dict()["mean"]["dice"], r.to_dict()["std"]["dice"],
             r.to_dict()["mean"]["sensitivity"], r.to_dict()["mean"]["ppv"])
            for r in result.rows
        ],
    )
    if result.wilcoxon is not None:
        console.print(f"Wilcoxon (tam vs taban): W+={result.wilcoxon.statistic:.1f} p={result.wilcoxon.p_value:.4g} ({result.wilcoxon.method})")
    print_acceptance(result.acceptance(), result.elapsed_s)
    if out is not None:
        write_json(result.to_dict(), out)
        console.print(f"[OK] {out}")


if __name__ == "__main__":
    main()
