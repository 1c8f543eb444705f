"""
Metrik raporu ve çalışma manifestosunu görüntüleme script'i.

Kullanım:
    python scripts/view_report.py --report runs/case/report.csv
    python scripts/view_report.py --manifest runs/case/manifest.json
"""

from pathlib import Path
from typing import Optional

import click

from _common import console, print_table

from evalmetrics.metrics import METRIC_NAMES
from utils.serialization import read_csv, read_json


@click.command()
@click.option("--report", "report_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, path_type=Path), default=None)
def main(report_path: Optional[Path], manifest_path: Optional[Path]):
    if report_path is None and manifest_path is None:
        raise click.UsageError("--report veya --manifest belirtilmeli")

    if report_path is not None:
        frame = read_csv(report_path)
        print_table(
            f"Rapor: {report_path.name}",
            ["case_id", *METRIC_NAMES],
            [(str(row["case_id"]), *(float(row[m]) for m in METRIC_NAMES)) for _, row in frame.iterrows()],
        )

    if manifest_path is not None:
        manifest = read_json(manifest_path)
        console.print(f"Vaka: {manifest['case_id']}  tohum: {manifest['seed']}  config: {manifest['config_hash'][:12]}")
        print_table(
            "Aşamalar",
            ["Aşama", "Durum", "Süre (sn)", "Ön plan", "Bileşen"],
            [
                (s["stage"], s["status"], float(s["seconds"]),
                 s["stats"].get("foreground", ""), s["stats"].get("components", ""))
                for s in manifest["stages"]
            ],
        )
        if manifest.get("failed_stage"):
            console.print(f"[HATA] Başarısız aşama: {manifest['failed_stage']}")


if __name__ == "__main__":
    main()
