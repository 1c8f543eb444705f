"""
Vaka başına metrik raporu (CSV + JSON), özet alt satırlarıyla.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import pandas as pd

from evalmetrics.metrics import METRIC_NAMES, MetricsRow, summarize
from utils.serialization import read_csv, write_csv, write_json

logger = logging.getLogger(__name__)

SUMMARY_IDS = ("mean", "std")


def report_frame(
    rows: Sequence[MetricsRow],
    extras: Optional[Dict[str, Dict[str, Any]]] = None,
) -> pd.DataFrame:
    """Vaka satırları + 'mean' ve 'std' özet satırları"""
    extras = extras or {}
    records = []
    for row in rows:
        record = row.to_dict()
        record.update(extras.get(row.case_id, {}))
        records.append(record)
    frame = pd.DataFrame.from_records(records)
    summary = summarize(rows)
    footer = []
    for kind in SUMMARY_IDS:
        values = summary.mean if kind == "mean" else summary.std
        footer.append({"case_id": kind, **{name: values[name] for name in METRIC_NAMES}})
    return pd.concat([frame, pd.DataFrame.from_records(footer)], ignore_index=True)


def write_report(
    rows: Sequence[MetricsRow],
    csv_path: Path,
    json_path: Optional[Path] = None,
    extras: Optional[Dict[str, Dict[str, Any]]] = None,
) -> Path:
    """
    Args:
        rows: Vaka metrikleri
        csv_path: CSV yolu
        json_path: JSON yolu (None: CSV ile aynı ad, .json)
        extras: case_id → ek sütunlar (ör. aday filtre sayımları)

    Returns:
        CSV yolu
    """
    csv_path = Path(csv_path)
    json_path = Path(json_path) if json_path else csv_path.with_suffix(".json")
    write_csv(report_frame(rows, extras), csv_path)
    extras = extras or {}
    write_json(
        {
            "cases": [{**r.to_dict(), **extras.get(r.case_id, {})} for r in rows],
            "summary": summarize(rows).to_dict(),
        },
        json_path,
    )
    logger.info(f"Rapor yazıldı: {csv_path} ({len(rows)} vaka)")
    return csv_path


def read_report(csv_path: Path) -> pd.DataFrame:
    """Özet satırları hariç vaka satırları"""
    frame = read_csv(csv_path)
    return frame[~frame["case_id"].astype(str).isin(SUMMARY_IDS)].reset_index(drop=True)
