"""
JSON ve CSV yardımcıları.
"""

import json
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd


def _default(obj: Any):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"JSON'a çevrilemeyen tip: {type(obj).__name__}")


def write_json(data: Any, path: Path) -> Path:
    """JSON yaz (ensure_ascii=False, indent=2)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2, default=_default)
    return path


def read_json(path: Path) -> Any:
    """JSON oku"""
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def canonical_json(data: Any) -> str:
    """Hash için kararlı (sıralı anahtarlı, boşluksuz) JSON"""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=_default)


def write_csv(df: pd.DataFrame, path: Path) -> Path:
    """CSV yaz; float'lar en kısa geri-dönüşlü gösterimle"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False)
    return path


def read_csv(path: Path) -> pd.DataFrame:
    """CSV'yi bit-tam float'larla oku"""
    return pd.read_csv(path, float_precision="round_trip")
