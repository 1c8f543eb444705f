"""
Özellik matrisi CSV dosyaları: ilk sütun region_id, başlık manifesto adları.
"""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from radiomics.extractor import FeatureVector
from radiomics.manifest import FeatureManifest
from utils.exceptions import ManifestMismatchError
from utils.serialization import read_csv, write_csv

ID_COLUMN = "region_id"
LABEL_COLUMN = "label"


def feature_frame(
    vectors: Sequence[FeatureVector],
    manifest: FeatureManifest,
    include_label: bool = False,
) -> pd.DataFrame:
    matrix = np.vstack([v.values for v in vectors]) if vectors else np.zeros((0, len(manifest)))
    frame = pd.DataFrame(matrix, columns=list(manifest.names))
    if include_label:
        frame.insert(0, LABEL_COLUMN, [v.label.value for v in vectors])
    frame.insert(0, ID_COLUMN, [v.region_id for v in vectors])
    return frame


def write_feature_table(
    vectors: Sequence[FeatureVector],
    manifest: FeatureManifest,
    path: Path,
    include_label: bool = False,
) -> Path:
    """Özellik vektörlerini CSV'ye yaz"""
    return write_csv(feature_frame(vectors, manifest, include_label), path)


def read_feature_table(
    path: Path,
    manifest: Optional[FeatureManifest] = None,
) -> Tuple[List[str], np.ndarray, List[str], Optional[List[str]]]:
    """
    CSV özellik tablosunu oku.

    Returns:
        (region_id listesi, özellik matrisi, sütun adları, etiketler veya None)
    """
    frame = read_csv(path)
    ids = frame.pop(ID_COLUMN).astype(str).tolist()
    labels = frame.pop(LABEL_COLUMN).astype(str).tolist() if LABEL_COLUMN in frame.columns else None
    names = list(frame.columns)
    if manifest is not None and tuple(names) != manifest.names:
        raise ManifestMismatchError(f"{path}: sütunlar manifestoyla uyuşmuyor")
    return ids, frame.to_numpy(dtype=np.float64), names, labels
