"""
Normatif özellik manifestosu: 728 girdinin sıralı ad/grup listesi.

    core     : 34 + 2 + 11 + 22 + 8 + 3 = 80
    band     : şekil hariç tüm gruplar   = 72
    wavelet_*: 8 alt bant × 72           = 576
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from config.settings import FEATURE_GROUP_SIZES, FEATURE_TOTAL, WAVELET_BANDS
from radiomics.intensity import FIRST_ORDER_NAMES, GRADIENT_NAMES, MOMENT_NAMES
from radiomics.shape import SHAPE_NAMES
from radiomics.texture import GLCM_NAMES, RLM_NAMES
from utils.exceptions import ManifestMismatchError

logger = logging.getLogger(__name__)

GROUP_FEATURES: Dict[str, Tuple[str, ...]] = {
    "first_order": FIRST_ORDER_NAMES,
    "gradient": GRADIENT_NAMES,
    "run_length": RLM_NAMES,
    "glcm": GLCM_NAMES,
    "shape": SHAPE_NAMES,
    "moments": MOMENT_NAMES,
}
CORE_GROUPS = tuple(GROUP_FEATURES)
NON_SHAPE_GROUPS = tuple(g for g in CORE_GROUPS if g != "shape")
QUALIFIERS = ("core", "band") + tuple(f"wavelet_{b}" for b in WAVELET_BANDS)


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    group: str
    qualifier: str


class FeatureManifest:
    """Sıralı özellik listesi"""

    def __init__(self, entries: Sequence[ManifestEntry]):
        self.entries: Tuple[ManifestEntry, ...] = tuple(entries)
        self.names: Tuple[str, ...] = tuple(e.name for e in self.entries)
        if len(set(self.names)) != len(self.names):
            raise ManifestMismatchError("Manifestoda tekrar eden özellik adı var")
        self._index = {name: i for i, name in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, FeatureManifest) and self.entries == other.entries

    def index_of(self, name: str) -> int:
        return self._index[name]

    def indices(self, qualifier: Optional[str] = None, group: Optional[str] = None) -> List[int]:
        """Niteleyici ve/veya gruba göre indisler"""
        return [
            i for i, e in enumerate(self.entries)
            if (qualifier is None or e.qualifier == qualifier) and (group is None or e.group == group)
        ]

    def group_totals(self, qualifier: str = "core") -> Dict[str, int]:
        totals: Dict[str, int] = {}
        for e in self.entries:
            if e.qualifier == qualifier:
                totals[e.group] = totals.get(e.group, 0) + 1
        return totals

    def qualifier_totals(self) -> Dict[str, int]:
        totals: Dict[str, int] = {}
        for e in self.entries:
            totals[e.qualifier] = totals.get(e.qualifier, 0) + 1
        return totals

    @classmethod
    def normative(cls) -> "FeatureManifest":
        """Standart 728 girdilik manifesto"""
        entries = []
        for qualifier in QUALIFIERS:
            groups = CORE_GROUPS if qualifier == "core" else NON_SHAPE_GROUPS
            for group in groups:
                entries.extend(
                    ManifestEntry(f"{qualifier}.{group}.{feature}", group, qualifier)
                    for feature in GROUP_FEATURES[group]
                )
        manifest = cls(entries)
        manifest.validate()
        return manifest

    def validate(self) -> None:
        """Grup alt toplamlarını ve genel toplamı doğrula"""
        if self.group_totals("core") != FEATURE_GROUP_SIZES:
            raise ManifestMismatchError(f"Çekirdek grup toplamları hatalı: {self.group_totals('core')}")
        if len(self) != FEATURE_TOTAL:
            raise ManifestMismatchError(f"Manifesto uzunluğu {len(self)}, beklenen {FEATURE_TOTAL}")

    def to_dict(self) -> Dict:
        return {
            "total": len(self),
            "entries": [{"name": e.name, "group": e.group, "qualifier": e.qualifier} for e in self.entries],
        }

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=2)
        return path

    @classmethod
    def load(cls, path: Path) -> "FeatureManifest":
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        return cls([ManifestEntry(**e) for e in data["entries"]])
