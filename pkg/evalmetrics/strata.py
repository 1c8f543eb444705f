"""
Lezyon boyut katmanları (eşdeğer küresel çap) ve katman başına lezyon Dice'ı.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from config.settings import STRATA_LARGE_MM, STRATA_REL_TOL, STRATA_SMALL_MM
from models.volume import Mask3D
from volumes.components import Component, Connectivity, connected_components

logger = logging.getLogger(__name__)

STRATA = ("small", "medium", "large")


def equivalent_diameter(volume_mm3: float) -> float:
    """d = (6V/π)^(1/3)"""
    return float(np.cbrt(6.0 * volume_mm3 / np.pi))


def stratum_for(diameter_mm: float) -> str:
    """< 10 mm küçük, [10, 30] mm orta, > 30 mm büyük (sınırlar göreli toleransla dahil)"""
    if diameter_mm < STRATA_SMALL_MM * (1.0 - STRATA_REL_TOL):
        return "small"
    if diameter_mm > STRATA_LARGE_MM * (1.0 + STRATA_REL_TOL):
        return "large"
    return "medium"


@dataclass(frozen=True)
class LesionStratum:
    label: int
    volume_mm3: float
    diameter_mm: float
    stratum: str


def stratify_by_size(components: Sequence[Component], spacing: Sequence[float]) -> List[LesionStratum]:
    voxel_volume = float(np.prod(spacing))
    out = []
    for c in components:
        volume = c.size * voxel_volume
        d = equivalent_diameter(volume)
        out.append(LesionStratum(c.label, volume, d, stratum_for(d)))
    return out


@dataclass(frozen=True)
class StratumDice:
    stratum: str
    n_lesions: int
    mean: float
    std: float


def stratified_lesion_dice(P: Mask3D, T: Mask3D) -> Dict[str, StratumDice]:
    """
    Her referans lezyon (26-bileşen) için, ona dokunan tahmin bileşenlerinin
    birleşimiyle Dice; katman başına ortalama ± örneklem std.
    Lezyonu olmayan katmanlarda ortalama NaN.
    """
    P.check_grid(T, "katmanlı Dice")
    t_labels, t_components = connected_components(T, Connectivity.FULL)
    p_labels, _ = connected_components(P, Connectivity.FULL)
    strata = stratify_by_size(t_components, T.spacing)

    per_stratum: Dict[str, List[float]] = {s: [] for s in STRATA}
    for component, info in zip(t_components, strata):
        lesion = t_labels == component.label
        touching = np.unique(p_labels[lesion])
        touching = touching[touching > 0]
        pred = np.isin(p_labels, touching) if len(touching) else np.zeros_like(lesion)
        inter = np.count_nonzero(pred & lesion)
        total = np.count_nonzero(pred) + np.count_nonzero(lesion)
        per_stratum[info.stratum].append(2.0 * inter / total)

    out = {}
    for s, values in per_stratum.items():
        arr = np.asarray(values)
        out[s] = StratumDice(
            stratum=s,
            n_lesions=len(arr),
            mean=float(arr.mean()) if len(arr) else float("nan"),
            std=float(arr.std(ddof=1)) if len(arr) > 1 else 0.0,
        )
    return out
