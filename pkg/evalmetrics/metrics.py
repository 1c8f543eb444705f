"""
Hacim düzeyinde segmentasyon metrikleri.

Boş küme kuralları: T boşsa duyarlılık, P de boşsa 1, değilse 0; P boşsa
PPV, T de boşsa 1, değilse 0; ikisi de boşsa Dice 1.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional

import numpy as np

from models.volume import Mask3D

logger = logging.getLogger(__name__)

METRIC_NAMES = ("sensitivity", "ppv", "dice")


@dataclass(frozen=True)
class MetricsRow:
    """Tek vakanın metrikleri ve sayımları"""

    case_id: str
    sensitivity: float
    ppv: float
    dice: float
    n_pred: int
    n_true: int
    n_intersection: int
    empty_pred: bool
    empty_true: bool

    def to_dict(self) -> Dict:
        return asdict(self)


def metrics_from_counts(n_pred: int, n_true: int, n_inter: int, case_id: str = "") -> MetricsRow:
    sensitivity = n_inter / n_true if n_true else (1.0 if n_pred == 0 else 0.0)
    ppv = n_inter / n_pred if n_pred else (1.0 if n_true == 0 else 0.0)
    total = n_pred + n_true
    dice = 2.0 * n_inter / total if total else 1.0
    return MetricsRow(
        case_id=case_id,
        sensitivity=float(sensitivity),
        ppv=float(ppv),
        dice=float(dice),
        n_pred=int(n_pred),
        n_true=int(n_true),
        n_intersection=int(n_inter),
        empty_pred=n_pred == 0,
        empty_true=n_true == 0,
    )


def compute_metrics(P: Mask3D, T: Mask3D, case_id: str = "") -> MetricsRow:
    """
    Duyarlılık |P∩T|/|T|, PPV |P∩T|/|P|, Dice 2|P∩T|/(|P|+|T|).

    Args:
        P: Tahmin maskesi
        T: Referans maske (aynı ızgara)
        case_id: Rapor satırı kimliği

    Returns:
        MetricsRow
    """
    P.check_grid(T, "metrik")
    p = P.foreground
    t = T.foreground
    return metrics_from_counts(int(p.sum()), int(t.sum()), int(np.count_nonzero(p & t)), case_id)


def dice_score(P: Mask3D, T: Mask3D) -> float:
    return compute_metrics(P, T).dice


@dataclass(frozen=True)
class MetricSummary:
    """Vakalar üzerinden ağırlıksız ortalama ± örneklem std"""

    n_cases: int
    mean: Dict[str, float]
    std: Dict[str, float]

    def to_dict(self) -> Dict:
        return {"n_cases": self.n_cases, "mean": self.mean, "std": self.std}

    def format(self, name: str) -> str:
        return f"{self.mean[name]:.4f} ± {self.std[name]:.4f}"


def summarize(rows: Iterable[MetricsRow], names: Optional[List[str]] = None) -> MetricSummary:
    rows = list(rows)
    names = list(names or METRIC_NAMES)
    mean: Dict[str, float] = {}
    std: Dict[str, float] = {}
    for name in names:
        values = np.array([getattr(r, name) for r in rows], dtype=np.float64)
        mean[name] = float(values.mean()) if len(values) else float("nan")
        std[name] = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    return MetricSummary(len(rows), mean, std)
