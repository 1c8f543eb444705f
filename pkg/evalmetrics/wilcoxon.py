"""
Eşleştirilmiş Wilcoxon işaretli sıra testi.

Sıfır farklar atılır, eşitlikler ortalama sıra alır. n ≤ 25 için tam
dağılım (alt küme toplamı dinamik programlaması), üstünde eşitlik
düzeltmeli normal yaklaşım.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import norm, rankdata

from config.settings import WILCOXON_EXACT_MAX_N, WILCOXON_MIN_N
from utils.exceptions import InsufficientDataError


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # pozitif farkların sıra toplamı W+
    p_value: float
    n: int
    method: str


def exact_null_counts(doubled_ranks: np.ndarray) -> np.ndarray:
    """2·sıra tam sayıları için her W+ (×2) değerine düşen işaret deseni sayısı"""
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in doubled_ranks:
        r = int(r)
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    return counts


def wilcoxon_signed_rank(diffs: Sequence[float]) -> WilcoxonResult:
    """
    Args:
        diffs: Eşleştirilmiş farklar

    Returns:
        WilcoxonResult (iki yönlü p)
    """
    d = np.asarray(diffs, dtype=np.float64)
    d = d[d != 0]
    n = len(d)
    if n < WILCOXON_MIN_N:
        raise InsufficientDataError(f"Wilcoxon için en az {WILCOXON_MIN_N} sıfırdan farklı fark gerekli, gelen {n}")
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())

    if n <= WILCOXON_EXACT_MAX_N:
        doubled = np.round(2 * ranks).astype(np.int64)
        counts = exact_null_counts(doubled)
        w2 = int(round(2 * w_plus))
        total = counts.sum()
        lower = counts[: w2 + 1].sum() / total
        upper = counts[w2:].sum() / total
        p = min(1.0, 2.0 * min(lower, upper))
        return WilcoxonResult(w_plus, float(p), n, "exact")

    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float((tie_counts ** 3 - tie_counts).sum()) / 48.0
    z = (w_plus - mean) / np.sqrt(var) if var > 0 else 0.0
    p = min(1.0, 2.0 * float(norm.sf(abs(z))))
    return WilcoxonResult(w_plus, p, n, "normal")
