"""
Sabit ve yinelenen özellik filtreleri.
"""

import logging
from typing import List, Optional

import numpy as np

from config.settings import DCOR_MAX, DCOR_MAX_ROWS, NZV_EPS, PEARSON_MAX
from utils.exceptions import InsufficientDataError
from utils.rng import stream

logger = logging.getLogger(__name__)


def drop_near_zero_variance(X: np.ndarray, eps: float = NZV_EPS) -> List[int]:
    """Varyansı eps'ten küçük olmayan sütunların indisleri"""
    variances = np.asarray(X, dtype=np.float64).var(axis=0)
    return [int(i) for i in np.flatnonzero(variances >= eps)]


def double_centered_distances(x: np.ndarray) -> np.ndarray:
    """A_ij = a_ij − ā_i· − ā_·j + ā_··, a_ij = |x_i − x_j|"""
    x = np.asarray(x, dtype=np.float64)
    a = np.abs(x[:, None] - x[None, :])
    row = a.mean(axis=1)
    return a - row[:, None] - row[None, :] + a.mean()


def distance_correlation(x: np.ndarray, y: np.ndarray) -> float:
    """Örnek mesafe korelasyonu (tanımdaki çift merkezlenmiş matrislerle)"""
    A = double_centered_distances(x)
    B = double_centered_distances(y)
    dcov = max(float((A * B).mean()), 0.0)
    denom = np.sqrt(float((A * A).mean()) * float((B * B).mean()))
    return float(np.sqrt(dcov / denom)) if denom > 0 else 0.0


class _CenteredCache:
    """Tutulan sütunların düzleştirilmiş çift merkezli matrisleri (büyüyen tampon)"""

    def __init__(self, width: int):
        self.buffer = np.empty((8, width), dtype=np.float64)
        self.dvar = np.empty(8, dtype=np.float64)
        self.size = 0

    def add(self, flat: np.ndarray, dvar: float) -> None:
        if self.size == len(self.buffer):
            self.buffer = np.vstack([self.buffer, np.empty_like(self.buffer)])
            self.dvar = np.concatenate([self.dvar, np.empty_like(self.dvar)])
        self.buffer[self.size] = flat
        self.dvar[self.size] = dvar
        self.size += 1

    def correlations(self, flat: np.ndarray, dvar: float) -> np.ndarray:
        if self.size == 0:
            return np.zeros(0)
        n2 = flat.size
        dcov = np.clip(self.buffer[: self.size] @ flat / n2, 0.0, None)
        denom = np.sqrt(self.dvar[: self.size] * dvar)
        return np.sqrt(np.divide(dcov, denom, out=np.zeros_like(dcov), where=denom > 0))


def drop_correlated(
    X: np.ndarray,
    pearson_max: float = PEARSON_MAX,
    dcor_max: float = DCOR_MAX,
    seed: int = 0,
    max_rows: int = DCOR_MAX_ROWS,
) -> List[int]:
    """
    Açgözlü yinelenen özellik temizliği (manifesto sırasında, ilk gelen kalır).

    Sütun j, daha önce tutulan herhangi bir k ile |Pearson| > pearson_max
    veya dCor > dcor_max ise atılır. Satır sayısı max_rows'u aşarsa dCor,
    tohumlu bir satır alt örnekleminde hesaplanır.

    Returns:
        Tutulan sütun indisleri
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    if n < 3:
        raise InsufficientDataError("Korelasyon filtresi için en az 3 satır gerekli")
    with np.errstate(invalid="ignore", divide="ignore"):
        pearson = np.corrcoef(X, rowvar=False)
    pearson = np.nan_to_num(np.atleast_2d(pearson), nan=0.0)

    rows = np.arange(n)
    if n > max_rows:
        rows = np.sort(stream(seed, "dcor-rows").choice(n, size=max_rows, replace=False))
        logger.debug(f"dCor için {n} satırdan {max_rows} alt örnek seçildi")
    sub = X[rows]

    kept: List[int] = []
    cache = _CenteredCache(len(rows) ** 2)
    for j in range(d):
        if kept and (np.abs(pearson[j, kept]) > pearson_max).any():
            continue
        A = double_centered_distances(sub[:, j]).ravel()
        dvar = float(A @ A) / A.size
        if (cache.correlations(A, dvar) > dcor_max).any():
            continue
        kept.append(j)
        cache.add(A, dvar)
    logger.info(f"Korelasyon filtresi: {d} sütundan {len(kept)} tutuldu")
    return kept
