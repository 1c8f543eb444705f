"""
Yoğunluk tabanlı özellikler: birinci derece istatistikler, gradyan
büyüklüğü ve moment değişmezleri.
"""

from typing import Tuple

import numpy as np
from scipy import ndimage

from config.settings import FIRST_ORDER_BINS, GAUSSIAN_TRUNCATE

FIRST_ORDER_NAMES = (
    "min", "max", "range", "mean", "median", "mode", "std", "variance",
    "mad", "robust_mad", "skewness", "kurtosis", "energy", "total_energy",
    "entropy", "uniformity", "rms", "cv",
    "p5", "p10", "p25", "p75", "p90", "p95", "iqr", "p90_p10", "qcd",
    "bin_entropy", "bin_energy", "bin_max_frequency", "bin_nonempty",
    "bin_skewness", "bin_kurtosis", "bin_mean_index",
)

GRADIENT_NAMES = ("mean", "std")
MOMENT_NAMES = ("J1", "J2", "J3")


def _standard_moments(x: np.ndarray) -> Tuple[float, float, float, float]:
    """(ortalama, popülasyon std, çarpıklık, basıklık); std = 0 ise çarpıklık/basıklık 0"""
    mean = float(x.mean())
    centered = x - mean
    var = float((centered ** 2).mean())
    std = float(np.sqrt(var))
    if std == 0.0:
        return mean, 0.0, 0.0, 0.0
    skewness = float((centered ** 3).mean() / std ** 3)
    kurtosis = float((centered ** 4).mean() / var ** 2)
    return mean, std, skewness, kurtosis


def _entropy_of_counts(counts: np.ndarray) -> Tuple[float, float]:
    """(entropi [bit], tekdüzelik Σp²)"""
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum()), float((p ** 2).sum())


def first_order_statistics(
    values: np.ndarray,
    bins: np.ndarray,
    voxel_volume: float,
    n_bins: int = FIRST_ORDER_BINS,
) -> np.ndarray:
    """
    34 birinci derece özellik.

    Args:
        values: Bölge voksel değerleri
        bins: Aynı sırada kutu indisleri (0..n_bins−1)
        voxel_volume: Voksel hacmi (mm³), toplam enerji için
        n_bins: Kutu sayısı

    Returns:
        FIRST_ORDER_NAMES sırasında dizi
    """
    x = np.asarray(values, dtype=np.float64)
    lo, hi = float(x.min()), float(x.max())
    mean, std, skewness, kurtosis = _standard_moments(x)
    unique, counts = np.unique(x, return_counts=True)
    mode = float(unique[np.argmax(counts)])
    entropy, uniformity = _entropy_of_counts(counts)
    mad = float(np.abs(x - mean).mean())

    p5, p10, p25, p75, p90, p95 = (float(v) for v in np.percentile(x, [5, 10, 25, 75, 90, 95]))
    robust = x[(x >= p10) & (x <= p90)]
    robust_mad = float(np.abs(robust - robust.mean()).mean())
    energy = float((x ** 2).sum())
    qcd = (p75 - p25) / (p75 + p25) if (p75 + p25) != 0 else 0.0

    b = np.asarray(bins, dtype=np.int64)
    hist = np.bincount(b, minlength=n_bins).astype(np.float64)
    bin_entropy, bin_energy = _entropy_of_counts(hist)
    _, _, bin_skewness, bin_kurtosis = _standard_moments(b.astype(np.float64))

    return np.array([
        lo, hi, hi - lo, mean, float(np.median(x)), mode, std, std ** 2,
        mad, robust_mad, skewness, kurtosis, energy, energy * voxel_volume,
        entropy, uniformity, float(np.sqrt(energy / x.size)), std / mean if mean != 0 else 0.0,
        p5, p10, p25, p75, p90, p95, p75 - p25, p90 - p10, qcd,
        bin_entropy, bin_energy, float(hist.max() / hist.sum()), float(np.count_nonzero(hist)),
        bin_skewness, bin_kurtosis, float(b.mean()),
    ], dtype=np.float64)


def gradient_margin(sigma: float) -> int:
    """Yerel kırpmanın tam sonuç vermesi için gereken kenar payı"""
    return int(GAUSSIAN_TRUNCATE * sigma + 0.5) + 1


def gradient_statistics(
    image: np.ndarray,
    mask: np.ndarray,
    spacing: Tuple[float, float, float],
    sigma: float,
) -> np.ndarray:
    """
    Gauss ile yumuşatılmış merkezi fark gradyan büyüklüğünün (ortalama, std).

    Args:
        image: Yerel kırpma (gradient_margin kadar pay ile)
        mask: Bölge maskesi (aynı şekil)
        spacing: Fiziksel aralık; gradyan mm başına
        sigma: Voksel biriminde Gauss σ
    """
    smoothed = ndimage.gaussian_filter(
        np.asarray(image, dtype=np.float64), sigma=sigma, mode="nearest", truncate=GAUSSIAN_TRUNCATE
    )
    magnitude_sq = np.zeros_like(smoothed)
    for axis, step in enumerate(spacing):
        if smoothed.shape[axis] < 2:
            continue
        magnitude_sq += np.gradient(smoothed, step, axis=axis) ** 2
    magnitude = np.sqrt(magnitude_sq[mask])
    return np.array([magnitude.mean(), magnitude.std()], dtype=np.float64)


def moment_invariants_of(coords: np.ndarray, values: np.ndarray) -> np.ndarray:
    """
    Yoğunluk ağırlıklı merkezi ikinci moment matrisinin değişmezleri.

    Ağırlık |değer|; toplam ağırlık 0 ise tekdüze ağırlık kullanılır.
    Koordinatlar voksel birimindedir.

    Returns:
        (J1 = iz, J2 = ana 2×2 minörler toplamı, J3 = determinant)
    """
    x = np.asarray(coords, dtype=np.float64)
    w = np.abs(np.asarray(values, dtype=np.float64))
    if w.sum() == 0:
        w = np.ones_like(w)
    w = w / w.sum()
    centroid = w @ x
    centered = x - centroid
    M = (centered * w[:, None]).T @ centered
    j1 = float(np.trace(M))
    j2 = float((j1 ** 2 - np.trace(M @ M)) / 2.0)
    j3 = float(np.linalg.det(M))
    return np.array([j1, j2, j3], dtype=np.float64)
