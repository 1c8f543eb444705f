"""
Otsu uyarlamalı eşikleme.

Olasılık haritaları 8-bit seviyeye ölçeklenir, hacim başına histogram
çıkarılır ve sınıflar arası varyansı en büyükleyen τ* seçilir.
Ön plan: seviye > τ*.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from config.settings import HISTOGRAM_LEVELS, NORMALIZED_MAX, OTSU_MAX_TAU
from models.volume import Mask3D, ProbMap3D
from utils.exceptions import ConfigError, DegenerateHistogramError, ShapeMismatchError

logger = logging.getLogger(__name__)

BinarizeMode = Literal["otsu", "fixed"]


@dataclass(frozen=True)
class Histogram256:
    """256 seviyeli histogram"""

    counts: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.float64)
        if counts.shape != (HISTOGRAM_LEVELS,):
            raise ShapeMismatchError(f"Histogram uzunluğu {HISTOGRAM_LEVELS} olmalı: {counts.shape}")
        if not np.isfinite(counts).all() or (counts < 0).any():
            raise DegenerateHistogramError("Histogram sayıları sonlu ve negatif olmayan değerler olmalı")
        if self.normalized and abs(counts.sum() - 1.0) > 1e-12:
            raise DegenerateHistogramError(f"Normalize histogram toplamı 1 değil: {counts.sum()}")
        object.__setattr__(self, "counts", counts)

    def normalize(self) -> "Histogram256":
        total = self.counts.sum()
        if total <= 0:
            raise DegenerateHistogramError("Boş histogram normalize edilemez")
        return Histogram256(self.counts / total, normalized=True)


@dataclass(frozen=True)
class OtsuResult:
    """τ* ve o noktadaki sınıf istatistikleri"""

    tau_star: int
    omega0: float
    omega1: float
    mu0: float
    mu1: float
    variance: float


def prob_to_levels(p: np.ndarray) -> np.ndarray:
    """[0,1] olasılıkları 0..255 tam sayı seviyelere (0.5 yukarı yuvarlanır)"""
    return np.floor(np.asarray(p, dtype=np.float64) * NORMALIZED_MAX + 0.5).astype(np.int64)


def histogram_from_levels(levels: np.ndarray) -> Histogram256:
    """0..255 seviyelerden sayım histogramı"""
    levels = np.asarray(levels).ravel()
    if levels.size and (levels.min() < 0 or levels.max() >= HISTOGRAM_LEVELS):
        raise ShapeMismatchError("Seviyeler 0..255 aralığında olmalı")
    return Histogram256(np.bincount(levels.astype(np.int64), minlength=HISTOGRAM_LEVELS))


def between_class_variance(h: Histogram256) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    τ = 0..254 için ω0, ω1, μ0, μ1 ve σ_B² dizileri.
    Boş sınıf içeren τ değerlerinde varyans 0 kabul edilir.
    """
    p = h.normalize().counts
    k = np.arange(HISTOGRAM_LEVELS, dtype=np.float64)
    kp = k * p

    omega0 = np.cumsum(p)[: OTSU_MAX_TAU + 1]
    sum0 = np.cumsum(kp)[: OTSU_MAX_TAU + 1]
    # üst sınıf toplamları sağdan biriktirilir; boş kuyruk tam 0 olur
    omega1 = np.cumsum(p[::-1])[::-1][1:]
    sum1 = np.cumsum(kp[::-1])[::-1][1:]

    valid = (omega0 > 0) & (omega1 > 0)
    mu0 = np.divide(sum0, omega0, out=np.zeros_like(sum0), where=valid)
    mu1 = np.divide(sum1, omega1, out=np.zeros_like(sum1), where=valid)
    variance = np.where(valid, omega0 * omega1 * (mu0 - mu1) ** 2, 0.0)
    return omega0, omega1, mu0, mu1, variance


def otsu_threshold(h: Histogram256) -> OtsuResult:
    """
    Sınıflar arası varyansı en büyükleyen eşik.

    Args:
        h: 256 seviyeli histogram (ham sayım veya normalize)

    Returns:
        OtsuResult: eşitlikte en küçük τ
    """
    if np.count_nonzero(h.counts) < 2:
        raise DegenerateHistogramError(
            f"Otsu için en az 2 dolu seviye gerekli, bulunan: {np.count_nonzero(h.counts)}"
        )
    omega0, omega1, mu0, mu1, variance = between_class_variance(h)
    tau = int(np.argmax(variance))
    return OtsuResult(
        tau_star=tau,
        omega0=float(omega0[tau]),
        omega1=float(omega1[tau]),
        mu0=float(mu0[tau]),
        mu1=float(mu1[tau]),
        variance=float(variance[tau]),
    )


def otsu_for_prob(p: ProbMap3D) -> OtsuResult:
    """Olasılık haritasının hacim başına Otsu eşiği"""
    return otsu_threshold(histogram_from_levels(prob_to_levels(p.data)))


def binarize_with_result(
    p: ProbMap3D,
    mode: BinarizeMode = "otsu",
    tau: int = 127,
) -> Tuple[Mask3D, Optional[OtsuResult]]:
    """
    Olasılık haritasını ikili maskeye çevir.

    Args:
        p: Olasılık haritası
        mode: "otsu" (hacim başına) veya "fixed"
        tau: Sabit mod eşiği (0..254)

    Returns:
        (maske, Otsu sonucu veya None)
    """
    levels = prob_to_levels(p.data)
    if mode == "otsu":
        result = otsu_threshold(histogram_from_levels(levels))
        tau = result.tau_star
    elif mode == "fixed":
        if not 0 <= tau <= OTSU_MAX_TAU:
            raise ConfigError(f"Sabit eşik 0..{OTSU_MAX_TAU} aralığında olmalı: {tau}")
        result = None
    else:
        raise ConfigError(f"Bilinmeyen eşikleme modu: {mode}")
    logger.debug(f"Eşikleme: mod={mode} tau={tau}")
    return Mask3D((levels > tau).astype(np.uint8), p.spacing), result


def binarize(p: ProbMap3D, mode: BinarizeMode = "otsu", tau: int = 127) -> Mask3D:
    """Olasılık haritası → ikili maske (seviye > τ)"""
    return binarize_with_result(p, mode, tau)[0]


@dataclass(frozen=True)
class ChannelMasks:
    liver: Mask3D
    tumor: Mask3D
    liver_otsu: Optional[OtsuResult]
    tumor_otsu: Optional[OtsuResult]


def binarize_channels(
    p_liver: ProbMap3D,
    p_tumor: ProbMap3D,
    mode: BinarizeMode = "otsu",
    tau: int = 127,
) -> ChannelMasks:
    """Karaciğer ve tümör kanallarına bağımsız eşikleme"""
    p_liver.check_grid(p_tumor, "tümör olasılık haritası")
    liver, liver_otsu = binarize_with_result(p_liver, mode, tau)
    tumor, tumor_otsu = binarize_with_result(p_tumor, mode, tau)
    return ChannelMasks(liver, tumor, liver_otsu, tumor_otsu)
