"""
Ön işleme: HU penceresi, izotropik yeniden örnekleme, kırpma/doldurma.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from config.settings import HU_AIR, HU_WINDOW, NORMALIZED_MAX
from models.volume import GridField, Mask3D, ProbMap3D, ValueKind, Volume3D
from utils.exceptions import ConfigError, VolumeFormatError

logger = logging.getLogger(__name__)


def round_half_up(x: np.ndarray) -> np.ndarray:
    """0.5 yukarı yuvarlama (numpy'nin çifte yuvarlaması yerine)"""
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5)


def clip_rescale_hu(v: Volume3D, window: Tuple[float, float] = HU_WINDOW) -> Volume3D:
    """
    HU penceresini [0, 255] aralığına doğrusal ölçekle.

    out = round(255 · (clamp(in, lo, hi) − lo) / (hi − lo))

    Çıktı normalized-8bit türündedir; ikinci kez uygulanması ValueKindError
    verir, yani işlem tek uygulamadan sonra sabittir.
    """
    v.require_kind(ValueKind.HU_FLOAT)
    lo, hi = window
    clipped = np.clip(v.data, lo, hi)
    levels = round_half_up(NORMALIZED_MAX * (clipped - lo) / (hi - lo))
    return Volume3D(levels.astype(np.uint8), v.spacing, ValueKind.NORMALIZED_8BIT)


def resampled_dims(dims: Sequence[int], spacing: Sequence[float], target: float) -> Tuple[int, int, int]:
    out = tuple(int(round_half_up(n * s / target)) for n, s in zip(dims, spacing))
    if min(out) <= 0:
        raise VolumeFormatError(f"Hedef aralık {target} mm çok büyük, boyut sıfıra iniyor: {out}")
    return out


def resample_isotropic(v: GridField, target_spacing: float) -> GridField:
    """
    Üç doğrusal (trilinear) interpolasyonla izotropik aralığa getir.

    Yeni voksel i'nin merkezi eski ızgarada i·target/eski_aralık koordinatına
    düşer; sınır dışı koordinatlar en yakın kenar değerine kenetlenir.
    Maskeler en yakın komşu ile örneklenir.

    Args:
        v: Kaynak alan
        target_spacing: Hedef aralık (mm, > 0)

    Returns:
        Aynı tipte yeni alan
    """
    if not target_spacing > 0:
        raise ConfigError(f"Hedef aralık pozitif olmalı: {target_spacing}")
    target = float(target_spacing)
    if all(s == target for s in v.spacing):
        return v

    new_dims = resampled_dims(v.dims, v.spacing, target)
    axes = [np.arange(n, dtype=np.float64) * target / s for n, s in zip(new_dims, v.spacing)]
    coords = np.stack(np.meshgrid(*axes, indexing="ij"))
    order = 0 if isinstance(v, Mask3D) else 1
    out = ndimage.map_coordinates(v.data.astype(np.float64), coords, order=order, mode="nearest")
    spacing = (target, target, target)
    logger.debug(f"Yeniden örnekleme: {v.dims}@{v.spacing} -> {new_dims}@{spacing}")

    if isinstance(v, Mask3D):
        return Mask3D(out.astype(np.uint8), spacing)
    if isinstance(v, ProbMap3D):
        return ProbMap3D(np.clip(out, 0.0, 1.0), spacing)
    if isinstance(v, Volume3D) and v.value_kind is ValueKind.NORMALIZED_8BIT:
        levels = np.clip(round_half_up(out), 0, NORMALIZED_MAX).astype(np.uint8)
        return Volume3D(levels, spacing, ValueKind.NORMALIZED_8BIT)
    return type(v)(out, spacing)


def default_fill(v: GridField) -> float:
    """Türün en küçük değeri (HU için hava)"""
    if isinstance(v, Volume3D) and v.value_kind is ValueKind.HU_FLOAT:
        return HU_AIR
    return 0.0


def crop_or_pad(
    v: GridField,
    bbox: Tuple[Sequence[int], Sequence[int]],
    fill: Optional[float] = None,
) -> GridField:
    """
    Açık bir bbox'a kırp veya doldur.

    Args:
        v: Kaynak alan
        bbox: (alt köşe dahil, üst köşe hariç); hacim dışına taşabilir
        fill: Taşan bölgenin değeri (None: türün en küçüğü)

    Returns:
        Boyutu (üst − alt) olan aynı tipte alan
    """
    lo = np.asarray(bbox[0], dtype=np.int64)
    hi = np.asarray(bbox[1], dtype=np.int64)
    if lo.shape != (3,) or hi.shape != (3,) or (hi <= lo).any():
        raise ConfigError(f"Geçersiz bbox: {bbox}")
    fill = default_fill(v) if fill is None else fill

    out = np.full(tuple(hi - lo), fill, dtype=v.data.dtype)
    src_lo = np.maximum(lo, 0)
    src_hi = np.minimum(hi, v.dims)
    if (src_hi > src_lo).all():
        src = tuple(slice(a, b) for a, b in zip(src_lo, src_hi))
        dst = tuple(slice(a - o, b - o) for a, b, o in zip(src_lo, src_hi, lo))
        out[dst] = v.data[src]

    if isinstance(v, Volume3D):
        return Volume3D(out, v.spacing, v.value_kind)
    return type(v)(out, v.spacing)
