"""
Tek seviyeli 3B Haar dalgacık ayrışımı (ortonormal, eksen başına 1/√2).
"""

from typing import Dict

import numpy as np
import pywt

from config.settings import WAVELET_BANDS

_WAVELET = "haar"
_MODE = "periodization"


def _pywt_key(band: str) -> str:
    # L → yaklaşım (a), H → detay (d); eksen sırası x, y, z
    return band.replace("L", "a").replace("H", "d")


def pad_to_even(volume: np.ndarray) -> np.ndarray:
    """Tek boyutları sonda simetrik yansıtma ile çift yap"""
    pad = [(0, n % 2) for n in volume.shape]
    if not any(p for _, p in pad):
        return volume
    return np.pad(volume, pad, mode="symmetric")


def wavelet_subbands(volume: np.ndarray) -> Dict[str, np.ndarray]:
    """
    8 alt bant (LLL ... HHH).

    Args:
        volume: Her eksende en az 2 voksel olan kırpma

    Returns:
        Bant adı → yarı çözünürlüklü dizi
    """
    data = pad_to_even(np.asarray(volume, dtype=np.float64))
    coeffs = pywt.dwtn(data, _WAVELET, mode=_MODE)
    return {band: coeffs[_pywt_key(band)] for band in WAVELET_BANDS}


def inverse_wavelet(bands: Dict[str, np.ndarray]) -> np.ndarray:
    """Alt bantlardan geri çatım (çift boyutlu girdiler için tam)"""
    coeffs = {_pywt_key(band): np.asarray(bands[band], dtype=np.float64) for band in WAVELET_BANDS}
    return pywt.idwtn(coeffs, _WAVELET, mode=_MODE)


def downsample_mask(mask: np.ndarray) -> np.ndarray:
    """Çift boyutlu maskede 2×2×2 blokların herhangi biri doluysa 1"""
    mask = pad_to_even(np.asarray(mask, dtype=bool))
    nx, ny, nz = mask.shape
    return mask.reshape(nx // 2, 2, ny // 2, 2, nz // 2, 2).any(axis=(1, 3, 5))
