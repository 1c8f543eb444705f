"""
Alt-piksel yeniden düzenleme.

out[c, h·r + i, w·r + j] = x[c·r² + i·r + j, h, w]
"""

import numpy as np

from utils.exceptions import ShapeMismatchError


def pixel_shuffle(x: np.ndarray, r: int = 2) -> np.ndarray:
    """(C, H, W) → (C/r², rH, rW)"""
    x = np.asarray(x)
    if x.ndim != 3:
        raise ShapeMismatchError(f"(C, H, W) bekleniyordu, gelen {x.shape}")
    C, H, W = x.shape
    if r < 1 or C % (r * r):
        raise ShapeMismatchError(f"Kanal sayısı {C}, r²={r * r} ile bölünmüyor")
    c = C // (r * r)
    return x.reshape(c, r, r, H, W).transpose(0, 3, 1, 4, 2).reshape(c, H * r, W * r)


def pixel_unshuffle(x: np.ndarray, r: int = 2) -> np.ndarray:
    """(C, rH, rW) → (C·r², H, W)"""
    x = np.asarray(x)
    if x.ndim != 3:
        raise ShapeMismatchError(f"(C, H, W) bekleniyordu, gelen {x.shape}")
    C, H, W = x.shape
    if r < 1 or H % r or W % r:
        raise ShapeMismatchError(f"Uzamsal boyutlar {H}x{W}, r={r} ile bölünmüyor")
    h, w = H // r, W // r
    return x.reshape(C, h, r, w, r).transpose(0, 2, 4, 1, 3).reshape(C * r * r, h, w)
