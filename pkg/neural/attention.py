"""
Uzamsal dikkat kapısı: α = σ(ψᵀ δ(W_x x + W_g g + b)), çıkış α ⊙ x.

Haritalar (C, H, W) düzenindedir; g, x'in uzamsal boyutuna bilineer
(köşe hizalı) olarak yeniden örneklenir.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import expit

from utils.exceptions import ShapeMismatchError
from utils.rng import stream


def bilinear_matrix(n_in: int, n_out: int) -> np.ndarray:
    """
    (n_out, n_in) köşe hizalı doğrusal interpolasyon matrisi.
    Transpozu yeniden örneklemenin eşleniğidir.
    """
    R = np.zeros((n_out, n_in))
    if n_in == 1 or n_out == 1:
        R[:, 0] = 1.0
        return R
    pos = np.arange(n_out) * (n_in - 1) / (n_out - 1)
    lo = np.minimum(np.floor(pos).astype(int), n_in - 2)
    frac = pos - lo
    R[np.arange(n_out), lo] = 1.0 - frac
    R[np.arange(n_out), lo + 1] += frac
    return R


def resample_bilinear(g: np.ndarray, size: Tuple[int, int]) -> np.ndarray:
    """(C, h, w) → (C, H, W)"""
    Ry = bilinear_matrix(g.shape[1], size[0])
    Rx = bilinear_matrix(g.shape[2], size[1])
    return np.einsum("Hh,chw,Ww->cHW", Ry, g, Rx)


def resample_bilinear_adjoint(grad: np.ndarray, size: Tuple[int, int]) -> np.ndarray:
    """resample_bilinear'ın eşleniği: (C, H, W) → (C, h, w)"""
    Ry = bilinear_matrix(size[0], grad.shape[1])
    Rx = bilinear_matrix(size[1], grad.shape[2])
    return np.einsum("Hh,cHW,Ww->chw", Ry, grad, Rx)


@dataclass
class AttentionGateParams:
    """W_x: (F, Cx), W_g: (F, Cg), b: (F,), psi: (F,)"""

    W_x: np.ndarray
    W_g: np.ndarray
    b: np.ndarray
    psi: np.ndarray

    @property
    def channels(self) -> Tuple[int, int]:
        return self.W_x.shape[1], self.W_g.shape[1]

    @classmethod
    def random(cls, cx: int, cg: int, inter: int, seed: int = 0) -> "AttentionGateParams":
        rng = stream(seed, "attention")
        return cls(
            W_x=rng.normal(0.0, np.sqrt(2.0 / cx), size=(inter, cx)),
            W_g=rng.normal(0.0, np.sqrt(2.0 / cg), size=(inter, cg)),
            b=rng.normal(0.0, 0.1, size=inter),
            psi=rng.normal(0.0, np.sqrt(2.0 / inter), size=inter),
        )

    @classmethod
    def zeros(cls, cx: int, cg: int, inter: int) -> "AttentionGateParams":
        return cls(np.zeros((inter, cx)), np.zeros((inter, cg)), np.zeros(inter), np.zeros(inter))


@dataclass
class AttentionResult:
    output: np.ndarray
    alpha: np.ndarray
    cache: Optional[Dict[str, np.ndarray]] = None


def attention_gate(x: np.ndarray, g: np.ndarray, params: AttentionGateParams) -> AttentionResult:
    """
    Args:
        x: (Cx, H, W) atlama bağlantısı özellikleri
        g: (Cg, h, w) kapı sinyali
        params: Karıştırma ağırlıkları

    Returns:
        AttentionResult (output = α ⊙ x, α ∈ [0, 1])
    """
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    cx, cg = params.channels
    if x.ndim != 3 or g.ndim != 3 or x.shape[0] != cx or g.shape[0] != cg:
        raise ShapeMismatchError(f"Kanal uyuşmazlığı: x {x.shape}, g {g.shape}, parametreler ({cx}, {cg})")
    gu = resample_bilinear(g, x.shape[1:])
    q = (
        np.einsum("fc,chw->fhw", params.W_x, x)
        + np.einsum("fc,chw->fhw", params.W_g, gu)
        + params.b[:, None, None]
    )
    a = np.maximum(q, 0.0)
    alpha = expit(np.einsum("f,fhw->hw", params.psi, a))
    cache = {"x": x, "g": g, "gu": gu, "q": q, "a": a, "alpha": alpha}
    return AttentionResult(alpha[None] * x, alpha, cache)


def attention_gate_backward(
    grad_out: np.ndarray,
    result: AttentionResult,
    params: AttentionGateParams,
) -> Tuple[np.ndarray, np.ndarray, AttentionGateParams]:
    """
    Returns:
        (dx, dg, parametre gradyanları)
    """
    c = result.cache
    x, alpha, a, q = c["x"], c["alpha"], c["a"], c["q"]
    d_alpha = np.einsum("chw,chw->hw", grad_out, x)
    d_s = d_alpha * alpha * (1.0 - alpha)
    d_psi = np.einsum("hw,fhw->f", d_s, a)
    d_q = params.psi[:, None, None] * d_s[None] * (q > 0)
    dx = alpha[None] * grad_out + np.einsum("fc,fhw->chw", params.W_x, d_q)
    d_gu = np.einsum("fc,fhw->chw", params.W_g, d_q)
    dg = resample_bilinear_adjoint(d_gu, c["g"].shape[1:])
    grads = AttentionGateParams(
        W_x=np.einsum("fhw,chw->fc", d_q, x),
        W_g=np.einsum("fhw,chw->fc", d_q, c["gu"]),
        b=d_q.sum(axis=(1, 2)),
        psi=d_psi,
    )
    return dx, dg, grads
