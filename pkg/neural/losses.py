"""
İkili çapraz entropi ve ağırlıklı Dice+BCE segmentasyon kaybı (gradyanlarıyla).
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config.settings import BCE_CLAMP
from models.schemas import LossParams
from utils.exceptions import ShapeMismatchError


def _clamped(p: np.ndarray) -> np.ndarray:
    return np.clip(np.asarray(p, dtype=np.float64), BCE_CLAMP, 1.0 - BCE_CLAMP)


def bce_terms(p: np.ndarray, t: np.ndarray) -> np.ndarray:
    pc = _clamped(p)
    t = np.asarray(t, dtype=np.float64)
    return -(t * np.log(pc) + (1.0 - t) * np.log(1.0 - pc))


def bce_sum(p: np.ndarray, t: np.ndarray) -> float:
    return float(bce_terms(p, t).sum())


def bce(p: np.ndarray, t: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Ortalama BCE ve p'ye göre gradyanı (log argümanları [1e-12, 1-1e-12]'ye kırpılır).
    """
    p = np.asarray(p, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if p.shape != t.shape:
        raise ShapeMismatchError(f"Tahmin {p.shape} ve hedef {t.shape} şekli uyuşmuyor")
    pc = _clamped(p)
    n = p.size
    grad = (-t / pc + (1.0 - t) / (1.0 - pc)) / n
    return float(bce_terms(p, t).mean()), grad


def soft_dice_loss(p: np.ndarray, t: np.ndarray, eps: float) -> Tuple[float, np.ndarray]:
    """1 − (2Σpt + ε) / (Σp + Σt + ε) ve gradyanı"""
    p = np.asarray(p, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    inter = float((p * t).sum())
    denom = float(p.sum() + t.sum()) + eps
    numer = 2.0 * inter + eps
    grad = -(2.0 * t * denom - numer) / denom ** 2
    return 1.0 - numer / denom, grad


@dataclass(frozen=True)
class SegLoss:
    """Toplam kayıp, sınıf başına terimler ve tahminlere göre gradyanlar"""

    total: float
    dice_liver: float
    dice_tumor: float
    bce_liver: float
    bce_tumor: float
    grad_liver: np.ndarray
    grad_tumor: np.ndarray


def seg_loss(
    p_liver: np.ndarray,
    p_tumor: np.ndarray,
    t_liver: np.ndarray,
    t_tumor: np.ndarray,
    params: Optional[LossParams] = None,
) -> SegLoss:
    """
    L = Σ_c w_c (λ_Dice·L_Dice^c + λ_BCE·L_BCE^c), c ∈ {karaciğer, tümör}.

    Args:
        p_liver, p_tumor: (0, 1) aralığında tahminler
        t_liver, t_tumor: İkili hedefler (aynı şekil)
        params: λ'lar, sınıf ağırlıkları ve ε

    Returns:
        SegLoss
    """
    params = params or LossParams()
    shapes = {np.shape(a) for a in (p_liver, p_tumor, t_liver, t_tumor)}
    if len(shapes) != 1:
        raise ShapeMismatchError(f"Kayıp girdilerinin şekilleri uyuşmuyor: {sorted(shapes)}")

    terms = {}
    grads = {}
    for cls, p, t, w in (("liver", p_liver, t_liver, params.w_liver), ("tumor", p_tumor, t_tumor, params.w_tumor)):
        d_loss, d_grad = soft_dice_loss(p, t, params.eps)
        b_loss, b_grad = bce(p, t)
        terms[cls] = (d_loss, b_loss)
        grads[cls] = w * (params.lambda_dice * d_grad + params.lambda_bce * b_grad)

    total = sum(
        w * (params.lambda_dice * terms[c][0] + params.lambda_bce * terms[c][1])
        for c, w in (("liver", params.w_liver), ("tumor", params.w_tumor))
    )
    return SegLoss(
        total=float(total),
        dice_liver=terms["liver"][0],
        dice_tumor=terms["tumor"][0],
        bce_liver=terms["liver"][1],
        bce_tumor=terms["tumor"][1],
        grad_liver=grads["liver"],
        grad_tumor=grads["tumor"],
    )
