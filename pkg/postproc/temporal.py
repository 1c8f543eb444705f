"""
Üç kesitlik zamansal tutarlılık kuralı.

    ỹ = 1  eğer y = 1
    ỹ = 1  eğer y = 0, y_{z−1} = 1, y_{z+1} = 1 ve (p_{z−1} + p_{z+1}) / 2 > 0.6
    ỹ = 0  aksi halde

İlk ve son kesit değişmeden geçer. Kural girdinin z±1 kesitlerini okur,
kendi çıktısını okumaz.
"""

import logging

import numpy as np

from config.settings import RESTORE_PROB_THRESHOLD
from models.volume import Mask3D, ProbMap3D

logger = logging.getLogger(__name__)


def temporal_refine(
    y: Mask3D,
    p: ProbMap3D,
    suppress_isolated: bool = False,
    threshold: float = RESTORE_PROB_THRESHOLD,
) -> Mask3D:
    """
    Komşu kesit desteğiyle voksel geri kazanımı.

    Args:
        y: Eşiklenmiş maske
        p: Eşikleme öncesi olasılık haritası
        suppress_isolated: True ise iki komşusu da 0 olan ön plan vokselleri silinir
        threshold: Geri kazanım eşiği (kesin büyüktür)

    Returns:
        Mask3D
    """
    y.check_grid(p, "olasılık haritası")
    labels = y.data
    out = labels.copy()
    if labels.shape[2] < 3:
        return y.with_data(out)

    prev, cur, nxt = labels[:, :, :-2], labels[:, :, 1:-1], labels[:, :, 2:]
    avg = (p.data[:, :, :-2] + p.data[:, :, 2:]) / 2.0
    restore = (cur == 0) & (prev == 1) & (nxt == 1) & (avg > threshold)
    inner = out[:, :, 1:-1]
    inner[restore] = 1

    suppressed = 0
    if suppress_isolated:
        isolated = (cur == 1) & (prev == 0) & (nxt == 0)
        inner[isolated] = 0
        suppressed = int(isolated.sum())

    logger.debug(f"Zamansal düzeltme: {int(restore.sum())} voksel geri kazanıldı, {suppressed} bastırıldı")
    return y.with_data(out)
