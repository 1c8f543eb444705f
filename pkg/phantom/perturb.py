"""
Sağlamlık deneyleri için yoğunluk bozulması: v' = ölçek·v + N(0, σ²).
"""

import logging

import numpy as np

from config.settings import PERTURB_MAX_SIGMA_HU, PERTURB_SCALE_RANGE
from models.volume import ValueKind, Volume3D
from utils.exceptions import PerturbationRangeError
from utils.rng import stream

logger = logging.getLogger(__name__)


def perturb(ct: Volume3D, noise_sigma_hu: float, intensity_scale: float, seed: int) -> Volume3D:
    """
    Args:
        ct: HU hacmi
        noise_sigma_hu: Gürültü std'si (0..10 HU)
        intensity_scale: Global ölçek (0.9..1.1)
        seed: Gürültü tohumu

    Returns:
        Volume3D (HU)
    """
    ct.require_kind(ValueKind.HU_FLOAT)
    if not 0.0 <= noise_sigma_hu <= PERTURB_MAX_SIGMA_HU:
        raise PerturbationRangeError(f"Gürültü σ [0, {PERTURB_MAX_SIGMA_HU}] dışında: {noise_sigma_hu}")
    lo, hi = PERTURB_SCALE_RANGE
    if not lo <= intensity_scale <= hi:
        raise PerturbationRangeError(f"Ölçek [{lo}, {hi}] dışında: {intensity_scale}")

    data = intensity_scale * ct.data
    if noise_sigma_hu > 0:
        data = data + stream(seed, "perturb").normal(0.0, noise_sigma_hu, size=ct.dims)
    logger.debug(f"Bozulma: σ={noise_sigma_hu} HU, ölçek={intensity_scale}")
    return Volume3D(data, ct.spacing, ValueKind.HU_FLOAT)
