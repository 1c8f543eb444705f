"""
Küre-arka plan yama görevi (yama CNN'inin doğrulaması için).

Pozitif yamalarda merkez voksel bir kürenin içindedir; negatiflerin
yarısı yalnızca arka plan, yarısı merkezi dışarıda bırakan kaydırılmış
bir küre içerir.
"""

import numpy as np

from neural.trainer import PatchDataset
from utils.rng import stream

BACKGROUND_LEVEL = 0.3
SPHERE_LEVEL = 0.6
NOISE_SIGMA = 0.08


def _sphere_patch(rng: np.random.Generator, s: int, positive: bool) -> np.ndarray:
    grid = np.indices((s, s, s)).transpose(1, 2, 3, 0).astype(np.float64)
    mid = s // 2
    patch = np.full((s, s, s), BACKGROUND_LEVEL)
    radius = rng.uniform(2.0, max(2.5, s / 4.0 + 1.0))
    if positive:
        center = mid + rng.integers(-1, 2, size=3)
        draw = True
    else:
        draw = rng.random() < 0.5
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        center = mid + direction * (radius + rng.uniform(1.5, 3.0))
    if draw:
        inside = ((grid - center) ** 2).sum(axis=-1) <= radius ** 2
        patch[inside] = SPHERE_LEVEL
    patch = patch + rng.normal(0.0, NOISE_SIGMA, size=patch.shape)
    return np.clip(patch, 0.0, 1.0)


def make_sphere_patch_dataset(n: int, s: int, seed: int) -> PatchDataset:
    """
    Args:
        n: Yama sayısı (yarısı pozitif)
        s: Yama kenarı
        seed: Tohum

    Returns:
        PatchDataset
    """
    rng = stream(seed, "sphere-patches", s)
    labels = np.zeros(n, dtype=np.int64)
    labels[: n // 2] = 1
    labels = labels[rng.permutation(n)]
    patches = np.stack([_sphere_patch(rng, s, bool(label)) for label in labels]) if n else np.zeros((0, s, s, s))
    return PatchDataset(patches, labels)
