"""
Standart fantom takımı: lezyon boyutları üç boyut katmanını da doldurur.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import DEFAULT_SEED
from models.schemas import DegradationSpec, LesionSpec, LiverSpec, PhantomSpec, VesselSpec
from phantom.generator import segment_distance
from utils.exceptions import ConfigError
from utils.rng import derive_seed, stream

logger = logging.getLogger(__name__)

SUITE_DIMS = (72, 72, 56)
SUITE_LIVER_CENTER = (36.0, 36.0, 28.0)
SUITE_LIVER_RADII = (31.0, 30.0, 24.0)
VESSEL_RADIUS_MM = 2.5
LESION_GAP_MM = 4.0
PLACEMENT_ATTEMPTS = 500

# sınıf → yarıçap aralığı (mm); eşdeğer çaplar <10, 10-30, >30 mm
RADIUS_RANGES = {
    "small": (2.5, 4.2),
    "medium": (6.0, 11.0),
    "large": (15.6, 16.5),
}

NOISY_DEGRADATION = DegradationSpec(
    blur_sigma=1.0,
    speckle_rate=0.002,
    speckle_amplitude=0.9,
    vessel_leak=0.85,
    slice_dropout_rate=0.08,
    slice_dropout_factor=0.3,
    boundary_jitter=0.35,
)


def _unit_directions(count: int = 256) -> np.ndarray:
    """Fibonacci küresi üzerinde yönler"""
    k = np.arange(count) + 0.5
    phi = np.arccos(1.0 - 2.0 * k / count)
    theta = np.pi * (1.0 + 5 ** 0.5) * k
    return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


_DIRECTIONS = _unit_directions()


def sphere_inside_ellipsoid(center, radius: float, e_center, e_radii, margin: float = 1.0) -> bool:
    points = np.asarray(center) + (radius + margin) * _DIRECTIONS
    value = (((points - np.asarray(e_center)) / np.asarray(e_radii)) ** 2).sum(axis=1)
    return bool((value <= 1.0).all())


def _place_vessels(
    rng: np.random.Generator,
    count: int,
    lesions: Sequence[Tuple[Tuple[float, float, float], float]],
) -> List[VesselSpec]:
    """Eksenel doğrultuda tüpler; lezyonlardan en az LESION_GAP_MM uzakta"""
    cz, rz = SUITE_LIVER_CENTER[2], SUITE_LIVER_RADII[2]
    margin = VESSEL_RADIUS_MM + 4.0
    vessels = []
    for _ in range(count):
        for _ in range(PLACEMENT_ATTEMPTS):
            x, y = rng.uniform(margin, np.asarray(SUITE_DIMS[:2]) - 1 - margin)
            vessel = VesselSpec(start=(x, y, cz - 0.6 * rz), end=(x, y, cz + 0.6 * rz), radius_mm=VESSEL_RADIUS_MM)
            if all(_lesion_clear(center, radius, vessel) for center, radius in lesions):
                vessels.append(vessel)
                break
        else:
            raise ConfigError(f"Damar {PLACEMENT_ATTEMPTS} denemede yerleştirilemedi")
    return vessels


def _lesion_clear(center, radius: float, vessel: VesselSpec) -> bool:
    c = [np.array([v]) for v in center]
    distance = float(segment_distance(c, vessel.start, vessel.end)[0])
    return distance > radius + vessel.radius_mm + LESION_GAP_MM


def _place_lesion(
    rng: np.random.Generator,
    size_class: str,
    placed: List[Tuple[Tuple[float, float, float], float]],
) -> LesionSpec:
    lo, hi = RADIUS_RANGES[size_class]
    radius = float(rng.uniform(lo, hi))
    for _ in range(PLACEMENT_ATTEMPTS):
        offset = rng.uniform(-1.0, 1.0, size=3) * (np.asarray(SUITE_LIVER_RADII) - radius)
        center = tuple(float(c) for c in np.asarray(SUITE_LIVER_CENTER) + offset)
        if not sphere_inside_ellipsoid(center, radius, SUITE_LIVER_CENTER, SUITE_LIVER_RADII):
            continue
        if any(np.linalg.norm(np.subtract(center, c)) <= radius + r + LESION_GAP_MM for c, r in placed):
            continue
        placed.append((center, radius))
        return LesionSpec(center=center, radius_mm=radius, size_class=size_class)
    raise ConfigError(f"{size_class} lezyon {PLACEMENT_ATTEMPTS} denemede yerleştirilemedi")


def make_phantom_spec(index: int, seed: int, noisy: bool = True) -> PhantomSpec:
    """
    Takımın index'inci fantomu. Ana sınıf katmanlar arasında döner;
    ikinci lezyon küçük veya orta olur.
    """
    rng = stream(seed, "suite", index)
    classes = ["small", "medium", "large"]
    primary = classes[index % 3]
    secondary = "small" if primary != "small" else "medium"
    placed: List[Tuple[Tuple[float, float, float], float]] = []
    lesions = [_place_lesion(rng, primary, placed), _place_lesion(rng, secondary, placed)]
    vessels = _place_vessels(rng, 1 + index % 2, placed)
    return PhantomSpec(
        dims=SUITE_DIMS,
        spacing=(1.0, 1.0, 1.0),
        liver=LiverSpec(center=SUITE_LIVER_CENTER, radii=SUITE_LIVER_RADII),
        lesions=lesions,
        vessels=vessels,
        noise_sigma_hu=5.0 if noisy else 0.0,
        degradation=NOISY_DEGRADATION if noisy else DegradationSpec(),
        seed=derive_seed(seed, "suite-phantom", index),
    )


def standard_suite(n: int = 20, seed: Optional[int] = None, noisy: bool = True) -> List[PhantomSpec]:
    """
    Args:
        n: Fantom sayısı
        seed: Ana tohum (None: DEFAULT_SEED)
        noisy: Gürültü ve olasılık haritası bozulmaları

    Returns:
        PhantomSpec listesi
    """
    seed = DEFAULT_SEED if seed is None else seed
    specs = [make_phantom_spec(i, seed, noisy) for i in range(n)]
    logger.info(f"Standart takım: {n} fantom (gürültülü={noisy})")
    return specs
