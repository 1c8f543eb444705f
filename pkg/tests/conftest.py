"""
Ortak test fikstürleri: küçük fantomlar, küre maskeleri, küçültülmüş ayarlar.
"""

import os

os.environ.setdefault("TUMORREF_SHOW_PROGRESS", "false")

import numpy as np
import pytest

from models.schemas import (
    CnnConfig,
    DegradationSpec,
    LesionSpec,
    LiverSpec,
    PhantomSpec,
    PipelineConfig,
    TrainSchedule,
    VesselSpec,
)
from models.volume import Mask3D, ProbMap3D, ValueKind, Volume3D
from phantom.generator import generate_phantom


def sphere(dims, center, radius) -> np.ndarray:
    """Voksel koordinatlarında boolean küre"""
    X, Y, Z = np.meshgrid(*[np.arange(n) for n in dims], indexing="ij")
    return (X - center[0]) ** 2 + (Y - center[1]) ** 2 + (Z - center[2]) ** 2 <= radius ** 2


def sphere_mask(dims, center, radius, spacing=(1.0, 1.0, 1.0)) -> Mask3D:
    return Mask3D(sphere(dims, center, radius), spacing)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_spec() -> PhantomSpec:
    """Tek lezyonlu, gürültüsüz küçük fantom"""
    return PhantomSpec(
        dims=(40, 40, 30),
        liver=LiverSpec(center=(20.0, 20.0, 15.0), radii=(16.0, 16.0, 12.0)),
        lesions=[LesionSpec(center=(20.0, 20.0, 15.0), radius_mm=5.0)],
        seed=7,
    )


@pytest.fixture
def degraded_spec(small_spec) -> PhantomSpec:
    """Damar sızıntısı ve benekli gürültü içeren fantom"""
    return small_spec.model_copy(update={
        "lesions": [LesionSpec(center=(17.0, 20.0, 15.0), radius_mm=4.5)],
        "vessels": [VesselSpec(start=(28.0, 20.0, 5.0), end=(28.0, 20.0, 25.0), radius_mm=2.0)],
        "noise_sigma_hu": 5.0,
        "degradation": DegradationSpec(blur_sigma=1.0, speckle_rate=0.003, speckle_amplitude=0.9, vessel_leak=0.85),
    })


@pytest.fixture
def clean_phantom(small_spec):
    return generate_phantom(small_spec)


@pytest.fixture
def degraded_phantom(degraded_spec):
    return generate_phantom(degraded_spec)


@pytest.fixture
def hu_volume(rng) -> Volume3D:
    return Volume3D(rng.uniform(-300.0, 600.0, size=(12, 10, 8)), (1.0, 1.0, 2.0))


@pytest.fixture
def normalized_volume(rng) -> Volume3D:
    return Volume3D(rng.integers(0, 256, size=(16, 16, 12)).astype(np.uint8), (1.0, 1.0, 1.0), ValueKind.NORMALIZED_8BIT)


@pytest.fixture
def tiny_cnn_config() -> CnnConfig:
    return CnnConfig(
        patch_size=7,
        channels=(4, 4, 8, 8, 8),
        fc_width=8,
        max_train_voxels=200,
        schedule=TrainSchedule(adam_epochs=2, max_epochs=3, patience=2, batch_size=16),
    )


@pytest.fixture
def small_config(tiny_cnn_config) -> PipelineConfig:
    """Hızlı uçtan uca testler için küçültülmüş konfigürasyon"""
    config = PipelineConfig(seed=11, workers=1, cnn=tiny_cnn_config)
    return config.model_copy(update={
        "sampler": config.sampler.model_copy(update={"quota_total": 12, "r_max": 4, "seed": 3}),
        "featsel": config.featsel.model_copy(update={"top_k": 10, "target": 5, "ranking_trees": 10}),
        "forest": config.forest.model_copy(update={"n_trees": 15, "min_samples_leaf": 1}),
    })


def prob_from_mask(mask: Mask3D, inside: float = 0.9, outside: float = 0.05) -> ProbMap3D:
    return ProbMap3D(np.where(mask.foreground, inside, outside), mask.spacing)
