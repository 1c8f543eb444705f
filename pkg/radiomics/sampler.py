"""
Karaciğer içi negatif bölge örnekleyici.

Her yarıçap r ∈ {r_min, ..., r_max} için kota kadar küresel bölge üretilir.
Tohumların bir kısmı karaciğer sınırına r'den yakın (sınır), kalanı
sınırdan en az r uzakta (iç) seçilir. Bölgenin vokselleri
karaciğer dışına veya tümöre fazla taşarsa tohum yeniden çekilir.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

import numpy as np
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from models.region import CandidateRegion, RegionLabel, RegionSource
from models.schemas import SamplerConfig
from models.volume import Mask3D, Volume3D
from utils.exceptions import EmptyInputError, TumorRefineError
from utils.parallel import ordered_map
from utils.rng import stream
from volumes.distance import signed_distance

logger = logging.getLogger(__name__)

BOUNDARY = "boundary"
INTERIOR = "interior"


class CandidateRejected(TumorRefineError):
    """Aday küre reddedildi (yeniden tohumlama tetikler)"""


@dataclass(frozen=True)
class CandidateEvaluation:
    """Tek aday kürenin kabul kaydı"""

    accepted: bool
    outside_fraction: float
    tumor_fraction: float
    voxels: np.ndarray


@dataclass(frozen=True)
class SlotPlan:
    radius: int
    kind: str
    slot: int


@dataclass
class SamplingResult:
    """Örnekleme çıktısı; eksik kalan slotlar uyarı olarak kaydedilir"""

    regions: List[CandidateRegion] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def __iter__(self) -> Iterator[CandidateRegion]:
        return iter(self.regions)

    def __len__(self) -> int:
        return len(self.regions)


def round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


@lru_cache(maxsize=64)
def ball_offsets(radius: int) -> np.ndarray:
    """|o|² ≤ r² olan tam sayı ofsetler (Fortran tarama sırası)"""
    span = np.arange(-radius, radius + 1)
    grid = np.stack(np.meshgrid(span, span, span, indexing="ij"), axis=-1).reshape(-1, 3)
    inside = grid[(grid ** 2).sum(axis=1) <= radius * radius]
    inside = inside[np.lexsort((inside[:, 0], inside[:, 1], inside[:, 2]))]
    inside.setflags(write=False)
    return inside


def radius_quotas(cfg: SamplerConfig) -> List[Tuple[int, int, int]]:
    """
    Yarıçap başına (r, sınır kotası, iç kotası).

    Yarıçap kotası floor(Q / n); kalan en küçük yarıçaplara birer dağıtılır.
    Toplam sınır hedefi round(f·Q); yarıçap başına floor(f·q_r) verilip
    eksik kalan adetler yine en küçük yarıçaplardan başlanarak eklenir.
    """
    radii = cfg.radii
    n = len(radii)
    base, remainder = divmod(cfg.quota_total, n)
    quotas = [base + (1 if i < remainder else 0) for i in range(n)]

    boundary = [int(np.floor(cfg.boundary_fraction * q)) for q in quotas]
    deficit = round_half_up(cfg.boundary_fraction * cfg.quota_total) - sum(boundary)
    for i in range(n):
        if deficit <= 0:
            break
        if boundary[i] < quotas[i]:
            boundary[i] += 1
            deficit -= 1
    return [(r, b, q - b) for r, q, b in zip(radii, quotas, boundary)]


def evaluate_candidate(
    center: np.ndarray,
    radius: int,
    liver: np.ndarray,
    tumor: np.ndarray,
    cfg: SamplerConfig,
) -> CandidateEvaluation:
    """
    Küresel adayın kabul kontrolü.

    Kesirler tam küre hacmine göre hesaplanır; hacim dışına taşan vokseller
    karaciğer dışı sayılır. Bölge vokselleri hacim sınırlarına kırpılır.
    """
    offsets = ball_offsets(radius)
    coords = np.asarray(center, dtype=np.int64) + offsets
    in_bounds = ((coords >= 0) & (coords < np.asarray(liver.shape))).all(axis=1)
    voxels = coords[in_bounds]
    x, y, z = voxels[:, 0], voxels[:, 1], voxels[:, 2]
    total = float(len(offsets))
    outside = 1.0 - np.count_nonzero(liver[x, y, z]) / total
    tumor_fraction = np.count_nonzero(tumor[x, y, z]) / total
    accepted = outside <= cfg.reject_outside_liver and tumor_fraction <= cfg.reject_tumor_fraction
    return CandidateEvaluation(bool(accepted), float(outside), float(tumor_fraction), voxels)


class NegativeSampler:
    """Yarıçap ızgarası üzerinde deterministik negatif örnekleme servisi"""

    def __init__(self, cfg: SamplerConfig):
        self.cfg = cfg

    def _attempt(self, rng: np.random.Generator, pool: np.ndarray, plan: SlotPlan, liver, tumor) -> CandidateEvaluation:
        center = pool[rng.integers(len(pool))]
        evaluation = evaluate_candidate(center, plan.radius, liver, tumor, self.cfg)
        if not evaluation.accepted:
            raise CandidateRejected(
                f"r={plan.radius} dışarıda={evaluation.outside_fraction:.3f} tümör={evaluation.tumor_fraction:.3f}"
            )
        return evaluation

    def _fill_slot(self, plan: SlotPlan, pool: np.ndarray, liver, tumor) -> Tuple[SlotPlan, Optional[CandidateEvaluation]]:
        if len(pool) == 0:
            return plan, None
        rng = stream(self.cfg.seed, "sampler", plan.radius, plan.kind, plan.slot)
        retrying = Retrying(
            stop=stop_after_attempt(self.cfg.max_retries),
            retry=retry_if_exception_type(CandidateRejected),
        )
        try:
            return plan, retrying(self._attempt, rng, pool, plan, liver, tumor)
        except RetryError:
            return plan, None

    def sample(self, ct: Volume3D, liver: Mask3D, tumor: Mask3D, workers: Optional[int] = None) -> SamplingResult:
        ct.check_grid(liver, "karaciğer maskesi")
        ct.check_grid(tumor, "tümör maskesi")
        liver_fg = liver.foreground
        tumor_fg = tumor.foreground
        if not liver_fg.any():
            raise EmptyInputError("Karaciğer maskesi boş")

        d = signed_distance(liver_fg)
        eligible = liver_fg & ~tumor_fg
        plans: List[Tuple[SlotPlan, np.ndarray]] = []
        pools = {}
        for radius, n_boundary, n_interior in radius_quotas(self.cfg):
            pools[(radius, BOUNDARY)] = np.argwhere(eligible & (d > -radius) & (d <= 0))
            pools[(radius, INTERIOR)] = np.argwhere(eligible & (d <= -radius))
            for kind, count in ((BOUNDARY, n_boundary), (INTERIOR, n_interior)):
                plans.extend((SlotPlan(radius, kind, k), pools[(radius, kind)]) for k in range(count))

        outcomes = ordered_map(
            lambda item: self._fill_slot(item[0], item[1], liver_fg, tumor_fg),
            plans,
            workers=workers,
            desc="Negatif örnekleme",
        )

        result = SamplingResult()
        unfilled = {}
        for plan, evaluation in outcomes:
            if evaluation is None:
                unfilled[(plan.radius, plan.kind)] = unfilled.get((plan.radius, plan.kind), 0) + 1
                continue
            result.regions.append(
                CandidateRegion(
                    region_id=f"neg-r{plan.radius:02d}-{plan.kind[0]}{plan.slot:03d}",
                    voxels=evaluation.voxels,
                    source=RegionSource.SAMPLED_NEGATIVE,
                    label=RegionLabel.NEGATIVE,
                    radius=plan.radius,
                )
            )
        for (radius, kind), missing in sorted(unfilled.items()):
            reason = "tohum havuzu boş" if len(pools[(radius, kind)]) == 0 else "deneme sınırı aşıldı"
            message = f"r={radius} {kind}: {missing} slot doldurulamadı ({reason})"
            result.warnings.append(message)
            logger.warning(message)
        logger.info(f"Negatif örnekleme: {len(result.regions)} bölge, {len(result.warnings)} uyarı")
        return result


def sample_negative_regions(
    ct: Volume3D,
    liver: Mask3D,
    tumor: Mask3D,
    cfg: SamplerConfig,
    workers: Optional[int] = None,
) -> SamplingResult:
    """NegativeSampler kısayolu"""
    return NegativeSampler(cfg).sample(ct, liver, tumor, workers=workers)
