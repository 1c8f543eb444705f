"""
Fantom takımı üzerinde ablasyon ve sağlamlık deneyleri.
Modeller vaka düzeyinde katlarla eğitilir; her test vakası yalnızca
kendi katının modelleriyle değerlendirilir.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import (
    ACCEPT_FULL_DICE,
    ACCEPT_MAX_DROP_POINTS,
    ACCEPT_MAX_RUNTIME_S,
    PERTURB_MAX_SIGMA_HU,
    PERTURB_SCALE_RANGE,
)
from evalmetrics.metrics import MetricsRow, summarize
from evalmetrics.wilcoxon import WilcoxonResult, wilcoxon_signed_rank
from models.schemas import PhantomSpec, PipelineConfig
from phantom.generator import Phantom, generate_phantom
from phantom.perturb import perturb
from pipeline.orchestrator import CaseInputs, case_from_phantom, run_case
from pipeline.training import TrainedModels, TrainingCase, make_case_folds, train_models
from utils.exceptions import InsufficientDataError
from utils.rng import derive_seed, stream

logger = logging.getLogger(__name__)

# Kümülatif aşama eklemeleri
ABLATION_ROWS: Tuple[Tuple[str, Dict[str, bool]], ...] = (
    ("baseline", dict(morph=False, temporal=False, radiomics_filter=False, cnn_refine=False)),
    ("+morph", dict(morph=True, temporal=False, radiomics_filter=False, cnn_refine=False)),
    ("+temporal", dict(morph=True, temporal=True, radiomics_filter=False, cnn_refine=False)),
    ("+radiomics", dict(morph=True, temporal=True, radiomics_filter=True, cnn_refine=False)),
    ("+cnn", dict(morph=True, temporal=True, radiomics_filter=True, cnn_refine=True)),
)


def desk_scale_config(config: Optional[PipelineConfig] = None) -> PipelineConfig:
    """Masaüstü ölçeğinde deneyler için küçültülmüş örnekleyici, orman ve CNN ayarları"""
    config = config or PipelineConfig()
    return config.model_copy(update={
        "sampler": config.sampler.model_copy(update={"quota_total": 60, "r_max": 8}),
        "featsel": config.featsel.model_copy(update={"ranking_trees": 30}),
        "forest": config.forest.model_copy(update={"n_trees": 60, "min_samples_leaf": 2}),
        "cnn": config.cnn.model_copy(update={
            "channels": (8, 8, 16, 16, 16),
            "fc_width": 16,
            "max_train_voxels": 1500,
            "schedule": config.cnn.schedule.model_copy(update={"adam_epochs": 8, "max_epochs": 15, "patience": 4}),
        }),
    })


@dataclass
class AblationRow:
    name: str
    toggles: Dict[str, bool]
    rows: List[MetricsRow] = field(default_factory=list)

    @property
    def dices(self) -> np.ndarray:
        return np.array([r.dice for r in self.rows])

    @property
    def mean_dice(self) -> float:
        return float(self.dices.mean()) if self.rows else float("nan")

    def to_dict(self) -> Dict:
        summary = summarize(self.rows)
        return {"name": self.name, "toggles": self.toggles, "mean": summary.mean, "std": summary.std}


@dataclass
class AblationResult:
    rows: List[AblationRow]
    wilcoxon: Optional[WilcoxonResult]
    elapsed_s: float = 0.0

    def row(self, name: str) -> AblationRow:
        for row in self.rows:
            if row.name == name:
                return row
        raise KeyError(name)

    @property
    def monotone(self) -> bool:
        means = [r.mean_dice for r in self.rows]
        return all(b > a for a, b in zip(means, means[1:]))

    @property
    def full_dice(self) -> float:
        return self.rows[-1].mean_dice

    def acceptance(
        self,
        min_dice: float = ACCEPT_FULL_DICE,
        max_seconds: float = ACCEPT_MAX_RUNTIME_S,
    ) -> Dict[str, bool]:
        """Kabul kontrolleri: monoton artış, tam pipeline Dice alt sınırı ve süre"""
        return {
            "monotone": self.monotone,
            "full_dice": self.full_dice >= min_dice,
            "runtime": self.elapsed_s < max_seconds,
        }

    def to_dict(self) -> Dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "wilcoxon": vars(self.wilcoxon) if self.wilcoxon else None,
            "monotone": self.monotone,
            "full_dice": self.full_dice,
            "elapsed_s": self.elapsed_s,
            "acceptance": self.acceptance(),
        }


@dataclass
class RobustnessResult:
    clean: List[MetricsRow]
    perturbed: List[MetricsRow]
    scales: List[float]
    sigma: float
    elapsed_s: float = 0.0

    @property
    def mean_drop(self) -> float:
        """Dice puanı cinsinden ortalama düşüş (0..100)"""
        clean = np.array([r.dice for r in self.clean])
        noisy = np.array([r.dice for r in self.perturbed])
        return float(100.0 * (clean.mean() - noisy.mean()))

    def acceptance(
        self,
        max_drop: float = ACCEPT_MAX_DROP_POINTS,
        max_seconds: float = ACCEPT_MAX_RUNTIME_S,
    ) -> Dict[str, bool]:
        return {"dice_drop": self.mean_drop < max_drop, "runtime": self.elapsed_s < max_seconds}


# =============================================================================
# YARDIMCILAR
# =============================================================================
def build_phantoms(suite: Sequence[PhantomSpec]) -> List[Phantom]:
    return [generate_phantom(spec) for spec in suite]


def training_case(phantom: Phantom, case_id: str) -> TrainingCase:
    return TrainingCase(case_id, phantom.ct, phantom.liver, phantom.tumor, phantom.p_tumor)


def case_ids(n: int) -> List[str]:
    return [f"phantom_{i:03d}" for i in range(n)]


def train_fold_models(
    phantoms: Sequence[Phantom],
    config: PipelineConfig,
    k: int,
    seed: int,
) -> List[Tuple[List[int], TrainedModels]]:
    """Her kat için (test indeksleri, modeller)"""
    ids = case_ids(len(phantoms))
    needs_models = config.toggles.radiomics_filter or config.toggles.cnn_refine
    folds = make_case_folds(len(phantoms), k=k, val_fraction=0.1, seed=seed)
    out = []
    for fold in folds:
        if not needs_models:
            out.append((fold.test, TrainedModels()))
            continue
        logger.info(f"Kat {fold.index}: {len(fold.train)} eğitim, {len(fold.val)} doğrulama, {len(fold.test)} test")
        models = train_models(
            [training_case(phantoms[i], ids[i]) for i in fold.train],
            config,
            val_cases=[training_case(phantoms[i], ids[i]) for i in fold.val],
            seed=derive_seed(seed, "fold", fold.index),
        )
        out.append((fold.test, models))
    return out


# =============================================================================
# ABLASYON
# =============================================================================
def run_ablation(
    suite: Sequence[PhantomSpec],
    config: PipelineConfig,
    k: int = 2,
    seed: Optional[int] = None,
) -> AblationResult:
    """
    Kümülatif toggle satırları için ortalama Dice ve tam pipeline ile
    taban çizgisi arasında eşleştirilmiş Wilcoxon testi.

    Args:
        suite: Fantom tanımları
        config: Temel konfigürasyon (toggle'lar satırlara göre değiştirilir)
        k: Vaka düzeyinde kat sayısı
        seed: Ana tohum (None: config.seed)

    Returns:
        AblationResult
    """
    if len(suite) < 2:
        raise InsufficientDataError("Ablasyon için en az iki fantom gerekli")
    started = time.perf_counter()
    seed = config.seed if seed is None else seed
    phantoms = build_phantoms(suite)
    ids = case_ids(len(phantoms))
    full = config.with_toggles(**ABLATION_ROWS[-1][1])
    fold_models = train_fold_models(phantoms, full, k, seed)

    rows = [AblationRow(name, toggles) for name, toggles in ABLATION_ROWS]
    for test, models in fold_models:
        for i in test:
            case = case_from_phantom(phantoms[i], ids[i])
            for row in rows:
                result = run_case(case, config.with_toggles(**row.toggles), models)
                row.rows.append(result.metrics)
    order = np.argsort([r.case_id for r in rows[0].rows], kind="stable")
    for row in rows:
        row.rows = [row.rows[j] for j in order]
        logger.info(f"{row.name:<12} Dice {row.mean_dice:.4f}")

    diffs = rows[-1].dices - rows[0].dices
    try:
        test = wilcoxon_signed_rank(diffs)
    except InsufficientDataError as exc:
        logger.warning(f"Wilcoxon testi atlandı: {exc}")
        test = None
    elapsed = time.perf_counter() - started
    logger.info(f"Ablasyon süresi: {elapsed:.1f} s")
    return AblationResult(rows, test, elapsed)


# =============================================================================
# SAĞLAMLIK
# =============================================================================
def perturbed_case(case: CaseInputs, sigma: float, scale: float, seed: int) -> CaseInputs:
    return CaseInputs(
        case_id=case.case_id,
        ct=perturb(case.ct, sigma, scale, seed),
        p_tumor=case.p_tumor,
        p_liver=case.p_liver,
        liver_gt=case.liver_gt,
        tumor_gt=case.tumor_gt,
    )


def run_robustness(
    suite: Sequence[PhantomSpec],
    config: PipelineConfig,
    sigma: float = PERTURB_MAX_SIGMA_HU,
    scale_range: Tuple[float, float] = PERTURB_SCALE_RANGE,
    k: int = 2,
    seed: Optional[int] = None,
) -> RobustnessResult:
    """
    Tam pipeline Dice'ının CT yoğunluk bozulması altındaki değişimi.
    Ölçek her vaka için aralıktan düzgün çekilir; olasılık haritaları değişmez.
    """
    started = time.perf_counter()
    seed = config.seed if seed is None else seed
    phantoms = build_phantoms(suite)
    ids = case_ids(len(phantoms))
    fold_models = train_fold_models(phantoms, config, k, seed)

    clean, noisy, scales = {}, {}, {}
    for test, models in fold_models:
        for i in test:
            case = case_from_phantom(phantoms[i], ids[i])
            scale = float(stream(seed, "robustness", ids[i]).uniform(*scale_range))
            shifted = perturbed_case(case, sigma, scale, derive_seed(seed, "robustness-noise", ids[i]))
            clean[i] = run_case(case, config, models).metrics
            noisy[i] = run_case(shifted, config, models).metrics
            scales[i] = scale
    order = sorted(clean)
    result = RobustnessResult(
        clean=[clean[i] for i in order],
        perturbed=[noisy[i] for i in order],
        scales=[scales[i] for i in order],
        sigma=sigma,
        elapsed_s=time.perf_counter() - started,
    )
    logger.info(f"Sağlamlık: σ={sigma} HU, ortalama Dice düşüşü {result.mean_drop:.2f} puan")
    return result
