"""
Vakalardan model eğitimi: bölge veri kümesi → özellik seçimi → orman,
sınır bandı yamaları → CNN. Vaka düzeyinde k-katlı bölme.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import HARD_NEGATIVE_MAX_OVERLAP
from ensemble.forest import ForestModel, forest_predict_proba_batch, train_forest
from ensemble.serialization import load_forest, save_forest
from featsel.selector import FeatureSelectionModel, fit_feature_pipeline, subset_for_target
from models.region import CandidateRegion, RegionLabel
from models.schemas import FeatselConfig, ForestParams, PipelineConfig
from models.volume import Mask3D, ProbMap3D, ValueKind, Volume3D
from neural.band import extract_patches, make_band_dataset
from neural.cnn3d import Cnn3dModel
from neural.serialization import load_model, save_model, write_history
from neural.trainer import PatchDataset, TrainingResult, train_patch_cnn
from postproc.morphology import morph_smooth
from postproc.otsu import binarize
from radiomics.candidates import extract_positive_regions, harvest_hard_negatives
from radiomics.extractor import FeatureExtractor
from radiomics.manifest import FeatureManifest
from radiomics.sampler import sample_negative_regions
from utils.exceptions import ConfigError, InsufficientDataError
from utils.rng import derive_seed, stream
from volumes.preprocessing import clip_rescale_hu

logger = logging.getLogger(__name__)


# =============================================================================
# VAKA VE KATLAR
# =============================================================================
@dataclass(frozen=True)
class TrainingCase:
    """Referans maskeli eğitim vakası"""

    case_id: str
    ct: Volume3D
    liver: Mask3D
    tumor: Mask3D
    p_tumor: Optional[ProbMap3D] = None

    def normalized(self) -> Volume3D:
        if self.ct.value_kind is ValueKind.NORMALIZED_8BIT:
            return self.ct
        return clip_rescale_hu(self.ct)


@dataclass(frozen=True)
class Fold:
    index: int
    train: List[int]
    val: List[int]
    test: List[int]


def make_case_folds(n_cases: int, k: int = 5, val_fraction: float = 0.1, seed: int = 0) -> List[Fold]:
    """
    Vaka düzeyinde k-katlı bölme; her katın eğitim havuzundan sabit bir
    doğrulama alt kümesi ayrılır.

    Args:
        n_cases: Vaka sayısı
        k: Kat sayısı (2..n_cases)
        val_fraction: Eğitim havuzundan doğrulamaya ayrılan oran
        seed: Tohum

    Returns:
        Fold listesi (test kümeleri ayrık ve birleşimleri tüm vakalar)
    """
    if k < 2 or k > n_cases:
        raise ConfigError(f"Kat sayısı 2..{n_cases} aralığında olmalı: {k}")
    if not 0.0 <= val_fraction < 1.0:
        raise ConfigError(f"val_fraction [0, 1) aralığında olmalı: {val_fraction}")
    order = stream(seed, "folds").permutation(n_cases)
    chunks = np.array_split(order, k)
    folds = []
    for index, test in enumerate(chunks):
        pool = np.setdiff1d(order, test)
        pool = pool[stream(seed, "folds", "val", index).permutation(len(pool))]
        n_val = int(round(val_fraction * len(pool)))
        if val_fraction > 0 and len(pool) > 1:
            n_val = min(max(n_val, 1), len(pool) - 1)
        folds.append(Fold(
            index=index,
            train=sorted(int(i) for i in pool[n_val:]),
            val=sorted(int(i) for i in pool[:n_val]),
            test=sorted(int(i) for i in test),
        ))
    return folds


# =============================================================================
# BÖLGE VERİ KÜMESİ
# =============================================================================
@dataclass
class RegionDataset:
    X: np.ndarray
    y: np.ndarray
    region_ids: List[str]
    feature_names: List[str]


def case_regions(case: TrainingCase, config: PipelineConfig, seed: int) -> List[CandidateRegion]:
    """Pozitif lezyon bileşenleri + örneklenmiş negatifler + zor negatifler"""
    positives = extract_positive_regions(case.tumor)
    sampler_cfg = config.sampler.model_copy(update={"seed": derive_seed(seed, "sampler", case.case_id)})
    negatives = list(sample_negative_regions(case.ct, case.liver, case.tumor, sampler_cfg, workers=config.workers))
    hard: List[CandidateRegion] = []
    if case.p_tumor is not None:
        predicted = binarize(case.p_tumor, config.postproc.otsu_mode, config.postproc.fixed_tau)
        if config.toggles.morph:
            predicted = morph_smooth(predicted)
        hard = harvest_hard_negatives(predicted, case.tumor, HARD_NEGATIVE_MAX_OVERLAP)
    regions = positives + negatives + hard
    logger.info(
        f"{case.case_id}: {len(positives)} pozitif, {len(negatives)} örneklenmiş negatif, {len(hard)} zor negatif"
    )
    return regions


def build_region_dataset(cases: Sequence[TrainingCase], config: PipelineConfig, seed: int) -> RegionDataset:
    extractor = FeatureExtractor(band_width=config.band_width)
    rows, labels, ids = [], [], []
    for case in cases:
        volume = case.normalized()
        regions = case_regions(case, config, seed)
        for vector in extractor.extract_many(regions, volume, workers=config.workers):
            rows.append(vector.values)
            labels.append(1 if vector.label is RegionLabel.POSITIVE else 0)
            ids.append(f"{case.case_id}/{vector.region_id}")
    if not rows:
        raise InsufficientDataError("Eğitim vakalarından hiç bölge çıkarılamadı")
    return RegionDataset(np.vstack(rows), np.asarray(labels), ids, list(FeatureManifest.normative().names))


# =============================================================================
# CNN VERİ KÜMESİ
# =============================================================================
def band_patches(cases: Sequence[TrainingCase], config: PipelineConfig, seed: int, tag: str) -> PatchDataset:
    """Her vakadan dengeli örneklenmiş band vokselleri için yamalar"""
    s = config.cnn.patch_size
    per_case = max(2, config.cnn.max_train_voxels // max(1, len(cases)))
    patches, labels = [], []
    for case in cases:
        volume = case.normalized()
        band = make_band_dataset(volume, case.tumor, config.cnn.d_max)
        rng = stream(seed, "cnn-voxels", tag, case.case_id)
        chosen = []
        for value in (1, 0):
            index = np.flatnonzero(band.labels == value)
            take = min(len(index), per_case // 2)
            chosen.append(np.sort(rng.choice(index, size=take, replace=False)) if take else index[:0])
        chosen = np.concatenate(chosen)
        patches.append(extract_patches(volume, band.coords[chosen], s))
        labels.append(band.labels[chosen])
    return PatchDataset(np.concatenate(patches), np.concatenate(labels))


# =============================================================================
# MODELLER
# =============================================================================
@dataclass
class TrainedModels:
    featsel: Optional[FeatureSelectionModel] = None
    forest: Optional[ForestModel] = None
    cnn: Optional[Cnn3dModel] = None
    cnn_training: Optional[TrainingResult] = None
    summary: Dict[str, float] = field(default_factory=dict)

    def save(self, directory: Path) -> Dict[str, Path]:
        """Modelleri dizine yaz; konfigürasyona girecek yolları döndür"""
        directory = Path(directory)
        paths: Dict[str, Path] = {}
        if self.featsel is not None:
            paths["featsel_model"] = self.featsel.save(directory / "featsel.json")
        if self.forest is not None:
            paths["forest_model"] = save_forest(self.forest, directory / "forest.json")
        if self.cnn is not None:
            paths["cnn_model"] = save_model(self.cnn, directory / "band_cnn.cnn3")
        if self.cnn_training is not None:
            write_history(self.cnn_training.history, directory / "cnn_history.csv")
        logger.info(f"Modeller kaydedildi: {directory}")
        return paths

    @classmethod
    def load(cls, config: PipelineConfig) -> "TrainedModels":
        paths = config.paths
        return cls(
            featsel=FeatureSelectionModel.load(paths.featsel_model) if paths.featsel_model else None,
            forest=load_forest(paths.forest_model) if paths.forest_model else None,
            cnn=load_model(paths.cnn_model) if paths.cnn_model else None,
        )


def train_region_models(
    dataset: RegionDataset,
    featsel_cfg: FeatselConfig,
    forest_params: ForestParams,
    seed: int,
    workers: Optional[int] = None,
) -> Tuple[FeatureSelectionModel, ForestModel]:
    featsel = fit_feature_pipeline(
        dataset.X, dataset.y, featsel_cfg, seed=derive_seed(seed, "featsel"),
        feature_names=dataset.feature_names, workers=workers,
    )
    forest = train_forest(
        featsel.transform(dataset.X), dataset.y, forest_params,
        seed=derive_seed(seed, "forest"), workers=workers, feature_names=featsel.selected_names,
    )
    return featsel, forest


def train_models(
    cases: Sequence[TrainingCase],
    config: PipelineConfig,
    val_cases: Sequence[TrainingCase] = (),
    seed: Optional[int] = None,
) -> TrainedModels:
    """
    Açık aşamaların ihtiyaç duyduğu modelleri eğit.

    Args:
        cases: Eğitim vakaları
        config: Konfigürasyon (toggles hangi modellerin gerektiğini belirler)
        val_cases: CNN doğrulaması için vakalar (boşsa eğitim yamalarının %20'si)
        seed: Ana tohum (None: config.seed)

    Returns:
        TrainedModels
    """
    if not cases:
        raise InsufficientDataError("Model eğitimi için en az bir vaka gerekli")
    seed = config.seed if seed is None else seed
    models = TrainedModels()

    if config.toggles.radiomics_filter:
        dataset = build_region_dataset(cases, config, seed)
        models.featsel, models.forest = train_region_models(dataset, config.featsel, config.forest, seed, config.workers)
        models.summary["regions"] = float(len(dataset.y))
        models.summary["positive_regions"] = float(dataset.y.sum())

    if config.toggles.cnn_refine:
        train = band_patches(cases, config, seed, "train")
        if val_cases:
            val = band_patches(val_cases, config, seed, "val")
        else:
            order = stream(seed, "cnn-holdout").permutation(len(train))
            n_val = max(1, len(order) // 5)
            val, train = train.subset(np.sort(order[:n_val])), train.subset(np.sort(order[n_val:]))
        result = train_patch_cnn(train, val, config.cnn, seed=derive_seed(seed, "cnn"))
        models.cnn = result.model
        models.cnn_training = result
        models.summary["cnn_best_val_loss"] = result.best_val_loss
    return models


# =============================================================================
# ÖZELLİK SAYISI DUYARLILIĞI
# =============================================================================
def feature_count_sweep(
    train: RegionDataset,
    test: RegionDataset,
    featsel_cfg: FeatselConfig,
    forest_params: ForestParams,
    targets: Sequence[int] = tuple(range(12, 31, 2)),
    seed: int = 0,
    workers: Optional[int] = None,
) -> List[Dict[str, float]]:
    """
    Aynı sıralamalarla farklı hedef alt küme boyutları için test doğruluğu.

    Returns:
        [{"target", "n_features", "accuracy"}]
    """
    base = fit_feature_pipeline(
        train.X, train.y, featsel_cfg, seed=derive_seed(seed, "featsel"),
        feature_names=train.feature_names, workers=workers,
    )
    rows = []
    for target in targets:
        model = subset_for_target(base, train.X, target, top_k=max(featsel_cfg.top_k, target))
        forest = train_forest(model.transform(train.X), train.y, forest_params, seed=derive_seed(seed, "forest", target))
        q = forest_predict_proba_batch(forest, model.transform(test.X))
        accuracy = float(((q >= 0.5).astype(int) == test.y).mean())
        rows.append({"target": target, "n_features": len(model.selected), "accuracy": accuracy})
        logger.info(f"Hedef {target}: {len(model.selected)} özellik, doğruluk {accuracy:.3f}")
    return rows
