"""
Radyomik yanlış pozitif bastırma: q_k = f_θ(φ̃(Ω_k)), q_k < τ_rf ise bölge silinir.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from config.settings import TAU_RF
from ensemble.forest import ForestModel, forest_predict_proba_batch
from models.region import CandidateRegion
from models.volume import Mask3D
from utils.exceptions import DimensionMismatchError, ManifestMismatchError

logger = logging.getLogger(__name__)


@dataclass
class SuppressionResult:
    kept: List[CandidateRegion] = field(default_factory=list)
    rejected: List[CandidateRegion] = field(default_factory=list)
    scores: List[float] = field(default_factory=list)

    @property
    def n_kept(self) -> int:
        return len(self.kept)

    @property
    def n_rejected(self) -> int:
        return len(self.rejected)


def suppress_false_positives(
    regions: Sequence[CandidateRegion],
    features: np.ndarray,
    model: ForestModel,
    tau_rf: float = TAU_RF,
    feature_names: Optional[Sequence[str]] = None,
) -> SuppressionResult:
    """
    Bölge bazında bastırma.

    Args:
        regions: Aday bölgeler
        features: (k, d) seçilmiş özellik matrisi (φ̃), bölge sırasıyla
        model: Aynı seçili manifesto ile eğitilmiş orman
        tau_rf: Eşik; q ≥ τ_rf tutulur
        feature_names: Verilirse modelin özellik adlarıyla karşılaştırılır

    Returns:
        SuppressionResult
    """
    if len(features) != len(regions):
        raise DimensionMismatchError(f"Özellik satırı sayısı ({len(features)}) bölge sayısıyla ({len(regions)}) uyuşmuyor")
    if feature_names is not None and model.feature_names is not None:
        if list(feature_names) != list(model.feature_names):
            raise ManifestMismatchError("Seçili özellikler modelin eğitildiği manifestoyla uyuşmuyor")
    result = SuppressionResult()
    if len(regions) == 0:
        return result
    scores = forest_predict_proba_batch(model, features)
    for region, q in zip(regions, scores):
        result.scores.append(float(q))
        (result.kept if q >= tau_rf else result.rejected).append(region)
    logger.info(f"Yanlış pozitif bastırma: {result.n_kept} tutuldu, {result.n_rejected} silindi (τ={tau_rf})")
    return result


def apply_suppression(mask: Mask3D, rejected: Sequence[CandidateRegion]) -> Mask3D:
    """Reddedilen bölgelerin tüm voksellerini temizle"""
    data = mask.data.copy()
    for region in rejected:
        region.check_bounds(mask.dims)
        data[region.voxels[:, 0], region.voxels[:, 1], region.voxels[:, 2]] = 0
    return mask.with_data(data)
