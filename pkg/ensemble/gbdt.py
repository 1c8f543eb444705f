"""
Lojistik kayıplı gradyan artırmalı karar ağaçları.

F0 = önsel log-olasılık oranı; her turda g = p − y, h = p(1 − p) ile
Newton yaprak değerleri −G / (H + λ) hesaplanır ve F ← F + η·ağaç(x).
Kazanç önemi (XGB-GAIN) ve bölme sıklığı (GBDT-FREQ) aynı öğreniciden gelir.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import expit

from models.schemas import GbdtParams
from ensemble.forest import check_binary_labels
from ensemble.tree import TreeArrays, TreeGrower, check_features, newton_leaf, newton_quality

logger = logging.getLogger(__name__)

_LOSS_CLAMP = 1e-15


@dataclass
class GbdtModel:
    f0: float
    trees: List[TreeArrays]
    params: GbdtParams
    n_features: int
    seed: int
    loss_history: List[float] = field(default_factory=list)

    @property
    def n_rounds(self) -> int:
        return len(self.trees)


def logistic_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, _LOSS_CLAMP, 1.0 - _LOSS_CLAMP)
    return float(-(y * np.log(p) + (1 - y) * np.log(1 - p)).mean())


def train_gbdt(
    X: np.ndarray,
    y: np.ndarray,
    params: Optional[GbdtParams] = None,
    seed: int = 0,
) -> GbdtModel:
    """
    GBDT eğit.

    Args:
        X: (n, d) özellik matrisi
        y: 0/1 etiketler
        params: Tur sayısı, derinlik, öğrenme oranı, λ
        seed: Kayıt için tohum (öğrenici tam deterministiktir)

    Returns:
        GbdtModel (loss_history[0] başlangıç kaybı)
    """
    params = params or GbdtParams()
    X = np.asarray(X, dtype=np.float64)
    y = check_binary_labels(y).astype(np.float64)
    n, d = X.shape
    prior = y.mean()
    f0 = float(np.log(prior / (1.0 - prior)))
    F = np.full(n, f0)
    grower = TreeGrower(
        quality=newton_quality(params.reg_lambda),
        leaf_value=newton_leaf(params.reg_lambda),
        gain_scale=0.5,
        max_depth=params.max_depth,
        min_samples_leaf=params.min_samples_leaf,
    )
    rows = np.arange(n)
    trees: List[TreeArrays] = []
    history = [logistic_loss(y, expit(F))]
    for _ in range(params.rounds):
        p = expit(F)
        stats = np.column_stack([p - y, p * (1.0 - p)])
        tree = grower.grow(X, stats, rows)
        trees.append(tree)
        F = F + params.learning_rate * tree.predict(X)
        history.append(logistic_loss(y, expit(F)))
    logger.info(f"GBDT eğitildi: {len(trees)} tur, son kayıp {history[-1]:.5f}")
    return GbdtModel(f0=f0, trees=trees, params=params, n_features=d, seed=seed, loss_history=history)


def gbdt_decision_function(model: GbdtModel, X: np.ndarray) -> np.ndarray:
    X = check_features(X, model.n_features)
    F = np.full(len(X), model.f0)
    for tree in model.trees:
        F += model.params.learning_rate * tree.predict(X)
    return F


def gbdt_predict_proba(model: GbdtModel, X: np.ndarray) -> np.ndarray:
    return expit(gbdt_decision_function(model, X))


def gbdt_importances(model: GbdtModel) -> Tuple[np.ndarray, np.ndarray]:
    """
    (kazanç, sıklık) önemleri; her biri toplam 1'e normalize (bölme yoksa sıfır).
    """
    gain = np.zeros(model.n_features)
    freq = np.zeros(model.n_features)
    for tree in model.trees:
        g, c = tree.feature_gains(model.n_features)
        gain += g
        freq += c
    gain = gain / gain.sum() if gain.sum() > 0 else gain
    freq = freq / freq.sum() if freq.sum() > 0 else freq
    return gain, freq
