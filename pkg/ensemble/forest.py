"""
Bagging ile eğitilen rastgele orman (f_θ).

Her ağaç kendi isimli RNG akışını kullanır (bootstrap + bölme başına √d
özellik); sonuç işçi sayısından bağımsızdır.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.schemas import ForestParams
from ensemble.tree import TreeArrays, TreeGrower, check_features, gini_leaf, gini_quality
from utils.exceptions import InsufficientDataError, SingleClassError
from utils.parallel import ordered_map
from utils.rng import stream

logger = logging.getLogger(__name__)


@dataclass
class ForestModel:
    """Eğitilmiş orman"""

    trees: List[TreeArrays]
    params: ForestParams
    n_features: int
    class_weights: Tuple[float, float]
    seed: int
    feature_names: Optional[List[str]] = None
    importances: np.ndarray = field(default=None)

    def __post_init__(self):
        if not self.trees:
            raise InsufficientDataError("Orman en az bir ağaç içermeli")
        if self.importances is None:
            self.importances = forest_importance(self)


def check_binary_labels(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1 or len(y) == 0:
        raise InsufficientDataError("Etiket vektörü boş veya tek boyutlu değil")
    if not np.isin(y, (0, 1)).all():
        raise SingleClassError("Etiketler 0/1 olmalı")
    if len(np.unique(y)) < 2:
        raise SingleClassError("Etiketlerde iki sınıf da bulunmalı")
    return y.astype(np.int64)


def balanced_class_weights(y: np.ndarray) -> Tuple[float, float]:
    """w_c = n / (2·n_c)"""
    n = len(y)
    n1 = int(y.sum())
    return n / (2.0 * (n - n1)), n / (2.0 * n1)


def train_forest(
    X: np.ndarray,
    y: np.ndarray,
    params: Optional[ForestParams] = None,
    seed: int = 0,
    workers: Optional[int] = None,
    feature_names: Optional[Sequence[str]] = None,
) -> ForestModel:
    """
    Rastgele orman eğit.

    Args:
        X: (n, d) özellik matrisi
        y: 0/1 etiketler
        params: Ağaç sayısı, derinlik, yaprak boyutu, özellik alt örneklemesi
        seed: Ana tohum
        workers: Paralel ağaç eğitimi için işçi sayısı
        feature_names: Manifesto kontrolü için özellik adları

    Returns:
        ForestModel
    """
    params = params or ForestParams()
    X = np.asarray(X, dtype=np.float64)
    y = check_binary_labels(y)
    n, d = X.shape
    if n != len(y):
        raise InsufficientDataError(f"X ve y satır sayısı uyuşmuyor: {n} != {len(y)}")
    if n < 2 * params.min_samples_leaf:
        raise InsufficientDataError(f"En az {2 * params.min_samples_leaf} satır gerekli, gelen {n}")

    weights = balanced_class_weights(y) if params.balanced else (1.0, 1.0)
    w = np.where(y == 1, weights[1], weights[0])
    stats = np.column_stack([w * y, w * (1 - y)])
    max_features = params.max_features or max(1, int(np.floor(np.sqrt(d))))
    grower = TreeGrower(
        quality=gini_quality,
        leaf_value=gini_leaf,
        max_depth=params.max_depth,
        min_samples_leaf=params.min_samples_leaf,
        max_features=max_features,
        is_pure=lambda a, b: a == 0 or b == 0,
    )

    def fit_tree(index: int) -> TreeArrays:
        rng = stream(seed, "forest", index)
        rows = rng.integers(0, n, size=n)
        return grower.grow(X, stats, rows, rng)

    trees = ordered_map(fit_tree, range(params.n_trees), workers=workers, desc="Orman ağaçları")
    logger.info(f"Orman eğitildi: {len(trees)} ağaç, {d} özellik, {n} örnek")
    return ForestModel(
        trees=trees,
        params=params,
        n_features=d,
        class_weights=weights,
        seed=seed,
        feature_names=list(feature_names) if feature_names is not None else None,
    )


def forest_predict_proba_batch(model: ForestModel, X: np.ndarray) -> np.ndarray:
    """Ağaç yaprak olasılıklarının ortalaması"""
    X = check_features(X, model.n_features)
    total = np.zeros(len(X), dtype=np.float64)
    for tree in model.trees:
        total += tree.predict(X)
    return np.clip(total / len(model.trees), 0.0, 1.0)


def forest_predict_proba(model: ForestModel, x: np.ndarray) -> float:
    """Tek örnek için q = f_θ(x)"""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        x = x.ravel()
    return float(forest_predict_proba_batch(model, x[None, :])[0])


def forest_importance(model: ForestModel) -> np.ndarray:
    """
    Ortalama safsızlık azalması (MDI).

    Ağaç başına normalize edilip ortalanır, sonra toplam 1 olacak şekilde
    yeniden normalize edilir; hiç bölme yoksa sıfır vektörü.
    """
    total = np.zeros(model.n_features, dtype=np.float64)
    for tree in model.trees:
        gains, _ = tree.feature_gains(model.n_features)
        s = gains.sum()
        if s > 0:
            total += gains / s
    s = total.sum()
    return total / s if s > 0 else total
