"""
Düz dizilerle saklanan ikili karar ağacı (CART).

Aynı büyütme kodu iki amaç için kullanılır:
  * sınıflandırma: örnek istatistikleri (w·y, w·(1−y)), Gini azalması
  * Newton (GBDT): örnek istatistikleri (g, h), XGBoost kazancı

Bölme araması özellikleri artan indis sırasında, eşikleri artan sırada
tarar; yalnızca kesin daha büyük kazanç önceki adayı geçer.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from utils.exceptions import DimensionMismatchError

LEAF = -1
_GAIN_EPS = 1e-12

QualityFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class TreeArrays:
    """Oluşturulma sırasıyla numaralanmış düğüm dizileri (kök 0)"""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray
    gain: np.ndarray
    depth: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(len(self.feature))

    @property
    def is_leaf(self) -> np.ndarray:
        return self.feature == LEAF

    @property
    def max_depth(self) -> int:
        return int(self.depth.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Her örneğin düştüğü yaprak indisi"""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            current = node[rows]
            go_left = X[rows, self.feature[current]] <= self.threshold[current]
            node[rows] = np.where(go_left, self.left[current], self.right[current])
            active[rows] = self.feature[node[rows]] != LEAF
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def feature_gains(self, n_features: int) -> Tuple[np.ndarray, np.ndarray]:
        """(özellik başına toplam kazanç, bölme sayısı)"""
        internal = ~self.is_leaf
        gains = np.bincount(self.feature[internal], weights=self.gain[internal], minlength=n_features)
        counts = np.bincount(self.feature[internal], minlength=n_features).astype(np.float64)
        return gains, counts

    def to_dict(self) -> Dict[str, list]:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
            "gain": self.gain.tolist(),
            "depth": self.depth.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, list]) -> "TreeArrays":
        return cls(
            feature=np.asarray(data["feature"], dtype=np.int64),
            threshold=np.asarray(data["threshold"], dtype=np.float64),
            left=np.asarray(data["left"], dtype=np.int64),
            right=np.asarray(data["right"], dtype=np.int64),
            value=np.asarray(data["value"], dtype=np.float64),
            n_samples=np.asarray(data["n_samples"], dtype=np.int64),
            gain=np.asarray(data["gain"], dtype=np.float64),
            depth=np.asarray(data["depth"], dtype=np.int64),
        )


# =============================================================================
# KALİTE FONKSİYONLARI
# =============================================================================
def gini_quality(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(S1² + S0²) / W; ağırlıklı Gini azalması q_L + q_R − q_P olur"""
    total = a + b
    return np.divide(a * a + b * b, total, out=np.zeros_like(total), where=total > 0)


def gini_leaf(a: float, b: float) -> float:
    total = a + b
    return float(a / total) if total > 0 else 0.0


def newton_quality(reg_lambda: float) -> QualityFn:
    def quality(g: np.ndarray, h: np.ndarray) -> np.ndarray:
        return g * g / (h + reg_lambda)
    return quality


def newton_leaf(reg_lambda: float) -> Callable[[float, float], float]:
    def leaf(g: float, h: float) -> float:
        return float(-g / (h + reg_lambda))
    return leaf


# =============================================================================
# BÜYÜTME
# =============================================================================
class TreeGrower:
    """
    Genel ağaç büyütücü.

    Args:
        quality: Kümülatif (a, b) toplamlarından düğüm kalitesi
        leaf_value: (a, b) toplamlarından yaprak değeri
        gain_scale: Kazanç çarpanı (Newton için 0.5)
        max_depth: En büyük derinlik
        min_samples_leaf: Yapraktaki en az örnek (bootstrap tekrarları sayılır)
        max_features: Bölme başına denenecek özellik sayısı (None: hepsi)
        is_pure: Düğümün bölünmeye gerek duymadığını söyleyen koşul
    """

    def __init__(
        self,
        quality: QualityFn,
        leaf_value: Callable[[float, float], float],
        gain_scale: float = 1.0,
        max_depth: int = 16,
        min_samples_leaf: int = 1,
        max_features: Optional[int] = None,
        is_pure: Optional[Callable[[float, float], bool]] = None,
    ):
        self.quality = quality
        self.leaf_value = leaf_value
        self.gain_scale = gain_scale
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.is_pure = is_pure or (lambda a, b: False)

    def _best_split(
        self,
        X: np.ndarray,
        stats: np.ndarray,
        idx: np.ndarray,
        features: np.ndarray,
    ) -> Tuple[int, float, float]:
        """(özellik, eşik, kazanç); bölme yoksa özellik LEAF"""
        n = len(idx)
        msl = self.min_samples_leaf
        total = stats[idx].sum(axis=0)
        parent_q = float(self.quality(np.array([total[0]]), np.array([total[1]]))[0])
        best = (LEAF, 0.0, 0.0)
        positions = np.arange(1, n)  # sol çocukta kalan örnek sayısı
        valid_count = (positions >= msl) & (n - positions >= msl)
        if not valid_count.any():
            return best
        for f in features:
            column = X[idx, f]
            order = np.argsort(column, kind="stable")
            xs = column[order]
            cum = np.cumsum(stats[idx][order], axis=0)[:-1]
            valid = valid_count & (xs[:-1] < xs[1:])
            if not valid.any():
                continue
            left_q = self.quality(cum[:, 0], cum[:, 1])
            right_q = self.quality(total[0] - cum[:, 0], total[1] - cum[:, 1])
            gains = self.gain_scale * (left_q + right_q - parent_q)
            gains = np.where(valid, gains, -np.inf)
            pos = int(np.argmax(gains))
            gain = float(gains[pos])
            if gain > _GAIN_EPS * max(1.0, abs(parent_q)) and gain > best[2]:
                threshold = 0.5 * (xs[pos] + xs[pos + 1])
                if threshold >= xs[pos + 1]:
                    threshold = xs[pos]
                best = (int(f), float(threshold), gain)
        return best

    def grow(
        self,
        X: np.ndarray,
        stats: np.ndarray,
        rows: np.ndarray,
        rng: Optional[np.random.Generator] = None,
    ) -> TreeArrays:
        """
        Ağacı büyüt.

        Args:
            X: (n, d) özellik matrisi
            stats: (n, 2) örnek istatistikleri
            rows: Kullanılacak satır indisleri (tekrarlı olabilir)
            rng: Özellik alt örneklemesi için üreteç
        """
        d = X.shape[1]
        m = d if self.max_features is None else min(self.max_features, d)
        nodes: List[list] = []

        def new_node(depth: int, idx: np.ndarray) -> int:
            a, b = stats[idx].sum(axis=0)
            nodes.append([LEAF, 0.0, LEAF, LEAF, self.leaf_value(float(a), float(b)), len(idx), 0.0, depth])
            return len(nodes) - 1

        root = new_node(0, rows)
        stack = [(root, rows)]
        while stack:
            node_id, idx = stack.pop()
            depth = nodes[node_id][7]
            a, b = stats[idx].sum(axis=0)
            if depth >= self.max_depth or len(idx) < 2 * self.min_samples_leaf or self.is_pure(float(a), float(b)):
                continue
            if m < d:
                features = np.sort(rng.choice(d, size=m, replace=False))
            else:
                features = np.arange(d)
            feature, threshold, gain = self._best_split(X, stats, idx, features)
            if feature == LEAF:
                continue
            go_left = X[idx, feature] <= threshold
            left_idx, right_idx = idx[go_left], idx[~go_left]
            left_id = new_node(depth + 1, left_idx)
            right_id = new_node(depth + 1, right_idx)
            nodes[node_id][0:4] = [feature, threshold, left_id, right_id]
            nodes[node_id][6] = gain
            # sağ önce yığına: sol alt ağaç önce işlenir
            stack.append((right_id, right_idx))
            stack.append((left_id, left_idx))

        columns = list(zip(*nodes))
        return TreeArrays(
            feature=np.asarray(columns[0], dtype=np.int64),
            threshold=np.asarray(columns[1], dtype=np.float64),
            left=np.asarray(columns[2], dtype=np.int64),
            right=np.asarray(columns[3], dtype=np.int64),
            value=np.asarray(columns[4], dtype=np.float64),
            n_samples=np.asarray(columns[5], dtype=np.int64),
            gain=np.asarray(columns[6], dtype=np.float64),
            depth=np.asarray(columns[7], dtype=np.int64),
        )


def check_features(X: np.ndarray, n_features: int) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != n_features:
        raise DimensionMismatchError(f"Özellik boyutu {X.shape[1]}, model {n_features} bekliyor")
    return X
