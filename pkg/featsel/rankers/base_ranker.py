"""
Sıralayıcı temel sınıfı.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from config.settings import RANKING_FOREST_TREES, SELECT_TOP_K
from ensemble.forest import check_binary_labels
from utils.exceptions import EmptyInputError


@dataclass(frozen=True)
class FeatureRanking:
    """Bir stratejinin sıralaması; order en iyiden başlayan sütun indisleri"""

    strategy: str
    order: List[int]
    scores: List[float]

    def top(self, k: int) -> List[int]:
        return self.order[:k]

    def positions(self) -> np.ndarray:
        """Sütun indisi → sıradaki konum (0 en iyi)"""
        pos = np.empty(len(self.order), dtype=np.int64)
        pos[np.asarray(self.order, dtype=np.int64)] = np.arange(len(self.order))
        return pos

    def to_dict(self) -> Dict:
        return {"strategy": self.strategy, "order": list(self.order), "scores": list(self.scores)}

    @classmethod
    def from_dict(cls, data: Dict) -> "FeatureRanking":
        return cls(data["strategy"], [int(i) for i in data["order"]], [float(s) for s in data["scores"]])


def order_by_scores(scores: np.ndarray, *tie_breakers: np.ndarray) -> List[int]:
    """Skora göre azalan; eşitlikte ek anahtarlar (azalan), en son indis (artan)"""
    scores = np.asarray(scores, dtype=np.float64)
    index = np.arange(len(scores))
    keys = [index] + [-np.asarray(t, dtype=np.float64) for t in reversed(tie_breakers)] + [-scores]
    return [int(i) for i in np.lexsort(keys)]


class BaseRanker(ABC):
    """
    Tüm sıralama stratejilerinin temel sınıfı.
    Yeni stratejiler RankerFactory.register_ranker ile eklenebilir.
    """

    tag: str = ""

    def __init__(self, top_k: int = SELECT_TOP_K, n_trees: int = RANKING_FOREST_TREES):
        self.top_k = top_k
        self.n_trees = n_trees

    def rank(self, X: np.ndarray, y: np.ndarray, seed: int, cache: Optional[dict] = None) -> FeatureRanking:
        """
        Özellikleri sırala.

        Args:
            X: (n, d) standart özellik matrisi
            y: 0/1 etiketler (iki sınıf da bulunmalı)
            seed: Ana tohum; strateji kendi akışını türetir
            cache: Stratejiler arasında paylaşılan öğreniciler için sözlük

        Returns:
            FeatureRanking
        """
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] == 0 or X.shape[0] == 0:
            raise EmptyInputError("Sıralama için boş olmayan matris gerekli")
        y = check_binary_labels(y)
        order, scores = self._rank(X, y, seed, cache if cache is not None else {})
        return FeatureRanking(self.tag, order, [float(s) for s in scores])

    @abstractmethod
    def _rank(self, X: np.ndarray, y: np.ndarray, seed: int, cache: dict):
        """(sıra, sütun başına skor) döndür"""
        pass
