"""
Kararlı özellik alt kümesi seçimi ve uçtan uca seçim zinciri.

Zincir: düşük varyans eleme → standardizasyon → korelasyon filtresi →
altı sıralama stratejisi → top-k kesişimi (ortalama sıraya göre tamamlanır
veya kırpılır).
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from config.settings import RANKING_FOREST_TREES, RANKING_STRATEGIES, SELECT_TARGET, SELECT_TOP_K
from featsel.filtering import drop_correlated, drop_near_zero_variance
from featsel.rankers import FeatureRanking, RankerFactory
from featsel.standardize import StandardizationParams, fit_standardize
from models.schemas import FeatselConfig
from utils.exceptions import DimensionMismatchError, InsufficientDataError
from utils.parallel import ordered_map
from utils.serialization import read_json, write_json

logger = logging.getLogger(__name__)

FEATSEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SelectedSubset:
    """
    indices: ayarlanmış küme (ortalama sıraya göre, en iyi önce)
    intersection: ham kesişim (artan indis)
    top_sets: strateji → top-k indis listesi
    """

    indices: List[int]
    intersection: List[int]
    top_sets: Dict[str, List[int]]
    mean_rank: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "indices": self.indices,
            "intersection": self.intersection,
            "top_sets": self.top_sets,
            "mean_rank": self.mean_rank,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "SelectedSubset":
        return cls(
            indices=[int(i) for i in data["indices"]],
            intersection=[int(i) for i in data["intersection"]],
            top_sets={k: [int(i) for i in v] for k, v in data["top_sets"].items()},
            mean_rank=[float(r) for r in data.get("mean_rank", [])],
        )


def rank_features(
    X: np.ndarray,
    y: np.ndarray,
    strategy: str,
    seed: int,
    top_k: int = SELECT_TOP_K,
    n_trees: int = RANKING_FOREST_TREES,
    cache: Optional[dict] = None,
) -> FeatureRanking:
    """Tek bir strateji ile sırala (bkz. RankerFactory)"""
    ranker = RankerFactory.create_ranker(strategy, top_k=top_k, n_trees=n_trees)
    return ranker.rank(X, y, seed, cache=cache)


def rank_all(
    X: np.ndarray,
    y: np.ndarray,
    seed: int,
    strategies: Sequence[str] = RANKING_STRATEGIES,
    top_k: int = SELECT_TOP_K,
    n_trees: int = RANKING_FOREST_TREES,
    workers: Optional[int] = None,
) -> List[FeatureRanking]:
    """Tüm stratejileri çalıştır; GBDT tabanlı iki strateji aynı öğreniciyi kullanır"""
    cache: dict = {}
    gbdt_tags = [s for s in strategies if s in ("XGB-GAIN", "GBDT-FREQ")]
    others = [s for s in strategies if s not in gbdt_tags]

    def run(strategy: str) -> FeatureRanking:
        return rank_features(X, y, strategy, seed, top_k=top_k, n_trees=n_trees, cache=cache)

    by_tag = dict(zip(others, ordered_map(run, others, workers=workers, desc="Sıralama stratejileri")))
    for strategy in gbdt_tags:
        by_tag[strategy] = run(strategy)
    return [by_tag[s] for s in strategies]


def mean_ranks(rankings: Sequence[FeatureRanking]) -> np.ndarray:
    positions = np.stack([r.positions() for r in rankings])
    return positions.mean(axis=0)


def select_stable(
    rankings: Sequence[FeatureRanking],
    top_k: int = SELECT_TOP_K,
    target: int = SELECT_TARGET,
) -> SelectedSubset:
    """
    Stratejilerin top-k kümelerinin kesişimi; |∩| ≠ target ise ortalama
    sıraya (Borda) göre tamamla veya kırp.

    Args:
        rankings: Aynı özellik uzayı üzerinde sıralamalar
        top_k: Strateji başına tutulan özellik sayısı
        target: Hedef alt küme boyutu

    Returns:
        SelectedSubset
    """
    if not rankings:
        raise InsufficientDataError("En az bir sıralama gerekli")
    d = len(rankings[0].order)
    if any(len(r.order) != d for r in rankings):
        raise DimensionMismatchError("Sıralamalar aynı özellik uzayında değil")
    target = min(target, d)

    top_sets = {r.strategy: [int(i) for i in r.top(top_k)] for r in rankings}
    common = set(top_sets[rankings[0].strategy])
    for members in top_sets.values():
        common &= set(members)
    intersection = sorted(common)

    score = mean_ranks(rankings)
    by_rank = [int(i) for i in np.lexsort((np.arange(d), score))]
    if len(intersection) >= target:
        chosen = [i for i in by_rank if i in common][:target]
    else:
        chosen = [i for i in by_rank if i in common]
        chosen += [i for i in by_rank if i not in common][: target - len(chosen)]
        chosen = [i for i in by_rank if i in set(chosen)]
    logger.info(f"Kararlı seçim: kesişim {len(intersection)}, ayarlanmış küme {len(chosen)}")
    return SelectedSubset(
        indices=chosen,
        intersection=intersection,
        top_sets=top_sets,
        mean_rank=[float(s) for s in score],
    )


# =============================================================================
# UÇTAN UCA SEÇİM MODELİ
# =============================================================================
@dataclass
class FeatureSelectionModel:
    """
    Eğitim kümesinde öğrenilmiş seçim zinciri.

    selected: tam özellik uzayındaki seçili sütun indisleri
    params: yalnızca seçili sütunlar için standardizasyon
    """

    n_input: int
    selected: List[int]
    params: StandardizationParams
    nzv_kept: List[int]
    decorrelated: List[int]
    rankings: List[FeatureRanking]
    subset: SelectedSubset
    feature_names: Optional[List[str]] = None
    seed: int = 0

    @property
    def selected_names(self) -> Optional[List[str]]:
        if self.feature_names is None:
            return None
        return [self.feature_names[i] for i in self.selected]

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Tam özellik matrisi → standart seçili sütunlar"""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_input:
            raise DimensionMismatchError(f"Beklenen {self.n_input} sütun, gelen {X.shape[1]}")
        return self.params.apply(X[:, self.selected])

    def to_dict(self) -> Dict:
        return {
            "kind": "feature-selection",
            "format_version": FEATSEL_FORMAT_VERSION,
            "n_input": self.n_input,
            "seed": self.seed,
            "selected": self.selected,
            "params": self.params.to_dict(),
            "nzv_kept": self.nzv_kept,
            "decorrelated": self.decorrelated,
            "rankings": [r.to_dict() for r in self.rankings],
            "subset": self.subset.to_dict(),
            "feature_names": self.feature_names,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "FeatureSelectionModel":
        if data.get("kind") != "feature-selection" or data.get("format_version") != FEATSEL_FORMAT_VERSION:
            raise DimensionMismatchError("Özellik seçim modeli formatı tanınmadı")
        return cls(
            n_input=int(data["n_input"]),
            selected=[int(i) for i in data["selected"]],
            params=StandardizationParams.from_dict(data["params"]),
            nzv_kept=[int(i) for i in data["nzv_kept"]],
            decorrelated=[int(i) for i in data["decorrelated"]],
            rankings=[FeatureRanking.from_dict(r) for r in data["rankings"]],
            subset=SelectedSubset.from_dict(data["subset"]),
            feature_names=data.get("feature_names"),
            seed=int(data.get("seed", 0)),
        )

    def save(self, path: Path) -> Path:
        return write_json(self.to_dict(), path)

    @classmethod
    def load(cls, path: Path) -> "FeatureSelectionModel":
        return cls.from_dict(read_json(path))


def fit_feature_pipeline(
    X: np.ndarray,
    y: np.ndarray,
    cfg: Optional[FeatselConfig] = None,
    seed: int = 0,
    feature_names: Optional[Sequence[str]] = None,
    workers: Optional[int] = None,
) -> FeatureSelectionModel:
    """
    Seçim zincirini eğitim matrisinde çalıştır.

    Args:
        X: (n, d) ham özellik matrisi
        y: 0/1 etiketler
        cfg: Eşikler, top_k/target ve stratejiler
        seed: Ana tohum
        feature_names: İsteğe bağlı sütun adları

    Returns:
        FeatureSelectionModel
    """
    cfg = cfg or FeatselConfig()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 3:
        raise InsufficientDataError("Özellik seçimi için en az 3 satır gerekli")

    nzv = drop_near_zero_variance(X, cfg.nzv_eps)
    if not nzv:
        raise InsufficientDataError("Tüm özellikler sıfıra yakın varyanslı")
    local = drop_correlated(X[:, nzv], cfg.pearson_max, cfg.dcor_max, seed=seed)
    surviving = [nzv[k] for k in local]
    logger.info(f"Filtreler: {X.shape[1]} → NZV {len(nzv)} → korelasyon {len(surviving)}")

    Z = fit_standardize(X[:, surviving]).apply(X[:, surviving])
    rankings = rank_all(
        Z, y, seed,
        strategies=cfg.strategies,
        top_k=cfg.top_k,
        n_trees=cfg.ranking_trees,
        workers=workers,
    )
    subset = select_stable(rankings, cfg.top_k, cfg.target)
    selected = [surviving[k] for k in subset.indices]
    return FeatureSelectionModel(
        n_input=X.shape[1],
        selected=selected,
        params=fit_standardize(X[:, selected]),
        nzv_kept=nzv,
        decorrelated=surviving,
        rankings=rankings,
        subset=subset,
        feature_names=list(feature_names) if feature_names is not None else None,
        seed=seed,
    )


def subset_for_target(model: FeatureSelectionModel, X: np.ndarray, target: int, top_k: Optional[int] = None) -> FeatureSelectionModel:
    """
    Aynı sıralamalarla farklı hedef boyutu için model türet (özellik sayısı duyarlılığı).
    """
    top_k = max(top_k or len(model.subset.top_sets[model.rankings[0].strategy]), target)
    subset = select_stable(model.rankings, top_k, target)
    selected = [model.decorrelated[k] for k in subset.indices]
    X = np.asarray(X, dtype=np.float64)
    return FeatureSelectionModel(
        n_input=model.n_input,
        selected=selected,
        params=fit_standardize(X[:, selected]),
        nzv_kept=model.nzv_kept,
        decorrelated=model.decorrelated,
        rankings=model.rankings,
        subset=subset,
        feature_names=model.feature_names,
        seed=model.seed,
    )
