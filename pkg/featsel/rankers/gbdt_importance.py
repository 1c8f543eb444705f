"""
GBDT kazanç (XGB-GAIN) ve bölme sıklığı (GBDT-FREQ) sıralayıcıları.

İki strateji aynı öğreniciyi paylaşır; öğrenici cache üzerinden bir kez eğitilir.
"""

from ensemble.gbdt import gbdt_importances, train_gbdt
from featsel.rankers.base_ranker import BaseRanker, order_by_scores
from utils.rng import derive_seed

_CACHE_KEY = "gbdt"


def shared_gbdt(X, y, seed, cache):
    if _CACHE_KEY not in cache:
        cache[_CACHE_KEY] = train_gbdt(X, y, seed=derive_seed(seed, "GBDT"))
    return cache[_CACHE_KEY]


class GbdtGainRanker(BaseRanker):
    tag = "XGB-GAIN"

    def _rank(self, X, y, seed, cache):
        gain, freq = gbdt_importances(shared_gbdt(X, y, seed, cache))
        return order_by_scores(gain, freq), gain


class GbdtFrequencyRanker(BaseRanker):
    tag = "GBDT-FREQ"

    def _rank(self, X, y, seed, cache):
        gain, freq = gbdt_importances(shared_gbdt(X, y, seed, cache))
        return order_by_scores(freq, gain), freq
