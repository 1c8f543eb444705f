"""
Rastgele orman MDI önemi ile sıralama.
"""

from ensemble.forest import train_forest
from featsel.rankers.base_ranker import BaseRanker, order_by_scores
from models.schemas import ForestParams
from utils.rng import derive_seed


class ForestImportanceRanker(BaseRanker):
    tag = "RF-IMP"

    def _rank(self, X, y, seed, cache):
        model = train_forest(X, y, ForestParams(n_trees=self.n_trees), seed=derive_seed(seed, self.tag))
        return order_by_scores(model.importances), model.importances
