"""
Özyinelemeli özellik eleme (RFE).
"""

import logging

import numpy as np

from config.settings import RFE_DROP_FRACTION
from ensemble.forest import train_forest
from featsel.rankers.base_ranker import BaseRanker
from models.schemas import ForestParams
from utils.rng import derive_seed

logger = logging.getLogger(__name__)


class RfeRanker(BaseRanker):
    """
    Her turda orman öneminin en düşük %10'u (en az 1) atılır, top_k kalana
    kadar. Sıra: hayatta kalanlar son önemlerine göre, sonra geç elenenler önce.
    """

    tag = "RFE"

    def _rank(self, X, y, seed, cache):
        d = X.shape[1]
        params = ForestParams(n_trees=self.n_trees)
        remaining = list(range(d))
        eliminated = []  # (tur, önem, indis)
        round_index = 0
        importance = np.zeros(d)
        while True:
            model = train_forest(X[:, remaining], y, params, seed=derive_seed(seed, self.tag, round_index))
            importance = model.importances
            if len(remaining) <= self.top_k:
                break
            n_drop = max(1, int(np.floor(RFE_DROP_FRACTION * len(remaining))))
            n_drop = min(n_drop, len(remaining) - self.top_k)
            # en düşük önem; eşitlikte büyük indis önce atılır
            order = np.lexsort((-np.asarray(remaining), importance))
            drop = set(int(k) for k in order[:n_drop])
            for k in sorted(drop):
                eliminated.append((round_index, float(importance[k]), remaining[k]))
            remaining = [f for k, f in enumerate(remaining) if k not in drop]
            round_index += 1
        logger.debug(f"RFE {round_index} turda {len(remaining)} özelliğe indi")

        n_rounds = round_index
        scores = np.zeros(d)
        for k, f in enumerate(remaining):
            scores[f] = n_rounds + float(importance[k])
        for r, imp, f in eliminated:
            scores[f] = r + imp
        survivors = sorted(range(len(remaining)), key=lambda k: (-importance[k], remaining[k]))
        order = [remaining[k] for k in survivors]
        order += [f for r, imp, f in sorted(eliminated, key=lambda e: (-e[0], -e[1], e[2]))]
        return order, scores
