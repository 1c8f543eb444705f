"""
L1 doğrusal model (±1 kodlu etiketler) ile sıralama.
"""

import logging
import warnings

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import lasso_path

from config.settings import LASSO_GRID_POINTS, LASSO_GRID_RATIO
from featsel.rankers.base_ranker import BaseRanker, order_by_scores

logger = logging.getLogger(__name__)


class LassoRanker(BaseRanker):
    """
    λ, λ_max'tan λ_max·1e-3'e 50 noktalı logaritmik ızgarada taranır;
    en fazla top_k sıfırdan farklı katsayı veren en küçük λ seçilir.
    Sıra |katsayı|, eşitlikte |Xᵀy|, sonra indis.
    """

    tag = "LASSO"

    def _rank(self, X, y, seed, cache):
        n = X.shape[0]
        target = np.where(y == 1, 1.0, -1.0)
        target = target - target.mean()
        Xc = X - X.mean(axis=0)
        corr = np.abs(Xc.T @ target)
        lambda_max = float(corr.max()) / n
        if lambda_max == 0.0:
            return order_by_scores(np.zeros(X.shape[1])), np.zeros(X.shape[1])

        alphas = np.geomspace(lambda_max, lambda_max * LASSO_GRID_RATIO, LASSO_GRID_POINTS)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            path_alphas, coefs, _ = lasso_path(Xc, target, alphas=alphas)
        chosen = 0
        for k in np.argsort(-path_alphas, kind="stable"):
            if np.count_nonzero(coefs[:, k]) <= self.top_k:
                chosen = k
        magnitude = np.abs(coefs[:, chosen])
        logger.debug(f"LASSO λ={path_alphas[chosen]:.4g}, {np.count_nonzero(magnitude)} sıfırdan farklı katsayı")
        return order_by_scores(magnitude, corr), magnitude
