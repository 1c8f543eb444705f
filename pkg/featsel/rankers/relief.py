"""
Relief-F (ikili sınıf, k en yakın isabet/ıska, Manhattan mesafesi).
"""

import numpy as np
from scipy.spatial.distance import cdist

from config.settings import RELIEF_NEIGHBORS
from featsel.rankers.base_ranker import BaseRanker, order_by_scores


class ReliefRanker(BaseRanker):
    tag = "RELIEFF"

    def __init__(self, *args, n_neighbors: int = RELIEF_NEIGHBORS, **kwargs):
        super().__init__(*args, **kwargs)
        self.n_neighbors = n_neighbors

    def _rank(self, X, y, seed, cache):
        n, d = X.shape
        span = X.max(axis=0) - X.min(axis=0)
        span = np.where(span > 0, span, 1.0)
        distances = cdist(X, X, metric="cityblock")
        np.fill_diagonal(distances, np.inf)
        weights = np.zeros(d)
        for i in range(n):
            order = np.argsort(distances[i], kind="stable")
            order = order[order != i]
            same = y[order] == y[i]
            hits = order[same][: self.n_neighbors]
            misses = order[~same][: self.n_neighbors]
            if len(hits):
                weights -= (np.abs(X[hits] - X[i]) / span).mean(axis=0)
            if len(misses):
                weights += (np.abs(X[misses] - X[i]) / span).mean(axis=0)
        weights /= n
        return order_by_scores(weights), weights
