"""
Featsel package initialization.
"""

from .filtering import distance_correlation, drop_correlated, drop_near_zero_variance
from .rankers import FeatureRanking, RankerFactory
from .selector import (
    FeatureSelectionModel,
    SelectedSubset,
    fit_feature_pipeline,
    rank_all,
    rank_features,
    select_stable,
)
from .standardize import StandardizationParams, fit_apply_standardize, fit_standardize

__all__ = [
    'StandardizationParams',
    'fit_standardize',
    'fit_apply_standardize',
    'drop_near_zero_variance',
    'drop_correlated',
    'distance_correlation',
    'FeatureRanking',
    'RankerFactory',
    'SelectedSubset',
    'FeatureSelectionModel',
    'rank_features',
    'rank_all',
    'select_stable',
    'fit_feature_pipeline',
]
