"""
Ensemble package initialization.
"""

from .forest import ForestModel, train_forest, forest_predict_proba, forest_predict_proba_batch, forest_importance
from .gbdt import GbdtModel, train_gbdt, gbdt_predict_proba, gbdt_importances
from .suppressor import SuppressionResult, suppress_false_positives, apply_suppression
from .serialization import save_forest, load_forest, save_gbdt, load_gbdt

__all__ = [
    'ForestModel',
    'train_forest',
    'forest_predict_proba',
    'forest_predict_proba_batch',
    'forest_importance',
    'GbdtModel',
    'train_gbdt',
    'gbdt_predict_proba',
    'gbdt_importances',
    'SuppressionResult',
    'suppress_false_positives',
    'apply_suppression',
    'save_forest',
    'load_forest',
    'save_gbdt',
    'load_gbdt',
]
