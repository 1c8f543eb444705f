"""
Evalmetrics package initialization.
"""

from .metrics import MetricsRow, MetricSummary, compute_metrics, summarize
from .report import write_report
from .strata import stratified_lesion_dice, stratify_by_size
from .wilcoxon import WilcoxonResult, wilcoxon_signed_rank

__all__ = [
    'MetricsRow',
    'MetricSummary',
    'compute_metrics',
    'summarize',
    'stratify_by_size',
    'stratified_lesion_dice',
    'wilcoxon_signed_rank',
    'WilcoxonResult',
    'write_report',
]
