"""
Radiomics package initialization.
"""

from .sampler import NegativeSampler, SamplingResult, sample_negative_regions, evaluate_candidate
from .candidates import extract_positive_regions, extract_candidate_regions, harvest_hard_negatives
from .manifest import FeatureManifest
from .extractor import FeatureExtractor, FeatureVector, extract_features
from .band import boundary_band
from .wavelet import wavelet_subbands, inverse_wavelet

__all__ = [
    'NegativeSampler',
    'SamplingResult',
    'sample_negative_regions',
    'evaluate_candidate',
    'extract_positive_regions',
    'extract_candidate_regions',
    'harvest_hard_negatives',
    'FeatureManifest',
    'FeatureExtractor',
    'FeatureVector',
    'extract_features',
    'boundary_band',
    'wavelet_subbands',
    'inverse_wavelet',
]
