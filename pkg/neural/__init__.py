"""
Neural package initialization.
"""

from .attention import AttentionGateParams, attention_gate, attention_gate_backward
from .band import CnnVoxelClassifier, make_band_dataset, extract_patches, refine_labels
from .cnn3d import Cnn3dModel, backward, forward
from .losses import bce, seg_loss
from .serialization import load_model, save_model, write_history
from .shuffle import pixel_shuffle, pixel_unshuffle
from .trainer import PatchDataset, TrainingResult, train_patch_cnn

__all__ = [
    'Cnn3dModel',
    'forward',
    'backward',
    'bce',
    'seg_loss',
    'AttentionGateParams',
    'attention_gate',
    'attention_gate_backward',
    'pixel_shuffle',
    'pixel_unshuffle',
    'make_band_dataset',
    'extract_patches',
    'refine_labels',
    'CnnVoxelClassifier',
    'PatchDataset',
    'TrainingResult',
    'train_patch_cnn',
    'save_model',
    'load_model',
    'write_history',
]
