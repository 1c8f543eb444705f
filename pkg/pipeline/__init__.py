"""
Pipeline package initialization.
"""
from pipeline.ablation import (
    ABLATION_ROWS,
    AblationResult,
    RobustnessResult,
    desk_scale_config,
    run_ablation,
    run_robustness,
)
from pipeline.manifest import RunManifest, StageRecord, config_hash
from pipeline.orchestrator import (
    STAGES,
    CaseInputs,
    CaseResult,
    PipelineOrchestrator,
    case_from_phantom,
    load_case,
    run_case,
    run_pipeline,
)
from pipeline.training import (
    Fold,
    TrainedModels,
    TrainingCase,
    build_region_dataset,
    feature_count_sweep,
    make_case_folds,
    train_models,
)

__all__ = [
    'ABLATION_ROWS',
    'AblationResult',
    'RobustnessResult',
    'desk_scale_config',
    'run_ablation',
    'run_robustness',
    'RunManifest',
    'StageRecord',
    'config_hash',
    'STAGES',
    'CaseInputs',
    'CaseResult',
    'PipelineOrchestrator',
    'case_from_phantom',
    'load_case',
    'run_case',
    'run_pipeline',
    'Fold',
    'TrainedModels',
    'TrainingCase',
    'build_region_dataset',
    'feature_count_sweep',
    'make_case_folds',
    'train_models',
]
