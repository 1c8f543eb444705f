"""
Pipeline: vaka katları, orkestratör aşamaları, manifesto ve ablasyon.
"""

import numpy as np
import pytest

from evalmetrics.metrics import metrics_from_counts
from models.volume import Mask3D, ProbMap3D
from phantom.generator import generate_phantom
from phantom.suite import standard_suite
from pipeline.ablation import ABLATION_ROWS, AblationResult, AblationRow, desk_scale_config, run_ablation
from pipeline.manifest import RunManifest, StageRecord, config_hash
from pipeline.orchestrator import (
    STAGES,
    CaseInputs,
    PipelineOrchestrator,
    case_from_phantom,
    run_case,
)
from pipeline.training import TrainedModels, TrainingCase, make_case_folds, train_models
from utils.exceptions import ConfigError, InsufficientDataError, StageError
from utils.serialization import read_json

NO_MODELS = dict(radiomics_filter=False, cnn_refine=False)


@pytest.fixture
def clean_case(clean_phantom) -> CaseInputs:
    return case_from_phantom(clean_phantom, "clean")


@pytest.fixture
def degraded_case(degraded_phantom) -> CaseInputs:
    return case_from_phantom(degraded_phantom, "degraded")


class TestFolds:
    def test_partition(self):
        folds = make_case_folds(10, k=5, val_fraction=0.1, seed=1)
        assert len(folds) == 5
        tested = sorted(i for fold in folds for i in fold.test)
        assert tested == list(range(10))
        for fold in folds:
            parts = [set(fold.train), set(fold.val), set(fold.test)]
            assert set.union(*parts) == set(range(10))
            assert not (parts[0] & parts[1]) and not (parts[0] & parts[2]) and not (parts[1] & parts[2])
            assert len(fold.val) == 1

    def test_deterministic(self):
        assert make_case_folds(8, k=4, seed=3) == make_case_folds(8, k=4, seed=3)

    @pytest.mark.parametrize("k", [1, 11])
    def test_k_range(self, k):
        with pytest.raises(ConfigError):
            make_case_folds(10, k=k)

    def test_no_validation(self):
        for fold in make_case_folds(6, k=3, val_fraction=0.0, seed=2):
            assert fold.val == []


class TestOrchestrator:
    def test_binarize_only_recovers_clean_tumor(self, small_config, clean_case):
        config = small_config.with_toggles(morph=False, temporal=False, **NO_MODELS)
        result = run_case(clean_case, config, TrainedModels())
        assert result.dice() == pytest.approx(1.0)
        assert result.strata["small"]["n_lesions"] + result.strata["medium"]["n_lesions"] == 1

    def test_skipped_stages_recorded(self, small_config, degraded_case):
        result = run_case(degraded_case, small_config.with_toggles(**NO_MODELS), TrainedModels())
        statuses = {record.stage: record.status for record in result.manifest.stages}
        assert list(statuses) == list(STAGES)
        assert statuses["candidates"] == statuses["radiomics_filter"] == statuses["cnn_refine"] == "skipped"
        assert statuses["morph"] == statuses["temporal"] == statuses["metrics"] == "ok"
        assert "foreground" in result.manifest.stage("morph").stats
        assert set(result.intermediates) == {"binarize", "morph", "temporal"}
        assert result.metrics is not None

    def test_metrics_skipped_without_truth(self, small_config, degraded_case):
        case = CaseInputs("unlabelled", degraded_case.ct, degraded_case.p_tumor)
        result = run_case(case, small_config.with_toggles(**NO_MODELS), TrainedModels())
        assert result.manifest.stage("metrics").status == "skipped"
        assert result.metrics is None
        assert np.isnan(result.dice())

    def test_outputs_written(self, small_config, degraded_case, tmp_path):
        run_case(degraded_case, small_config.with_toggles(**NO_MODELS), TrainedModels(), output_dir=tmp_path)
        directory = tmp_path / "degraded"
        assert (directory / "tumor_refined.mha").exists()
        assert (directory / "stage_binarize.mha").exists()
        manifest = read_json(directory / "manifest.json")
        assert manifest["failed_stage"] is None
        assert manifest["seed"] == small_config.seed
        assert manifest["config_hash"] == config_hash(small_config.with_toggles(**NO_MODELS))

    def test_preflight_missing_models(self, small_config):
        with pytest.raises(ConfigError, match="forest_model"):
            PipelineOrchestrator(small_config, TrainedModels())

    def test_stage_failure_writes_partial(self, small_config, degraded_case, tmp_path, mocker):
        mocker.patch.object(PipelineOrchestrator, "stage_temporal", side_effect=RuntimeError("bozuk"))
        orchestrator = PipelineOrchestrator(small_config.with_toggles(**NO_MODELS), TrainedModels(), tmp_path)
        with pytest.raises(StageError) as info:
            orchestrator.run(degraded_case)
        assert info.value.stage == "temporal"
        manifest = read_json(tmp_path / "degraded" / "manifest.json")
        assert manifest["failed_stage"] == "temporal"
        assert "RuntimeError" in manifest["stages"][-1]["error"]
        assert (tmp_path / "degraded" / "partial_mask.mha").exists()

    def test_grid_mismatch_fails_preprocess(self, small_config, degraded_case):
        case = CaseInputs("bad", degraded_case.ct, ProbMap3D(np.zeros((5, 5, 5)), (1.0, 1.0, 1.0)))
        with pytest.raises(StageError) as info:
            run_case(case, small_config.with_toggles(**NO_MODELS), TrainedModels())
        assert info.value.stage == "preprocess"


class TestManifest:
    def test_config_hash(self, small_config):
        assert config_hash(small_config) == config_hash(small_config.model_copy())
        assert config_hash(small_config) != config_hash(small_config.model_copy(update={"seed": 12}))

    def test_record_failure(self, small_config):
        manifest = RunManifest.for_config("c", small_config)
        manifest.record(StageRecord("binarize", "ok"))
        manifest.record(StageRecord("morph", "failed", error="x"))
        assert manifest.failed_stage == "morph"
        assert manifest.stage("binarize").status == "ok"
        assert manifest.stage("metrics") is None
        assert manifest.to_dict()["manifest_version"] == 1


class TestTraining:
    def test_requires_cases(self, small_config):
        with pytest.raises(InsufficientDataError):
            train_models([], small_config)

    @pytest.mark.slow
    def test_full_pipeline_with_trained_models(self, small_config, degraded_phantom, clean_phantom, tmp_path):
        cases = [
            TrainingCase(f"train_{i}", p.ct, p.liver, p.tumor, p.p_tumor)
            for i, p in enumerate([degraded_phantom, clean_phantom])
        ]
        models = train_models(cases, small_config)
        assert models.featsel is not None and models.forest is not None and models.cnn is not None

        paths = models.save(tmp_path / "models")
        config = small_config.model_copy(update={
            "paths": small_config.paths.model_copy(update={k: v for k, v in paths.items()}),
        })
        loaded = TrainedModels.load(config)
        result = run_case(case_from_phantom(degraded_phantom, "degraded"), config, loaded)
        assert all(record.status == "ok" for record in result.manifest.stages)
        assert result.candidate_stats["candidates"] >= 1
        assert isinstance(result.mask, Mask3D)
        assert result.manifest.artifacts["forest_model"] is not None


class TestAblation:
    def test_rows_cumulative(self):
        names = [name for name, _ in ABLATION_ROWS]
        assert names == ["baseline", "+morph", "+temporal", "+radiomics", "+cnn"]
        enabled = [sum(toggles.values()) for _, toggles in ABLATION_ROWS]
        assert enabled == [0, 1, 2, 3, 4]

    def test_requires_two_phantoms(self, small_config):
        with pytest.raises(InsufficientDataError):
            run_ablation(standard_suite(n=1, seed=1), small_config)

    def test_desk_scale_config(self):
        config = desk_scale_config()
        assert config.forest.n_trees == 60
        assert config.cnn.channels == (8, 8, 16, 16, 16)

    def test_acceptance_checks(self):
        rows = [AblationRow(name, toggles) for name, toggles in ABLATION_ROWS]
        for row, hits in zip(rows, (70, 80, 85, 90, 95)):
            row.rows = [metrics_from_counts(100, 100, hits, "a"), metrics_from_counts(100, 100, hits + 2, "b")]
        result = AblationResult(rows, None, elapsed_s=600.0)
        assert result.monotone
        assert result.full_dice == pytest.approx(0.96)
        assert result.acceptance() == {"monotone": True, "full_dice": True, "runtime": True}
        assert result.acceptance(max_seconds=300.0)["runtime"] is False

        rows[2].rows = list(rows[1].rows)
        assert not result.monotone
        assert result.to_dict()["acceptance"]["monotone"] is False

    @pytest.mark.slow
    def test_ablation_on_small_noisy_suite(self, small_config):
        result = run_ablation(standard_suite(n=4, seed=2, noisy=True), small_config, k=2)
        assert [row.name for row in result.rows] == [name for name, _ in ABLATION_ROWS]
        for row in result.rows:
            assert len(row.rows) == 4
            assert 0.0 <= row.mean_dice <= 1.0
        assert result.wilcoxon is None
        assert result.monotone
        assert result.row("+cnn").mean_dice >= result.row("baseline").mean_dice
        assert result.elapsed_s > 0.0
