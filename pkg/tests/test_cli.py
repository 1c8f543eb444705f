"""
Komut satırı: alt komutlar ve çıkış kodları.
"""

import logging

import numpy as np
import pytest

from config.settings import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_STAGE_FAILURE
from main import main
from models.volume import ProbMap3D
from utils.logging_setup import JsonLineFormatter, setup_logging
from utils.serialization import read_json, write_json
from volumes.io import load_volume, save_volume


@pytest.fixture
def case_dir(small_spec, tmp_path):
    """phantom komutuyla yazılmış vaka dizini"""
    spec_path = write_json(small_spec.model_dump(mode="json"), tmp_path / "spec.json")
    out = tmp_path / "case"
    assert main(["phantom", "--spec", str(spec_path), "--out", str(out)]) == EXIT_OK
    return out


class TestPhantomCommand:
    def test_writes_case_files(self, case_dir):
        for name in ("ct.mha", "liver.mha", "tumor.mha", "p_liver.mha", "p_tumor.mha", "vessels.mha"):
            assert (case_dir / name).exists()
        assert read_json(case_dir / "phantom_spec.json")["seed"] == 7
        assert load_volume(case_dir / "tumor.mha", "mask").count > 0


class TestPostprocAndEval:
    def test_postproc(self, case_dir, tmp_path):
        out = tmp_path / "mask.mha"
        code = main(["postproc", "--prob", str(case_dir / "p_tumor.mha"), "--out", str(out), "--no-temporal"])
        assert code == EXIT_OK
        assert load_volume(out, "mask").count > 0

    def test_eval_perfect(self, case_dir, tmp_path):
        tumor = str(case_dir / "tumor.mha")
        out = tmp_path / "report.csv"
        assert main(["eval", "--pred", tumor, "--truth", tumor, "--out", str(out)]) == EXIT_OK
        assert read_json(tmp_path / "report.json")["cases"][0]["dice"] == 1.0

    def test_eval_count_mismatch(self, case_dir, tmp_path):
        tumor = str(case_dir / "tumor.mha")
        code = main(["eval", "--pred", tumor, "--pred", tumor, "--truth", tumor, "--out", str(tmp_path / "r.csv")])
        assert code == EXIT_CONFIG_ERROR


class TestPipelineCommand:
    def args(self, case_dir, tmp_path, p_tumor=None):
        return [
            "pipeline",
            "--set", f"paths.ct={case_dir / 'ct.mha'}",
            "--set", f"paths.p_tumor={p_tumor or case_dir / 'p_tumor.mha'}",
            "--set", f"paths.tumor_gt={case_dir / 'tumor.mha'}",
            "--output-dir", str(tmp_path / "runs"),
            "--no-radiomics-filter",
            "--no-cnn-refine",
        ]

    def test_runs_without_models(self, case_dir, tmp_path):
        assert main(self.args(case_dir, tmp_path)) == EXIT_OK
        assert (tmp_path / "runs" / "case" / "tumor_refined.mha").exists()
        assert (tmp_path / "runs" / "case" / "report.csv").exists()

    def test_missing_inputs(self, tmp_path):
        assert main(["pipeline", "--output-dir", str(tmp_path)]) == EXIT_CONFIG_ERROR

    def test_invalid_override(self, case_dir, tmp_path):
        assert main(self.args(case_dir, tmp_path) + ["--set", "tau_rf=2.5"]) == EXIT_CONFIG_ERROR

    def test_missing_model_for_enabled_stage(self, case_dir, tmp_path):
        args = [a for a in self.args(case_dir, tmp_path) if a != "--no-cnn-refine"]
        assert main(args) == EXIT_CONFIG_ERROR

    def test_stage_failure_exit_code(self, case_dir, tmp_path):
        wrong = save_volume(ProbMap3D(np.zeros((4, 4, 4)), (1.0, 1.0, 1.0)), tmp_path / "wrong.mha")
        assert main(self.args(case_dir, tmp_path, p_tumor=wrong)) == EXIT_STAGE_FAILURE
        manifest = read_json(tmp_path / "runs" / "case" / "manifest.json")
        assert manifest["failed_stage"] == "preprocess"


def test_unknown_command():
    assert main(["nope"]) == EXIT_CONFIG_ERROR


class TestLogging:
    def test_json_lines_by_default(self, case_dir, tmp_path):
        out = tmp_path / "mask.mha"
        assert main(["postproc", "--prob", str(case_dir / "p_tumor.mha"), "--out", str(out)]) == EXIT_OK
        handlers = logging.getLogger().handlers
        assert any(isinstance(h.formatter, JsonLineFormatter) for h in handlers)
        setup_logging("WARNING")

    def test_colour_console_on_request(self, case_dir, tmp_path):
        out = tmp_path / "mask.mha"
        assert main(["--no-log-json", "postproc", "--prob", str(case_dir / "p_tumor.mha"), "--out", str(out)]) == EXIT_OK
        assert not any(isinstance(h.formatter, JsonLineFormatter) for h in logging.getLogger().handlers)
        setup_logging("WARNING")
