"""
Değerlendirme: hacim metrikleri, boyut katmanları, Wilcoxon testi ve rapor.
"""

from itertools import product

import numpy as np
import pytest
from scipy.stats import rankdata

from evalmetrics.metrics import compute_metrics, metrics_from_counts, summarize
from evalmetrics.report import read_report, write_report
from evalmetrics.strata import equivalent_diameter, stratified_lesion_dice, stratum_for
from evalmetrics.wilcoxon import exact_null_counts, wilcoxon_signed_rank
from models.volume import Mask3D
from tests.conftest import sphere, sphere_mask
from utils.exceptions import GridMismatchError, InsufficientDataError
from utils.serialization import read_json

SPACING = (1.0, 1.0, 1.0)
DIMS = (30, 30, 30)


def empty() -> Mask3D:
    return Mask3D(np.zeros(DIMS, dtype=np.uint8), SPACING)


class TestMetrics:
    def test_counts(self):
        row = metrics_from_counts(n_pred=10, n_true=8, n_inter=6, case_id="c1")
        assert row.sensitivity == pytest.approx(0.75)
        assert row.ppv == pytest.approx(0.6)
        assert row.dice == pytest.approx(12.0 / 18.0)

    def test_identical_masks(self):
        m = sphere_mask(DIMS, (15, 15, 15), 5)
        row = compute_metrics(m, m)
        assert row.sensitivity == row.ppv == row.dice == 1.0

    def test_both_empty(self):
        row = compute_metrics(empty(), empty())
        assert (row.sensitivity, row.ppv, row.dice) == (1.0, 1.0, 1.0)
        assert row.empty_pred and row.empty_true

    def test_empty_prediction(self):
        row = compute_metrics(empty(), sphere_mask(DIMS, (15, 15, 15), 3))
        assert (row.sensitivity, row.ppv, row.dice) == (0.0, 0.0, 0.0)

    def test_empty_truth(self):
        row = compute_metrics(sphere_mask(DIMS, (15, 15, 15), 3), empty())
        assert (row.sensitivity, row.ppv, row.dice) == (0.0, 0.0, 0.0)

    def test_grid_checked(self):
        other = Mask3D(np.zeros((30, 30, 29), dtype=np.uint8), SPACING)
        with pytest.raises(GridMismatchError):
            compute_metrics(empty(), other)

    def test_summary(self):
        rows = [metrics_from_counts(10, 10, k) for k in (5, 10)]
        summary = summarize(rows)
        assert summary.n_cases == 2
        assert summary.mean["dice"] == pytest.approx(0.75)
        assert summary.std["dice"] == pytest.approx(np.std([0.5, 1.0], ddof=1))
        assert "±" in summary.format("dice")


class TestStrata:
    def test_equivalent_diameter_of_sphere(self):
        assert equivalent_diameter(4.0 / 3.0 * np.pi * 5.0 ** 3) == pytest.approx(10.0)

    @pytest.mark.parametrize("diameter, expected", [
        (9.9, "small"), (10.0, "medium"), (30.0, "medium"), (30.1, "large"),
    ])
    def test_boundaries_inclusive(self, diameter, expected):
        assert stratum_for(diameter) == expected

    def test_lesion_dice_per_stratum(self):
        small = sphere(DIMS, (5, 5, 5), 2)
        medium = sphere(DIMS, (18, 18, 18), 7)
        truth = Mask3D(small | medium, SPACING)
        prediction = Mask3D(small, SPACING)
        result = stratified_lesion_dice(prediction, truth)
        assert result["small"].n_lesions == 1 and result["small"].mean == pytest.approx(1.0)
        assert result["medium"].n_lesions == 1 and result["medium"].mean == 0.0
        assert result["large"].n_lesions == 0 and np.isnan(result["large"].mean)

    def test_touching_components_merged(self):
        truth = sphere_mask(DIMS, (15, 15, 15), 6)
        pred = np.zeros(DIMS, dtype=bool)
        pred[10:15, 15, 15] = True
        pred[17:20, 15, 15] = True
        result = stratified_lesion_dice(Mask3D(pred, SPACING), truth)
        expected = 2.0 * 8 / (8 + truth.count)
        assert result["medium"].mean == pytest.approx(expected)


class TestWilcoxon:
    def test_exact_all_positive(self):
        result = wilcoxon_signed_rank([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        assert result.method == "exact"
        assert result.statistic == 21.0
        assert result.p_value == pytest.approx(2.0 / 64.0)

    def test_symmetric_differences(self):
        result = wilcoxon_signed_rank([1.0, -1.0, 2.0, -2.0, 3.0, -3.0])
        assert result.statistic == pytest.approx(10.5)
        assert result.p_value == 1.0

    def test_zeros_dropped(self):
        result = wilcoxon_signed_rank([0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
        assert result.n == 5
        assert result.p_value == pytest.approx(2.0 / 32.0)

    def test_too_few(self):
        with pytest.raises(InsufficientDataError):
            wilcoxon_signed_rank([1.0, 2.0, 0.0, 0.0])

    def test_normal_approximation(self):
        result = wilcoxon_signed_rank(np.arange(1.0, 31.0))
        assert result.method == "normal"
        assert result.p_value < 1e-4

    def test_null_counts_total(self):
        counts = exact_null_counts(np.array([2, 4, 6]))
        assert counts.sum() == 8
        assert counts[0] == 1 and counts[12] == 1


class TestReport:
    def test_write_and_read(self, tmp_path):
        rows = [metrics_from_counts(10, 10, 5, "a"), metrics_from_counts(10, 10, 10, "b")]
        path = write_report(rows, tmp_path / "report.csv", extras={"a": {"n_candidates": 3}})
        frame = read_report(path)
        assert frame["case_id"].tolist() == ["a", "b"]
        assert frame["dice"].tolist() == pytest.approx([0.5, 1.0])
        data = read_json(tmp_path / "report.json")
        assert data["cases"][0]["n_candidates"] == 3
        assert data["summary"]["mean"]["dice"] == pytest.approx(0.75)


def enumerated_p_value(diffs) -> float:
    """Tüm işaret desenlerini sayarak iki yönlü tam p"""
    d = np.asarray(diffs, dtype=np.float64)
    d = d[d != 0]
    ranks = rankdata(np.abs(d))
    observed = ranks[d > 0].sum()
    totals = np.array([
        sum(r for r, s in zip(ranks, signs) if s) for signs in product((False, True), repeat=len(d))
    ])
    lower = np.mean(totals <= observed + 1e-9)
    upper = np.mean(totals >= observed - 1e-9)
    return min(1.0, 2.0 * min(lower, upper))


class TestWilcoxonEnumeration:
    @pytest.mark.parametrize("n", range(5, 13))
    def test_matches_sign_enumeration(self, n):
        gen = np.random.default_rng(n)
        for _ in range(3):
            diffs = gen.integers(-4, 5, size=n).astype(np.float64)
            diffs[diffs == 0] = 1.0
            result = wilcoxon_signed_rank(diffs)
            assert result.method == "exact"
            assert result.p_value == pytest.approx(enumerated_p_value(diffs), rel=1e-12)


class TestMetricSymmetry:
    @pytest.mark.parametrize("seed", range(4))
    def test_swap_prediction_and_truth(self, seed):
        gen = np.random.default_rng(seed)
        P = Mask3D(gen.random(DIMS) < 0.3, SPACING)
        T = Mask3D(gen.random(DIMS) < 0.2, SPACING)
        forward, backward = compute_metrics(P, T), compute_metrics(T, P)
        assert forward.dice == pytest.approx(backward.dice)
        assert forward.sensitivity == pytest.approx(backward.ppv)
        assert forward.ppv == pytest.approx(backward.sensitivity)
