"""
Ağaç toplulukları: orman, GBDT, kayıt ve yanlış pozitif bastırma.
"""

import numpy as np
import pytest

from ensemble.forest import (
    balanced_class_weights,
    check_binary_labels,
    forest_predict_proba,
    forest_predict_proba_batch,
    train_forest,
)
from ensemble.gbdt import gbdt_importances, gbdt_predict_proba, train_gbdt
from ensemble.serialization import load_forest, load_gbdt, save_forest, save_gbdt
from ensemble.suppressor import apply_suppression, suppress_false_positives
from models.region import CandidateRegion
from models.schemas import ForestParams, GbdtParams
from models.volume import Mask3D
from utils.exceptions import (
    DimensionMismatchError,
    InsufficientDataError,
    ManifestMismatchError,
    SingleClassError,
    VolumeFormatError,
)

PARAMS = ForestParams(n_trees=15, min_samples_leaf=1)


@pytest.fixture
def separable(rng):
    """0. sütun eşiğiyle ayrılan, dengesiz sınıflı veri"""
    X = rng.normal(size=(60, 3))
    y = (X[:, 0] > 0.5).astype(np.int64)
    return X, y


class TestLabels:
    def test_balanced_weights(self):
        w0, w1 = balanced_class_weights(np.array([0, 0, 0, 1]))
        assert w0 == pytest.approx(4.0 / 6.0)
        assert w1 == pytest.approx(2.0)

    def test_single_class(self):
        with pytest.raises(SingleClassError):
            check_binary_labels(np.ones(5))

    def test_non_binary(self):
        with pytest.raises(SingleClassError):
            check_binary_labels(np.array([0, 1, 2]))

    def test_empty(self):
        with pytest.raises(InsufficientDataError):
            check_binary_labels(np.array([]))


class TestForest:
    def test_learns_threshold(self, separable):
        X, y = separable
        model = train_forest(X, y, PARAMS, seed=1, workers=1)
        probs = forest_predict_proba_batch(model, np.array([[2.0, 0.0, 0.0], [-2.0, 0.0, 0.0]]))
        assert probs[0] > 0.8
        assert probs[1] < 0.2
        assert ((forest_predict_proba_batch(model, X) >= 0.5) == y).mean() > 0.9

    def test_importance_normalized(self, separable):
        X, y = separable
        model = train_forest(X, y, PARAMS, seed=1, workers=1)
        assert model.importances.sum() == pytest.approx(1.0)
        assert int(np.argmax(model.importances)) == 0

    def test_independent_of_workers(self, separable):
        X, y = separable
        serial = train_forest(X, y, PARAMS, seed=4, workers=1)
        threaded = train_forest(X, y, PARAMS, seed=4, workers=3)
        np.testing.assert_array_equal(forest_predict_proba_batch(serial, X), forest_predict_proba_batch(threaded, X))

    def test_seed_changes_model(self, separable):
        X, y = separable
        a = forest_predict_proba_batch(train_forest(X, y, PARAMS, seed=1, workers=1), X)
        b = forest_predict_proba_batch(train_forest(X, y, PARAMS, seed=2, workers=1), X)
        assert not np.array_equal(a, b)

    def test_single_sample_prediction(self, separable):
        X, y = separable
        model = train_forest(X, y, PARAMS, seed=1, workers=1)
        assert forest_predict_proba(model, X[0]) == pytest.approx(forest_predict_proba_batch(model, X[:1])[0])

    def test_dimension_checked(self, separable):
        X, y = separable
        model = train_forest(X, y, PARAMS, seed=1, workers=1)
        with pytest.raises(DimensionMismatchError):
            forest_predict_proba_batch(model, np.zeros((2, 5)))

    def test_too_few_rows(self):
        with pytest.raises(InsufficientDataError):
            train_forest(np.zeros((4, 2)), np.array([0, 1, 0, 1]), ForestParams(min_samples_leaf=3))

    def test_max_depth_respected(self, separable):
        X, y = separable
        model = train_forest(X, y, ForestParams(n_trees=5, max_depth=2, min_samples_leaf=1), seed=1, workers=1)
        assert all(tree.max_depth <= 2 for tree in model.trees)


class TestGbdt:
    def test_loss_decreases(self, separable):
        X, y = separable
        model = train_gbdt(X, y, GbdtParams(rounds=20))
        assert model.n_rounds == 20
        assert len(model.loss_history) == 21
        assert model.loss_history[-1] < model.loss_history[0]
        assert model.f0 == pytest.approx(np.log(y.mean() / (1 - y.mean())))

    def test_predicts_classes(self, separable):
        X, y = separable
        model = train_gbdt(X, y, GbdtParams(rounds=30))
        assert ((gbdt_predict_proba(model, X) >= 0.5) == y).mean() > 0.95

    def test_importances(self, separable):
        X, y = separable
        gain, freq = gbdt_importances(train_gbdt(X, y, GbdtParams(rounds=10)))
        assert gain.sum() == pytest.approx(1.0)
        assert freq.sum() == pytest.approx(1.0)
        assert int(np.argmax(gain)) == 0

    def test_zero_rounds(self, separable):
        X, y = separable
        model = train_gbdt(X, y, GbdtParams(rounds=0))
        np.testing.assert_allclose(gbdt_predict_proba(model, X), y.mean())


class TestSerialization:
    def test_forest_save_load(self, separable, tmp_path):
        X, y = separable
        model = train_forest(X, y, PARAMS, seed=1, workers=1, feature_names=["a", "b", "c"])
        loaded = load_forest(save_forest(model, tmp_path / "forest.json"))
        assert loaded.feature_names == ["a", "b", "c"]
        np.testing.assert_array_equal(forest_predict_proba_batch(loaded, X), forest_predict_proba_batch(model, X))

    def test_gbdt_save_load(self, separable, tmp_path):
        X, y = separable
        model = train_gbdt(X, y, GbdtParams(rounds=5))
        loaded = load_gbdt(save_gbdt(model, tmp_path / "gbdt.json"))
        np.testing.assert_allclose(gbdt_predict_proba(loaded, X), gbdt_predict_proba(model, X))

    def test_wrong_kind(self, separable, tmp_path):
        X, y = separable
        path = save_forest(train_forest(X, y, PARAMS, seed=1, workers=1), tmp_path / "forest.json")
        with pytest.raises(VolumeFormatError):
            load_gbdt(path)


class TestSuppressor:
    @pytest.fixture
    def model(self, separable):
        X, y = separable
        return train_forest(X, y, PARAMS, seed=1, workers=1, feature_names=["a", "b", "c"])

    def test_rejects_low_scores(self, model):
        regions = [
            CandidateRegion("cand-0001", np.array([[1, 1, 1], [2, 1, 1]])),
            CandidateRegion("cand-0002", np.array([[5, 5, 5]])),
        ]
        features = np.array([[2.5, 0.0, 0.0], [-2.5, 0.0, 0.0]])
        result = suppress_false_positives(regions, features, model, tau_rf=0.5)
        assert [r.region_id for r in result.kept] == ["cand-0001"]
        assert [r.region_id for r in result.rejected] == ["cand-0002"]
        assert len(result.scores) == 2

        data = np.zeros((8, 8, 8), dtype=np.uint8)
        data[1:3, 1, 1] = 1
        data[5, 5, 5] = 1
        cleaned = apply_suppression(Mask3D(data, (1.0, 1.0, 1.0)), result.rejected)
        assert cleaned.count == 2
        assert cleaned.data[5, 5, 5] == 0

    def test_empty_regions(self, model):
        result = suppress_false_positives([], np.zeros((0, 3)), model)
        assert result.n_kept == 0 and result.n_rejected == 0

    def test_feature_names_checked(self, model):
        region = CandidateRegion("cand-0001", np.array([[1, 1, 1]]))
        with pytest.raises(ManifestMismatchError):
            suppress_false_positives([region], np.zeros((1, 3)), model, feature_names=["x", "y", "z"])

    def test_row_count_checked(self, model):
        regions = [CandidateRegion(f"cand-{i:04d}", np.array([[i, 1, 1]])) for i in range(3)]
        with pytest.raises(DimensionMismatchError):
            suppress_false_positives(regions, np.zeros((1, 3)), model)
        with pytest.raises(DimensionMismatchError):
            suppress_false_positives(regions[:1], np.zeros((2, 3)), model)
