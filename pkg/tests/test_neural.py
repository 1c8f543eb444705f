"""
3D yama CNN'i, dikkat kapısı, kayıplar, optimizasyon ve band iyileştirme.
"""

import numpy as np
import pytest
from scipy.special import expit

from models.schemas import CnnConfig, TrainSchedule
from models.volume import Mask3D, ValueKind, Volume3D
from neural.attention import (
    AttentionGateParams,
    attention_gate,
    attention_gate_backward,
    bilinear_matrix,
    resample_bilinear,
    resample_bilinear_adjoint,
)
from neural.band import extract_patches, make_band_dataset, refine_labels
from neural.cnn3d import Cnn3dModel, loss_and_gradients
from neural.losses import bce, bce_sum, seg_loss, soft_dice_loss
from neural.optim import SGD, Adam
from neural.serialization import load_model, read_history, save_model, write_history
from neural.shuffle import pixel_shuffle, pixel_unshuffle
from neural.trainer import PatchDataset, evaluate, train_patch_cnn
from phantom.patches import make_sphere_patch_dataset
from tests.conftest import sphere_mask
from utils.exceptions import (
    InsufficientDataError,
    MissingForwardStateError,
    ShapeMismatchError,
    VolumeFormatError,
)

EPS = 1e-6


def numeric_grad(f, array: np.ndarray, index) -> float:
    old = array[index]
    array[index] = old + EPS
    up = f()
    array[index] = old - EPS
    down = f()
    array[index] = old
    return (up - down) / (2 * EPS)


class TestCnn3d:
    @pytest.fixture
    def model(self):
        return Cnn3dModel(patch_size=5, channels=(2, 2, 3, 3, 2), fc_width=3, seed=1)

    def test_shapes(self, model):
        assert model.trace_shapes() == [(2, 2, 2), (1, 1, 1), (1, 1, 1)]
        assert model.forward(np.zeros((4, 5, 5, 5))).shape == (4,)

    def test_gradients_match_finite_differences(self, model, rng):
        batch = rng.uniform(0.0, 1.0, size=(3, 5, 5, 5))
        labels = np.array([0, 1, 1])
        loss, grads = loss_and_gradients(model, batch, labels)

        def f():
            return bce_sum(expit(model.logits(batch)), labels)

        assert loss == pytest.approx(f())
        for name, param in model.named_params():
            index = tuple(int(rng.integers(n)) for n in param.shape)
            assert grads[name][index] == pytest.approx(numeric_grad(f, param, index), rel=1e-4, abs=1e-7), name

    def test_backward_requires_forward(self, model):
        with pytest.raises(MissingForwardStateError):
            model.backward(np.zeros(2))

    def test_label_count_checked(self, model):
        model.forward(np.zeros((2, 5, 5, 5)))
        with pytest.raises(ShapeMismatchError):
            model.backward(np.zeros(3))

    def test_patch_shape_checked(self, model):
        with pytest.raises(ShapeMismatchError):
            model.forward(np.zeros((1, 7, 7, 7)))

    def test_five_channels_required(self):
        with pytest.raises(ShapeMismatchError):
            Cnn3dModel(5, channels=(2, 2, 2, 2))

    def test_zero_weights_give_half(self):
        model = Cnn3dModel(5, (2, 2, 2, 2, 2), 3, seed=None)
        np.testing.assert_allclose(model.predict(np.ones((3, 5, 5, 5))), 0.5)

    def test_seeded_init_is_deterministic(self):
        a = Cnn3dModel(5, (2, 2, 2, 2, 2), 3, seed=7).get_weights()
        b = Cnn3dModel(5, (2, 2, 2, 2, 2), 3, seed=7).get_weights()
        assert all(np.array_equal(a[k], b[k]) for k in a)


class TestAttention:
    def test_bilinear_rows(self):
        R = bilinear_matrix(3, 5)
        np.testing.assert_allclose(R.sum(axis=1), 1.0)
        assert R[0, 0] == 1.0 and R[-1, -1] == 1.0
        assert R[1].tolist() == pytest.approx([0.5, 0.5, 0.0])

    def test_resample_adjoint(self, rng):
        g = rng.normal(size=(2, 3, 4))
        h = rng.normal(size=(2, 6, 7))
        lhs = (resample_bilinear(g, (6, 7)) * h).sum()
        rhs = (g * resample_bilinear_adjoint(h, (3, 4))).sum()
        assert lhs == pytest.approx(rhs)

    def test_zero_params_half_gate(self, rng):
        x = rng.normal(size=(3, 4, 4))
        result = attention_gate(x, rng.normal(size=(2, 2, 2)), AttentionGateParams.zeros(3, 2, 4))
        np.testing.assert_allclose(result.alpha, 0.5)
        np.testing.assert_allclose(result.output, 0.5 * x)

    def test_channel_mismatch(self, rng):
        with pytest.raises(ShapeMismatchError):
            attention_gate(rng.normal(size=(2, 4, 4)), rng.normal(size=(2, 2, 2)), AttentionGateParams.zeros(3, 2, 4))

    def test_gradients_match_finite_differences(self, rng):
        params = AttentionGateParams.random(3, 2, 4, seed=2)
        x = rng.normal(size=(3, 4, 4))
        g = rng.normal(size=(2, 2, 2))
        weight = rng.normal(size=(3, 4, 4))

        def f():
            return float((attention_gate(x, g, params).output * weight).sum())

        dx, dg, grads = attention_gate_backward(weight, attention_gate(x, g, params), params)
        for array, grad in ((x, dx), (g, dg), (params.W_x, grads.W_x), (params.W_g, grads.W_g),
                            (params.b, grads.b), (params.psi, grads.psi)):
            index = tuple(int(rng.integers(n)) for n in array.shape)
            assert grad[index] == pytest.approx(numeric_grad(f, array, index), rel=1e-4, abs=1e-8)


class TestShuffle:
    def test_layout(self):
        x = np.arange(8 * 2 * 3).reshape(8, 2, 3)
        out = pixel_shuffle(x, 2)
        assert out.shape == (2, 4, 6)
        # out[c, h·r + i, w·r + j] = x[c·r² + i·r + j, h, w]
        assert out[1, 1 * 2 + 1, 2 * 2 + 0] == x[1 * 4 + 1 * 2 + 0, 1, 2]

    def test_unshuffle_inverts(self, rng):
        x = rng.normal(size=(8, 3, 5))
        np.testing.assert_array_equal(pixel_unshuffle(pixel_shuffle(x, 2), 2), x)

    def test_channels_must_divide(self):
        with pytest.raises(ShapeMismatchError):
            pixel_shuffle(np.zeros((3, 2, 2)), 2)
        with pytest.raises(ShapeMismatchError):
            pixel_unshuffle(np.zeros((1, 3, 4)), 2)


class TestLosses:
    def test_bce_gradient(self, rng):
        p = rng.uniform(0.1, 0.9, size=6)
        t = rng.integers(0, 2, size=6).astype(float)
        _, grad = bce(p, t)
        assert grad[2] == pytest.approx(numeric_grad(lambda: bce(p, t)[0], p, 2), rel=1e-5)

    def test_bce_clamped(self):
        loss, grad = bce(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        assert np.isfinite(loss) and np.isfinite(grad).all()
        assert loss == pytest.approx(-np.log(1e-12), rel=1e-4)

    def test_dice_perfect_and_gradient(self, rng):
        t = np.array([1.0, 0.0, 1.0, 1.0])
        assert soft_dice_loss(t, t, 1e-5)[0] == pytest.approx(0.0, abs=1e-6)
        p = rng.uniform(0.1, 0.9, size=4)
        _, grad = soft_dice_loss(p, t, 1e-5)
        assert grad[1] == pytest.approx(numeric_grad(lambda: soft_dice_loss(p, t, 1e-5)[0], p, 1), rel=1e-5)

    def test_seg_loss_weights_tumor(self, rng):
        t = (rng.random((4, 4)) > 0.5).astype(float)
        p = np.clip(t + rng.normal(0, 0.2, size=t.shape), 0.01, 0.99)
        result = seg_loss(p, p, t, t)
        per_class = 0.7 * result.dice_liver + 0.3 * result.bce_liver
        assert result.total == pytest.approx(3.0 * per_class)
        np.testing.assert_allclose(result.grad_tumor, 2.0 * result.grad_liver)

    def test_seg_loss_shapes(self):
        with pytest.raises(ShapeMismatchError):
            seg_loss(np.zeros(3), np.zeros(3), np.zeros(3), np.zeros(4))


class TestOptimizers:
    def test_adam_first_step(self):
        w = np.array([1.0, -1.0])
        Adam(lr=0.1).step([("w", w)], [("w", np.array([2.0, -0.5]))])
        np.testing.assert_allclose(w, [0.9, -0.9], atol=1e-6)

    def test_sgd_momentum(self):
        w = np.zeros(1)
        opt = SGD(lr=1.0, momentum=0.9)
        for _ in range(2):
            opt.step([("w", w)], [("w", np.ones(1))])
        assert w[0] == pytest.approx(-(1.0 + 1.9))

    def test_inverse_time_decay(self):
        opt = SGD(lr=1.0, decay=0.5)
        opt.t = 2
        assert opt.current_lr() == pytest.approx(0.5)
        assert TrainSchedule(decay=0.5).lr_at(1.0, 2) == pytest.approx(0.5)


class TestBand:
    @pytest.fixture
    def volume(self, rng):
        return Volume3D(rng.integers(0, 256, size=(20, 20, 20)).astype(np.uint8), (1.0, 1.0, 1.0), ValueKind.NORMALIZED_8BIT)

    def test_band_dataset_labels(self, volume):
        mask = sphere_mask((20, 20, 20), (10, 10, 10), 5)
        data = make_band_dataset(volume, mask, d_max=2.0)
        assert (np.abs(data.distances) <= 2.0).all()
        np.testing.assert_array_equal(data.labels, (data.distances <= 0).astype(int))
        assert data.n_positive > 0 and data.n_negative > 0

    def test_patches_centered_and_clipped(self, volume):
        patches = extract_patches(volume, np.array([[10, 10, 10], [0, 0, 0]]), 5)
        assert patches.shape == (2, 5, 5, 5)
        assert patches[0, 2, 2, 2] == pytest.approx(volume.data[10, 10, 10] / 255.0)
        assert patches[1, 0, 0, 0] == pytest.approx(volume.data[0, 0, 0] / 255.0)

    def test_refine_only_changes_band(self, volume):
        class AllTumor:
            patch_size = 3

            def predict_voxels(self, vol, coords):
                return np.ones(len(coords))

        mask = sphere_mask((20, 20, 20), (10, 10, 10), 4)
        refined = refine_labels(mask, volume, AllTumor(), d_max=1.0)
        assert refined.count > mask.count
        assert refined.data[10, 10, 15] == 1
        assert refined.data[10, 10, 17] == 0
        assert refined.data[10, 10, 10] == 1

    def test_empty_mask_unchanged(self, volume):
        empty = Mask3D(np.zeros((20, 20, 20), dtype=np.uint8), (1.0, 1.0, 1.0))
        assert refine_labels(empty, volume, object()).count == 0

    def test_patch_size_checked(self, volume):
        class Small:
            patch_size = 3

        with pytest.raises(ShapeMismatchError):
            refine_labels(sphere_mask((20, 20, 20), (10, 10, 10), 4), volume, Small(), patch_size=5)


class TestTrainer:
    @pytest.fixture
    def config(self) -> CnnConfig:
        return CnnConfig(
            patch_size=7,
            channels=(4, 4, 8, 8, 8),
            fc_width=8,
            schedule=TrainSchedule(adam_epochs=2, max_epochs=4, patience=3, batch_size=8),
        )

    def test_trains_and_keeps_best(self, config):
        train = make_sphere_patch_dataset(48, 7, seed=1)
        val = make_sphere_patch_dataset(16, 7, seed=2)
        result = train_patch_cnn(train, val, config, seed=3)
        assert 1 <= len(result.history) <= 4
        assert [r.phase for r in result.history[:2]] == ["adam", "adam"]
        if len(result.history) > 2:
            assert result.history[2].phase == "sgd"
        assert result.best_val_loss == min(r.val_loss for r in result.history)
        assert evaluate(result.model, val)[0] == pytest.approx(result.best_val_loss)
        assert not result.flagged

    def test_deterministic(self, config):
        train = make_sphere_patch_dataset(24, 7, seed=1)
        val = make_sphere_patch_dataset(8, 7, seed=2)
        a = train_patch_cnn(train, val, config, seed=5)
        b = train_patch_cnn(train, val, config, seed=5)
        assert [r.val_loss for r in a.history] == [r.val_loss for r in b.history]

    def test_patch_size_checked(self, config):
        data = make_sphere_patch_dataset(8, 5, seed=1)
        with pytest.raises(ShapeMismatchError):
            train_patch_cnn(data, data, config)

    def test_empty_validation(self, config):
        train = make_sphere_patch_dataset(8, 7, seed=1)
        with pytest.raises(InsufficientDataError):
            train_patch_cnn(train, PatchDataset(np.zeros((0, 7, 7, 7)), np.zeros(0)), config)

    def test_dataset_shapes_checked(self):
        with pytest.raises(ShapeMismatchError):
            PatchDataset(np.zeros((3, 5, 5, 5)), np.zeros(2))


class TestSerialization:
    def test_save_load_predictions(self, tmp_path, rng):
        model = Cnn3dModel(5, (2, 2, 3, 3, 2), 3, seed=4)
        loaded = load_model(save_model(model, tmp_path / "model.cnn3"))
        batch = rng.uniform(size=(2, 5, 5, 5))
        np.testing.assert_array_equal(loaded.predict(batch), model.predict(batch))
        assert loaded.architecture() == model.architecture()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.cnn3"
        path.write_bytes(b"XXXX" + b"\x00" * 16)
        with pytest.raises(VolumeFormatError):
            load_model(path)

    def test_trailing_bytes(self, tmp_path):
        path = save_model(Cnn3dModel(5, (2, 2, 2, 2, 2), 3, seed=1), tmp_path / "model.cnn3")
        path.write_bytes(path.read_bytes() + b"\x00")
        with pytest.raises(VolumeFormatError):
            load_model(path)

    def test_history_csv(self, tmp_path):
        train = make_sphere_patch_dataset(8, 5, seed=1)
        result = train_patch_cnn(
            train, train,
            CnnConfig(patch_size=5, channels=(2, 2, 2, 2, 2), fc_width=2, schedule=TrainSchedule(max_epochs=2, adam_epochs=1)),
        )
        records = read_history(write_history(result.history, tmp_path / "history.csv"))
        assert [r.phase for r in records] == [r.phase for r in result.history]
