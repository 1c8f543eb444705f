"""
Kompakt 3D yama CNN'i.

conv(64)×2 → pool → conv(128)×2 → pool → conv(256) → pool → FC(64) → FC(1) → sigmoid.
Son katman logit üretir; olasılık sigmoid ile alınır, BCE gradyanı
doğrudan logit üzerinden (p − t) hesaplanır.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from config.settings import CNN_CHANNELS, CNN_FC_WIDTH, CNN_PATCH_SIZE
from neural.layers import Conv3d, Dense, Flatten, Layer, MaxPool3d, ReLU
from neural.losses import bce_sum
from utils.exceptions import MissingForwardStateError, ShapeMismatchError
from utils.rng import stream

logger = logging.getLogger(__name__)


class Cnn3dModel:
    """
    Yama sınıflandırıcı.

    Args:
        patch_size: Kübik yama kenarı s
        channels: Beş evrişim katmanının kanal sayıları
        fc_width: Gizli tam bağlı katman genişliği
        seed: He başlatması için tohum (None: sıfır ağırlıklar)
    """

    def __init__(
        self,
        patch_size: int = CNN_PATCH_SIZE,
        channels: Sequence[int] = CNN_CHANNELS,
        fc_width: int = CNN_FC_WIDTH,
        seed: Optional[int] = 0,
    ):
        if len(channels) != 5:
            raise ShapeMismatchError(f"Beş evrişim kanalı gerekli, gelen {len(channels)}")
        self.patch_size = int(patch_size)
        self.channels = tuple(int(c) for c in channels)
        self.fc_width = int(fc_width)
        rng = stream(seed, "cnn-init") if seed is not None else None
        c = self.channels
        self.layers: List[Layer] = [
            Conv3d(1, c[0], rng), ReLU(),
            Conv3d(c[0], c[1], rng), ReLU(),
            MaxPool3d(),
            Conv3d(c[1], c[2], rng), ReLU(),
            Conv3d(c[2], c[3], rng), ReLU(),
            MaxPool3d(),
            Conv3d(c[3], c[4], rng), ReLU(),
            MaxPool3d(),
            Flatten(),
        ]
        flat = self.feature_shape()[0]
        self.layers += [Dense(flat, self.fc_width, rng), ReLU(), Dense(self.fc_width, 1, rng)]
        self._probs: Optional[np.ndarray] = None

    # -------------------------------------------------------------------------
    def feature_shape(self) -> Tuple[int, ...]:
        """Mevcut katmanlardan sonra (batch hariç) şekil"""
        shape: Tuple[int, ...] = (self.patch_size,) * 3 + (1,)
        for layer in self.layers:
            shape = layer.output_shape(shape)
        return shape

    def trace_shapes(self) -> List[Tuple[int, ...]]:
        """Her havuzlamadan sonraki uzamsal boyutlar"""
        shape: Tuple[int, ...] = (self.patch_size,) * 3 + (1,)
        out = []
        for layer in self.layers:
            shape = layer.output_shape(shape)
            if isinstance(layer, MaxPool3d):
                out.append(shape[:3])
        return out

    def named_params(self) -> List[Tuple[str, np.ndarray]]:
        return [
            (f"{i}.{key}", layer.params[key])
            for i, layer in enumerate(self.layers)
            for key in sorted(layer.params)
        ]

    def named_grads(self) -> List[Tuple[str, np.ndarray]]:
        return [
            (f"{i}.{key}", layer.grads[key])
            for i, layer in enumerate(self.layers)
            for key in sorted(layer.params)
        ]

    def get_weights(self) -> Dict[str, np.ndarray]:
        return {name: p.copy() for name, p in self.named_params()}

    def set_weights(self, weights: Dict[str, np.ndarray]) -> None:
        for i, layer in enumerate(self.layers):
            for key in layer.params:
                value = np.asarray(weights[f"{i}.{key}"], dtype=np.float64)
                if value.shape != layer.params[key].shape:
                    raise ShapeMismatchError(f"{i}.{key} şekli {value.shape} != {layer.params[key].shape}")
                layer.params[key] = value.copy()

    def architecture(self) -> Dict:
        return {"patch_size": self.patch_size, "channels": list(self.channels), "fc_width": self.fc_width}

    # -------------------------------------------------------------------------
    def _as_batch(self, batch: np.ndarray) -> np.ndarray:
        x = np.asarray(batch, dtype=np.float64)
        if x.ndim == 4:
            x = x[..., None]
        s = self.patch_size
        if x.ndim != 5 or x.shape[1:] != (s, s, s, 1):
            raise ShapeMismatchError(f"Yama şekli {x.shape[1:]}, beklenen ({s}, {s}, {s}[, 1])")
        return x

    def logits(self, batch: np.ndarray) -> np.ndarray:
        x = self._as_batch(batch)
        for layer in self.layers:
            x = layer.forward(x)
        return x[:, 0]

    def forward(self, batch: np.ndarray) -> np.ndarray:
        """(B, s, s, s) yamalar → (B,) olasılıklar; backward için durum saklanır"""
        self._probs = expit(self.logits(batch))
        return self._probs

    def predict(self, batch: np.ndarray, chunk: int = 64) -> np.ndarray:
        """Sabit parçalama ile durumsuz tahmin"""
        x = np.asarray(batch, dtype=np.float64)
        out = [self.forward(x[i:i + chunk]) for i in range(0, len(x), chunk)]
        self.clear()
        return np.concatenate(out) if out else np.zeros(0)

    def backward(self, labels: np.ndarray) -> float:
        """
        Son forward'a göre BCE gradyanları (batch üzerinden TOPLAM).

        Returns:
            float: Batch BCE toplamı
        """
        if self._probs is None:
            raise MissingForwardStateError("backward öncesi forward çağrılmalı")
        t = np.asarray(labels, dtype=np.float64).reshape(-1)
        if t.shape != self._probs.shape:
            raise ShapeMismatchError(f"Etiket sayısı {t.shape[0]} != batch {self._probs.shape[0]}")
        grad = (self._probs - t)[:, None]
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        loss = bce_sum(self._probs, t)
        self.clear()
        return loss

    def clear(self) -> None:
        self._probs = None
        for layer in self.layers:
            layer.clear()


def forward(model: Cnn3dModel, batch: np.ndarray) -> np.ndarray:
    return model.forward(batch)


def backward(model: Cnn3dModel, labels: np.ndarray) -> Dict[str, np.ndarray]:
    """Gradyanları ad → dizi sözlüğü olarak döndür"""
    model.backward(labels)
    return {name: g.copy() for name, g in model.named_grads()}


def loss_and_gradients(model: Cnn3dModel, batch: np.ndarray, labels: np.ndarray) -> Tuple[float, Dict[str, np.ndarray]]:
    model.forward(batch)
    loss = model.backward(labels)
    return loss, {name: g.copy() for name, g in model.named_grads()}
