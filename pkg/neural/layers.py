"""
Elle geri yayılımlı yoğun tensör katmanları.

Tüm diziler float64 ve kanal-sonda düzenindedir: (B, D, H, W, C).
Her katman ileri geçişte girdisini saklar; backward bu durumu tüketir.
"""

from abc import ABC, abstractmethod
from typing import Dict, Optional, Tuple

import numpy as np

from utils.exceptions import MissingForwardStateError, ShapeMismatchError

_KERNEL_OFFSETS = [(i, j, k) for i in range(3) for j in range(3) for k in range(3)]


def he_normal(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int) -> np.ndarray:
    """He başlatması: N(0, 2/fan_in)"""
    return rng.normal(0.0, np.sqrt(2.0 / fan_in), size=shape)


class Layer(ABC):
    """
    Katman temel sınıfı.

    params / grads aynı anahtarları taşır; parametresiz katmanlarda boştur.
    """

    name: str = "layer"

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self._cache = None

    @abstractmethod
    def forward(self, x: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def backward(self, grad: np.ndarray) -> np.ndarray:
        """Çıkış gradyanı → girdi gradyanı; parametre gradyanları grads'a yazılır"""
        pass

    def output_shape(self, shape: Tuple[int, ...]) -> Tuple[int, ...]:
        """Batch hariç girdi şekli → çıkış şekli"""
        return shape

    def clear(self) -> None:
        self._cache = None

    def _state(self):
        if self._cache is None:
            raise MissingForwardStateError(f"{self.name}: backward öncesi forward çağrılmalı")
        return self._cache

    def spec(self) -> Dict:
        return {"type": self.name}


class Conv3d(Layer):
    """3×3×3 evrişim, adım 1, sıfır dolgu 1 (boyut korunur)"""

    name = "conv3d"

    def __init__(self, in_channels: int, out_channels: int, rng: Optional[np.random.Generator] = None):
        super().__init__()
        self.in_channels = in_channels
        self.out_channels = out_channels
        shape = (3, 3, 3, in_channels, out_channels)
        self.params["W"] = he_normal(rng, shape, 27 * in_channels) if rng is not None else np.zeros(shape)
        self.params["b"] = np.zeros(out_channels)

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 5 or x.shape[-1] != self.in_channels:
            raise ShapeMismatchError(f"Conv3d girdi şekli {x.shape}, kanal {self.in_channels} bekleniyordu")
        B, D, H, W, _ = x.shape
        xp = np.pad(x, ((0, 0), (1, 1), (1, 1), (1, 1), (0, 0)))
        out = np.zeros((B, D, H, W, self.out_channels))
        kernel = self.params["W"]
        for i, j, k in _KERNEL_OFFSETS:
            out += np.tensordot(xp[:, i:i + D, j:j + H, k:k + W, :], kernel[i, j, k], axes=([4], [0]))
        out += self.params["b"]
        self._cache = xp
        return out

    def backward(self, grad: np.ndarray) -> np.ndarray:
        xp = self._state()
        B, D, H, W, _ = grad.shape
        kernel = self.params["W"]
        dW = np.zeros_like(kernel)
        dxp = np.zeros_like(xp)
        for i, j, k in _KERNEL_OFFSETS:
            window = xp[:, i:i + D, j:j + H, k:k + W, :]
            dW[i, j, k] = np.tensordot(window, grad, axes=([0, 1, 2, 3], [0, 1, 2, 3]))
            dxp[:, i:i + D, j:j + H, k:k + W, :] += np.tensordot(grad, kernel[i, j, k], axes=([4], [1]))
        self.grads["W"] = dW
        self.grads["b"] = grad.sum(axis=(0, 1, 2, 3))
        return dxp[:, 1:-1, 1:-1, 1:-1, :]

    def output_shape(self, shape):
        return shape[:3] + (self.out_channels,)

    def spec(self) -> Dict:
        return {"type": self.name, "in": self.in_channels, "out": self.out_channels}


class MaxPool3d(Layer):
    """
    2×2×2 maksimum havuzlama, adım 2 (taban bölme). Herhangi bir uzamsal
    boyut 1 ise katman kimlik gibi davranır. Eşit maksimumlarda gradyan
    ilk konuma gider.
    """

    name = "maxpool3d"

    @staticmethod
    def skips(spatial: Tuple[int, int, int]) -> bool:
        return min(spatial) <= 1

    def forward(self, x: np.ndarray) -> np.ndarray:
        B, D, H, W, C = x.shape
        if self.skips((D, H, W)):
            self._cache = ("skip", x.shape, None)
            return x
        D2, H2, W2 = D // 2, H // 2, W // 2
        blocks = x[:, : 2 * D2, : 2 * H2, : 2 * W2, :].reshape(B, D2, 2, H2, 2, W2, 2, C)
        blocks = blocks.transpose(0, 1, 3, 5, 2, 4, 6, 7).reshape(B, D2, H2, W2, 8, C)
        arg = blocks.argmax(axis=4)
        self._cache = ("pool", x.shape, arg)
        return np.take_along_axis(blocks, arg[:, :, :, :, None, :], axis=4)[:, :, :, :, 0, :]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        mode, shape, arg = self._state()
        if mode == "skip":
            return grad
        B, D, H, W, C = shape
        D2, H2, W2 = D // 2, H // 2, W // 2
        onehot = (np.arange(8)[None, None, None, None, :, None] == arg[:, :, :, :, None, :])
        blocks = onehot * grad[:, :, :, :, None, :]
        blocks = blocks.reshape(B, D2, H2, W2, 2, 2, 2, C).transpose(0, 1, 4, 2, 5, 3, 6, 7)
        dx = np.zeros(shape)
        dx[:, : 2 * D2, : 2 * H2, : 2 * W2, :] = blocks.reshape(B, 2 * D2, 2 * H2, 2 * W2, C)
        return dx

    def output_shape(self, shape):
        if self.skips(shape[:3]):
            return shape
        return tuple(n // 2 for n in shape[:3]) + (shape[3],)


class Flatten(Layer):
    name = "flatten"

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._cache = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad.reshape(self._state())

    def output_shape(self, shape):
        return (int(np.prod(shape)),)


class Dense(Layer):
    """Tam bağlı katman: y = x W + b"""

    name = "dense"

    def __init__(self, in_features: int, out_features: int, rng: Optional[np.random.Generator] = None):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        shape = (in_features, out_features)
        self.params["W"] = he_normal(rng, shape, in_features) if rng is not None else np.zeros(shape)
        self.params["b"] = np.zeros(out_features)

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeMismatchError(f"Dense girdi şekli {x.shape}, {self.in_features} özellik bekleniyordu")
        self._cache = x
        return x @ self.params["W"] + self.params["b"]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        x = self._state()
        self.grads["W"] = x.T @ grad
        self.grads["b"] = grad.sum(axis=0)
        return grad @ self.params["W"].T

    def output_shape(self, shape):
        return (self.out_features,)

    def spec(self) -> Dict:
        return {"type": self.name, "in": self.in_features, "out": self.out_features}


class ReLU(Layer):
    name = "relu"

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._cache = x > 0
        return np.where(self._cache, x, 0.0)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return np.where(self._state(), grad, 0.0)

