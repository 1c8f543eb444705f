"""
Adam ve momentumlu SGD (ters-zaman öğrenme oranı azalması ile).
"""

from abc import ABC, abstractmethod
from typing import Dict, List, Tuple

import numpy as np

ParamList = List[Tuple[str, np.ndarray]]


class Optimizer(ABC):
    def __init__(self, lr: float, decay: float = 0.0):
        self.lr = lr
        self.decay = decay
        self.t = 0

    def current_lr(self) -> float:
        return self.lr / (1.0 + self.decay * self.t)

    def step(self, params: ParamList, grads: ParamList) -> None:
        """Parametreleri yerinde güncelle (params ve grads aynı sırada)"""
        lr = self.current_lr()
        self.t += 1
        for (name, p), (gname, g) in zip(params, grads):
            p -= self._update(name, g, lr)

    @abstractmethod
    def _update(self, name: str, grad: np.ndarray, lr: float) -> np.ndarray:
        pass


class Adam(Optimizer):
    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8, decay: float = 0.0):
        super().__init__(lr, decay)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}

    def _update(self, name, grad, lr):
        m = self.m.get(name, np.zeros_like(grad))
        v = self.v.get(name, np.zeros_like(grad))
        m = self.beta1 * m + (1.0 - self.beta1) * grad
        v = self.beta2 * v + (1.0 - self.beta2) * grad * grad
        self.m[name], self.v[name] = m, v
        m_hat = m / (1.0 - self.beta1 ** self.t)
        v_hat = v / (1.0 - self.beta2 ** self.t)
        return lr * m_hat / (np.sqrt(v_hat) + self.eps)


class SGD(Optimizer):
    def __init__(self, lr: float, momentum: float = 0.0, decay: float = 0.0):
        super().__init__(lr, decay)
        self.momentum = momentum
        self.velocity: Dict[str, np.ndarray] = {}

    def _update(self, name, grad, lr):
        v = self.momentum * self.velocity.get(name, np.zeros_like(grad)) + grad
        self.velocity[name] = v
        return lr * v
