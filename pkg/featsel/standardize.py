"""
Eğitim kümesinden öğrenilen z-skor standardizasyonu.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from config.settings import STD_FLOOR
from utils.exceptions import DimensionMismatchError, EmptyInputError, InsufficientDataError


@dataclass(frozen=True)
class StandardizationParams:
    """Özellik başına ortalama ve (tabanlanmış) standart sapma"""

    mean: np.ndarray
    std: np.ndarray
    constant: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.mean):
            raise DimensionMismatchError(f"Standardizasyon boyutu {len(self.mean)}, gelen {X.shape}")
        Z = (X - self.mean) / self.std
        Z[:, self.constant] = 0.0
        return Z

    def to_dict(self) -> Dict[str, List[float]]:
        return {"mean": self.mean.tolist(), "std": self.std.tolist(), "constant": self.constant.tolist()}

    @classmethod
    def from_dict(cls, data: Dict) -> "StandardizationParams":
        return cls(
            np.asarray(data["mean"], dtype=np.float64),
            np.asarray(data["std"], dtype=np.float64),
            np.asarray(data["constant"], dtype=bool),
        )


def fit_standardize(X: np.ndarray, floor: float = STD_FLOOR) -> StandardizationParams:
    """Ortalama ve popülasyon std; std < floor olan sütunlar sabit kabul edilir"""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.size == 0:
        raise EmptyInputError("Standardizasyon için boş olmayan 2B matris gerekli")
    if X.shape[0] < 2:
        raise InsufficientDataError("Standardizasyon için en az 2 satır gerekli")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    constant = std < floor
    return StandardizationParams(mean, np.maximum(std, floor), constant)


def fit_apply_standardize(
    train: np.ndarray,
    *others: np.ndarray,
) -> Tuple[np.ndarray, List[np.ndarray], StandardizationParams]:
    """
    Parametreleri yalnızca eğitim kümesinden öğren, hepsine uygula.

    Returns:
        (standart eğitim, standart diğerleri, parametreler)
    """
    params = fit_standardize(train)
    return params.apply(train), [params.apply(o) for o in others], params
