"""
3D ızgara veri tipleri.

Tüm alanlar (nx, ny, nz) şeklinde numpy dizisi tutar; x ekseni en hızlı
değişen eksendir (dosyadaki sıralama Fortran düzenidir). Nesneler
oluşturulduktan sonra değiştirilemez, thread'ler arasında paylaşılabilir.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from utils.exceptions import GridMismatchError, ShapeMismatchError, ValueKindError, VolumeFormatError

Spacing = Tuple[float, float, float]
Dims = Tuple[int, int, int]


class ValueKind(str, Enum):
    """Volume3D değer türü"""

    HU_FLOAT = "hu-float"
    NORMALIZED_8BIT = "normalized-8bit"


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def _check_spacing(spacing) -> Spacing:
    spacing = tuple(float(s) for s in spacing)
    if len(spacing) != 3:
        raise VolumeFormatError(f"Aralık 3 bileşenli olmalı: {spacing}")
    if not all(np.isfinite(s) and s > 0 for s in spacing):
        raise VolumeFormatError(f"Aralık bileşenleri pozitif olmalı: {spacing}")
    return spacing


@dataclass(frozen=True)
class GridField:
    """Ortak ızgara alanı: veri + fiziksel aralık (mm)"""

    data: np.ndarray
    spacing: Spacing

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3 or min(data.shape) <= 0:
            raise VolumeFormatError(f"Hacim 3 boyutlu ve boş olmamalı: {data.shape}")
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))
        object.__setattr__(self, "data", _freeze(self._coerce(data)))

    def _coerce(self, data: np.ndarray) -> np.ndarray:
        return data

    @property
    def dims(self) -> Dims:
        return tuple(int(n) for n in self.data.shape)

    @property
    def voxel_volume(self) -> float:
        """Tek vokselin hacmi (mm³)"""
        sx, sy, sz = self.spacing
        return sx * sy * sz

    def same_grid(self, other: "GridField") -> bool:
        return self.dims == other.dims and np.allclose(self.spacing, other.spacing, rtol=1e-6, atol=0.0)

    def check_grid(self, other: "GridField", what: str = "hacim") -> None:
        """Izgaralar uyuşmuyorsa GridMismatchError fırlat"""
        if not self.same_grid(other):
            raise GridMismatchError(
                f"{what} ızgarası uyuşmuyor: {self.dims}@{self.spacing} != {other.dims}@{other.spacing}"
            )


@dataclass(frozen=True)
class Volume3D(GridField):
    """Skaler hacim (HU veya 0..255 normalize)"""

    value_kind: ValueKind = ValueKind.HU_FLOAT

    def _coerce(self, data: np.ndarray) -> np.ndarray:
        kind = ValueKind(self.value_kind)
        object.__setattr__(self, "value_kind", kind)
        if kind is ValueKind.NORMALIZED_8BIT:
            if data.size and (np.nanmin(data) < 0 or np.nanmax(data) > 255):
                raise VolumeFormatError("normalized-8bit değerler [0, 255] aralığında olmalı")
            if not np.array_equal(data, np.round(data)):
                raise VolumeFormatError("normalized-8bit değerler tam sayı olmalı")
            return data.astype(np.uint8)
        return data.astype(np.float64)

    def require_kind(self, kind: ValueKind) -> None:
        if self.value_kind is not kind:
            raise ValueKindError(f"Beklenen değer türü {kind.value}, gelen {self.value_kind.value}")


@dataclass(frozen=True)
class Mask3D(GridField):
    """İkili maske, değerler yalnızca 0 veya 1"""

    def _coerce(self, data: np.ndarray) -> np.ndarray:
        if data.dtype != bool and not np.isin(data, (0, 1)).all():
            raise VolumeFormatError("Maske değerleri yalnızca 0 veya 1 olabilir")
        return data.astype(np.uint8)

    @property
    def foreground(self) -> np.ndarray:
        """Boolean görünüm"""
        return self.data.astype(bool)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.data))

    @classmethod
    def empty_like(cls, other: GridField) -> "Mask3D":
        return cls(np.zeros(other.dims, dtype=np.uint8), other.spacing)

    def with_data(self, data: np.ndarray) -> "Mask3D":
        """Aynı ızgarada yeni maske"""
        return Mask3D(data, self.spacing)


@dataclass(frozen=True)
class ProbMap3D(GridField):
    """Olasılık haritası, her değer [0, 1] aralığında"""

    def _coerce(self, data: np.ndarray) -> np.ndarray:
        data = data.astype(np.float64)
        if not np.isfinite(data).all() or data.min() < 0.0 or data.max() > 1.0:
            raise VolumeFormatError("Olasılık değerleri [0, 1] aralığında olmalı")
        return data


@dataclass(frozen=True)
class SignedDistanceField(GridField):
    """İşaretli Öklid mesafesi (voksel birimi, maske içinde negatif)"""

    def _coerce(self, data: np.ndarray) -> np.ndarray:
        return data.astype(np.float64)


@dataclass(frozen=True)
class SliceStack:
    """Komşu aksiyel kesit yığını (3 kanal, opsiyonel karaciğer önsel kanalı ile 4)"""

    slices: np.ndarray
    center_index: int
    spacing: Optional[Spacing] = field(default=None)

    def __post_init__(self):
        slices = np.asarray(self.slices)
        if slices.ndim != 3 or slices.shape[0] not in (3, 4):
            raise ShapeMismatchError(f"Kesit yığını (3|4, nx, ny) olmalı: {slices.shape}")
        object.__setattr__(self, "slices", _freeze(slices.astype(np.float64)))

    @property
    def channels(self) -> int:
        return int(self.slices.shape[0])
