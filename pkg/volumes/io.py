"""
Hacim dosya okuma/yazma: VOL1 ikili formatı ve MetaImage (.mhd/.raw, .mha).

Tüm çok baytlı değerler little-endian. Veri x-en-hızlı sırada yazılır.
"""

import logging
import struct
from pathlib import Path
from typing import Dict, Literal, Optional, Tuple, Union

import numpy as np

from config.settings import METAIMAGE_TYPES, VOL1_DTYPE_CODES, VOL1_MAGIC
from models.volume import GridField, Mask3D, ProbMap3D, ValueKind, Volume3D
from utils.exceptions import VolumeFormatError

logger = logging.getLogger(__name__)

AnyField = Union[Volume3D, Mask3D, ProbMap3D]
LoadKind = Optional[Literal["volume", "mask", "prob"]]

_VOL1_HEADER = struct.Struct("<4s3I3fB")
_CODE_BY_DTYPE = {np.dtype(v): k for k, v in VOL1_DTYPE_CODES.items()}
_MET_BY_DTYPE = {np.dtype(v): k for k, v in METAIMAGE_TYPES.items()}


class VolumeIO:
    """Hacim dosya formatları için okuma/yazma servisi"""

    SUFFIXES = (".vol", ".mhd", ".mha")

    # =========================================================================
    # ORTAK
    # =========================================================================
    @staticmethod
    def storage_dtype(v: GridField) -> np.dtype:
        """Alan tipine göre diskteki veri tipi"""
        if isinstance(v, Mask3D):
            return np.dtype("<u1")
        if isinstance(v, Volume3D) and v.value_kind is ValueKind.NORMALIZED_8BIT:
            return np.dtype("<u1")
        return np.dtype("<f4")

    @staticmethod
    def encode(v: GridField) -> Tuple[bytes, np.dtype]:
        dtype = VolumeIO.storage_dtype(v)
        stored = v.data.astype(dtype)
        if dtype.kind == "f" and not np.array_equal(stored.astype(np.float64), v.data):
            logger.warning("Hacim float32'ye daraltılırken hassasiyet kaybı oluştu")
        return stored.ravel(order="F").tobytes(), dtype

    @staticmethod
    def decode(raw: bytes, dims: Tuple[int, int, int], dtype: np.dtype) -> np.ndarray:
        expected = int(np.prod(dims)) * dtype.itemsize
        if len(raw) != expected:
            raise VolumeFormatError(f"Veri uzunluğu {len(raw)} bayt, beklenen {expected} ({dims}, {dtype})")
        return np.frombuffer(raw, dtype=dtype).reshape(dims, order="F")

    @staticmethod
    def build(data: np.ndarray, spacing, kind: LoadKind) -> AnyField:
        """Ham diziden istenen alan tipini kur"""
        if kind == "mask":
            if data.dtype != np.uint8:
                raise VolumeFormatError(f"Maske u8 olmalı, gelen {data.dtype}")
            return Mask3D(data, spacing)
        if kind == "prob":
            return ProbMap3D(data.astype(np.float64), spacing)
        if kind not in (None, "volume"):
            raise VolumeFormatError(f"Bilinmeyen hacim türü: {kind}")
        if data.dtype == np.uint8:
            return Volume3D(data, spacing, ValueKind.NORMALIZED_8BIT)
        return Volume3D(data.astype(np.float64), spacing, ValueKind.HU_FLOAT)

    # =========================================================================
    # VOL1
    # =========================================================================
    @staticmethod
    def write_vol1(v: GridField, path: Path) -> None:
        raw, dtype = VolumeIO.encode(v)
        header = _VOL1_HEADER.pack(VOL1_MAGIC, *v.dims, *v.spacing, _CODE_BY_DTYPE[dtype])
        with open(path, "wb") as f:
            f.write(header)
            f.write(raw)

    @staticmethod
    def read_vol1(path: Path) -> Tuple[np.ndarray, Tuple[float, float, float]]:
        with open(path, "rb") as f:
            blob = f.read()
        if len(blob) < _VOL1_HEADER.size:
            raise VolumeFormatError(f"VOL1 başlığı eksik: {path}")
        magic, nx, ny, nz, sx, sy, sz, code = _VOL1_HEADER.unpack_from(blob)
        if magic != VOL1_MAGIC:
            raise VolumeFormatError(f"Geçersiz VOL1 imzası: {magic!r}")
        if code not in VOL1_DTYPE_CODES:
            raise VolumeFormatError(f"Desteklenmeyen dtype kodu: {code}")
        if min(nx, ny, nz) == 0:
            raise VolumeFormatError(f"Sıfır boyutlu hacim: {(nx, ny, nz)}")
        dtype = np.dtype(VOL1_DTYPE_CODES[code])
        data = VolumeIO.decode(blob[_VOL1_HEADER.size:], (nx, ny, nz), dtype)
        return data, (sx, sy, sz)

    # =========================================================================
    # METAIMAGE
    # =========================================================================
    @staticmethod
    def _format_header(v: GridField, dtype: np.dtype, data_file: str) -> str:
        lines = [
            "ObjectType = Image",
            "NDims = 3",
            "DimSize = " + " ".join(str(n) for n in v.dims),
            "ElementSpacing = " + " ".join(repr(float(np.float32(s))) for s in v.spacing),
            "BinaryData = True",
            "BinaryDataByteOrderMSB = False",
            f"ElementType = {_MET_BY_DTYPE[dtype]}",
            f"ElementDataFile = {data_file}",
        ]
        return "\n".join(lines) + "\n"

    @staticmethod
    def write_metaimage(v: GridField, path: Path) -> None:
        raw, dtype = VolumeIO.encode(v)
        if path.suffix.lower() == ".mha":
            with open(path, "wb") as f:
                f.write(VolumeIO._format_header(v, dtype, "LOCAL").encode("ascii"))
                f.write(raw)
            return
        raw_path = path.with_suffix(".raw")
        with open(path, "w", encoding="ascii") as f:
            f.write(VolumeIO._format_header(v, dtype, raw_path.name))
        with open(raw_path, "wb") as f:
            f.write(raw)

    @staticmethod
    def parse_header(blob: bytes) -> Tuple[Dict[str, str], int]:
        """
        MetaImage başlığını ayrıştır.

        Returns:
            (anahtar→değer, başlıktan sonraki ilk baytın konumu)
        """
        fields: Dict[str, str] = {}
        offset = 0
        while offset < len(blob):
            end = blob.find(b"\n", offset)
            end = len(blob) if end < 0 else end
            line = blob[offset:end].decode("ascii", errors="replace").strip()
            offset = end + 1
            if not line:
                continue
            if "=" not in line:
                raise VolumeFormatError(f"Bozuk MetaImage satırı: {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            fields[key] = value
            if key == "ElementDataFile":
                return fields, offset
        raise VolumeFormatError("MetaImage başlığında ElementDataFile yok")

    @staticmethod
    def read_metaimage(path: Path) -> Tuple[np.ndarray, Tuple[float, float, float]]:
        with open(path, "rb") as f:
            blob = f.read()
        fields, offset = VolumeIO.parse_header(blob)
        try:
            ndims = int(fields.get("NDims", "3"))
            dims = tuple(int(t) for t in fields["DimSize"].split())
            spacing = tuple(float(t) for t in fields.get("ElementSpacing", "1 1 1").split())
            element_type = fields["ElementType"]
        except (KeyError, ValueError) as e:
            raise VolumeFormatError(f"MetaImage başlığı okunamadı: {e}") from e
        if ndims != 3 or len(dims) != 3 or len(spacing) != 3:
            raise VolumeFormatError(f"Yalnızca 3 boyutlu MetaImage desteklenir: NDims={ndims}")
        if element_type not in METAIMAGE_TYPES:
            raise VolumeFormatError(f"Desteklenmeyen ElementType: {element_type}")
        for msb_key in ("BinaryDataByteOrderMSB", "ElementByteOrderMSB"):
            if fields.get(msb_key, "False").lower() == "true":
                raise VolumeFormatError("Big-endian MetaImage desteklenmiyor")
        if fields.get("CompressedData", "False").lower() == "true":
            raise VolumeFormatError("Sıkıştırılmış MetaImage desteklenmiyor")

        data_file = fields["ElementDataFile"]
        if data_file == "LOCAL":
            raw = blob[offset:]
        else:
            raw_path = path.parent / data_file
            if not raw_path.exists():
                raise VolumeFormatError(f"Veri dosyası bulunamadı: {raw_path}")
            raw = raw_path.read_bytes()
        data = VolumeIO.decode(raw, dims, np.dtype(METAIMAGE_TYPES[element_type]))
        return data, spacing


def load_volume(path: Union[str, Path], kind: LoadKind = None) -> AnyField:
    """
    Hacim dosyası oku.

    Args:
        path: .vol, .mhd veya .mha dosyası
        kind: "volume", "mask", "prob" veya None (dtype'a göre Volume3D)

    Returns:
        Volume3D | Mask3D | ProbMap3D
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".vol":
        data, spacing = VolumeIO.read_vol1(path)
    elif suffix in (".mhd", ".mha"):
        data, spacing = VolumeIO.read_metaimage(path)
    else:
        raise VolumeFormatError(f"Desteklenmeyen uzantı: {path.suffix}")
    logger.debug(f"Hacim yüklendi: {path.name} {data.shape} {data.dtype}")
    return VolumeIO.build(data, spacing, kind)


def save_volume(v: GridField, path: Union[str, Path]) -> Path:
    """Hacmi uzantının belirlediği formatta yaz"""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in VolumeIO.SUFFIXES:
        raise VolumeFormatError(f"Desteklenmeyen uzantı: {path.suffix}")
    path.parent.mkdir(parents=True, exist_ok=True)
    if suffix == ".vol":
        VolumeIO.write_vol1(v, path)
    else:
        VolumeIO.write_metaimage(v, path)
    logger.debug(f"Hacim kaydedildi: {path}")
    return path


def kind_of(v: GridField) -> LoadKind:
    """save→load tur yolculuğu için yükleme türü"""
    if isinstance(v, Mask3D):
        return "mask"
    if isinstance(v, ProbMap3D):
        return "prob"
    return None
