"""
CNN ağırlıklarının ikili kaydı ve eğitim geçmişi CSV'si.

Düzen: b"CNN3" | u32 (LE) başlık uzunluğu | JSON başlık | '<f8' ağırlık bloğu.
Başlık mimariyi ve parametre adları/şekillerini blok sırasıyla listeler.
"""

import json
import logging
import struct
from pathlib import Path
from typing import List, Sequence

import numpy as np
import pandas as pd

from config.settings import CNN_MAGIC, MODEL_FORMAT_VERSION
from neural.cnn3d import Cnn3dModel
from neural.trainer import EpochRecord
from utils.exceptions import VolumeFormatError
from utils.serialization import read_csv, write_csv

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["epoch", "phase", "train_loss", "val_loss", "val_accuracy"]


def save_model(model: Cnn3dModel, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    params = model.named_params()
    header = {
        "format_version": MODEL_FORMAT_VERSION,
        "architecture": model.architecture(),
        "params": [{"name": name, "shape": list(p.shape)} for name, p in params],
    }
    blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as f:
        f.write(CNN_MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        for _, p in params:
            f.write(np.ascontiguousarray(p, dtype="<f8").tobytes())
    logger.debug(f"CNN kaydedildi: {path}")
    return path


def load_model(path: Path) -> Cnn3dModel:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] != CNN_MAGIC:
        raise VolumeFormatError(f"{path}: CNN3 sihirli baytı bulunamadı")
    (length,) = struct.unpack_from("<I", raw, 4)
    try:
        header = json.loads(raw[8:8 + length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise VolumeFormatError(f"{path}: CNN başlığı okunamadı: {e}") from e
    if header.get("format_version") != MODEL_FORMAT_VERSION:
        raise VolumeFormatError(f"{path}: desteklenmeyen CNN sürümü {header.get('format_version')}")

    arch = header["architecture"]
    model = Cnn3dModel(arch["patch_size"], arch["channels"], arch["fc_width"], seed=None)
    weights = {}
    offset = 8 + length
    for entry in header["params"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape))
        if offset + 8 * count > len(raw):
            raise VolumeFormatError(f"{path}: ağırlık bloğu kısa")
        weights[entry["name"]] = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).reshape(shape)
        offset += 8 * count
    if offset != len(raw):
        raise VolumeFormatError(f"{path}: ağırlık bloğunun sonunda fazladan {len(raw) - offset} bayt")
    model.set_weights(weights)
    return model


def write_history(history: Sequence[EpochRecord], path: Path) -> Path:
    frame = pd.DataFrame([vars(r) for r in history], columns=HISTORY_COLUMNS)
    return write_csv(frame, path)


def read_history(path: Path) -> List[EpochRecord]:
    frame = read_csv(path)
    return [
        EpochRecord(int(r.epoch), str(r.phase), float(r.train_loss), float(r.val_loss), float(r.val_accuracy))
        for r in frame.itertuples(index=False)
    ]
