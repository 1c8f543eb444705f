"""
Ağaç topluluğu modellerinin sürümlü JSON kaydı (düğümler düz diziler halinde).
"""

import logging
from pathlib import Path

import numpy as np

from config.settings import MODEL_FORMAT_VERSION
from ensemble.forest import ForestModel
from ensemble.gbdt import GbdtModel
from ensemble.tree import TreeArrays
from models.schemas import ForestParams, GbdtParams
from utils.exceptions import VolumeFormatError
from utils.serialization import read_json, write_json

logger = logging.getLogger(__name__)


def _check_header(data: dict, kind: str, path: Path) -> None:
    if data.get("kind") != kind:
        raise VolumeFormatError(f"{path}: beklenen model türü {kind}, gelen {data.get('kind')}")
    if data.get("format_version") != MODEL_FORMAT_VERSION:
        raise VolumeFormatError(f"{path}: desteklenmeyen model sürümü {data.get('format_version')}")


def save_forest(model: ForestModel, path: Path) -> Path:
    data = {
        "kind": "forest",
        "format_version": MODEL_FORMAT_VERSION,
        "params": model.params.model_dump(),
        "n_features": model.n_features,
        "class_weights": list(model.class_weights),
        "seed": model.seed,
        "feature_names": model.feature_names,
        "importances": model.importances.tolist(),
        "trees": [t.to_dict() for t in model.trees],
    }
    logger.debug(f"Orman kaydediliyor: {path}")
    return write_json(data, path)


def load_forest(path: Path) -> ForestModel:
    data = read_json(path)
    _check_header(data, "forest", Path(path))
    return ForestModel(
        trees=[TreeArrays.from_dict(t) for t in data["trees"]],
        params=ForestParams.model_validate(data["params"]),
        n_features=int(data["n_features"]),
        class_weights=tuple(data["class_weights"]),
        seed=int(data["seed"]),
        feature_names=data.get("feature_names"),
        importances=np.asarray(data["importances"], dtype=np.float64),
    )


def save_gbdt(model: GbdtModel, path: Path) -> Path:
    data = {
        "kind": "gbdt",
        "format_version": MODEL_FORMAT_VERSION,
        "params": model.params.model_dump(),
        "f0": model.f0,
        "n_features": model.n_features,
        "seed": model.seed,
        "loss_history": model.loss_history,
        "trees": [t.to_dict() for t in model.trees],
    }
    return write_json(data, path)


def load_gbdt(path: Path) -> GbdtModel:
    data = read_json(path)
    _check_header(data, "gbdt", Path(path))
    return GbdtModel(
        f0=float(data["f0"]),
        trees=[TreeArrays.from_dict(t) for t in data["trees"]],
        params=GbdtParams.model_validate(data["params"]),
        n_features=int(data["n_features"]),
        seed=int(data["seed"]),
        loss_history=list(data["loss_history"]),
    )
