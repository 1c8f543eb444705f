"""
Çalışma manifestosu: konfigürasyon özeti, tohum, aşama süreleri ve ara
maske istatistikleri. Manifestodaki konfigürasyon çalışmayı yeniden
üretmeye yeter.
"""

import hashlib
import logging
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from models.schemas import PipelineConfig
from models.volume import Mask3D
from utils.serialization import canonical_json, write_json
from volumes.components import Connectivity, connected_components

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1


def config_hash(config: PipelineConfig) -> str:
    """Konfigürasyonun kanonik JSON'unun SHA-256'sı"""
    return hashlib.sha256(canonical_json(config.model_dump(mode="json")).encode("utf-8")).hexdigest()


def file_hash(path: Optional[Path]) -> Optional[str]:
    if path is None or not Path(path).exists():
        return None
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def mask_hash(mask: Mask3D) -> str:
    return hashlib.sha256(np.ascontiguousarray(mask.data).tobytes()).hexdigest()


def mask_stats(mask: Mask3D) -> Dict[str, Any]:
    _, components = connected_components(mask, Connectivity.FULL)
    return {
        "foreground": mask.count,
        "components": len(components),
        "sha256": mask_hash(mask),
    }


@dataclass
class StageRecord:
    stage: str
    status: str  # ok | skipped | failed
    seconds: float = 0.0
    stats: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None


@dataclass
class RunManifest:
    case_id: str
    config_hash: str
    seed: int
    config: Dict[str, Any]
    started_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    finished_at: Optional[str] = None
    stages: List[StageRecord] = field(default_factory=list)
    failed_stage: Optional[str] = None
    artifacts: Dict[str, Optional[str]] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    environment: Dict[str, str] = field(default_factory=lambda: {
        "python": platform.python_version(),
        "numpy": np.__version__,
    })

    @classmethod
    def for_config(cls, case_id: str, config: PipelineConfig) -> "RunManifest":
        paths = config.paths
        return cls(
            case_id=case_id,
            config_hash=config_hash(config),
            seed=config.seed,
            config=config.model_dump(mode="json"),
            artifacts={
                "featsel_model": file_hash(paths.featsel_model),
                "forest_model": file_hash(paths.forest_model),
                "cnn_model": file_hash(paths.cnn_model),
            },
        )

    def record(self, record: StageRecord) -> None:
        self.stages.append(record)
        if record.status == "failed":
            self.failed_stage = record.stage

    def stage(self, name: str) -> Optional[StageRecord]:
        for record in self.stages:
            if record.stage == name:
                return record
        return None

    def finish(self) -> None:
        self.finished_at = datetime.now(timezone.utc).isoformat()

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["manifest_version"] = MANIFEST_VERSION
        return data

    def save(self, path: Path) -> Path:
        logger.debug(f"Manifesto yazılıyor: {path}")
        return write_json(self.to_dict(), path)
