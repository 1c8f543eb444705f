"""
Yama CNN eğitimi: Adam evresi → SGD evresi, doğrulama kaybına göre
en iyi ağırlıkların saklanması ve erken durdurma.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from tqdm import tqdm

from config.runtime import runtime_settings
from config.settings import CNN_NONCONVERGING_SIZES
from ensemble.forest import check_binary_labels
from models.schemas import CnnConfig
from neural.cnn3d import Cnn3dModel
from neural.losses import bce_terms
from neural.optim import SGD, Adam, Optimizer
from utils.exceptions import InsufficientDataError, ShapeMismatchError
from utils.rng import stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PatchDataset:
    """(N, s, s, s) [0,1] yamalar ve 0/1 etiketler"""

    patches: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        patches = np.asarray(self.patches, dtype=np.float64)
        labels = np.asarray(self.labels).astype(np.int64).reshape(-1)
        if patches.ndim != 4 or len(patches) != len(labels):
            raise ShapeMismatchError(f"Yama {patches.shape} ve etiket {labels.shape} uyuşmuyor")
        object.__setattr__(self, "patches", patches)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def patch_size(self) -> int:
        return int(self.patches.shape[1])

    def subset(self, index: np.ndarray) -> "PatchDataset":
        return PatchDataset(self.patches[index], self.labels[index])


@dataclass
class EpochRecord:
    epoch: int
    phase: str
    train_loss: float
    val_loss: float
    val_accuracy: float


@dataclass
class TrainingResult:
    model: Cnn3dModel
    history: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = float("inf")
    flagged: bool = False

    def history_rows(self) -> List[Dict]:
        return [vars(r).copy() for r in self.history]


def evaluate(model: Cnn3dModel, data: PatchDataset, chunk: int = 64) -> tuple:
    """(ortalama BCE, doğruluk); eşik 0.5"""
    probs = model.predict(data.patches, chunk=chunk)
    loss = float(bce_terms(probs, data.labels).mean())
    accuracy = float(((probs >= 0.5).astype(np.int64) == data.labels).mean())
    return loss, accuracy


def _optimizer_for(phase: str, config: CnnConfig) -> Optimizer:
    schedule = config.schedule
    if phase == "adam":
        return Adam(schedule.adam_lr, schedule.beta1, schedule.beta2, schedule.adam_eps, decay=schedule.decay)
    return SGD(schedule.sgd_lr, schedule.sgd_momentum, decay=schedule.decay)


def train_patch_cnn(
    train: PatchDataset,
    val: PatchDataset,
    config: Optional[CnnConfig] = None,
    seed: int = 0,
) -> TrainingResult:
    """
    Yama CNN'ini eğit.

    Evre geçişi adam_epochs'ta erken durdurma sayacından bağımsız olur ve
    sayaç sıfırlanır. Döndürülen model en düşük doğrulama kaybını veren
    ağırlıkları taşır.

    Args:
        train: Eğitim yamaları (iki sınıf da bulunmalı)
        val: Doğrulama yamaları
        config: Mimari ve eğitim takvimi
        seed: Başlatma ve karıştırma tohumu

    Returns:
        TrainingResult
    """
    config = config or CnnConfig()
    if len(train) == 0 or len(val) == 0:
        raise InsufficientDataError("Eğitim ve doğrulama kümeleri boş olamaz")
    check_binary_labels(train.labels)
    s = config.patch_size
    if train.patch_size != s or val.patch_size != s:
        raise ShapeMismatchError(f"Yama boyutu {train.patch_size}/{val.patch_size}, model {s}")

    flagged = s in CNN_NONCONVERGING_SIZES
    if flagged:
        logger.warning(f"Yama boyutu {s} için yakınsama sorunu bildirilmiş; eğitim yine de yapılıyor")

    schedule = config.schedule
    model = Cnn3dModel(s, config.channels, config.fc_width, seed=seed)
    batch = schedule.batch_for(s)
    result = TrainingResult(model=model, flagged=flagged)
    best_weights = model.get_weights()
    phase = "adam" if schedule.adam_epochs > 0 else "sgd"
    optimizer = _optimizer_for(phase, config)
    stale = 0

    epochs = range(schedule.max_epochs)
    if runtime_settings.show_progress:
        epochs = tqdm(epochs, desc="CNN epoch", leave=False)
    for epoch in epochs:
        if phase == "adam" and epoch >= schedule.adam_epochs:
            phase = "sgd"
            optimizer = _optimizer_for(phase, config)
            stale = 0
            logger.info(f"Epoch {epoch}: SGD evresine geçildi")

        order = stream(seed, "cnn-epoch", epoch).permutation(len(train))
        total = 0.0
        for start in range(0, len(order), batch):
            index = order[start:start + batch]
            model.forward(train.patches[index])
            total += model.backward(train.labels[index])
            scale = 1.0 / len(index)
            optimizer.step(model.named_params(), [(n, g * scale) for n, g in model.named_grads()])

        val_loss, val_accuracy = evaluate(model, val)
        record = EpochRecord(epoch, phase, total / len(train), val_loss, val_accuracy)
        result.history.append(record)
        logger.debug(f"Epoch {epoch} [{phase}] eğitim {record.train_loss:.4f} doğrulama {val_loss:.4f} doğruluk {val_accuracy:.3f}")

        if val_loss < result.best_val_loss:
            result.best_val_loss = val_loss
            result.best_epoch = epoch
            best_weights = model.get_weights()
            stale = 0
        else:
            stale += 1
            if stale >= schedule.patience:
                logger.info(f"Erken durdurma: epoch {epoch}, en iyi epoch {result.best_epoch}")
                break

    model.set_weights(best_weights)
    logger.info(f"CNN eğitildi: s={s}, {len(result.history)} epoch, en iyi doğrulama kaybı {result.best_val_loss:.4f}")
    return result
