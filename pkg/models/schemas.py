"""
JSON konfigürasyon şemaları (pydantic v2).

Öncelik sırası: settings varsayılanları < JSON dosyası < CLI override'ları.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import settings
from utils.exceptions import ConfigError

Vec3 = Tuple[float, float, float]


class _Schema(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# =============================================================================
# ÖRNEKLEME
# =============================================================================
class SamplerConfig(_Schema):
    """Negatif bölge örnekleyici parametreleri"""

    r_min: int = Field(settings.SAMPLER_R_MIN, gt=0)
    r_step: int = Field(settings.SAMPLER_R_STEP, gt=0)
    r_max: int = Field(settings.SAMPLER_R_MAX, gt=0)
    quota_total: int = Field(settings.SAMPLER_QUOTA_TOTAL, ge=0)
    boundary_fraction: float = Field(settings.SAMPLER_BOUNDARY_FRACTION, ge=0.0, le=1.0)
    max_retries: int = Field(settings.SAMPLER_MAX_RETRIES, gt=0)
    reject_outside_liver: float = Field(settings.SAMPLER_REJECT_OUTSIDE_LIVER, ge=0.0, le=1.0)
    reject_tumor_fraction: float = Field(settings.SAMPLER_REJECT_TUMOR_FRACTION, ge=0.0, le=1.0)
    seed: int = settings.DEFAULT_SEED

    @model_validator(mode="after")
    def _check_grid(self):
        if self.r_max < self.r_min:
            raise ValueError(f"r_max < r_min: {self.r_max} < {self.r_min}")
        return self

    @property
    def radii(self) -> List[int]:
        return list(range(self.r_min, self.r_max + 1, self.r_step))


# =============================================================================
# FANTOM
# =============================================================================
class LiverSpec(_Schema):
    """Elipsoit karaciğer (merkez ve yarıçaplar mm cinsinden)"""

    center: Vec3
    radii: Vec3
    hu: float = settings.PHANTOM_LIVER_HU

    @field_validator("radii")
    @classmethod
    def _positive(cls, v):
        if min(v) <= 0:
            raise ValueError("Karaciğer yarıçapları pozitif olmalı")
        return v


class LesionSpec(_Schema):
    """Küresel lezyon"""

    center: Vec3
    radius_mm: float = Field(gt=0)
    hu: float = settings.PHANTOM_LESION_HU
    size_class: Optional[Literal["small", "medium", "large"]] = None


class VesselSpec(_Schema):
    """Parlak tüp (yanlış pozitif yemi), iki uç nokta arası silindir"""

    start: Vec3
    end: Vec3
    radius_mm: float = Field(gt=0)
    hu: float = settings.PHANTOM_VESSEL_HU


class DegradationSpec(_Schema):
    """Olasılık haritası bozulma parametreleri"""

    blur_sigma: float = Field(0.0, ge=0.0)
    speckle_rate: float = Field(0.0, ge=0.0, le=1.0)
    speckle_amplitude: float = Field(0.6, ge=0.0, le=1.0)
    vessel_leak: float = Field(0.0, ge=0.0, le=1.0)
    slice_dropout_rate: float = Field(0.0, ge=0.0, le=1.0)
    slice_dropout_factor: float = Field(0.3, ge=0.0, le=1.0)
    boundary_jitter: float = Field(0.0, ge=0.0, le=1.0)
    liver_blur_sigma: float = Field(1.0, ge=0.0)


class PhantomSpec(_Schema):
    """Sentetik fantom tanımı"""

    dims: Tuple[int, int, int]
    spacing: Vec3 = (1.0, 1.0, 1.0)
    liver: LiverSpec
    lesions: List[LesionSpec] = Field(default_factory=list)
    vessels: List[VesselSpec] = Field(default_factory=list)
    background_hu: float = settings.PHANTOM_BACKGROUND_HU
    noise_sigma_hu: float = Field(0.0, ge=0.0)
    degradation: DegradationSpec = Field(default_factory=DegradationSpec)
    seed: int = settings.DEFAULT_SEED

    @field_validator("dims")
    @classmethod
    def _dims_positive(cls, v):
        if min(v) <= 0:
            raise ValueError("Fantom boyutları pozitif olmalı")
        return v

    @field_validator("spacing")
    @classmethod
    def _spacing_positive(cls, v):
        if min(v) <= 0:
            raise ValueError("Fantom aralığı pozitif olmalı")
        return v


# =============================================================================
# MODEL PARAMETRELERİ
# =============================================================================
class ForestParams(_Schema):
    n_trees: int = Field(settings.FOREST_TREES, gt=0)
    max_depth: int = Field(settings.FOREST_MAX_DEPTH, gt=0)
    min_samples_leaf: int = Field(settings.FOREST_MIN_SAMPLES_LEAF, gt=0)
    max_features: Optional[int] = Field(None, gt=0)
    balanced: bool = True


class GbdtParams(_Schema):
    rounds: int = Field(settings.GBDT_ROUNDS, ge=0)
    max_depth: int = Field(settings.GBDT_MAX_DEPTH, gt=0)
    learning_rate: float = Field(settings.GBDT_LEARNING_RATE, gt=0.0)
    reg_lambda: float = Field(settings.GBDT_REG_LAMBDA, ge=0.0)
    min_samples_leaf: int = Field(1, gt=0)


class TrainSchedule(_Schema):
    """Adam → SGD eğitim takvimi"""

    adam_lr: float = Field(settings.CNN_ADAM_LR, gt=0.0)
    adam_epochs: int = Field(settings.CNN_ADAM_EPOCHS, ge=0)
    sgd_lr: float = Field(settings.CNN_SGD_LR, gt=0.0)
    sgd_momentum: float = Field(settings.CNN_SGD_MOMENTUM, ge=0.0, lt=1.0)
    max_epochs: int = Field(settings.CNN_MAX_EPOCHS, gt=0)
    patience: int = Field(settings.CNN_PATIENCE, gt=0)
    batch_size: Optional[int] = Field(None, gt=0)
    decay: float = Field(0.0, ge=0.0)
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def batch_for(self, patch_size: int) -> int:
        """Yama boyutuna göre batch (s <= 15 için 32, aksi halde 16)"""
        if self.batch_size is not None:
            return self.batch_size
        return settings.CNN_BATCH_SMALL if patch_size <= settings.CNN_BATCH_SWITCH_SIZE else settings.CNN_BATCH_LARGE

    def lr_at(self, base_lr: float, step: int) -> float:
        """Ters-zaman azalması: lr / (1 + decay·t)"""
        return base_lr / (1.0 + self.decay * step)


class LossParams(_Schema):
    lambda_dice: float = Field(settings.LOSS_LAMBDA_DICE, ge=0.0)
    lambda_bce: float = Field(settings.LOSS_LAMBDA_BCE, ge=0.0)
    w_liver: float = Field(settings.LOSS_W_LIVER, ge=0.0)
    w_tumor: float = Field(settings.LOSS_W_TUMOR, ge=0.0)
    eps: float = Field(settings.LOSS_EPS, gt=0.0)


class CnnConfig(_Schema):
    patch_size: int = Field(settings.CNN_PATCH_SIZE, gt=0)
    channels: Tuple[int, int, int, int, int] = settings.CNN_CHANNELS
    fc_width: int = Field(settings.CNN_FC_WIDTH, gt=0)
    d_max: float = Field(settings.CNN_D_MAX, gt=0)
    schedule: TrainSchedule = Field(default_factory=TrainSchedule)
    max_train_voxels: int = Field(4000, gt=0)

    @field_validator("patch_size")
    @classmethod
    def _odd(cls, v):
        if v % 2 == 0:
            raise ValueError(f"Yama boyutu tek sayı olmalı: {v}")
        return v


# =============================================================================
# AŞAMA AYARLARI
# =============================================================================
class PostprocConfig(_Schema):
    otsu_mode: Literal["otsu", "fixed"] = "otsu"
    fixed_tau: int = Field(127, ge=0, le=settings.OTSU_MAX_TAU)
    restore_threshold: float = Field(settings.RESTORE_PROB_THRESHOLD, ge=0.0, le=1.0)
    suppress_isolated: bool = settings.SUPPRESS_ISOLATED_DEFAULT


class FeatselConfig(_Schema):
    nzv_eps: float = Field(settings.NZV_EPS, ge=0.0)
    pearson_max: float = Field(settings.PEARSON_MAX, gt=0.0, le=1.0)
    dcor_max: float = Field(settings.DCOR_MAX, gt=0.0, le=1.0)
    top_k: int = Field(settings.SELECT_TOP_K, gt=0)
    target: int = Field(settings.SELECT_TARGET, gt=0)
    strategies: Tuple[str, ...] = settings.RANKING_STRATEGIES
    ranking_trees: int = Field(settings.RANKING_FOREST_TREES, gt=0)

    @model_validator(mode="after")
    def _target_le_top_k(self):
        if self.target > self.top_k:
            raise ValueError(f"target > top_k: {self.target} > {self.top_k}")
        unknown = set(self.strategies) - set(settings.RANKING_STRATEGIES)
        if unknown:
            raise ValueError(f"Bilinmeyen sıralama stratejisi: {sorted(unknown)}")
        return self


class StageToggles(_Schema):
    """Ablasyon satırlarına karşılık gelen aşama anahtarları"""

    morph: bool = True
    temporal: bool = True
    radiomics_filter: bool = True
    cnn_refine: bool = True


class PipelinePaths(_Schema):
    ct: Optional[Path] = None
    p_tumor: Optional[Path] = None
    p_liver: Optional[Path] = None
    tumor_gt: Optional[Path] = None
    liver_gt: Optional[Path] = None
    featsel_model: Optional[Path] = None
    forest_model: Optional[Path] = None
    cnn_model: Optional[Path] = None
    output_dir: Path = settings.OUTPUT_DIR

    @model_validator(mode="after")
    def _inputs_exist(self):
        missing = [
            f"{name}={value}"
            for name, value in self
            if name != "output_dir" and value is not None and not Path(value).exists()
        ]
        if missing:
            raise ValueError(f"Dosya bulunamadı: {', '.join(missing)}")
        return self


class PipelineConfig(_Schema):
    """Tek JSON konfigürasyon belgesi"""

    schema_version: int = settings.CONFIG_SCHEMA_VERSION
    seed: int = settings.DEFAULT_SEED
    paths: PipelinePaths = Field(default_factory=PipelinePaths)
    toggles: StageToggles = Field(default_factory=StageToggles)
    postproc: PostprocConfig = Field(default_factory=PostprocConfig)
    sampler: SamplerConfig = Field(default_factory=SamplerConfig)
    featsel: FeatselConfig = Field(default_factory=FeatselConfig)
    forest: ForestParams = Field(default_factory=ForestParams)
    gbdt: GbdtParams = Field(default_factory=GbdtParams)
    cnn: CnnConfig = Field(default_factory=CnnConfig)
    loss: LossParams = Field(default_factory=LossParams)
    tau_rf: float = Field(settings.TAU_RF, ge=0.0, le=1.0)
    band_width: int = Field(settings.BOUNDARY_BAND_WIDTH, gt=0)
    workers: Optional[int] = Field(None, gt=0)

    @field_validator("schema_version")
    @classmethod
    def _known_version(cls, v):
        if v != settings.CONFIG_SCHEMA_VERSION:
            raise ValueError(f"Desteklenmeyen şema sürümü: {v}")
        return v

    def with_toggles(self, **toggles: bool) -> "PipelineConfig":
        return self.model_copy(update={"toggles": self.toggles.model_copy(update=toggles)})


# =============================================================================
# YÜKLEME YARDIMCILARI
# =============================================================================
def parse_override(expr: str) -> Tuple[List[str], Any]:
    """
    'a.b.c=değer' ifadesini ayrıştır. Değer JSON olarak okunur,
    okunamazsa düz metin kabul edilir.
    """
    if "=" not in expr:
        raise ConfigError(f"Override 'anahtar=değer' biçiminde olmalı: {expr}")
    key, raw = expr.split("=", 1)
    keys = [k for k in key.strip().split(".") if k]
    if not keys:
        raise ConfigError(f"Boş override anahtarı: {expr}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return keys, value


def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """İç içe sözlüğe override'ları uygula (yerinde değil, kopya döner)"""
    data = json.loads(json.dumps(data, default=str))
    for expr in overrides:
        keys, value = parse_override(expr)
        node = data
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"Override yolu sözlük değil: {expr}")
        node[keys[-1]] = value
    return data


def build_config(model: type, data: Dict[str, Any]):
    """pydantic doğrulama hatasını ConfigError'a çevir"""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{model.__name__} doğrulanamadı:\n{e}") from e


def load_config(path: Optional[Path] = None, overrides: Sequence[str] = ()) -> PipelineConfig:
    """
    PipelineConfig yükle.

    Args:
        path: JSON dosyası (None ise varsayılanlar)
        overrides: 'a.b=v' ifadeleri (dosyadan önceliklidir)

    Returns:
        PipelineConfig
    """
    data: Dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Konfigürasyon okunamadı: {path}: {e}") from e
    return build_config(PipelineConfig, apply_overrides(data, overrides))


def load_phantom_spec(path: Path) -> PhantomSpec:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Fantom tanımı okunamadı: {path}: {e}") from e
    return build_config(PhantomSpec, data)
