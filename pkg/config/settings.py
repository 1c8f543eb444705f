"""
Global konfigürasyon ayarları.
Algoritma sabitleri burada tutulur; operasyonel olanlar environment
variable'lardan override edilebilir.
"""

import os
from pathlib import Path
from typing import Dict, Tuple
import numpy as np
from dotenv import load_dotenv

# .env dosyasını yükle
load_dotenv()

# =============================================================================
# PROJE YOLLARI
# =============================================================================
BASE_DIR = Path(__file__).resolve().parent.parent
OUTPUT_DIR = Path(os.getenv("TUMORREF_OUTPUT_DIR", str(BASE_DIR / "runs")))
LOG_DIR = Path(os.getenv("TUMORREF_LOG_DIR", str(BASE_DIR / "logs")))

# =============================================================================
# LOGLAMA AYARLARI
# =============================================================================
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Log rotation
LOG_MAX_BYTES = 10 * 1024 * 1024  # 10MB
LOG_BACKUP_COUNT = 5

# =============================================================================
# İŞLEM AYARLARI
# =============================================================================
MAX_WORKERS = int(os.getenv("MAX_WORKERS", "4"))
SHOW_PROGRESS = os.getenv("SHOW_PROGRESS", "true").lower() == "true"
DEFAULT_SEED = int(os.getenv("TUMORREF_SEED", "20240601"))

# =============================================================================
# HACİM (VOLUME) AYARLARI
# =============================================================================
# VOL1 ikili formatı
VOL1_MAGIC = b"VOL1"
VOL1_DTYPE_CODES: Dict[int, str] = {0: "<u1", 1: "<f4"}

# MetaImage
METAIMAGE_TYPES: Dict[str, str] = {"MET_UCHAR": "<u1", "MET_FLOAT": "<f4"}

# Ön işleme (HU penceresi ve hedef çözünürlük)
HU_WINDOW: Tuple[float, float] = (-100.0, 400.0)
HU_AIR = -1000.0
NORMALIZED_MAX = 255
TARGET_SPACING_MM = 1.0

# Mesafe dönüşümünde "sonsuz" yerine kullanılan değer
EDT_INF = float(np.finfo(np.float64).max)

# =============================================================================
# SON İŞLEME (POSTPROC) AYARLARI
# =============================================================================
HISTOGRAM_LEVELS = 256
OTSU_MAX_TAU = 254
MORPH_SE_SIZE = 3  # 3x3 kare yapı elemanı (aksiyel düzlem)
RESTORE_PROB_THRESHOLD = 0.6
SUPPRESS_ISOLATED_DEFAULT = False

# =============================================================================
# NEGATİF ÖRNEKLEME AYARLARI
# =============================================================================
SAMPLER_R_MIN = 2
SAMPLER_R_STEP = 2
SAMPLER_R_MAX = 48
SAMPLER_QUOTA_TOTAL = 1000
SAMPLER_BOUNDARY_FRACTION = 0.6
SAMPLER_MAX_RETRIES = 100
SAMPLER_REJECT_OUTSIDE_LIVER = 0.20
SAMPLER_REJECT_TUMOR_FRACTION = 0.10
HARD_NEGATIVE_MAX_OVERLAP = 0.10

# =============================================================================
# RADYOMİK ÖZELLİK AYARLARI
# =============================================================================
# Grup boyutları (toplam 728 = 80 + 72 + 8*72)
FEATURE_GROUP_SIZES: Dict[str, int] = {
    "first_order": 34,
    "gradient": 2,
    "run_length": 11,
    "glcm": 22,
    "shape": 8,
    "moments": 3,
}
FEATURE_TOTAL = 728

FIRST_ORDER_BINS = 64
FIRST_ORDER_BIN_WIDTH = 4
TEXTURE_LEVELS = 128
TEXTURE_BIN_WIDTH = 2
GRADIENT_SIGMA_FACTOR = 1.5
GAUSSIAN_TRUNCATE = 4.0
BOUNDARY_BAND_WIDTH = 2
WAVELET_BANDS = ("LLL", "LLH", "LHL", "LHH", "HLL", "HLH", "HHL", "HHH")

# =============================================================================
# ÖZELLİK SEÇİMİ AYARLARI
# =============================================================================
STD_FLOOR = 1e-12
NZV_EPS = 1e-8
PEARSON_MAX = 0.95
DCOR_MAX = 0.95
DCOR_MAX_ROWS = 300
SELECT_TOP_K = 30
SELECT_TARGET = 20
RANKING_STRATEGIES = ("RFE", "LASSO", "RF-IMP", "XGB-GAIN", "GBDT-FREQ", "RELIEFF")
RFE_DROP_FRACTION = 0.10
RANKING_FOREST_TREES = int(os.getenv("RANKING_FOREST_TREES", "100"))
LASSO_GRID_POINTS = 50
LASSO_GRID_RATIO = 1e-3
RELIEF_NEIGHBORS = 10

# =============================================================================
# AĞAÇ TOPLULUĞU (ENSEMBLE) AYARLARI
# =============================================================================
FOREST_TREES = 350
FOREST_MAX_DEPTH = 16
FOREST_MIN_SAMPLES_LEAF = 10
GBDT_ROUNDS = 200
GBDT_MAX_DEPTH = 3
GBDT_LEARNING_RATE = 0.1
GBDT_REG_LAMBDA = 1.0
TAU_RF = 0.5
MODEL_FORMAT_VERSION = 1

# =============================================================================
# 3D CNN AYARLARI
# =============================================================================
CNN_PATCH_SIZE = 11
CNN_CHANNELS: Tuple[int, ...] = (64, 64, 128, 128, 256)
CNN_FC_WIDTH = 64
CNN_D_MAX = 6
CNN_ADAM_LR = 1e-3
CNN_ADAM_EPOCHS = 30
CNN_SGD_LR = 1e-4
CNN_SGD_MOMENTUM = 0.9
CNN_MAX_EPOCHS = 100
CNN_PATIENCE = 10
CNN_BATCH_SMALL = 32  # s <= 15
CNN_BATCH_LARGE = 16
CNN_BATCH_SWITCH_SIZE = 15
CNN_NONCONVERGING_SIZES = (23,)
BCE_CLAMP = 1e-12
CNN_MAGIC = b"CNN3"

# Segmentasyon kaybı
LOSS_LAMBDA_DICE = 0.7
LOSS_LAMBDA_BCE = 0.3
LOSS_W_LIVER = 1.0
LOSS_W_TUMOR = 2.0
LOSS_EPS = 1e-5

# =============================================================================
# DEĞERLENDİRME AYARLARI
# =============================================================================
STRATA_SMALL_MM = 10.0
STRATA_LARGE_MM = 30.0
STRATA_REL_TOL = 1e-9
WILCOXON_MIN_N = 5
WILCOXON_EXACT_MAX_N = 25

# Masaüstü kabul deneyleri (20 fantomluk gürültülü takım)
ACCEPT_FULL_DICE = 0.90
ACCEPT_MAX_DROP_POINTS = 2.0
ACCEPT_MAX_RUNTIME_S = 20 * 60

# =============================================================================
# FANTOM AYARLARI
# =============================================================================
PHANTOM_LIVER_HU = 60.0
PHANTOM_LESION_HU = 40.0
PHANTOM_VESSEL_HU = 150.0
PHANTOM_BACKGROUND_HU = 0.0
PERTURB_MAX_SIGMA_HU = 10.0
PERTURB_SCALE_RANGE: Tuple[float, float] = (0.9, 1.1)

# =============================================================================
# PIPELINE AYARLARI
# =============================================================================
CONFIG_SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_STAGE_FAILURE = 3


# =============================================================================
# FONKSİYONLAR
# =============================================================================
def validate_config():
    """Konfigürasyonun geçerli olduğunu kontrol et"""
    errors = []

    core = sum(FEATURE_GROUP_SIZES.values())
    non_shape = core - FEATURE_GROUP_SIZES["shape"]
    if core + non_shape + len(WAVELET_BANDS) * non_shape != FEATURE_TOTAL:
        errors.append(f"Özellik grupları toplamı {FEATURE_TOTAL} etmiyor")

    if SAMPLER_R_MIN <= 0 or SAMPLER_R_STEP <= 0 or SAMPLER_R_MAX < SAMPLER_R_MIN:
        errors.append(f"Geçersiz yarıçap ızgarası: {SAMPLER_R_MIN}..{SAMPLER_R_MAX}/{SAMPLER_R_STEP}")

    if not 0.0 <= SAMPLER_BOUNDARY_FRACTION <= 1.0:
        errors.append(f"SAMPLER_BOUNDARY_FRACTION [0,1] dışında: {SAMPLER_BOUNDARY_FRACTION}")

    if SELECT_TARGET > SELECT_TOP_K:
        errors.append(f"SELECT_TARGET > SELECT_TOP_K: {SELECT_TARGET} > {SELECT_TOP_K}")

    if MAX_WORKERS < 1:
        errors.append(f"MAX_WORKERS en az 1 olmalı: {MAX_WORKERS}")

    if errors:
        raise ValueError("Konfigürasyon hataları:\n" + "\n".join(errors))


# Modül import edildiğinde config'i validate et
if os.getenv("SKIP_CONFIG_VALIDATION", "false").lower() != "true":
    try:
        validate_config()
    except ValueError as e:
        print(f"[UYARI] {e}")
