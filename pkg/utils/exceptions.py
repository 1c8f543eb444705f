"""
Paket genelinde kullanılan hata sınıfları.
"""
from typing import Optional


class TumorRefineError(Exception):
    """Tüm paket hatalarının temel sınıfı"""


class VolumeFormatError(TumorRefineError, ValueError):
    """Bozuk başlık, boyut/veri uzunluğu uyuşmazlığı veya desteklenmeyen dtype"""


class GridMismatchError(TumorRefineError, ValueError):
    """İki hacmin ızgarası (boyut/aralık) uyuşmuyor"""


class ValueKindError(TumorRefineError, ValueError):
    """Hacmin değer türü işlem için uygun değil"""


class DegenerateHistogramError(TumorRefineError, ValueError):
    """Histogramda ikiden az dolu seviye var"""


class EmptyInputError(TumorRefineError, ValueError):
    """Boş girdi (maske, matris, veri bölümü)"""


class SingleClassError(TumorRefineError, ValueError):
    """Etiketlerde yalnızca tek sınıf var"""


class DimensionMismatchError(TumorRefineError, ValueError):
    """Özellik boyutu modelle uyuşmuyor"""


class ShapeMismatchError(TumorRefineError, ValueError):
    """Tensör veya yama şekli beklenenle uyuşmuyor"""


class ManifestMismatchError(TumorRefineError, ValueError):
    """Özellik isimleri modelin eğitildiği manifest ile uyuşmuyor"""


class MissingForwardStateError(TumorRefineError, RuntimeError):
    """Geri yayılım için ileri geçiş önbelleği yok"""


class LesionOutsideLiverError(TumorRefineError, ValueError):
    """Fantom lezyonu karaciğer dışına taşıyor"""


class PerturbationRangeError(TumorRefineError, ValueError):
    """Bozulma parametresi izin verilen aralık dışında"""


class InsufficientDataError(TumorRefineError, ValueError):
    """İstatistik için yeterli veri yok"""


class ConfigError(TumorRefineError, ValueError):
    """Konfigürasyon dosyası veya parametre hatası"""


class StageError(TumorRefineError):
    """Pipeline aşaması başarısız oldu"""

    def __init__(self, stage: str, cause: Optional[BaseException] = None):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}" if cause else f"[{stage}] aşama başarısız")
