"""
Çalışma zamanı ayarları (pydantic-settings).
Çıktı dizini, loglama ve paralellik gibi operasyonel değerler .env
dosyasından veya TUMORREF_ önekli environment variable'lardan okunur.
"""
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

from config.settings import LOG_LEVEL, MAX_WORKERS, OUTPUT_DIR, SHOW_PROGRESS


class RuntimeSettings(BaseSettings):
    """Uygulama çalışma ayarları"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="TUMORREF_",
        extra="ignore",
    )

    # Çıktılar
    output_dir: Path = OUTPUT_DIR

    # Logging
    log_level: str = LOG_LEVEL
    log_json: bool = True  # Satır bazlı JSON log; renkli konsol için TUMORREF_LOG_JSON=false
    log_file: Optional[Path] = None

    # Processing
    workers: int = MAX_WORKERS
    show_progress: bool = SHOW_PROGRESS


runtime_settings = RuntimeSettings()
