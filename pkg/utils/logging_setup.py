"""
Loglama yapılandırması.
Konsolda colorlog ile renkli çıktı, istenirse satır bazlı JSON.
"""

import json
import logging
import sys
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

import colorlog

from config.settings import LOG_BACKUP_COUNT, LOG_DATE_FORMAT, LOG_FORMAT, LOG_MAX_BYTES

# Standart LogRecord alanları (extra alanları ayırmak için)
_RESERVED = set(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


class JsonLineFormatter(logging.Formatter):
    """Her kaydı tek satırlık JSON olarak yazar"""

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "ts": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        for key, value in record.__dict__.items():
            if key not in _RESERVED and not key.startswith("_"):
                payload[key] = value
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False, default=str)


def setup_logging(
    level: str = "INFO",
    json_lines: bool = False,
    log_file: Optional[Path] = None,
) -> None:
    """
    Root logger'ı yapılandır.

    Args:
        level: Log seviyesi
        json_lines: True ise satır bazlı JSON
        log_file: Opsiyonel dönen (rotating) log dosyası
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    root.setLevel(level)

    console = logging.StreamHandler(sys.stderr)
    if json_lines:
        console.setFormatter(JsonLineFormatter())
    else:
        console.setFormatter(colorlog.ColoredFormatter(
            "%(log_color)s" + LOG_FORMAT,
            datefmt=LOG_DATE_FORMAT,
        ))
    root.addHandler(console)

    if log_file is not None:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=LOG_MAX_BYTES,
            backupCount=LOG_BACKUP_COUNT,
            encoding="utf-8",
        )
        file_handler.setFormatter(
            JsonLineFormatter() if json_lines else logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT)
        )
        root.addHandler(file_handler)
