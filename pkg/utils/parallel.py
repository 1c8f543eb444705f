"""
Sıralı sonuç döndüren paralel map yardımcıları.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tqdm import tqdm

from config.runtime import runtime_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    workers: Optional[int] = None,
    desc: Optional[str] = None,
) -> List[R]:
    """
    fn'i her öğeye uygula; sonuçları girdi sırasıyla döndür.

    Args:
        fn: Uygulanacak fonksiyon (yan etkisiz olmalı)
        items: Girdi öğeleri
        workers: İşçi sayısı (None: runtime ayarı, 1: seri)
        desc: İlerleme çubuğu açıklaması

    Returns:
        List: fn(item) sonuçları, girdi sırasında
    """
    items = list(items)
    workers = runtime_settings.workers if workers is None else workers
    show = bool(desc) and runtime_settings.show_progress and len(items) > 1

    if workers <= 1 or len(items) <= 1:
        iterator = tqdm(items, desc=desc, leave=False) if show else items
        return [fn(item) for item in iterator]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = executor.map(fn, items)
        if show:
            results = tqdm(results, total=len(items), desc=desc, leave=False)
        return list(results)
