"""
Script'ler için ortak yardımcılar: proje yolu, loglama ve rich tablolar.
"""

import io
import sys
from pathlib import Path
from typing import Dict, Iterable, Sequence

# Windows için UTF-8 encoding
if sys.platform == 'win32':
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8')

# Proje kök dizinini path'e ekle
sys.path.insert(0, str(Path(__file__).parent.parent))

from rich.console import Console
from rich.table import Table

console = Console()


def print_table(title: str, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    table = Table(title=title)
    for column in columns:
        table.add_column(column, justify="right" if column != columns[0] else "left")
    for row in rows:
        table.add_row(*(f"{v:.4f}" if isinstance(v, float) else str(v) for v in row))
    console.print(table)


def print_acceptance(checks: Dict[str, bool], elapsed_s: float) -> None:
    """Kabul kontrollerini ve toplam süreyi yazdır"""
    console.print(f"Toplam süre: {elapsed_s / 60.0:.1f} dk")
    for name, passed in checks.items():
        console.print(f"  {name:<10} {'[green]GEÇTİ[/green]' if passed else '[red]KALDI[/red]'}")
