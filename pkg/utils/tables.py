"""
Tabular output: aligned text tables for the console and pandas CSV files.
"""

from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Union

import pandas as pd


def format_table(rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None,
                 precision: int = 4) -> Optional[str]:
    """
    Formats a list of dict rows as an aligned text table with a header line.
    """
    if not rows:
        return None
    columns = list(columns or rows[0].keys())

    def cell(value: Any) -> str:
        if isinstance(value, float):
            return f"{value:.{precision}f}"
        return str(value)

    table = [columns] + [[cell(row.get(col, "")) for col in columns] for row in rows]
    widths = [max(len(line[c]) for line in table) for c in range(len(columns))]
    lines = []
    for i, line in enumerate(table):
        lines.append(" | ".join(text.ljust(widths[c]) for c, text in enumerate(line)).rstrip())
        if i == 0:
            lines.append("-+-".join("-" * w for w in widths))
    return "\n".join(lines)


def write_csv(path: Union[str, Path], rows: Iterable[Dict[str, Any]],
              columns: Sequence[str]) -> Path:
    """Write rows with a fixed column order; an empty row list still writes the header"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(list(rows), columns=list(columns))
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
