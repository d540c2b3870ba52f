"""Price-quote ingestion.

CSV header: ``pair_id,a_min,a_max,b_min,b_max[,base][,a_ref][,b_ref]``.

Each row quotes one exchange from both sides: ``a_min``/``a_max`` are the
ideal-purchase / ideal-sale prices of the first side, ``b_min``/``b_max``
those of the other. Each side is measured against its own reference price
(``a_ref``/``b_ref``, defaulting to the geometric mean of that side's
extremes), which gives two estimates of the same squared interval. The row
reports both sides and their mean.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from ecokin.kinematics import classify, interval_from_prices

REQUIRED = ("pair_id", "a_min", "a_max", "b_min", "b_max")
OPTIONAL = ("base", "a_ref", "b_ref")
DISAGREEMENT_WARN = 0.02


@dataclass(frozen=True)
class QuoteResult:
    pair_id: str
    line: int
    side_a: float
    side_b: float
    squared: float
    magnitude: float
    classification: str
    disagreement: float
    base: str


@dataclass(frozen=True)
class RowError:
    line: int
    message: str


def _price(raw, name):
    try:
        x = float(raw)
    except (TypeError, ValueError):
        raise ValueError(f"{name}: not a number ({raw!r})") from None
    if not (math.isfinite(x) and x > 0):
        raise ValueError(f"{name}: price must be positive, got {raw!r}")
    return x


def evaluate_quote(row: dict, line: int = 0, default_base="2") -> QuoteResult:
    """Interval estimate for one quote row (values may be strings or numbers)."""
    pid = str(row.get("pair_id") or "").strip()
    if not pid:
        raise ValueError("pair_id: empty")
    a_min, a_max, b_min, b_max = (_price(row.get(k), k) for k in REQUIRED[1:])
    if a_min > a_max or b_min > b_max:
        raise ValueError("min price exceeds max price")
    base = str(row.get("base") or default_base).strip()
    if base not in ("2", "e"):
        raise ValueError(f"base: must be 2 or e, got {base!r}")
    a_ref = _price(row["a_ref"], "a_ref") if row.get("a_ref") not in (None, "") else math.sqrt(a_min * a_max)
    b_ref = _price(row["b_ref"], "b_ref") if row.get("b_ref") not in (None, "") else math.sqrt(b_min * b_max)
    side_a = interval_from_prices(a_min, a_max, a_ref, a_ref, base).squared
    side_b = interval_from_prices(b_min, b_max, b_ref, b_ref, base).squared
    squared = 0.5 * (side_a + side_b)
    denom = max(abs(side_a), abs(side_b))
    disagreement = abs(side_a - side_b) / denom if denom > 0 else 0.0
    return QuoteResult(pid, line, side_a, side_b, squared, math.sqrt(abs(squared)),
                       classify(squared, abs(side_a) + abs(side_b)), disagreement, base)


def ingest_quotes(csv_path, default_base="2"):
    """Parse a quotes CSV into ``(results, errors)``.

    Malformed rows are reported with their line number and skipped; an
    unreadable file raises ``OSError`` and an empty one ``ValueError``.
    """
    text = Path(csv_path).read_text()
    if not text.strip():
        raise ValueError(f"{csv_path}: empty quotes file")
    reader = csv.DictReader(text.splitlines())
    header = [h.strip() for h in (reader.fieldnames or [])]
    missing = [k for k in REQUIRED if k not in header]
    if missing:
        raise ValueError(f"{csv_path}: header lacks column(s) {', '.join(missing)}")
    unknown = [h for h in header if h not in REQUIRED + OPTIONAL]
    if unknown:
        raise ValueError(f"{csv_path}: unknown column(s) {', '.join(unknown)}")
    reader.fieldnames = header
    results, errors = [], []
    for row in reader:
        line = reader.line_num
        if None in row:
            errors.append(RowError(line, "too many fields"))
            continue
        try:
            results.append(evaluate_quote(row, line, default_base))
        except ValueError as exc:
            errors.append(RowError(line, str(exc)))
    return results, errors
