"""
File formats for the CLI: CSV sample tables in, JSON reports and CSV grids out.
"""

import json
import os
import re
from typing import Dict, Iterable, Optional

import numpy as np
import pandas as pd

from modules.errors import MalformedInput
from modules.levinson import FitResult
from modules.log_setup import get_logger

# ==================================================
# LOGGING
# ==================================================

logger = get_logger("io_formats")

# Round-trip precision for doubles.
FLOAT_FORMAT = "%.17g"

_PARSER_LINE = re.compile(r"line (\d+)")

# ==================================================
# JSON
# ==================================================


def load_json(path: str) -> dict:
    if not os.path.exists(path):
        raise MalformedInput("file not found", path=path)
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as exc:
            raise MalformedInput(exc.msg, path=path, line=exc.lineno) from None


def save_json(path: str, data):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=4)
    logger.debug(f"wrote {path}")


def fit_result_to_json(result: FitResult, weights_mode: str, created_at: Optional[str] = None) -> dict:
    report = result.to_dict()
    report["weights_mode"] = weights_mode
    if created_at is not None:
        report["created_at"] = created_at
    return report


def load_coefficients_json(path: str) -> np.ndarray:
    """Coefficients a_{-N}..a_N from a fit report."""
    report = load_json(path)
    try:
        entries = sorted(report["coefficients"], key=lambda e: int(e["k"]))
        coefficients = np.array([complex(e["re"], e["im"]) for e in entries])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"not a coefficient report ({exc})", path=path) from None
    degree = int(report.get("degree", (len(coefficients) - 1) // 2))
    if len(coefficients) != 2 * degree + 1:
        raise MalformedInput(f"expected {2 * degree + 1} coefficients, found {len(coefficients)}", path=path)
    return coefficients


# ==================================================
# CSV
# ==================================================

def read_csv_table(path: str, required: Iterable[str], optional: Dict[str, float] = None) -> pd.DataFrame:
    """Numeric columns from a headed CSV.

    Missing optional columns and blank optional cells take their default.
    Any unparseable cell raises MalformedInput naming its 1-based file line.
    """
    required = list(required)
    optional = dict(optional or {})
    if not os.path.exists(path):
        raise MalformedInput("file not found", path=path)

    try:
        raw = pd.read_csv(
            path, dtype=str, keep_default_na=False, skipinitialspace=True, skip_blank_lines=False
        )
    except pd.errors.EmptyDataError:
        raise MalformedInput("file is empty", path=path) from None
    except pd.errors.ParserError as exc:
        match = _PARSER_LINE.search(str(exc))
        line = int(match.group(1)) if match else None
        raise MalformedInput("wrong number of fields", path=path, line=line) from None

    raw.columns = [str(c).strip() for c in raw.columns]
    # data row i sits on file line i + 2; blank lines keep their row so this holds
    raw = raw.fillna("")
    raw = raw[~(raw.astype(str).map(str.strip) == "").all(axis=1)]

    missing = [c for c in required if c not in raw.columns]
    if missing:
        raise MalformedInput(f"missing column(s) {missing}; header is {list(raw.columns)}", path=path, line=1)

    table = pd.DataFrame(index=raw.index)
    for column in required + list(optional):
        if column not in raw.columns:
            table[column] = float(optional[column])
            continue
        text = raw[column].str.strip()
        blank = text == ""
        if column in optional:
            text = text.mask(blank, str(optional[column]))
        parsed = pd.to_numeric(text, errors="coerce")
        bad = parsed.isna() | ~np.isfinite(parsed.to_numpy(dtype=float, na_value=np.nan))
        if bad.any():
            row = bad.index[int(np.argmax(bad.to_numpy()))]
            raise MalformedInput(
                f"column {column!r} has non-numeric value {raw.loc[row, column]!r}",
                path=path,
                line=int(row) + 2,
            )
        table[column] = parsed.astype(float)

    if table.empty:
        raise MalformedInput("no data rows", path=path)
    return table.reset_index(drop=True)


def write_csv_table(path: str, columns: Dict[str, np.ndarray]):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    pd.DataFrame(columns).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug(f"wrote {path}")
