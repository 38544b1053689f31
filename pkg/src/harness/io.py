"""
Запись результатов: CSV трассы, кривые оценок и summary.json
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from src.config.constants import (
    BOUND_CSV_HEADER,
    CSV_LINE_TERMINATOR,
    FLOAT_FORMAT,
    SCHEDULE_CSV_HEADER,
    TRACE_CSV_HEADER,
)
from src.bounds import BoundCurve
from src.solvers import SolverTrace


def format_value(value: Any) -> str:
    """Числа - 17 значащих цифр без локали, целые - как есть"""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return FLOAT_FORMAT.format(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator=CSV_LINE_TERMINATOR)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
    return path


def write_trace(path: Path, trace: SolverTrace) -> Path:
    """iter,error,residual,wall_ms"""
    return write_csv(path, TRACE_CSV_HEADER, (record.as_row() for record in trace.records))


def write_schedule(path: Path, trace: SolverTrace) -> Path:
    """iter,lambda_tau,M_tau"""
    return write_csv(path, SCHEDULE_CSV_HEADER, trace.schedule)


def write_bound(path: Path, curve: BoundCurve, iterations: Optional[Sequence[int]] = None) -> Path:
    """iter,bound; iterations задает номера итераций, если кривая прорежена"""
    if iterations is None:
        rows = curve.rows()
    else:
        rows = list(zip(iterations, curve.values))
    return write_csv(path, BOUND_CSV_HEADER, rows)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: Path, data: dict) -> Path:
    """JSON с сортировкой ключей, nan/inf записываются как null"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(_jsonable(data), f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    return path


def dumps(data: dict) -> str:
    return json.dumps(_jsonable(data), ensure_ascii=False, indent=2, sort_keys=True)
