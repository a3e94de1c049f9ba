import logging
import os
import tempfile
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from ..clustering.firecluster import HeatTrace
from ..clustering.montecarlo import ValidationReport
from ..errors import ValidationError
from ..graph.affinity import as_data_matrix

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def _read_table(path: Path) -> pd.DataFrame:
    """Read a numeric CSV, dropping a leading header row if it is not numeric."""
    try:
        frame = pd.read_csv(path, header=None, dtype=str, encoding='utf-8', skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise ValidationError(f"{path} is empty") from e
    if frame.empty:
        raise ValidationError(f"{path} has no rows")
    first = pd.to_numeric(frame.iloc[0], errors='coerce')
    if first.isna().any():
        frame = frame.iloc[1:].reset_index(drop=True)
    numeric = frame.apply(pd.to_numeric, errors='coerce')
    missing = np.argwhere(numeric.isna().to_numpy())
    if len(missing):
        row, col = missing[0]
        raise ValidationError(f"{path}: missing or non-numeric value at row {row}, column {col}")
    # numpy's string parser is correctly rounded, so 17-digit values read back bit for bit.
    return pd.DataFrame(frame.to_numpy(dtype=str).astype(np.float64))


def read_matrix(path: Path, min_rows: int = 2) -> np.ndarray:
    """Read a data matrix: rows are points, columns features."""
    values = _read_table(Path(path)).to_numpy(dtype=np.float64)
    try:
        return as_data_matrix(values, min_rows=min_rows)
    except ValidationError as e:
        raise ValidationError(f"{path}: {e}") from e


def read_labels(path: Path, column: str = 'label') -> np.ndarray:
    """Read an ``index,label[,...]`` file (or a bare label column) ordered by index."""
    path = Path(path)
    frame = pd.read_csv(path, encoding='utf-8')
    if column in frame.columns and 'index' in frame.columns:
        ordered = frame.sort_values('index')
        index = ordered['index'].to_numpy()
        if not np.array_equal(index, np.arange(len(index))):
            raise ValidationError(f"{path}: index column must cover 0..{len(index) - 1} exactly once")
        values = ordered[column].to_numpy()
    else:
        values = _read_table(path).iloc[:, -1].to_numpy()
    if not np.all(np.mod(values, 1) == 0):
        raise ValidationError(f"{path}: labels must be integers")
    return values.astype(np.int64)


def _atomic_write(frame: pd.DataFrame, path: Path) -> Path:
    """Write a CSV to a sibling temp file and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix='.tmp', dir=path.parent)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
            frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def write_matrix(path: Path, W: np.ndarray, columns: Optional[Sequence[str]] = None) -> Path:
    W = np.asarray(W, dtype=np.float64)
    columns = list(columns) if columns is not None else [f"x{j}" for j in range(W.shape[1])]
    return _atomic_write(pd.DataFrame(W, columns=columns), path)


def write_labels(path: Path, labels: np.ndarray, extra: Optional[Mapping[str, np.ndarray]] = None) -> Path:
    frame = pd.DataFrame({'index': np.arange(len(labels)), 'label': np.asarray(labels, dtype=np.int64)})
    for name, values in (extra or {}).items():
        frame[name] = values
    return _atomic_write(frame, path)


def write_trace(path: Path, trace: HeatTrace) -> Path:
    frame = pd.DataFrame(list(trace.entries), columns=['step', 'vertex', 'cluster', 'heat'])
    frame['heat'] = frame['heat'].astype(np.float64)
    return _atomic_write(frame, path)


def write_report(path: Path, report: ValidationReport, alpha: float, conditional: bool = False) -> Path:
    frame = pd.DataFrame({
        'index': np.arange(len(report.labels)),
        'label': report.labels,
        'p_value': report.p_values,
        'entropy': report.entropies,
        'coverage': report.coverage,
        'significant': report.significant(alpha, conditional=conditional).astype(np.int64),
    })
    return _atomic_write(frame, path)


def write_rows(path: Path, rows: Sequence[tuple], columns: Sequence[str]) -> Path:
    return _atomic_write(pd.DataFrame(list(rows), columns=list(columns)), path)
