"""
Measurement CSV format.

    #rows t m_t          optional declarations (1-based node t)
    node,row,col,val     header
    1,1,3,1.0            one line per nonzero, all indices 1-based

Nodes without any line and without a '#rows' declaration get m_t = 0.
"""

from io import StringIO
from pathlib import Path
from typing import Dict, Union
import numpy as np
import pandas as pd
import scipy.sparse as sp

from src.core.exceptions import ConfigError
from src.core.logging_config import get_logger
from src.measurement.design import MeasurementSet

logger = get_logger("measurement")

PathLike = Union[str, Path]
CSV_COLUMNS = ["node", "row", "col", "val"]


def parse_measurements(text: str, n: int, T: int) -> MeasurementSet:
    """Parse measurement CSV text for a problem with n coordinates and T nodes."""
    declared: Dict[int, int] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("#rows"):
            tokens = line.split()
            if len(tokens) != 3:
                raise ConfigError(f"Malformed rows declaration: {raw!r}")
            declared[int(tokens[1]) - 1] = int(tokens[2])

    frame = pd.read_csv(StringIO(text), comment="#", skip_blank_lines=True, float_precision="round_trip")
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigError(f"Measurement CSV is missing columns {missing}")

    frame = frame.astype({"node": int, "row": int, "col": int, "val": float})
    if not frame.empty:
        if frame["node"].min() < 1 or frame["node"].max() > T:
            raise ConfigError(f"Measurement node index outside [1, {T}]")
        if frame["col"].min() < 1 or frame["col"].max() > n:
            raise ConfigError(f"Measurement column index outside [1, {n}]")
        if frame["row"].min() < 1:
            raise ConfigError("Measurement row indices are 1-based")

    blocks = []
    grouped = {node - 1: group for node, group in frame.groupby("node")}
    for t in range(T):
        group = grouped.get(t)
        inferred = int(group["row"].max()) if group is not None else 0
        rows = declared.get(t, inferred)
        if rows < inferred:
            raise ConfigError(f"Node {t + 1} declares {rows} rows but uses row {inferred}")
        if group is None:
            blocks.append(sp.csr_matrix((rows, n)))
            continue
        blocks.append(sp.csr_matrix(
            (group["val"].to_numpy(), (group["row"].to_numpy() - 1, group["col"].to_numpy() - 1)),
            shape=(rows, n),
        ))
    return MeasurementSet(n=n, node_count=T, blocks=tuple(blocks))


def read_measurements(path: PathLike, n: int, T: int) -> MeasurementSet:
    m = parse_measurements(Path(path).read_text(encoding="utf-8"), n, T)
    logger.info(f"Loaded {m.total_rows} measurement rows for {T} nodes from {path}")
    return m


def format_measurements(m: MeasurementSet) -> str:
    lines = [f"#rows {t + 1} {block.shape[0]}" for t, block in enumerate(m.blocks)]
    records = []
    for t, block in enumerate(m.blocks):
        coo = block.tocoo()
        for r, c, v in zip(coo.row, coo.col, coo.data):
            records.append((t + 1, int(r) + 1, int(c) + 1, float(v)))
    frame = pd.DataFrame(records, columns=CSV_COLUMNS)
    return "\n".join(lines) + "\n" + frame.to_csv(index=False)


def write_measurements(m: MeasurementSet, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(format_measurements(m), encoding="utf-8")
    return path


def read_observations(path: PathLike) -> np.ndarray:
    """Observation vector, one value per line."""
    values = np.loadtxt(path, dtype=float, ndmin=1, comments="#")
    return values.reshape(-1)
