"""
Signal CSV format: header `node,coord,value`, one line per entry, 1-based.
"""

from io import StringIO
from pathlib import Path
from typing import Union
import numpy as np
import pandas as pd

from src.core.exceptions import ConfigError
from src.graph.core import StackedSignal

PathLike = Union[str, Path]
SIGNAL_COLUMNS = ["node", "coord", "value"]


def signal_frame(x: StackedSignal) -> pd.DataFrame:
    nodes, coords = np.divmod(np.arange(x.data.size), x.block_size)
    return pd.DataFrame({"node": nodes + 1, "coord": coords + 1, "value": x.data})


def format_signal(x: StackedSignal) -> str:
    return signal_frame(x).to_csv(index=False, float_format="%.17g")


def write_signal(x: StackedSignal, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(format_signal(x), encoding="utf-8")
    return path


def parse_signal(text: str) -> StackedSignal:
    """Missing (node, coord) entries are zero; sizes come from the largest indices."""
    frame = pd.read_csv(StringIO(text), comment="#", float_precision="round_trip")
    missing = [c for c in SIGNAL_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigError(f"Signal CSV is missing columns {missing}")
    if frame.empty:
        raise ConfigError("Signal CSV has no entries")
    frame = frame.astype({"node": int, "coord": int, "value": float})
    if frame["node"].min() < 1 or frame["coord"].min() < 1:
        raise ConfigError("Signal indices are 1-based")
    T, n = int(frame["node"].max()), int(frame["coord"].max())
    blocks = np.zeros((T, n))
    blocks[frame["node"].to_numpy() - 1, frame["coord"].to_numpy() - 1] = frame["value"].to_numpy()
    return StackedSignal.from_blocks(blocks)


def read_signal(path: PathLike) -> StackedSignal:
    return parse_signal(Path(path).read_text(encoding="utf-8"))
