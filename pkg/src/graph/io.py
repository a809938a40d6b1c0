"""
Edge-list text format.

    T <int>
    t t'        # one 1-based pair per line, whitespace separated
Lines (or trailing parts) starting with '#' are comments.
"""

from pathlib import Path
from typing import Union

from src.core.exceptions import ConfigError
from src.core.logging_config import get_logger
from src.graph.core import Graph

logger = get_logger("graph")

PathLike = Union[str, Path]


def parse_edge_list(text: str) -> Graph:
    """Parse edge-list text into a Graph."""
    vertex_count = None
    pairs = []
    for line_number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if vertex_count is None:
            if len(tokens) != 2 or tokens[0] != "T":
                raise ConfigError(f"line {line_number}: expected header 'T <int>', got {raw!r}")
            try:
                vertex_count = int(tokens[1])
            except ValueError:
                raise ConfigError(f"line {line_number}: vertex count is not an integer")
            continue
        if len(tokens) != 2:
            raise ConfigError(f"line {line_number}: expected two vertex indices, got {raw!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ConfigError(f"line {line_number}: vertex indices must be integers")
        pairs.append((u - 1, v - 1))

    if vertex_count is None:
        raise ConfigError("Edge list is empty (missing 'T <int>' header)")
    return Graph.from_pairs(vertex_count, pairs)


def format_edge_list(g: Graph) -> str:
    lines = [f"T {g.vertex_count}"]
    lines.extend(f"{u + 1} {v + 1}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def read_edge_list(path: PathLike) -> Graph:
    graph = parse_edge_list(Path(path).read_text(encoding="utf-8"))
    logger.info(f"Loaded graph with {graph.vertex_count} vertices and {graph.edge_count} edges from {path}")
    return graph


def write_edge_list(g: Graph, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(format_edge_list(g), encoding="utf-8")
    return path
