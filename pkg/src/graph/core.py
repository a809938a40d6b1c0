"""
Graph construction, Laplacian operators, spectra and quadratic variation.

Vertices are 0-based internally; the text formats in src.graph.io are 1-based.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Literal, Tuple
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from src.core.exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidSizeError,
)
from src.core.logging_config import get_logger
from src.utils.eigen import symmetric_eigvalsh
from src.utils.validators import validate_node_count, validate_probability

logger = get_logger("graph")

GraphKind = Literal["complete", "star", "path", "erdos_renyi", "custom"]
SpectrumSource = Literal["closed_form", "dense_solver"]

ZERO_EIGENVALUE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on vertex_count vertices with a sorted edge list."""
    vertex_count: int
    edges: np.ndarray  # shape (E, 2), rows (u, v) with u < v, lexicographically sorted
    kind: GraphKind = "custom"

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if np.any(edges[:, 0] == edges[:, 1]):
                raise InvalidParameterError("Self-loops are not allowed")
            if edges.min() < 0 or edges.max() >= self.vertex_count:
                raise InvalidParameterError(
                    f"Edge endpoint outside [1, {self.vertex_count}]"
                )
            edges = np.sort(edges, axis=1)
            edges = np.unique(edges, axis=0)
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_pairs(cls, vertex_count: int, pairs: Iterable[Tuple[int, int]], kind: GraphKind = "custom") -> "Graph":
        """Build a graph from 0-based pairs; duplicates and orientation are normalised."""
        return cls(vertex_count=vertex_count, edges=np.array(list(pairs), dtype=np.int64).reshape(-1, 2), kind=kind)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.vertex_count)

    def adjacency(self) -> List[List[int]]:
        """Adjacency lists built on demand."""
        neighbours: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            neighbours[u].append(int(v))
            neighbours[v].append(int(u))
        return neighbours

    @cached_property
    def _components(self) -> Tuple[int, np.ndarray]:
        adjacency = sp.coo_matrix(
            (np.ones(self.edge_count), (self.edges[:, 0], self.edges[:, 1])),
            shape=(self.vertex_count, self.vertex_count),
        )
        return connected_components(adjacency, directed=False)

    def component_count(self) -> int:
        return int(self._components[0])

    def is_connected(self) -> bool:
        return self.component_count() == 1

    def laplacian_matrix(self) -> np.ndarray:
        """Dense Laplacian D - A (for spectra and oracles)."""
        lap = np.zeros((self.vertex_count, self.vertex_count))
        u, v = self.edges[:, 0], self.edges[:, 1]
        np.add.at(lap, (u, u), 1.0)
        np.add.at(lap, (v, v), 1.0)
        np.add.at(lap, (u, v), -1.0)
        np.add.at(lap, (v, u), -1.0)
        return lap

    def incidence_matrix(self) -> sp.csr_matrix:
        """Edge-vertex incidence with +1 at the smaller endpoint; D^T D = L."""
        rows = np.repeat(np.arange(self.edge_count), 2)
        cols = self.edges.ravel()
        vals = np.tile([1.0, -1.0], self.edge_count)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.edge_count, self.vertex_count))

    def apply_laplacian(self, data: np.ndarray, block_size: int) -> np.ndarray:
        """(L kron I_n) data, accumulated edge by edge."""
        blocks = np.asarray(data, dtype=float).reshape(self.vertex_count, block_size)
        out = np.zeros_like(blocks)
        if self.edge_count:
            u, v = self.edges[:, 0], self.edges[:, 1]
            diff = blocks[u] - blocks[v]
            np.add.at(out, u, diff)
            np.add.at(out, v, -diff)
        return out.reshape(-1)


@dataclass(frozen=True, eq=False)
class LaplacianSpectrum:
    """Laplacian eigenvalues sorted descending, lambda_1 >= ... >= lambda_T."""
    eigenvalues: np.ndarray
    source: SpectrumSource

    @property
    def fiedler(self) -> float:
        return float(self.eigenvalues[-2]) if self.eigenvalues.size >= 2 else 0.0

    def zero_count(self, tol: float = ZERO_EIGENVALUE_TOL) -> int:
        return int(np.sum(np.abs(self.eigenvalues) <= tol))


@dataclass(frozen=True, eq=False)
class StackedSignal:
    """Column-stacked node signals; node t occupies data[t*n:(t+1)*n]."""
    block_size: int
    node_count: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float).reshape(-1)
        if data.size != self.block_size * self.node_count:
            raise DimensionMismatchError(
                f"Signal length {data.size} != n*T = {self.block_size}*{self.node_count}"
            )
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, block_size: int, node_count: int) -> "StackedSignal":
        return cls(block_size, node_count, np.zeros(block_size * node_count))

    @classmethod
    def from_blocks(cls, blocks: np.ndarray) -> "StackedSignal":
        blocks = np.asarray(blocks, dtype=float)
        return cls(blocks.shape[1], blocks.shape[0], blocks.reshape(-1))

    def blocks(self) -> np.ndarray:
        """(T, n) view of the data."""
        return self.data.reshape(self.node_count, self.block_size)

    def block(self, t: int) -> np.ndarray:
        return self.data[t * self.block_size:(t + 1) * self.block_size]


def _check_size(T: int):
    is_valid, error = validate_node_count(T, minimum=2, name="T")
    if not is_valid:
        raise InvalidSizeError(error)


def build_complete(T: int) -> Graph:
    """Complete graph K_T, T(T-1)/2 edges."""
    _check_size(T)
    u, v = np.triu_indices(T, k=1)
    return Graph(vertex_count=T, edges=np.column_stack([u, v]), kind="complete")


def build_star(T: int) -> Graph:
    """Star graph centred at vertex 0."""
    _check_size(T)
    leaves = np.arange(1, T)
    return Graph(vertex_count=T, edges=np.column_stack([np.zeros_like(leaves), leaves]), kind="star")


def build_path(T: int) -> Graph:
    """Path 0 - 1 - ... - (T-1)."""
    _check_size(T)
    heads = np.arange(T - 1)
    return Graph(vertex_count=T, edges=np.column_stack([heads, heads + 1]), kind="path")


def build_erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    """G(n, p): each of the n(n-1)/2 pairs kept independently with probability p."""
    _check_size(n)
    is_valid, error = validate_probability(p, name="p")
    if not is_valid:
        raise InvalidParameterError(error)
    u, v = np.triu_indices(n, k=1)
    keep = rng.random(u.size) < p
    return Graph(vertex_count=n, edges=np.column_stack([u[keep], v[keep]]), kind="erdos_renyi")


GRAPH_BUILDERS = {
    "complete": build_complete,
    "star": build_star,
    "path": build_path,
}


def build_graph(kind: str, T: int) -> Graph:
    """Build one of the deterministic graph families by name."""
    try:
        builder = GRAPH_BUILDERS[kind]
    except KeyError:
        raise InvalidParameterError(f"Unknown graph kind {kind!r}; expected one of {sorted(GRAPH_BUILDERS)}")
    return builder(T)


def _check_signal(g: Graph, z: StackedSignal):
    if z.node_count != g.vertex_count:
        raise DimensionMismatchError(
            f"Signal has {z.node_count} nodes but graph has {g.vertex_count} vertices"
        )


def laplacian_apply(g: Graph, z: StackedSignal) -> StackedSignal:
    """(L kron I_n) z without materialising the Kronecker product."""
    _check_signal(g, z)
    return StackedSignal(z.block_size, z.node_count, g.apply_laplacian(z.data, z.block_size))


def laplacian_spectrum(g: Graph) -> LaplacianSpectrum:
    """Closed form for complete graphs, dense eigensolver otherwise."""
    T = g.vertex_count
    if g.kind == "complete" and g.edge_count == T * (T - 1) // 2:
        values = np.full(T, float(T))
        values[-1] = 0.0
        return LaplacianSpectrum(eigenvalues=values, source="closed_form")

    values = symmetric_eigvalsh(g.laplacian_matrix())
    logger.debug(f"Dense Laplacian spectrum for {g.kind} graph on {T} vertices")
    return LaplacianSpectrum(eigenvalues=values, source="dense_solver")


def fiedler_value(g: Graph) -> float:
    """Second-smallest Laplacian eigenvalue lambda_{T-1}."""
    return laplacian_spectrum(g).fiedler


def quadratic_variation(g: Graph, x: StackedSignal) -> float:
    """Sum over edges of ||x_t - x_t'||^2 = ||M x||^2."""
    _check_signal(g, x)
    if g.edge_count == 0:
        return 0.0
    blocks = x.blocks()
    diff = blocks[g.edges[:, 0]] - blocks[g.edges[:, 1]]
    return float(np.sum(diff * diff))
