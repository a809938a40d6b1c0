"""
Block-diagonal measurement design C = diag(C_1, ..., C_T), the stacked matrix
O_T = [C_1; ...; C_T] and their spectral summaries.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import List, Literal, Optional, Sequence, Tuple
import numpy as np
import scipy.sparse as sp

from src.core.config import settings
from src.core.exceptions import DimensionMismatchError, InvalidParameterError, InvalidSizeError
from src.core.logging_config import get_logger
from src.graph.core import Graph, StackedSignal, build_erdos_renyi
from src.utils.eigen import symmetric_eigvalsh
from src.utils.validators import validate_node_count, validate_probability

logger = get_logger("measurement")

MeasurementKind = Literal["sparse_rows", "incidence", "custom"]

# Fixed start vector stream for the per-block power iteration
_POWER_START_SEED = 20240601


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Per-node measurement blocks C_t (m_t x n) stored as CSR matrices."""
    n: int
    node_count: int
    blocks: Tuple[sp.csr_matrix, ...]
    kind: MeasurementKind = "custom"
    p_sum: Optional[float] = None
    p_max: Optional[float] = None

    def __post_init__(self):
        if len(self.blocks) != self.node_count:
            raise DimensionMismatchError(
                f"Expected {self.node_count} blocks, got {len(self.blocks)}"
            )
        blocks = []
        for t, block in enumerate(self.blocks):
            block = sp.csr_matrix(block, dtype=float)
            if block.shape[1] != self.n:
                raise DimensionMismatchError(
                    f"Block {t + 1} has {block.shape[1]} columns, expected n = {self.n}"
                )
            blocks.append(block)
        object.__setattr__(self, "blocks", tuple(blocks))

    @classmethod
    def from_dense_blocks(cls, blocks: Sequence[np.ndarray], kind: MeasurementKind = "custom") -> "MeasurementSet":
        """Custom design from dense per-node arrays (rows may be empty)."""
        if not blocks:
            raise InvalidSizeError("At least one block is required")
        arrays = [np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks]
        n = max(a.shape[1] for a in arrays)
        arrays = [a.reshape(0, n) if a.size == 0 else a for a in arrays]
        return cls(n=n, node_count=len(arrays), blocks=tuple(sp.csr_matrix(a) for a in arrays), kind=kind)

    @property
    def row_counts(self) -> np.ndarray:
        return np.array([b.shape[0] for b in self.blocks], dtype=np.int64)

    @property
    def total_rows(self) -> int:
        return int(self.row_counts.sum())

    @property
    def row_offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.row_counts)])

    def _coo_parts(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        rows, cols, vals, nodes = [], [], [], []
        offsets = self.row_offsets
        for t, block in enumerate(self.blocks):
            coo = block.tocoo()
            rows.append(coo.row + offsets[t])
            cols.append(coo.col)
            vals.append(coo.data)
            nodes.append(np.full(coo.nnz, t, dtype=np.int64))
        if not rows:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, np.zeros(0), empty
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), np.concatenate(nodes)

    @cached_property
    def design(self) -> sp.csr_matrix:
        """Block-diagonal C of shape (sum m_t, nT)."""
        rows, cols, vals, nodes = self._coo_parts()
        return sp.csr_matrix(
            (vals, (rows, cols + nodes * self.n)),
            shape=(self.total_rows, self.n * self.node_count),
        )

    @cached_property
    def stacked(self) -> sp.csr_matrix:
        """O_T of shape (sum m_t, n)."""
        rows, cols, vals, _ = self._coo_parts()
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.total_rows, self.n))

    def gram(self) -> np.ndarray:
        """O_T^T O_T = sum_t C_t^T C_t, dense n x n."""
        o = self.stacked
        return np.asarray((o.T @ o).todense(), dtype=float)

    def block_gram(self, t: int) -> np.ndarray:
        block = self.blocks[t]
        return np.asarray((block.T @ block).todense(), dtype=float)


@dataclass(frozen=True, eq=False)
class GramSummary:
    """Spectral summary of O_T^T O_T and of the design norm ||C||_2."""
    gram: np.ndarray
    eigenvalues: np.ndarray  # descending
    lambda_min: float
    lambda_second_min: float
    lambda_max: float
    design_norm: float
    block_lambda_min: float
    block_lambda_second_min: float


def _check_dims(n: int, T: int):
    for value, name in ((n, "n"), (T, "T")):
        is_valid, error = validate_node_count(value, minimum=1, name=name)
        if not is_valid:
            raise InvalidSizeError(error)


def sample_sparse_rows(n: int, T: int, theta: float, rng: np.random.Generator) -> MeasurementSet:
    """
    Sparse random measurements: each C_t is the zero 1 x n row with
    probability 1 - theta, otherwise e_i^T with i uniform on the n coordinates.
    """
    _check_dims(n, T)
    is_valid, error = validate_probability(theta, name="theta")
    if not is_valid:
        raise InvalidParameterError(error)

    sampled = rng.random(T) < theta
    coordinates = rng.integers(0, n, size=T)
    blocks = []
    for t in range(T):
        if sampled[t]:
            blocks.append(sp.csr_matrix(([1.0], ([0], [coordinates[t]])), shape=(1, n)))
        else:
            blocks.append(sp.csr_matrix((1, n)))
    logger.debug(f"Sampled sparse rows: n={n}, T={T}, theta={theta}, measured nodes={int(sampled.sum())}")
    return MeasurementSet(n=n, node_count=T, blocks=tuple(blocks), kind="sparse_rows")


def incidence_block(g_t: Graph) -> sp.csr_matrix:
    """Incidence matrix of g_t, one row per edge {i, j} (i < j) with +1 at i and -1 at j."""
    return g_t.incidence_matrix()


def sample_er_layers(n: int, p: Sequence[float], rng: np.random.Generator) -> MeasurementSet:
    """C_t = incidence of an independent G(n, p_t) for each layer t."""
    p = [float(v) for v in p]
    _check_dims(n, len(p))
    for t, value in enumerate(p):
        is_valid, error = validate_probability(value, name=f"p[{t + 1}]")
        if not is_valid:
            raise InvalidParameterError(error)
    if n < 2:
        raise InvalidSizeError("Erdos-Renyi layers need n >= 2")

    blocks = [incidence_block(build_erdos_renyi(n, p_t, rng)) for p_t in p]
    return MeasurementSet(
        n=n,
        node_count=len(p),
        blocks=tuple(blocks),
        kind="incidence",
        p_sum=float(sum(p)),
        p_max=float(max(p)),
    )


def _block_top_singular_value(block: sp.csr_matrix) -> float:
    """Largest singular value of one block via power iteration on C_t^T C_t."""
    if block.nnz == 0:
        return 0.0
    if block.shape[0] == 1:
        return float(np.sqrt(block.multiply(block).sum()))

    gram = (block.T @ block).tocsr()
    rng = np.random.default_rng(_POWER_START_SEED)
    v = rng.standard_normal(gram.shape[0])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(settings.POWER_ITER_MAX):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        new_estimate = float(v @ w)
        v = w / norm
        if abs(new_estimate - estimate) <= settings.POWER_ITER_REL_TOL * abs(new_estimate):
            estimate = new_estimate
            break
        estimate = new_estimate
    return float(np.sqrt(max(estimate, 0.0)))


def _block_floors(m: MeasurementSet) -> Tuple[float, float]:
    """min_t lambda_min(C_t^T C_t) and min_t lambda_{n-1}(C_t^T C_t)."""
    floor_min = np.inf
    floor_second = np.inf
    for t, block in enumerate(m.blocks):
        rank_bound = min(block.shape[0], m.n)
        if rank_bound < m.n - 1:
            return 0.0, 0.0
        values = symmetric_eigvalsh(m.block_gram(t))
        floor_min = min(floor_min, 0.0 if rank_bound < m.n else max(float(values[-1]), 0.0))
        second = float(values[-2]) if m.n >= 2 else float(values[-1])
        floor_second = min(floor_second, max(second, 0.0))
    return float(floor_min), float(floor_second)


def gram_eigenvalues(m: MeasurementSet) -> np.ndarray:
    """Eigenvalues of O_T^T O_T, descending."""
    return symmetric_eigvalsh(m.gram())


def gram_summary(m: MeasurementSet) -> GramSummary:
    """Dense Gram matrix, its spectrum, and ||C||_2 = max_t sigma_max(C_t)."""
    gram = m.gram()
    values = symmetric_eigvalsh(gram)
    design_norm = max((_block_top_singular_value(b) for b in m.blocks), default=0.0)
    block_min, block_second = _block_floors(m)
    return GramSummary(
        gram=gram,
        eigenvalues=values,
        lambda_min=float(values[-1]),
        lambda_second_min=float(values[-2]) if values.size >= 2 else float(values[-1]),
        lambda_max=float(values[0]),
        design_norm=design_norm,
        block_lambda_min=block_min,
        block_lambda_second_min=block_second,
    )


def _check_signal(m: MeasurementSet, z: StackedSignal):
    if z.block_size != m.n or z.node_count != m.node_count:
        raise DimensionMismatchError(
            f"Signal shape (n={z.block_size}, T={z.node_count}) does not match "
            f"measurements (n={m.n}, T={m.node_count})"
        )


def design_apply(m: MeasurementSet, z: StackedSignal) -> np.ndarray:
    """y = C z, blocks C_t z_t concatenated in node order."""
    _check_signal(m, z)
    return np.asarray(m.design @ z.data, dtype=float)


def design_apply_transpose(m: MeasurementSet, y: np.ndarray) -> StackedSignal:
    """C^T y, block t receiving C_t^T y_t."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size != m.total_rows:
        raise DimensionMismatchError(f"Observation length {y.size} != total rows {m.total_rows}")
    return StackedSignal(m.n, m.node_count, m.design.T @ y)


def split_observations(m: MeasurementSet, y: np.ndarray) -> List[np.ndarray]:
    """Per-node slices y_t of a stacked observation vector."""
    offsets = m.row_offsets
    return [y[offsets[t]:offsets[t + 1]] for t in range(m.node_count)]
