"""
Dense verification oracles for small problems (nT <= DENSE_ORACLE_MAX_SIZE).
"""

import numpy as np
import scipy.linalg

from src.core.config import settings
from src.core.exceptions import DimensionMismatchError, SingularSystemError, SizeLimitError
from src.graph.core import Graph, StackedSignal
from src.measurement.design import MeasurementSet
from src.utils.eigen import symmetric_eigh

EIGEN_CUTOFF = 1e-10


def _check_size(g: Graph, m: MeasurementSet) -> int:
    if g.vertex_count != m.node_count:
        raise DimensionMismatchError(
            f"Graph has {g.vertex_count} vertices but measurements cover {m.node_count} nodes"
        )
    size = m.n * m.node_count
    if size > settings.DENSE_ORACLE_MAX_SIZE:
        raise SizeLimitError(f"nT = {size} exceeds the dense limit {settings.DENSE_ORACLE_MAX_SIZE}")
    return size


def centering_matrix(n: int, T: int) -> np.ndarray:
    """P = I_T kron (I_n - 11^T/n)."""
    return np.kron(np.eye(T), np.eye(n) - np.full((n, n), 1.0 / n))


def dense_system(g: Graph, m: MeasurementSet, mu: float, mode: str = "plain") -> np.ndarray:
    """mu (L kron I_n) + C^T C as a dense array, projected to P A P in centered mode."""
    _check_size(g, m)
    design = m.design.toarray()
    matrix = mu * np.kron(g.laplacian_matrix(), np.eye(m.n)) + design.T @ design
    if mode == "centered":
        p = centering_matrix(m.n, m.node_count)
        matrix = p @ matrix @ p
    return 0.5 * (matrix + matrix.T)


def dense_oracle_solve(g: Graph, m: MeasurementSet, y: np.ndarray, mu: float, mode: str = "plain") -> StackedSignal:
    """
    Direct SPD solve (plain) or eigendecomposition pseudoinverse with cutoff
    1e-10 * lambda_max (centered).
    """
    _check_size(g, m)
    rhs = m.design.T @ np.asarray(y, dtype=float).reshape(-1)
    matrix = dense_system(g, m, mu, mode)

    if mode == "plain":
        try:
            x = scipy.linalg.solve(matrix, rhs, assume_a="pos")
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(f"Dense penalized system is singular: {exc}")
        return StackedSignal(m.n, m.node_count, x)

    p = centering_matrix(m.n, m.node_count)
    values, vectors = symmetric_eigh(matrix)
    cutoff = EIGEN_CUTOFF * max(float(values[0]), 0.0)
    keep = values > cutoff
    inverse = np.zeros_like(values)
    inverse[keep] = 1.0 / values[keep]
    x = vectors @ (inverse * (vectors.T @ (p @ rhs)))
    return StackedSignal(m.n, m.node_count, p @ x)
