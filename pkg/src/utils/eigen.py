"""
Shared dense symmetric eigensolver.

Two back ends, both returning eigenvalues sorted descending:
- "lapack": numpy.linalg.eigh
- "jacobi": cyclic Jacobi rotations, stopping when the off-diagonal
  Frobenius norm drops below JACOBI_REL_TOL * ||A||_F or after
  JACOBI_MAX_SWEEPS sweeps.
"""
from typing import Optional, Tuple
import numpy as np
from src.core.config import settings
from src.core.exceptions import InvalidParameterError


def _off_diagonal_norm(a: np.ndarray) -> float:
    return float(np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0)))


def jacobi_eigh(
    matrix: np.ndarray,
    rel_tol: Optional[float] = None,
    max_sweeps: Optional[int] = None,
    compute_vectors: bool = True,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Cyclic Jacobi eigendecomposition of a real symmetric matrix.

    Args:
        matrix: Square symmetric array
        rel_tol: Off-diagonal stopping threshold relative to ||A||_F
        max_sweeps: Cap on the number of full sweeps
        compute_vectors: Accumulate the rotations into eigenvectors

    Returns:
        (eigenvalues descending, eigenvectors as columns or None)
    """
    rel_tol = settings.JACOBI_REL_TOL if rel_tol is None else rel_tol
    max_sweeps = settings.JACOBI_MAX_SWEEPS if max_sweeps is None else max_sweeps

    a = np.array(matrix, dtype=float, copy=True)
    size = a.shape[0]
    a = 0.5 * (a + a.T)
    v = np.eye(size) if compute_vectors else None

    threshold = rel_tol * float(np.linalg.norm(a))
    for _ in range(max_sweeps):
        if _off_diagonal_norm(a) <= threshold:
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = a[q, p] = 0.0

                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq

    values = np.diag(a).copy()
    order = np.argsort(values)[::-1]
    values = values[order]
    if v is not None:
        v = v[:, order]
    return values, v


def symmetric_eigh(matrix: np.ndarray, solver: Optional[str] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvectors (columns) of a symmetric matrix."""
    solver = solver or settings.EIGEN_SOLVER
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return np.zeros(0), np.zeros((0, 0))
    if solver == "jacobi":
        return jacobi_eigh(matrix, compute_vectors=True)
    if solver == "lapack":
        values, vectors = np.linalg.eigh(0.5 * (matrix + matrix.T))
        return values[::-1].copy(), vectors[:, ::-1].copy()
    raise InvalidParameterError(f"Unknown eigensolver: {solver}")


def symmetric_eigvalsh(matrix: np.ndarray, solver: Optional[str] = None) -> np.ndarray:
    """Eigenvalues of a symmetric matrix sorted descending."""
    solver = solver or settings.EIGEN_SOLVER
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return np.zeros(0)
    if solver == "jacobi":
        values, _ = jacobi_eigh(matrix, compute_vectors=False)
        return values
    if solver == "lapack":
        return np.linalg.eigvalsh(0.5 * (matrix + matrix.T))[::-1].copy()
    raise InvalidParameterError(f"Unknown eigensolver: {solver}")
