"""Cyclic Jacobi eigensolver for real symmetric matrices.

Cyclic-by-row sweeps with threshold skipping; each rotation zeroes one
off-diagonal pair.  Convergence is measured by the off-diagonal Frobenius
norm relative to the full Frobenius norm, so the tolerance is scale-free.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["jacobi_eigh"]

DEFAULT_TOL = 1e-12
MAX_SWEEPS = 60


def _offdiag_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.linalg.norm(off))


def jacobi_eigh(
    A: np.ndarray,
    *,
    tol: float = DEFAULT_TOL,
    compute_vectors: bool = False,
) -> np.ndarray | tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) of a real symmetric matrix, optionally with vectors.

    Iterates until the off-diagonal Frobenius norm drops below
    ``tol * ||A||_F``.  With ``compute_vectors=True`` returns ``(w, V)``
    with columns of ``V`` the eigenvectors in the same ascending order.
    """
    M = np.array(A, dtype=float)
    k = M.shape[0]
    if M.shape != (k, k):
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if k > 0 and float(np.max(np.abs(M - M.T))) > 1e-8 * max(1.0, float(np.max(np.abs(M)))):
        raise ValueError("matrix is not symmetric")
    M = 0.5 * (M + M.T)
    V = np.eye(k) if compute_vectors else None
    if k <= 1:
        w = np.diag(M).copy()
        return (w, V) if compute_vectors else w

    norm = float(np.linalg.norm(M))
    if norm == 0.0:
        w = np.zeros(k)
        return (w, V) if compute_vectors else w
    stop = tol * norm

    for _ in range(MAX_SWEEPS):
        if _offdiag_norm(M) <= stop:
            break
        # rotations below this size cannot matter at the requested tolerance
        skip = stop / k
        _sweep(M, V, k, skip)
    else:
        if _offdiag_norm(M) > stop:
            raise RuntimeError(
                f"Jacobi iteration did not reach tolerance {tol:g} in {MAX_SWEEPS} sweeps"
            )

    w = np.diag(M).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    if compute_vectors:
        return w, V[:, order]
    return w


def _sweep(M: np.ndarray, V: np.ndarray | None, k: int, skip: float) -> None:
    for p in range(k - 1):
        for q in range(p + 1, k):
            apq = M[p, q]
            if abs(apq) <= skip:
                continue
            app, aqq = M[p, p], M[q, q]
            theta = 0.5 * math.atan2(2.0 * apq, aqq - app)
            c, s = math.cos(theta), math.sin(theta)
            # A <- J^T A J with J the (p, q) Givens rotation
            col_p = M[:, p].copy()
            col_q = M[:, q].copy()
            M[:, p] = c * col_p - s * col_q
            M[:, q] = s * col_p + c * col_q
            row_p = M[p, :].copy()
            row_q = M[q, :].copy()
            M[p, :] = c * row_p - s * row_q
            M[q, :] = s * row_p + c * row_q
            M[p, q] = 0.0
            M[q, p] = 0.0
            if V is not None:
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
