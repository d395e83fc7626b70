"""Assembly of the complex Hermitian hypergraph Laplacian and its signless form.

With ``B`` the block incidence matrix (one ``d x d`` complex block per
incidence), ``D_E = diag(delta_e I_d)`` and ``D_V`` the block-diagonal of
``D_u = sum_e F^T F``:

    Q   = B^dagger D_E^{-1} B          L   = D_V - Q
    Q_N = W^dagger W,  W = D_E^{-1/2} B D_V^{-1/2}        L_N = I - Q_N

Both signless forms are assembled as conjugate products of a single factor,
so they are Hermitian to rounding error by construction.  Hyperedge weights
are stored on the hypergraph but deliberately excluded here: the spectral
guarantees assume unit weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockmatrix import BlockComplexMatrix
from .hypergraph import DirectedHypergraph
from .jacobi import jacobi_eigh
from .sheaf import SheafAssignment

__all__ = [
    "NodeSignal",
    "LaplacianBundle",
    "build_incidence",
    "build_degree_matrices",
    "build_laplacian",
    "apply_laplacian",
    "entrywise_block",
    "format_dense_matrix",
    "parse_dense_matrix",
]

# A node signal is a complex array of shape (n*d,) or (n*d, f).
NodeSignal = np.ndarray

DEGREE_JITTER = 1e-8


def build_incidence(H: DirectedHypergraph, A: SheafAssignment) -> BlockComplexMatrix:
    """Block incidence matrix: block ``(e, u)`` is ``S * F`` for each incidence."""
    A.validate_against(H)
    items = []
    for u, e, _role in H.incidences():
        items.append((e, u, A.coefficient(u, e) * A.map_for(u, e)))
    return BlockComplexMatrix(H.num_hyperedges, H.num_vertices, A.config.d, items)


def build_degree_matrices(
    H: DirectedHypergraph, A: SheafAssignment
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(D_V, D_E)``: per-vertex real degree blocks and hyperedge degrees.

    ``D_u = sum_{e : u in e} F^T F`` is real because the unit-modulus
    directional phases cancel in the conjugate product.
    """
    A.validate_against(H)
    d = A.config.d
    D_V = np.zeros((H.num_vertices, d, d))
    for u, e, _role in H.incidences():
        F = A.map_for(u, e)
        D_V[u] += F.T @ F
    D_E = np.array([float(e.degree) for e in H.hyperedges])
    return D_V, D_E


def _spd_inverse_sqrt(
    D_V: np.ndarray, map_shape: str, *, strict: bool, jitter: float
) -> np.ndarray:
    """Inverse square roots of the symmetric PSD degree blocks.

    Diagonal and trivial sheaves use element-wise roots; full maps go through
    a symmetric eigendecomposition.  In strict mode a singular block raises
    with the vertex index; otherwise ``jitter`` is added to every diagonal
    before inversion.
    """
    n, d, _ = D_V.shape
    out = np.zeros_like(D_V)
    for u in range(n):
        block = D_V[u]
        if not strict:
            block = block + jitter * np.eye(d)
        if map_shape in ("trivial", "diagonal"):
            diag = np.diag(block).copy()
            if strict and np.any(diag <= 0.0):
                raise ValueError(
                    f"degree block of vertex {u} is singular; enable jitter or fix the instance"
                )
            out[u] = np.diag(1.0 / np.sqrt(diag))
        else:
            w, V = jacobi_eigh(block, compute_vectors=True)
            if strict and np.any(w <= 0.0):
                raise ValueError(
                    f"degree block of vertex {u} is singular; enable jitter or fix the instance"
                )
            out[u] = (V / np.sqrt(w)) @ V.T
    return out


@dataclass
class LaplacianBundle:
    """An assembled Laplacian with the pieces needed for matrix-free application."""

    hypergraph: DirectedHypergraph
    sheaf: SheafAssignment
    L: BlockComplexMatrix
    Q: BlockComplexMatrix
    D_V: np.ndarray
    D_E: np.ndarray
    normalized: bool
    dv_inv_sqrt: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.hypergraph.num_vertices

    @property
    def d(self) -> int:
        return self.sheaf.config.d


def build_laplacian(
    H: DirectedHypergraph,
    A: SheafAssignment,
    normalized: bool = False,
    *,
    strict: bool = True,
    jitter: float = DEGREE_JITTER,
) -> LaplacianBundle:
    """Assemble ``L = D_V - Q`` or its normalized form ``L_N = I - Q_N``."""
    B = build_incidence(H, A)
    D_V, D_E = build_degree_matrices(H, A)
    d = A.config.d
    n = H.num_vertices

    dv_inv_sqrt = None
    W = B.scale_block_rows(1.0 / np.sqrt(D_E))
    if normalized:
        dv_inv_sqrt = _spd_inverse_sqrt(
            D_V, A.config.map_shape, strict=strict, jitter=jitter
        )
        W = W.right_multiply_block_diagonal(dv_inv_sqrt)
    Q = W.conjugate_transpose().matmul(W)

    if normalized:
        diag = np.broadcast_to(np.eye(d), (n, d, d))
    else:
        diag = D_V
    items = [(i, j, -arr) for i, j, arr in Q]
    items.extend((u, u, diag[u].astype(complex)) for u in range(n))
    L = BlockComplexMatrix(n, n, d, items)
    return LaplacianBundle(H, A, L, Q, D_V, D_E, normalized, dv_inv_sqrt)


def apply_laplacian(bundle: LaplacianBundle, x: NodeSignal) -> NodeSignal:
    """Matrix-free application of the (normalized) Laplacian to a signal.

    Evaluates the disagreement form hyperedge by hyperedge:

        (L x)_u = sum_e (1/delta_e) vecF_u^dagger sum_{v in e, v != u}
                  (vecF_u x_u - vecF_v x_v)

    with ``x_u`` replaced by ``D_u^{-1/2} x_u`` and a matching left factor in
    the normalized case.  Never touches the assembled matrix.
    """
    H, A = bundle.hypergraph, bundle.sheaf
    n, d = bundle.n, bundle.d
    arr = np.asarray(x, dtype=complex)
    flat_input = arr.ndim == 1
    if flat_input:
        arr = arr[:, None]
    if arr.shape[0] != n * d:
        raise ValueError(f"signal has {arr.shape[0]} rows, expected {n * d}")
    xs = arr.reshape(n, d, -1)
    if bundle.normalized:
        xs = np.einsum("uab,ubf->uaf", bundle.dv_inv_sqrt, xs)

    out = np.zeros_like(xs)
    for j, e in enumerate(H.hyperedges):
        members = e.members
        delta = float(e.degree)
        projected = {
            u: (A.coefficient(u, j) * A.map_for(u, j)) @ xs[u] for u in members
        }
        total = sum(projected.values())
        for u in members:
            Fu = A.map_for(u, j)
            coeff = A.coefficient(u, j)
            inner = delta * projected[u] - total
            out[u] += np.conj(coeff) * (Fu.T @ inner) / delta
    if bundle.normalized:
        out = np.einsum("uab,ubf->uaf", bundle.dv_inv_sqrt, out)
    result = out.reshape(n * d, -1)
    return result[:, 0] if flat_input else result


def entrywise_block(
    H: DirectedHypergraph, A: SheafAssignment, u: int, v: int
) -> np.ndarray:
    """One ``d x d`` block of the unnormalized Laplacian, evaluated entry-wise.

    Independent of the product-form assembly: the diagonal branch sums
    ``(1 - 1/delta_e) F^T F`` and the off-diagonal branch sums the phased
    ``-(1/delta_e) conj(S_u) S_v F_u^T F_v`` over shared hyperedges.
    """
    for w in (u, v):
        if not (0 <= w < H.num_vertices):
            raise ValueError(f"vertex {w} out of range")
    d = A.config.d
    block = np.zeros((d, d), dtype=complex)
    for j, e in enumerate(H.hyperedges):
        members = e.members
        if u == v:
            if u not in members:
                continue
            F = A.map_for(u, j)
            block += (1.0 - 1.0 / e.degree) * (F.T @ F)
        else:
            if u not in members or v not in members:
                continue
            phase = np.conj(A.coefficient(u, j)) * A.coefficient(v, j)
            block -= (phase / e.degree) * (A.map_for(u, j).T @ A.map_for(v, j))
    return block


# --- dense text export -------------------------------------------------------


def format_dense_matrix(M: np.ndarray) -> str:
    """One row per line, entries as ``re+imj`` tokens, for diffing against oracles."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    lines = []
    for row in M:
        lines.append(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
    return "\n".join(lines) + "\n"


def parse_dense_matrix(text: str) -> np.ndarray:
    rows = []
    for ln in text.splitlines():
        if ln.strip():
            rows.append([complex(tok) for tok in ln.split()])
    return np.asarray(rows, dtype=complex)
