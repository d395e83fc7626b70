"""Independently constructed Laplacians from the graph and hypergraph literature.

Each builder follows its own published definition and never touches the
block assembly in :mod:`hypersheaf.laplacian`, so matrix equalities between
the two act as genuine cross-checks.  Supported kinds:

``sheaf_graph``      graph sheaf Laplacian from per-incidence maps
``classical_graph``  ``D - A`` of an undirected graph
``magnetic``         phase-encoded Hermitian Laplacian of a mixed digraph
``sign_magnetic``    its sign-based variant (phase fixed to ``+-i``)
``zhou``             normalized undirected hypergraph Laplacian
``gedi``             generalized directed hypergraph Laplacian (scalar form)
``duta_linear``      prior linear sheaf hypergraph operator with flipped
                     off-diagonal signs (not PSD beyond the 2-uniform case)
"""

from __future__ import annotations

import numpy as np

from .hypergraph import DirectedHypergraph, incidence_counts
from .sheaf import SheafAssignment

__all__ = ["reference_laplacian", "REFERENCE_KINDS"]

REFERENCE_KINDS = (
    "sheaf_graph",
    "classical_graph",
    "magnetic",
    "sign_magnetic",
    "zhou",
    "gedi",
    "duta_linear",
)


def _require_two_uniform(H: DirectedHypergraph) -> None:
    for j, e in enumerate(H.hyperedges):
        if e.degree != 2:
            raise ValueError(f"hyperedge {j} has degree {e.degree}; expected a 2-uniform hypergraph")


def _adjacency(H: DirectedHypergraph) -> np.ndarray:
    """Arc-count adjacency of a 2-uniform hypergraph; undirected edges count both ways."""
    _require_two_uniform(H)
    n = H.num_vertices
    A = np.zeros((n, n))
    for e in H.hyperedges:
        if e.is_undirected:
            u, v = e.tail
            A[u, v] += 1.0
            A[v, u] += 1.0
        else:
            (u,), (v,) = e.tail, e.head
            A[u, v] += 1.0
    return A


def _sheaf_graph(H: DirectedHypergraph, sheaf: SheafAssignment) -> np.ndarray:
    _require_two_uniform(H)
    d = sheaf.config.d
    n = H.num_vertices
    L = np.zeros((n * d, n * d))
    for j, e in enumerate(H.hyperedges):
        if not e.is_undirected:
            raise ValueError("the graph sheaf Laplacian is defined for undirected edges")
        u, v = e.tail
        Fu = sheaf.map_for(u, j)
        Fv = sheaf.map_for(v, j)
        L[u * d : (u + 1) * d, u * d : (u + 1) * d] += Fu.T @ Fu
        L[v * d : (v + 1) * d, v * d : (v + 1) * d] += Fv.T @ Fv
        L[u * d : (u + 1) * d, v * d : (v + 1) * d] -= Fu.T @ Fv
        L[v * d : (v + 1) * d, u * d : (u + 1) * d] -= Fv.T @ Fu
    return L


def _classical_graph(H: DirectedHypergraph) -> np.ndarray:
    A = _adjacency(H)
    if np.any(A != A.T):
        raise ValueError("the classical graph Laplacian requires undirected edges only")
    return np.diag(A.sum(axis=1)) - A


def _magnetic(H: DirectedHypergraph, q: float) -> np.ndarray:
    A = _adjacency(H)
    A_s = 0.5 * (A + A.T)
    theta = 2.0 * np.pi * q * (A - A.T)
    Hq = A_s * np.exp(1j * theta)
    D_s = np.diag(A_s.sum(axis=1))
    return D_s - Hq


def _sign_magnetic(H: DirectedHypergraph) -> np.ndarray:
    A = _adjacency(H)
    A_s = 0.5 * (A + A.T)
    sgn = np.sign(A - A.T)
    Hs = A_s * ((1.0 - np.abs(sgn)) + 1j * sgn)
    D_s = np.diag(A_s.sum(axis=1))
    return D_s - Hs


def _zhou(H: DirectedHypergraph) -> np.ndarray:
    """Normalized undirected hypergraph Laplacian from the binary incidence matrix."""
    n, m = H.num_vertices, H.num_hyperedges
    B = np.zeros((n, m))
    for j, e in enumerate(H.hyperedges):
        for u in e.members:
            B[u, j] = 1.0
    d_v = B.sum(axis=1)
    if np.any(d_v == 0):
        raise ValueError("isolated vertex: the normalized operator is undefined")
    delta = np.array([e.degree for e in H.hyperedges], dtype=float)
    Dv_inv_sqrt = np.diag(1.0 / np.sqrt(d_v))
    Q = Dv_inv_sqrt @ B @ np.diag(1.0 / delta) @ B.T @ Dv_inv_sqrt
    return np.eye(n) - Q


def _gedi(H: DirectedHypergraph) -> np.ndarray:
    """Scalar generalized directed Laplacian: net tail/head flow on the imaginary axis."""
    n = H.num_vertices
    d_v = incidence_counts(H).astype(float)
    if np.any(d_v == 0):
        raise ValueError("isolated vertex: the normalized operator is undefined")
    L = np.zeros((n, n), dtype=complex)
    for u in range(n):
        s = sum(1.0 / e.degree for e in H.hyperedges if u in e.members)
        L[u, u] = 1.0 - s / d_v[u]
    for e in H.hyperedges:
        inv = 1.0 / e.degree
        for u in e.members:
            for v in e.members:
                if u == v:
                    continue
                u_tail = u in e.tail
                v_tail = v in e.tail
                if u_tail == v_tail:
                    contrib = -inv
                elif u_tail:
                    contrib = -1j * inv
                else:
                    contrib = 1j * inv
                L[u, v] += contrib / np.sqrt(d_v[u] * d_v[v])
    return L


def _duta_linear(H: DirectedHypergraph, sheaf: SheafAssignment) -> np.ndarray:
    """Prior linear sheaf hypergraph operator: ``1/delta_e`` diagonal weights and
    flipped (negative) off-diagonal sums; ignores any direction information."""
    d = sheaf.config.d
    n = H.num_vertices
    L = np.zeros((n * d, n * d))
    for j, e in enumerate(H.hyperedges):
        inv = 1.0 / e.degree
        for u in e.members:
            Fu = sheaf.map_for(u, j)
            L[u * d : (u + 1) * d, u * d : (u + 1) * d] += inv * (Fu.T @ Fu)
            for v in e.members:
                if v == u:
                    continue
                Fv = sheaf.map_for(v, j)
                L[u * d : (u + 1) * d, v * d : (v + 1) * d] -= inv * (Fu.T @ Fv)
    return L


def reference_laplacian(
    kind: str,
    *,
    hypergraph: DirectedHypergraph,
    sheaf: SheafAssignment | None = None,
    q: float | None = None,
) -> np.ndarray:
    """Build one of the published operators from its own definition.

    ``sheaf_graph`` and ``duta_linear`` require ``sheaf``; ``magnetic``
    requires ``q``; the remaining kinds take only the hypergraph.
    """
    if kind not in REFERENCE_KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {REFERENCE_KINDS}")
    if kind == "sheaf_graph":
        if sheaf is None:
            raise ValueError("sheaf_graph requires a sheaf assignment")
        return _sheaf_graph(hypergraph, sheaf)
    if kind == "classical_graph":
        return _classical_graph(hypergraph)
    if kind == "magnetic":
        if q is None:
            raise ValueError("magnetic requires the charge parameter q")
        return _magnetic(hypergraph, q)
    if kind == "sign_magnetic":
        return _sign_magnetic(hypergraph)
    if kind == "zhou":
        return _zhou(hypergraph)
    if kind == "gedi":
        return _gedi(hypergraph)
    if sheaf is None:
        raise ValueError("duta_linear requires a sheaf assignment")
    return _duta_linear(hypergraph, sheaf)
