import numpy as np
import pytest

from hypersheaf.hypergraph import DirectedHypergraph, Hyperedge
from hypersheaf.jacobi import jacobi_eigh
from hypersheaf.laplacian import build_laplacian
from hypersheaf.reference import reference_laplacian
from hypersheaf.sheaf import SheafConfig, build_fixed_sheaf
from hypersheaf.spectral import (
    dirichlet_energy,
    hermitian_eigenvalues,
    random_instance,
    real_embedding,
    spectrum_report,
    verify_spectral_suite,
)
from hypersheaf.theorems import counterexample_hypergraph


def random_hermitian(rng, k):
    A = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return 0.5 * (A + A.conj().T)


def test_jacobi_matches_numpy_oracle():
    rng = np.random.default_rng(0)
    for k in (1, 2, 5, 12, 30):
        A = rng.standard_normal((k, k))
        A = 0.5 * (A + A.T)
        np.testing.assert_allclose(jacobi_eigh(A), np.linalg.eigvalsh(A), atol=1e-10)


def test_jacobi_vectors_reconstruct_matrix():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((8, 8))
    A = 0.5 * (A + A.T)
    w, V = jacobi_eigh(A, compute_vectors=True)
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, A, atol=1e-10)
    np.testing.assert_allclose(V.T @ V, np.eye(8), atol=1e-12)


def test_jacobi_rejects_asymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        jacobi_eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_eigenvalues_identity():
    np.testing.assert_allclose(hermitian_eigenvalues(np.eye(3)), [1, 1, 1])


def test_hermitian_eigenvalues_pauli_matrix():
    M = np.array([[0.0, -1j], [1j, 0.0]])
    np.testing.assert_allclose(hermitian_eigenvalues(M), [-1.0, 1.0], atol=1e-12)


def test_hermitian_eigenvalues_counterexample_spectrum():
    # independent closed form: eigenvectors (1,0,0,-1), (0,1,-1,0), (1,a,a,1)
    # give {1/3, 4/3, (1 +- sqrt(17))/6} for the flipped-sign operator
    H = counterexample_hypergraph()
    sheaf = build_fixed_sheaf(H, SheafConfig(q=0.0, d=1))
    M = reference_laplacian("duta_linear", hypergraph=H, sheaf=sheaf)
    expected = sorted([(1 - np.sqrt(17)) / 6, 1 / 3, (1 + np.sqrt(17)) / 6, 4 / 3])
    np.testing.assert_allclose(hermitian_eigenvalues(M), expected, atol=1e-9)


def test_hermitian_eigenvalues_match_numpy_on_random_matrices():
    rng = np.random.default_rng(2)
    for k in (2, 7, 15):
        M = random_hermitian(rng, k)
        np.testing.assert_allclose(hermitian_eigenvalues(M), np.linalg.eigvalsh(M), atol=1e-9)


def test_embedded_spectrum_pairs_exactly():
    rng = np.random.default_rng(3)
    M = random_hermitian(rng, 9)
    doubled = jacobi_eigh(real_embedding(M))
    assert np.max(np.abs(doubled[::2] - doubled[1::2])) < 1e-9


def test_eigenvalue_sum_matches_trace():
    rng = np.random.default_rng(4)
    M = random_hermitian(rng, 11)
    eigs = hermitian_eigenvalues(M)
    assert eigs.sum() == pytest.approx(np.trace(M).real, rel=1e-8)


def test_hermitian_eigenvalues_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        hermitian_eigenvalues(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_spectrum_report_fields():
    rep = spectrum_report(np.diag([3.0, -1.0, 2.0]))
    assert rep.min_eig == pytest.approx(-1.0)
    assert rep.max_eig == pytest.approx(3.0)
    assert not rep.is_psd_at(1e-8)
    assert rep.hermitian_defect == 0.0


def build_normalized(seed, **kwargs):
    rng = np.random.default_rng(seed)
    H, A = random_instance(rng, **kwargs)
    return H, A, build_laplacian(H, A, normalized=True)


def test_dirichlet_zero_signal():
    H, A, bundle = build_normalized(0)
    rep = dirichlet_energy(H, A, bundle, np.zeros(bundle.n * bundle.d))
    assert rep.quadratic_form == 0.0
    assert rep.sum_form == 0.0


def test_dirichlet_two_forms_agree():
    rng = np.random.default_rng(5)
    for trial in range(40):
        H, A = random_instance(rng, n_range=(4, 10), d_choices=(1, 2, 3))
        bundle = build_laplacian(H, A, normalized=True)
        x = rng.standard_normal(bundle.n * bundle.d) + 1j * rng.standard_normal(bundle.n * bundle.d)
        rep = dirichlet_energy(H, A, bundle, x)
        assert rep.relative_gap <= 1e-9
        assert rep.quadratic_form >= -1e-9


def test_verify_suite_passes_on_random_instances():
    rng = np.random.default_rng(6)
    for _ in range(25):
        H, A = random_instance(rng)
        rep = verify_spectral_suite(H, A, rng=rng)
        assert rep.passed, rep.failures
        assert rep.max_eig <= 1 + 1e-8
        assert rep.min_eig >= -1e-8


def test_verify_suite_serializes_failures():
    # a handcrafted failing check: feed the suite a hypergraph with an
    # isolated vertex in strict mode and confirm the error carries context
    H = DirectedHypergraph(3, (Hyperedge((0, 1)),))
    A = build_fixed_sheaf(H, SheafConfig(q=0.1, d=1))
    with pytest.raises(ValueError, match="vertex 2"):
        verify_spectral_suite(H, A)
