import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harmonic_entropy import linalg
from harmonic_entropy.errors import DomainError, SingularityError, SolverError

from conftest import random_spd


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
@pytest.mark.parametrize("n", [1, 2, 7, 30])
def test_eigen_reconstructs(rng, method, n):
    m = random_spd(rng, n)
    eig = linalg.sym_eigen(m, method)
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    assert np.abs(eig.reconstruct() - m).max() <= linalg.RECONSTRUCTION_TOL * np.abs(m).max()
    v = eig.eigenvectors
    assert np.abs(v.T @ v - np.eye(n)).max() <= linalg.ORTHOGONALITY_TOL


def test_jacobi_matches_lapack(rng):
    m = rng.standard_normal((25, 25))
    m = m + m.T
    wj = linalg.sym_eigen(m, "jacobi").eigenvalues
    wl = np.linalg.eigvalsh(m)
    np.testing.assert_allclose(wj, wl, atol=1e-10)


def test_jacobi_sweep_cap_reports_residual(rng):
    m = random_spd(rng, 12)
    m[0, 1] = m[1, 0] = 5.0
    with pytest.raises(SolverError) as info:
        linalg.jacobi_eigh(m, max_sweeps=1, tol=1e-300)
    assert info.value.residual is not None


def test_default_solver_toggle():
    old = linalg.get_default_eigensolver()
    try:
        linalg.set_default_eigensolver("jacobi")
        assert linalg.get_default_eigensolver() == "jacobi"
        with pytest.raises(ValueError):
            linalg.set_default_eigensolver("qr")
    finally:
        linalg.set_default_eigensolver(old)


def test_non_square_rejected():
    with pytest.raises(ValueError):
        linalg.sym_eigen(np.ones((2, 3)))


def test_power_laws(rng):
    m = random_spd(rng, 10)
    p = linalg.matrix_powers(m, (0.5, -0.5, 0.25, 1.0, 0.0))
    np.testing.assert_allclose(p[0.5] @ p[0.5], m, rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(p[0.5] @ p[-0.5], np.eye(10), atol=1e-9)
    np.testing.assert_allclose(p[1.0], m, atol=1e-10)
    np.testing.assert_allclose(p[0.0], np.eye(10), atol=1e-12)
    np.testing.assert_allclose(p[0.25] @ p[0.25], p[0.5], atol=1e-10)


def test_negative_power_of_singular_matrix():
    m = np.diag([0.0, 1.0, 2.0])
    with pytest.raises(SingularityError) as info:
        linalg.matrix_power(m, -0.5)
    assert info.value.smallest_eigenvalue == 0.0
    # positive powers of a PSD matrix are fine
    np.testing.assert_allclose(linalg.matrix_power(m, 0.5), np.diag([0.0, 1.0, np.sqrt(2.0)]), atol=1e-15)


def test_fractional_power_of_indefinite_matrix():
    with pytest.raises(DomainError):
        linalg.matrix_power(np.diag([-1.0, 1.0]), 0.5)
    np.testing.assert_allclose(linalg.matrix_power(np.diag([-1.0, 2.0]), 2.0), np.diag([1.0, 4.0]))


def test_log_det_and_norms():
    m = np.array([[2.0, -1.0], [-1.0, 2.0]])
    assert linalg.log_det_pos_def(m) == pytest.approx(np.log(3.0), abs=1e-14)
    assert linalg.operator_norm(m) == pytest.approx(3.0)
    assert linalg.trace_abs_sqrt(m) == pytest.approx(1.0 + np.sqrt(3.0))
    assert linalg.schatten_half_quasinorm(m) == pytest.approx((1.0 + np.sqrt(3.0)) ** 2)
    with pytest.raises(DomainError):
        linalg.log_det_pos_def(np.diag([1.0, -1.0]))


def test_schatten_general_matrix():
    a = np.array([[0.0, 4.0], [0.0, 0.0]])
    assert linalg.schatten_quasinorm_power(a, 0.5) == pytest.approx(2.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.floats(-1.0, 1.0), st.integers(0, 2**32 - 1))
def test_power_eigenvalues_property(n, alpha, seed):
    rng = np.random.default_rng(seed)
    m = random_spd(rng, n, 50.0)
    w = np.linalg.eigvalsh(m)
    got = np.linalg.eigvalsh(linalg.matrix_power(m, alpha))
    np.testing.assert_allclose(np.sort(got), np.sort(w**alpha), rtol=1e-9)
