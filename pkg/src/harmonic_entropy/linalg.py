"""Dense real symmetric linear algebra: eigendecomposition and spectral calculus.

Every function accepts any square array-like and symmetrizes it first, so
matrices assembled from floating point products of symmetric factors are
handled uniformly.

Two eigensolvers are available:

``"jacobi"``
    Cyclic Jacobi rotations in round-robin (parallel) ordering, written in
    numpy. Accurate to working precision on every eigenvalue, no LAPACK.
``"lapack"``
    ``numpy.linalg.eigh``. Used by default because it is an order of
    magnitude faster at the sizes of the disorder sweeps.

The default can be changed with :func:`set_default_eigensolver`.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DomainError, SingularityError, SolverError

POWER_FLOOR = 1e-12
RECONSTRUCTION_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-11
JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-13

_EIGENSOLVERS = ("lapack", "jacobi")
_default_solver = "lapack"


class EigenDecomposition(NamedTuple):
    """Eigenvalues in ascending order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return symmetrize((v * self.eigenvalues) @ v.T)


def set_default_eigensolver(name: str) -> None:
    global _default_solver
    if name not in _EIGENSOLVERS:
        raise ValueError(f"unknown eigensolver {name!r}; expected one of {_EIGENSOLVERS}")
    _default_solver = name


def get_default_eigensolver() -> str:
    return _default_solver


def symmetrize(m) -> np.ndarray:
    """Return ``(m + m.T) / 2`` as a float array after shape checks."""
    a = np.asarray(m, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("matrix dimension must be at least 1")
    return 0.5 * (a + a.T)


def _round_robin(n: int):
    """Yield (p, q) index arrays of disjoint pairs covering all pairs once per sweep."""
    size = n + (n % 2)
    players = list(range(size))
    for _ in range(size - 1):
        p, q = [], []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a < n and b < n:
                p.append(min(a, b))
                q.append(max(a, b))
        yield np.array(p, dtype=np.intp), np.array(q, dtype=np.intp)
        players = [players[0], players[-1]] + players[1:-1]


def _max_offdiag(a: np.ndarray) -> float:
    off = np.abs(a - np.diag(np.diag(a)))
    return float(off.max()) if off.size else 0.0


def jacobi_eigh(m, max_sweeps: int = JACOBI_MAX_SWEEPS, tol: float = JACOBI_TOL) -> EigenDecomposition:
    """Cyclic Jacobi eigensolver.

    Converged when the largest off-diagonal magnitude is at most
    ``tol * max|m|``. Raises :class:`SolverError` carrying that residual
    if ``max_sweeps`` sweeps are not enough.
    """
    a = symmetrize(m).copy()
    n = a.shape[0]
    v = np.eye(n)
    scale = float(np.abs(a).max())
    if n == 1 or scale == 0.0:
        return EigenDecomposition(np.diag(a).copy(), v)
    threshold = tol * scale
    schedule = list(_round_robin(n))
    off = _max_offdiag(a)
    sweeps = 0
    while off > threshold:
        if sweeps >= max_sweeps:
            raise SolverError(
                f"Jacobi did not converge in {max_sweeps} sweeps (max off-diagonal {off:.3e})",
                residual=off,
            )
        for p, q in schedule:
            apq = a[p, q]
            app = a[p, p]
            aqq = a[q, q]
            nonzero = apq != 0.0
            theta = np.where(nonzero, (aqq - app) / (2.0 * np.where(nonzero, apq, 1.0)), 0.0)
            t = np.where(
                nonzero,
                np.sign(theta) / (np.abs(theta) + np.sqrt(1.0 + theta * theta)),
                0.0,
            )
            t = np.where(nonzero & (theta == 0.0), 1.0, t)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            cc, sc = c[:, None], s[:, None]
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = cc * rp - sc * rq
            a[q, :] = sc * rp + cc * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
        sweeps += 1
        off = _max_offdiag(a)
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def sym_eigen(m, method: str | None = None) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix, eigenvalues ascending."""
    method = method or _default_solver
    if method == "jacobi":
        return jacobi_eigh(m)
    if method == "lapack":
        a = symmetrize(m)
        try:
            w, v = np.linalg.eigh(a)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"LAPACK eigh failed: {exc}", residual=_max_offdiag(a)) from exc
        return EigenDecomposition(w, v)
    raise ValueError(f"unknown eigensolver {method!r}")


def spectral_apply(eig: EigenDecomposition, values: np.ndarray) -> np.ndarray:
    """Return ``V diag(values) V^T`` for a decomposition and transformed eigenvalues."""
    v = eig.eigenvectors
    return symmetrize((v * values) @ v.T)


def _powered_eigenvalues(w: np.ndarray, alpha: float, floor: float = POWER_FLOOR) -> np.ndarray:
    if alpha == 0:
        return np.ones_like(w)
    lam_max = float(np.max(np.abs(w)))
    cutoff = floor * lam_max
    lam_min = float(w[0])
    if alpha < 0 and lam_min <= cutoff:
        raise SingularityError(
            f"cannot raise matrix to power {alpha}: smallest eigenvalue {lam_min:.3e} "
            f"is below the floor {cutoff:.3e}",
            smallest_eigenvalue=lam_min,
        )
    if float(alpha).is_integer():
        return w ** int(alpha)
    if lam_min < -cutoff:
        raise DomainError(
            f"fractional power {alpha} of a matrix with negative eigenvalue {lam_min:.3e}"
        )
    return np.clip(w, 0.0, None) ** alpha


def matrix_power(m, alpha: float, method: str | None = None, floor: float = POWER_FLOOR) -> np.ndarray:
    """Real power of a symmetric positive definite matrix via its spectrum."""
    eig = sym_eigen(m, method)
    return spectral_apply(eig, _powered_eigenvalues(eig.eigenvalues, alpha, floor))


def matrix_powers(m, alphas, method: str | None = None, floor: float = POWER_FLOOR) -> dict:
    """Several powers from one eigendecomposition, keyed by exponent."""
    eig = sym_eigen(m, method)
    return {a: spectral_apply(eig, _powered_eigenvalues(eig.eigenvalues, a, floor)) for a in alphas}


def trace_abs_sqrt(m, method: str | None = None) -> float:
    """``Tr |m|^{1/2}`` of a symmetric matrix."""
    w = sym_eigen(m, method).eigenvalues
    return float(np.sum(np.sqrt(np.abs(w))))


def schatten_half_quasinorm(m, method: str | None = None) -> float:
    """Schatten 1/2-quasinorm ``(sum_k |lambda_k|^{1/2})**2`` of a symmetric matrix."""
    return trace_abs_sqrt(m, method) ** 2


def schatten_quasinorm_power(a, p: float = 0.5) -> float:
    """``Tr |a|^p`` for a general real matrix, from its singular values."""
    sv = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    return float(np.sum(sv**p))


def log_det_pos_def(m, method: str | None = None) -> float:
    """Log-determinant as a sum of log-eigenvalues."""
    w = sym_eigen(m, method).eigenvalues
    if w[0] <= 0:
        raise DomainError(f"log-determinant undefined: smallest eigenvalue {w[0]:.3e} <= 0")
    return float(np.sum(np.log(w)))


def operator_norm(m, method: str | None = None) -> float:
    w = sym_eigen(m, method).eigenvalues
    return float(max(abs(w[0]), abs(w[-1])))
