"""Covariance matrices of Gaussian states and their symplectic spectra.

Phase-space vectors are ordered ``r = q (+) p`` throughout, so a 2n x 2n
covariance has the position block first. Ground states of the quadratic
Hamiltonians in :mod:`harmonic_entropy.model` have block-diagonal
covariance ``A (+) A^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    BipartitionError,
    ConsistencyError,
    DomainError,
    SingularityError,
    UncertaintyViolation,
)
from .model import OscillatorSystem, Region, one_particle_operator

SPECTRUM_TOL = 1e-8
PAIR_TOL = 1e-7


def symplectic_form(n: int) -> np.ndarray:
    """``[[0, -Id], [Id, 0]]`` for ``n`` modes."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Either block-diagonal (``a``, ``b``) or a full 2n x 2n matrix."""

    a: np.ndarray | None = None
    b: np.ndarray | None = None
    full: np.ndarray | None = None
    labels: tuple = ()

    def __post_init__(self):
        if self.full is not None:
            if self.a is not None or self.b is not None:
                raise ValueError("give either full or (a, b), not both")
            full = linalg.symmetrize(self.full)
            if full.shape[0] % 2:
                raise ValueError("full covariance must have even dimension")
            object.__setattr__(self, "full", full)
        else:
            if self.a is None or self.b is None:
                raise ValueError("block covariance needs both a and b")
            a, b = linalg.symmetrize(self.a), linalg.symmetrize(self.b)
            if a.shape != b.shape:
                raise ValueError("a and b must have equal shapes")
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(self.modes)))
        elif len(self.labels) != self.modes:
            raise ValueError("need one label per mode")

    @property
    def modes(self) -> int:
        if self.full is not None:
            return self.full.shape[0] // 2
        return self.a.shape[0]

    @property
    def is_block(self) -> bool:
        return self.full is None

    def matrix(self) -> np.ndarray:
        if self.full is not None:
            return self.full
        n = self.modes
        out = np.zeros((2 * n, 2 * n))
        out[:n, :n] = self.a
        out[n:, n:] = self.b
        return out

    def to_dict(self) -> dict:
        if self.is_block:
            return {"modes": self.modes, "labels": list(self.labels),
                    "a": self.a.tolist(), "b": self.b.tolist()}
        return {"modes": self.modes, "labels": list(self.labels), "full": self.full.tolist()}


@dataclass(frozen=True, eq=False)
class SymplecticSpectrum:
    values: np.ndarray

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def min(self) -> float:
        return float(self.values[0])


def _finalize(gamma: np.ndarray, tol: float) -> SymplecticSpectrum:
    gamma = np.sort(np.asarray(gamma, dtype=float))
    if gamma[0] < 1.0 - tol:
        raise UncertaintyViolation(
            f"symplectic eigenvalue {float(gamma[0])!r} < 1 violates the uncertainty relation",
            minimum=float(gamma[0]),
        )
    return SymplecticSpectrum(np.maximum(gamma, 1.0))


def ground_state_covariance(sys: OscillatorSystem, method: str | None = None) -> CovarianceMatrix:
    """``A = hp^{1/2} h^{-1/2} hp^{1/2}``, ``B = hp^{-1/2} h^{1/2} hp^{-1/2}``."""
    h = one_particle_operator(sys, method)
    hp_pow = linalg.matrix_powers(sys.hp, (0.5, -0.5), method)
    h_pow = linalg.matrix_powers(h, (0.5, -0.5), method)
    a = hp_pow[0.5] @ h_pow[-0.5] @ hp_pow[0.5]
    b = hp_pow[-0.5] @ h_pow[0.5] @ hp_pow[-0.5]
    return CovarianceMatrix(a=a, b=b, labels=tuple(range(sys.size)))


def truncate(cov: CovarianceMatrix, region: Region) -> CovarianceMatrix:
    """Reduced covariance on ``region`` (the full region gives the input back)."""
    if region.parent_size != cov.modes:
        raise BipartitionError(
            f"region parent size {region.parent_size} != number of modes {cov.modes}"
        )
    idx = region.array
    labels = tuple(cov.labels[i] for i in idx)
    if cov.is_block:
        return CovarianceMatrix(a=cov.a[np.ix_(idx, idx)], b=cov.b[np.ix_(idx, idx)], labels=labels)
    both = np.concatenate([idx, idx + cov.modes])
    return CovarianceMatrix(full=cov.full[np.ix_(both, both)], labels=labels)


def _raw_williamson(gamma_matrix: np.ndarray, method: str | None) -> np.ndarray:
    n = gamma_matrix.shape[0] // 2
    root = linalg.matrix_power(gamma_matrix, 0.5, method)
    k = root @ symplectic_form(n) @ root
    # -K^2 = K^T K for antisymmetric K; eigenvalues come in pairs gamma_k^2.
    sq = linalg.sym_eigen(k.T @ k, method).eigenvalues
    lo, hi = sq[0::2], sq[1::2]
    scale = np.maximum(np.abs(hi), np.finfo(float).tiny)
    bad = np.abs(hi - lo) > PAIR_TOL * scale
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ConsistencyError(
            f"squared symplectic form eigenvalues do not pair: {lo[i]:.12g} vs {hi[i]:.12g}"
        )
    return np.sqrt(np.clip(0.5 * (lo + hi), 0.0, None))


def _raw_block(a: np.ndarray, b: np.ndarray, method: str | None) -> np.ndarray:
    root = linalg.matrix_power(a, 0.5, method)
    w = linalg.sym_eigen(root @ b @ root, method).eigenvalues
    return np.sqrt(np.clip(w, 0.0, None))


def symplectic_spectrum_williamson(cov: CovarianceMatrix, tol: float = SPECTRUM_TOL,
                                   method: str | None = None) -> SymplecticSpectrum:
    """Symplectic eigenvalues from the real squared form of ``Gamma^{1/2} Omega Gamma^{1/2}``."""
    return _finalize(_raw_williamson(cov.matrix(), method), tol)


def symplectic_spectrum_block(a, b, tol: float = SPECTRUM_TOL,
                              method: str | None = None) -> SymplecticSpectrum:
    """Square roots of the eigenvalues of ``a^{1/2} b a^{1/2}``."""
    a, b = linalg.symmetrize(a), linalg.symmetrize(b)
    if a.shape != b.shape:
        raise ValueError("blocks must have equal shapes")
    return _finalize(_raw_block(a, b, method), tol)


def symplectic_spectrum(cov: CovarianceMatrix, tol: float = SPECTRUM_TOL,
                        method: str | None = None) -> SymplecticSpectrum:
    """Block shortcut when available, squared-form route otherwise."""
    if cov.is_block:
        return symplectic_spectrum_block(cov.a, cov.b, tol, method)
    return symplectic_spectrum_williamson(cov, tol, method)


def check_uncertainty(cov: CovarianceMatrix, tol: float = SPECTRUM_TOL,
                      method: str | None = None) -> bool:
    try:
        if cov.is_block:
            raw = _raw_block(cov.a, cov.b, method)
        else:
            raw = _raw_williamson(cov.matrix(), method)
    except (SingularityError, DomainError, ConsistencyError):
        return False
    return bool(raw.min() >= 1.0 - tol)


def unclamped_symplectic_values(cov: CovarianceMatrix, route: str = "auto",
                                method: str | None = None) -> np.ndarray:
    """Sorted symplectic eigenvalues before any clamping or uncertainty check.

    ``route`` is ``"block"``, ``"williamson"`` or ``"auto"`` (block when the
    covariance is block-diagonal).
    """
    if route == "auto":
        route = "block" if cov.is_block else "williamson"
    if route == "block":
        if not cov.is_block:
            raise ValueError("block route needs a block-diagonal covariance")
        return np.sort(_raw_block(cov.a, cov.b, method))
    if route == "williamson":
        return np.sort(_raw_williamson(cov.matrix(), method))
    raise ValueError(f"unknown route {route!r}")
