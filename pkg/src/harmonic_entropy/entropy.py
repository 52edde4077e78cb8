"""Entanglement entropy from symplectic spectra, with matching upper and lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg
from .errors import AssumptionViolation, DomainError, SolverError
from .gaussian import (
    SPECTRUM_TOL,
    CovarianceMatrix,
    SymplecticSpectrum,
    ground_state_covariance,
    symplectic_spectrum,
    truncate,
)
from .model import OscillatorSystem, Region, check_assumption, truncated_chain_powers

_EXACT_ZERO = 1e-15
_ASYMPTOTIC = 1e-8


def _f_scalar(x: float) -> float:
    if x < 1.0:
        raise DomainError(f"entropy function needs x >= 1, got {x!r}")
    t = x - 1.0
    if t < _EXACT_ZERO:
        return 0.0
    if t < _ASYMPTOTIC:
        return 0.5 * t * (1.0 - math.log(0.5 * t))
    return 0.5 * (x + 1.0) * math.log(0.5 * (x + 1.0)) - 0.5 * t * math.log(0.5 * t)


def entropy_function(x):
    """``f(x) = (x+1)/2 log((x+1)/2) - (x-1)/2 log((x-1)/2)`` in nats, ``f(1) = 0``.

    Accepts scalars or arrays. Close to 1 the leading asymptotic
    ``t/2 (1 - log(t/2))``, ``t = x - 1``, replaces the direct formula,
    whose two terms cancel catastrophically there.
    """
    if np.ndim(x) == 0:
        return _f_scalar(float(x))
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0):
        raise DomainError(f"entropy function needs x >= 1, got min {x.min()!r}")
    t = x - 1.0
    out = np.zeros_like(x)
    small = (t >= _EXACT_ZERO) & (t < _ASYMPTOTIC)
    big = t >= _ASYMPTOTIC
    out[small] = 0.5 * t[small] * (1.0 - np.log(0.5 * t[small]))
    xb, tb = x[big], t[big]
    out[big] = 0.5 * (xb + 1.0) * np.log(0.5 * (xb + 1.0)) - 0.5 * tb * np.log(0.5 * tb)
    return out


@dataclass(frozen=True, eq=False)
class EntropyValue:
    nats: float
    spectrum_used: SymplecticSpectrum

    def __float__(self):
        return self.nats


def entropy_from_spectrum(spectrum: SymplecticSpectrum) -> EntropyValue:
    nats = float(np.sum(entropy_function(np.asarray(spectrum.values))))
    return EntropyValue(max(nats, 0.0), spectrum)


def entanglement_entropy(cov: CovarianceMatrix, region: Region, tol: float = SPECTRUM_TOL,
                         method: str | None = None) -> EntropyValue:
    """Von Neumann entropy of the reduced state on ``region``."""
    return entropy_from_spectrum(symplectic_spectrum(truncate(cov, region), tol, method))


def matrix_element_bound(a: np.ndarray, region: Region, d_bound: float) -> float:
    """``sqrt(D) * sum_{x in region, y outside} |a[x, y]|^{1/2}``."""
    inside = region.array
    mask = np.ones(a.shape[0], dtype=bool)
    mask[inside] = False
    block = a[np.ix_(inside, np.flatnonzero(mask))]
    return math.sqrt(d_bound) * float(np.sum(np.sqrt(np.abs(block))))


def upper_bound_matrix_elements(sys: OscillatorSystem, region: Region, d_bound: float,
                                cov: CovarianceMatrix | None = None,
                                method: str | None = None) -> float:
    report = check_assumption(sys, d_bound)
    if not report.passes:
        raise AssumptionViolation(
            f"norm bound {report.max_norm:.6g} exceeds D = {d_bound:.6g}"
        )
    cov = cov if cov is not None else ground_state_covariance(sys, method)
    return matrix_element_bound(cov.a, region, d_bound)


class LowerBounds(NamedTuple):
    det_bound: float
    max_bound: float


def lower_bounds_from_truncations(powers: dict, method: str | None = None) -> LowerBounds:
    """Determinant and top-eigenvalue bounds from truncated powers keyed by -1/2..1/2."""
    m14, p12, p14, m12 = (powers[a] for a in (-0.25, 0.5, 0.25, -0.5))
    det1 = 2.0 * linalg.log_det_pos_def(m14, method) + linalg.log_det_pos_def(p12, method)
    det2 = 2.0 * linalg.log_det_pos_def(p14, method) + linalg.log_det_pos_def(m12, method)
    top1 = linalg.sym_eigen(m14 @ p12 @ m14, method).eigenvalues[-1]
    top2 = linalg.sym_eigen(p14 @ m12 @ p14, method).eigenvalues[-1]
    return LowerBounds(0.5 * max(det1, det2), 0.5 * math.log(max(top1, top2)))


def lower_bounds_det_and_max(n_sub: int, n_full: int, lattice: str = "N",
                             indices: Sequence[int] | None = None,
                             method: str | None = None) -> LowerBounds:
    """Lower bounds on the ordered-chain entropy from determinants and top eigenvalues."""
    if indices is None and not 1 <= n_sub < n_full:
        raise ValueError(f"need 1 <= n_sub < n_full, got {n_sub}, {n_full}")
    powers = truncated_chain_powers(n_sub, n_full, (-0.5, -0.25, 0.25, 0.5), lattice, indices)
    return lower_bounds_from_truncations(powers, method)


def eigenvalue_comparison_margin(a, b, alpha: float, embedding: Sequence[int] | None = None,
                                 method: str | None = None) -> float:
    """Smallest ``lambda_j(rhs) - lambda_j(lhs)`` in the truncated-power comparison.

    ``lhs = B^[alpha/2] a B^[alpha/2]`` and
    ``rhs = (B^[alpha])^{1/2} a (B^[alpha])^{1/2}``, where ``B^[beta]`` is the
    block of ``b**beta`` selected by ``embedding`` (leading block by default).
    """
    a, b = linalg.symmetrize(a), linalg.symmetrize(b)
    k, n = a.shape[0], b.shape[0]
    if not k < n:
        raise ValueError(f"need dim(a) < dim(b), got {k} and {n}")
    idx = np.arange(k) if embedding is None else np.asarray(embedding, dtype=np.intp)
    if len(idx) != k:
        raise ValueError("embedding must select dim(a) indices")
    pw = linalg.matrix_powers(b, (alpha / 2.0, alpha), method)
    half = pw[alpha / 2.0][np.ix_(idx, idx)]
    full = pw[alpha][np.ix_(idx, idx)]
    root = linalg.matrix_power(full, 0.5, method)
    lhs = linalg.sym_eigen(half @ a @ half, method).eigenvalues
    rhs = linalg.sym_eigen(root @ a @ root, method).eigenvalues
    return float(np.min(rhs - lhs))


def eigenvalue_comparison_check(a, b, alpha: float, embedding: Sequence[int] | None = None,
                                tol: float = 1e-10, method: str | None = None) -> bool:
    return eigenvalue_comparison_margin(a, b, alpha, embedding, method) >= -tol


@dataclass(frozen=True)
class BoundConstants:
    optimal_c: float
    crossing_x0: float
    d_bound: float | None = None


def _crossing(x: float) -> float:
    return x * math.log((x * x - 1.0) / 4.0) - math.log((x - 1.0) / (x + 1.0))


def find_optimal_constant(lo: float = 1.1, hi: float = 3.0, xtol: float = 1e-12,
                          d_bound: float | None = None) -> BoundConstants:
    """Best constant ``C`` with ``f(x) <= C sqrt(x^2 - 1)`` on ``[1, inf)``, by bisection.

    The bracket must exclude the trivial root at ``x = 1``.
    """
    flo, fhi = _crossing(lo), _crossing(hi)
    if flo * fhi >= 0:
        raise SolverError(f"no sign change of the crossing equation on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = _crossing(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= xtol:
            break
    else:
        raise SolverError("bisection did not reach the tolerance", residual=hi - lo)
    x0 = 0.5 * (lo + hi)
    s = math.sqrt(x0 * x0 - 1.0)
    return BoundConstants(optimal_c=s * (math.log(2.0) - math.log(s)), crossing_x0=x0, d_bound=d_bound)
