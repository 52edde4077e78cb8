"""Infinite-volume limits of truncated chain powers.

For the pinned chain, blocks of ``(hq)^alpha`` converge as the chain grows.
Deep inside a long chain (lattice ``Z``) the limit is the Toeplitz matrix

    4^alpha int_0^1 sin(pi x / 2)^(2 alpha) cos(|j - k| pi x) dx,

whose symbol is ``|2 sin(x/2)|^(2 alpha)``. At the chain end (lattice ``N``)
it is

    2^(1 + 2 alpha) int_0^1 sin(pi x / 2)^(2 alpha) sin(j pi x) sin(k pi x) dx,

with closed forms at ``alpha = 1/4`` (``R``, Gamma ratios) and
``alpha = -1/2`` (``S``, odd harmonic sums). This module evaluates both by
quadrature and in closed form, scans Toeplitz log-determinants against the
strong Szego sum, and checks the sign/monotonicity properties of ``R`` and
``S`` used for the half-line lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DomainError
from .model import normalize_lattice
from .quadrature import integrate, integrate_substituted

EULER_MASCHERONI = 0.57721566490153286061
QUAD_TOL = 1e-10

# ---------------------------------------------------------------------------
# special functions


@lru_cache(maxsize=None)
def _quarter_ratio_table(m_max: int) -> np.ndarray:
    """``Gamma(m - 1/4) / Gamma(m + 5/4)`` for ``m = 0..m_max`` by upward recursion.

    Seed: ``Gamma(-1/4) / Gamma(5/4) = -8 sqrt(2) Gamma(3/4)^2 / pi`` from the
    reflection formula, so only one Gamma value is ever evaluated.
    """
    out = np.empty(m_max + 1)
    out[0] = -8.0 * math.sqrt(2.0) * math.gamma(0.75) ** 2 / math.pi
    for m in range(m_max):
        out[m + 1] = out[m] * (m - 0.25) / (m + 1.25)
    return out


def gamma_ratio_quarter(m) -> np.ndarray | float:
    """``Gamma(m - 1/4) / Gamma(m + 5/4)`` for non-negative integer ``m``."""
    arr = np.asarray(m, dtype=np.int64)
    if np.any(arr < 0):
        raise DomainError("gamma ratio is tabulated for m >= 0 only")
    top = int(arr.max()) if arr.size else 0
    size = 64
    while size <= top:
        size *= 2
    vals = _quarter_ratio_table(size)[arr]
    return float(vals) if np.ndim(m) == 0 else vals


@lru_cache(maxsize=None)
def _odd_harmonic_table(m_max: int) -> np.ndarray:
    """``sum_{l=1}^{m} 2 / (2l - 1)`` for ``m = 0..m_max``."""
    terms = 2.0 / (2.0 * np.arange(1, m_max + 1) - 1.0)
    return np.concatenate([[0.0], np.cumsum(terms)])


def odd_harmonic(m) -> np.ndarray | float:
    arr = np.asarray(m, dtype=np.int64)
    top = int(arr.max()) if arr.size else 0
    size = 64
    while size <= top:
        size *= 2
    vals = _odd_harmonic_table(size)[arr]
    return float(vals) if np.ndim(m) == 0 else vals


def digamma_half_integer(m: int) -> float:
    """``psi(m + 1/2)`` for integer ``m >= 0``."""
    if m < 0:
        raise DomainError("m must be non-negative")
    return -EULER_MASCHERONI - 2.0 * math.log(2.0) + math.fsum(2.0 / (2 * l - 1) for l in range(1, m + 1))


# ---------------------------------------------------------------------------
# closed forms


def closed_form_R(j: int, k: int) -> float:
    """Half-line limit of the quarter power, entry ``(j, k)`` (1-based)."""
    if j < 1 or k < 1:
        raise DomainError("indices are 1-based")
    return (gamma_ratio_quarter(j + k) - gamma_ratio_quarter(abs(j - k))) / (2.0 * math.sqrt(2.0 * math.pi))


def closed_form_S(j: int, k: int) -> float:
    """Half-line limit of the inverse square root, entry ``(j, k)`` (1-based)."""
    if j < 1 or k < 1:
        raise DomainError("indices are 1-based")
    lo = abs(j - k) + 1
    return math.fsum(2.0 / (2 * l - 1) for l in range(lo, j + k + 1)) / math.pi


def _index_grids(n: int):
    j = np.arange(1, n + 1)
    return np.add.outer(j, j), np.abs(np.subtract.outer(j, j))


def r_matrix(n: int) -> np.ndarray:
    plus, minus = _index_grids(n)
    return (gamma_ratio_quarter(plus) - gamma_ratio_quarter(minus)) / (2.0 * math.sqrt(2.0 * math.pi))


def s_matrix(n: int) -> np.ndarray:
    plus, minus = _index_grids(n)
    return (odd_harmonic(plus) - odd_harmonic(minus)) / math.pi


def full_line_half_power(d) -> np.ndarray | float:
    """Toeplitz entries of the full-line square root: ``-1 / (pi (d^2 - 1/4))``."""
    d = np.asarray(d, dtype=float)
    out = -1.0 / (math.pi * (d * d - 0.25))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# quadrature of the limit integrals


def _substitution_power(exponent: float) -> float:
    """Power ``p`` in ``x = t**p`` that makes ``x**exponent dx`` bounded near 0 (1 if already smooth)."""
    if exponent >= 0 and float(exponent).is_integer():
        return 1.0
    return float(max(2, math.ceil(1.0 / (exponent + 1.0))))


def _integrate_01(func, exponent: float, max_freq: float, tol: float) -> np.ndarray:
    """Integrate over ``[0, 1]`` an integrand behaving like ``x**exponent`` at 0."""
    power = _substitution_power(exponent)
    panels = max(8, int(math.ceil(max_freq * power)) + 4)
    if power > 1:
        vals, _ = integrate_substituted(func, 0.0, 1.0, power=power, tol=tol, initial_panels=panels)
    else:
        vals, _ = integrate(func, 0.0, 1.0, tol=tol, initial_panels=panels)
    return vals


def full_line_entries(alpha: float, distances, tol: float = QUAD_TOL) -> np.ndarray:
    """Full-line limit entries at the given non-negative index distances."""
    if alpha <= -0.5:
        raise DomainError("full-line limit needs alpha > -1/2")
    d = np.asarray(distances, dtype=float)
    pref = 4.0**alpha

    def f(x):
        return pref * np.sin(0.5 * np.pi * x) ** (2 * alpha) * np.cos(np.pi * np.outer(d, x))

    return _integrate_01(f, 2 * alpha, d.max(initial=0.0), tol)


def half_line_entries(alpha: float, rows, cols, tol: float = QUAD_TOL) -> np.ndarray:
    """Half-line limit entries for paired 1-based index arrays ``rows``, ``cols``."""
    if alpha < -0.5:
        raise DomainError("half-line limit needs alpha >= -1/2")
    j = np.asarray(rows, dtype=float)
    k = np.asarray(cols, dtype=float)
    pref = 2.0 ** (1 + 2 * alpha)

    def f(x):
        weight = pref * np.sin(0.5 * np.pi * x) ** (2 * alpha)
        return weight * np.sin(np.pi * np.outer(j, x)) * np.sin(np.pi * np.outer(k, x))

    return _integrate_01(f, 2 * alpha + 2, 0.5 * (j.max() + k.max()), tol)


@dataclass(frozen=True, eq=False)
class LimitMatrix:
    lattice: str
    alpha: float
    size: int
    entries: np.ndarray


def limit_matrix(lattice: str, alpha: float, size: int, tol: float = QUAD_TOL) -> LimitMatrix:
    """``size x size`` block of the infinite-volume limit on ``Z`` or ``N``."""
    lat = normalize_lattice(lattice)
    if size < 1:
        raise ValueError("size must be >= 1")
    if lat == "Z":
        col = full_line_entries(alpha, np.arange(size), tol)
        plus, minus = _index_grids(size)
        entries = col[minus]
    else:
        ju, ku = np.triu_indices(size)
        vals = half_line_entries(alpha, ju + 1, ku + 1, tol)
        entries = np.zeros((size, size))
        entries[ju, ku] = vals
        entries[ku, ju] = vals
    return LimitMatrix("full_line" if lat == "Z" else "half_line", float(alpha), size, entries)


# ---------------------------------------------------------------------------
# strong Szego scan


def log_symbol_coefficient(alpha: float, k: int) -> float:
    """Fourier coefficient ``k`` of ``log |2 sin(x/2)|^(2 alpha)``."""
    if k < 0:
        k = -k
    return 0.0 if k == 0 else -alpha / k


def log_symbol_coefficient_quadrature(alpha: float, ks: Sequence[int], tol: float = 1e-12) -> np.ndarray:
    """Same coefficients by direct quadrature (independent check)."""
    kk = np.asarray(ks, dtype=float)

    def f(y):
        x = np.pi * y
        return 2.0 * alpha * np.log(2.0 * np.sin(0.5 * x)) * np.cos(np.outer(kk, x))

    vals, _ = integrate_substituted(f, 0.0, 1.0, power=4.0, tol=tol,
                                    initial_panels=max(8, int(kk.max(initial=0)) + 4))
    return vals


@dataclass
class SzegoReport:
    alpha: float
    sizes: list
    log_dets: list
    partial_sums: list
    g_constant: float
    failures: list = field(default_factory=list)

    @property
    def valid(self) -> list[tuple[int, float, float]]:
        return [(n, ld, ps) for n, ld, ps in zip(self.sizes, self.log_dets, self.partial_sums)
                if ld is not None]

    def strictly_increasing(self) -> bool:
        lds = [ld for _, ld, _ in self.valid]
        return bool(lds) and all(b > a for a, b in zip(lds, lds[1:]))

    def slope(self) -> float:
        """Least-squares slope of log-determinant against the partial sum."""
        rows = self.valid
        if len(rows) < 2:
            return float("nan")
        x = np.array([r[2] for r in rows])
        y = np.array([r[1] for r in rows])
        xc = x - x.mean()
        if not np.any(xc):
            return float("nan")
        return float(xc @ (y - y.mean()) / (xc @ xc))

    def correlation(self) -> float:
        rows = self.valid
        x = np.array([r[2] for r in rows])
        y = np.array([r[1] for r in rows])
        if len(rows) < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
            return float("nan")
        return float(np.corrcoef(x, y)[0, 1])

    def rows(self) -> list[dict]:
        return [{"n": n, "log_det": ld, "partial_sum": ps}
                for n, ld, ps in zip(self.sizes, self.log_dets, self.partial_sums)]


def szego_scan(alpha: float, sizes: Sequence[int], tol: float = QUAD_TOL,
               method: str | None = None) -> SzegoReport:
    """Log-determinants of Toeplitz truncations next to ``alpha^2 H_n``."""
    sizes = [int(n) for n in sizes]
    top = max(sizes)
    col = full_line_entries(alpha, np.arange(top), tol) if alpha != 0 else np.eye(1, top).ravel()
    plus, minus = _index_grids(top)
    big = col[minus]
    coeff2 = np.array([k * log_symbol_coefficient(alpha, k) ** 2 for k in range(1, top + 1)])
    partial = np.cumsum(coeff2)
    log_dets, failures = [], []
    for n in sizes:
        try:
            log_dets.append(linalg.log_det_pos_def(big[:n, :n], method))
        except DomainError as exc:
            log_dets.append(None)
            failures.append({"n": n, "error": str(exc)})
    g_constant = math.exp(log_symbol_coefficient(alpha, 0))
    return SzegoReport(float(alpha), sizes, log_dets, [float(partial[n - 1]) for n in sizes],
                       g_constant, failures)


# ---------------------------------------------------------------------------
# properties of R and S


@dataclass(frozen=True)
class PropertyItem:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class RSReport:
    n: int
    items: list

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    def item(self, name: str) -> PropertyItem:
        for i in self.items:
            if i.name == name:
                return i
        raise KeyError(name)


def _item(name: str, margin: float, detail: str, strict: bool = True) -> PropertyItem:
    ok = margin > 0 if strict else margin >= 0
    return PropertyItem(name, bool(ok), float(margin), detail)


def rs_property_suite(n: int, r: np.ndarray | None = None, s: np.ndarray | None = None) -> RSReport:
    """Check the sign, bound and monotonicity properties of ``R`` and ``S`` up to size ``n``.

    ``r`` and ``s`` default to the closed forms; pass modified copies to
    test that faults are detected. Margins are worst-case slacks (positive
    means satisfied).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    r = r_matrix(n) if r is None else np.asarray(r, dtype=float)[:n, :n]
    s = s_matrix(n) if s is None else np.asarray(s, dtype=float)[:n, :n]
    j = np.arange(1, n + 1)
    off = ~np.eye(n, dtype=bool)
    items = []

    items.append(_item("symmetry", 1e-12 - max(np.abs(r - r.T).max(), np.abs(s - s.T).max()),
                       "R and S symmetric to 1e-12", strict=False))

    m_i = min(np.diag(r).min(), (-r[off]).min(), (2 * math.sqrt(2) - np.abs(r)).min())
    items.append(_item("i", m_i, "R_jj > 0, R_jk < 0 (j != k), |R_jk| <= 2 sqrt 2"))

    sub = r[j[1:] - 1, j[1:] - 2]  # R_{m, m-1}, m = 2..n
    m_ii = float(np.min(sub[:-1] - sub[1:])) if n > 2 else float("inf")
    items.append(_item("ii", m_ii, "R_{m,m-1} strictly decreasing in m"))

    m_iii = min(2.0 * r[: m - 1, m - 1].sum() + r[m - 1, m - 1] for m in range(2, n + 1))
    items.append(_item("iii", m_iii, "2 sum_{k<m} R_km >= -R_mm", strict=False))

    plus, minus = _index_grids(n)
    lower = np.log((plus + 0.5) / (minus + 0.5)) / math.pi
    items.append(_item("iv", min((s - lower).min(), lower.min()),
                       "S_jk > log((j+k+1/2)/(|j-k|+1/2)) / pi > 0"))

    upper = np.where(off, np.log((plus - 0.5) / np.maximum(minus - 0.5, 0.5)) / math.pi, 0.0)
    m_v_off = (upper - s)[off].min()
    m_v_diag = (2 / math.pi + np.log(4 * j - 1) / math.pi - np.diag(s)).min()
    items.append(_item("v", min(m_v_off, m_v_diag),
                       "S_jk < log((j+k-1/2)/(|j-k|-1/2)) / pi, S_jj < 2/pi + log(4j-1)/pi"))

    inc = [np.diff(s[:m, m - 1]).min() for m in range(2, n + 1)]
    items.append(_item("vi", float(min(inc)), "S_jm strictly increasing in j <= m"))
    return RSReport(n, items)


# ---------------------------------------------------------------------------
# explicit half-line lower bound


@dataclass(frozen=True)
class HalflineBound:
    n: int
    floor: float          # (1/pi) R_21^2 log(4n - 3)
    bound: float          # (1/2) log(floor)
    exact_rsr_nn: float   # (R S R)_nn from the closed forms
    vacuous: bool         # bound <= 0, implied by S >= 0 anyway


def ordered_lower_bound_halfline(n: int) -> HalflineBound:
    if n < 2:
        raise ValueError("n must be >= 2")
    r21 = closed_form_R(2, 1)
    floor = r21 * r21 * math.log(4 * n - 3) / math.pi
    bound = 0.5 * math.log(floor) if floor > 0 else float("-inf")
    r = r_matrix(n)
    s = s_matrix(n)
    rsr = float(r[n - 1] @ s @ r[:, n - 1])
    return HalflineBound(n, floor, bound, rsr, vacuous=not bound > 0)


def gershgorin_floor_half(n: int) -> float:
    """Gershgorin lower bound on the spectrum of the n x n full-line square root.

    ``4/pi - (2/pi) sum_{l=1}^{n} 1/(l^2 - 1/4)``; the series telescopes to
    ``4/pi - (4/pi) * n / (n + 1/2)``, which is what is returned.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return 4.0 / math.pi * (1.0 - n / (n + 0.5))
