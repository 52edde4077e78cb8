"""Adaptive composite Gauss-Legendre quadrature for batches of integrands.

All components of a vector-valued integrand share one panel partition; a
panel is split while any component's two-level error estimate exceeds its
share of the tolerance. Integrable endpoint singularities at the left end
are tamed by the substitution ``x = a + (b - a) t**p``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import IntegrationError


@lru_cache(maxsize=None)
def _nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_sums(func, left: np.ndarray, right: np.ndarray, order: int) -> np.ndarray:
    """Gauss-Legendre sums on each panel; returns shape (components, panels)."""
    x, w = _nodes(order)
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(func(pts), dtype=float)
    vals = vals.reshape(-1, left.size, order)
    return np.einsum("cpk,k->cp", vals, w) * half[None, :]


def integrate(func, a: float, b: float, tol: float = 1e-10, order: int = 20,
              initial_panels: int = 8, max_panels: int = 1 << 15) -> tuple[np.ndarray, float]:
    """Integrate ``func`` over ``[a, b]``.

    ``func`` maps a 1-d array of abscissae to an array of shape
    ``(len(x),)`` or ``(components, len(x))``. Returns the integrals (one
    per component) and the final absolute error estimate.
    """
    edges = np.linspace(a, b, int(initial_panels) + 1)
    todo_l, todo_r = edges[:-1], edges[1:]
    total = None
    err_total = 0.0
    length = abs(b - a)
    used = todo_l.size
    while todo_l.size:
        mid = 0.5 * (todo_l + todo_r)
        coarse = _panel_sums(func, todo_l, todo_r, order)
        fine = _panel_sums(func, todo_l, mid, order) + _panel_sums(func, mid, todo_r, order)
        if total is None:
            total = np.zeros(coarse.shape[0])
        err = np.max(np.abs(fine - coarse), axis=0)
        allowed = tol * (todo_r - todo_l) / length
        ok = err <= allowed
        total += fine[:, ok].sum(axis=1)
        err_total += float(err[ok].sum())
        todo_l, todo_r, mid = todo_l[~ok], todo_r[~ok], mid[~ok]
        if todo_l.size:
            used += todo_l.size
            if used > max_panels:
                partial = total + fine[:, ~ok].sum(axis=1)
                raise IntegrationError(
                    f"adaptive quadrature exceeded {max_panels} panels",
                    estimate=partial,
                    error=err_total + float(err[~ok].sum()),
                )
            todo_l, todo_r = np.concatenate([todo_l, mid]), np.concatenate([mid, todo_r])
    return total, err_total


def integrate_substituted(func, a: float, b: float, power: float = 2.0, **kw) -> tuple[np.ndarray, float]:
    """``integrate`` after ``x = a + (b - a) t**power``, taming ``x = a`` singularities."""
    scale = b - a

    def g(t):
        x = a + scale * t**power
        jac = scale * power * t ** (power - 1.0)
        return np.asarray(func(x), dtype=float) * jac

    return integrate(g, 0.0, 1.0, **kw)
