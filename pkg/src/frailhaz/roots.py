"""Bracketed root finding, vectorised over independent problems.

The method is regula falsi with the Illinois modification, falling back to a
bisection step whenever two consecutive steps failed to halve the bracket.
The bracket is therefore guaranteed to shrink at least geometrically while
the usual case converges superlinearly.
"""
from __future__ import annotations

import numpy as np

from .errors import NoRootError

MAXITER = 200


def find_roots(f, lo, hi, *, ftol=1e-10, xtol=1e-12, maxiter=MAXITER):
    """Solve ``f(x) == 0`` elementwise on ``[lo, hi]``.

    ``f`` maps an array of candidates to an array of residuals of the same
    shape; element ``i`` of the output only depends on element ``i`` of the
    input. Elements without a sign change across the bracket (or with a NaN
    residual at an end point) are returned as NaN.

    Returns
    -------
    x : ndarray
        Roots, NaN where no bracket exists.
    f_lo, f_hi : ndarray
        Residuals at the bracket ends, for diagnostics.
    """
    lo, hi = np.broadcast_arrays(np.atleast_1d(np.asarray(lo, dtype=float)),
                                 np.atleast_1d(np.asarray(hi, dtype=float)))
    a = lo.copy()
    b = hi.copy()
    fa = np.asarray(f(a), dtype=float).copy()
    fb = np.asarray(f(b), dtype=float).copy()
    f_lo, f_hi = fa.copy(), fb.copy()

    x = np.full(a.shape, np.nan)
    at_a = fa == 0.0
    at_b = fb == 0.0
    x[at_a] = a[at_a]
    x[at_b & ~at_a] = b[at_b & ~at_a]
    done = at_a | at_b | ~(np.sign(fa) * np.sign(fb) < 0.0)

    width2 = np.abs(b - a) * 2.0
    width1 = np.abs(b - a) * 2.0
    for _ in range(maxiter):
        if done.all():
            break
        with np.errstate(invalid="ignore", divide="ignore"):
            c = (a * fb - b * fa) / (fb - fa)
        mid = 0.5 * (a + b)
        width = np.abs(b - a)
        inside = (c > np.minimum(a, b)) & (c < np.maximum(a, b))
        c = np.where(inside & (width <= 0.5 * width2), c, mid)
        c = np.where(done, b, c)
        fc = np.asarray(f(c), dtype=float)

        hit = ~done & ((np.abs(fc) < ftol) | (width < xtol))
        x[hit] = c[hit]
        done = done | hit

        flip = fc * fb < 0.0
        a = np.where(flip, b, a)
        fa = np.where(flip, fb, 0.5 * fa)
        b, fb = c, fc
        width2, width1 = width1, width
    # bracket collapsed without meeting ftol: report the last iterate
    leftover = ~done & np.isnan(x) & (np.sign(f_lo) * np.sign(f_hi) < 0.0)
    x[leftover] = b[leftover]
    return x, f_lo, f_hi


def find_root(f, lo, hi, *, ftol=1e-10, xtol=1e-12, maxiter=MAXITER, what="root"):
    """Scalar wrapper around :func:`find_roots` that raises on failure."""
    x, f_lo, f_hi = find_roots(
        lambda v: f(v), np.array([lo]), np.array([hi]), ftol=ftol, xtol=xtol, maxiter=maxiter)
    if np.isnan(x[0]):
        raise NoRootError(
            f"no sign change for {what} on [{lo:g}, {hi:g}]: "
            f"residual {f_lo[0]:.6g} at lower end, {f_hi[0]:.6g} at upper end",
            f_lo=float(f_lo[0]), f_hi=float(f_hi[0]))
    return float(x[0])
