"""Shared numerical kernels: bracketed root finding, golden-section search,
and Simpson quadrature (fixed and adaptive).

All array-valued routines operate elementwise over numpy arrays so that one
call can process a whole grid of arclength samples at once.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import BracketOverflow

BRACKET_LIMIT = 1e9
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def sublevel_boundary(
    f: Callable[[np.ndarray], np.ndarray],
    shape: tuple[int, ...],
    *,
    tol: float = 1e-12,
    limit: float = BRACKET_LIMIT,
    polish: int = 3,
) -> np.ndarray:
    """Largest x >= 0 with f(x) <= 0, elementwise.

    Requires f(0) <= 0 (up to roundoff) and f eventually positive; the
    sublevel set {x >= 0 : f(x) <= 0} must be an interval, which holds for
    convex coercive profiles.  Doubles an upper bracket until f > 0, bisects
    to ``tol``, then runs a few guarded secant steps so that roots of smooth
    profiles land at machine precision.
    """
    lo = np.zeros(shape)
    flo = np.minimum(np.asarray(f(lo), dtype=float), 0.0)
    hi = np.ones(shape)
    fhi = np.asarray(f(hi), dtype=float)
    inside = fhi <= 0.0
    while np.any(inside):
        if np.any(hi[inside] >= limit):
            raise BracketOverflow(
                f"no sign change below {limit:g}; profile is not coercive"
            )
        lo = np.where(inside, hi, lo)
        flo = np.where(inside, fhi, flo)
        hi = np.where(inside, 2.0 * hi, hi)
        fnew = np.asarray(f(hi), dtype=float)
        fhi = np.where(inside, fnew, fhi)
        inside = fhi <= 0.0

    for _ in range(120):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        fmid = np.asarray(f(mid), dtype=float)
        le = fmid <= 0.0
        lo = np.where(le, mid, lo)
        flo = np.where(le, fmid, flo)
        hi = np.where(le, hi, mid)
        fhi = np.where(le, fhi, fmid)

    for _ in range(polish):
        denom = fhi - flo
        ok = denom > 0.0
        x = np.where(ok, lo - flo * (hi - lo) / np.where(ok, denom, 1.0), lo)
        x = np.clip(x, lo, hi)
        fx = np.asarray(f(x), dtype=float)
        le = fx <= 0.0
        lo = np.where(le, x, lo)
        flo = np.where(le, fx, flo)
        hi = np.where(le, hi, x)
        fhi = np.where(le, fhi, fx)

    return np.where(np.abs(flo) <= np.abs(fhi), lo, hi) + 0.0


def golden_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """Maximize a concave function over [lo, hi]; returns (argmax, max)."""
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def golden_min(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """Minimize a convex function over [lo, hi]; returns (argmin, min)."""
    x, neg = golden_max(lambda p: -f(p), lo, hi, tol=tol)
    return x, -neg


def simpson_segments(
    fa: np.ndarray, fm: np.ndarray, fb: np.ndarray, width: float | np.ndarray
) -> np.ndarray:
    """Three-point Simpson value per segment of the given width."""
    return width * (fa + 4.0 * fm + fb) / 6.0


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    tol: float = 1e-10,
    max_depth: int = 40,
) -> float:
    """Adaptive Simpson integral of a vectorized integrand over [a, b].

    Processes all pending subintervals of one refinement level in a single
    batched evaluation, so integrands backed by elementwise root finding
    stay cheap.
    """
    if a == b:
        return 0.0
    if b < a:
        raise ValueError("integration bounds must satisfy a <= b")
    xa = np.array([a], dtype=float)
    xb = np.array([b], dtype=float)
    fa = np.asarray(f(xa), dtype=float)
    fb = np.asarray(f(xb), dtype=float)
    xm = 0.5 * (xa + xb)
    fm = np.asarray(f(xm), dtype=float)
    s = (xb - xa) * (fa + 4.0 * fm + fb) / 6.0
    tols = np.array([max(tol, 1e-16)])

    total = 0.0
    depth = 0
    while xa.size:
        lm = 0.5 * (xa + xm)
        rm = 0.5 * (xm + xb)
        flm = np.asarray(f(lm), dtype=float)
        frm = np.asarray(f(rm), dtype=float)
        sl = (xm - xa) * (fa + 4.0 * flm + fm) / 6.0
        sr = (xb - xm) * (fm + 4.0 * frm + fb) / 6.0
        err = (sl + sr - s) / 15.0
        done = (np.abs(err) <= tols) | (depth >= max_depth)
        total += float(np.sum((sl + sr + err)[done]))
        keep = ~done
        xa, xb, xm = (
            np.concatenate([xa[keep], xm[keep]]),
            np.concatenate([xm[keep], xb[keep]]),
            np.concatenate([lm[keep], rm[keep]]),
        )
        fa, fb, fm = (
            np.concatenate([fa[keep], fm[keep]]),
            np.concatenate([fm[keep], fb[keep]]),
            np.concatenate([flm[keep], frm[keep]]),
        )
        s = np.concatenate([sl[keep], sr[keep]])
        tols = np.concatenate([tols[keep] / 2.0, tols[keep] / 2.0])
        depth += 1
    return total
