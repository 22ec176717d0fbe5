"""Scalar numerical kernels: adaptive Simpson quadrature, bisection, golden
section search and a grid-then-refine maximizer.

Everything here works on plain Python floats. The solvers call these in tight
loops with cheap scalar integrands, where numpy's per-call overhead dominates.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


class NumericError(RuntimeError):
    """A numerical routine could not produce a trustworthy answer."""


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-9,
    max_depth: int = 50,
) -> float:
    """Integrate ``f`` over ``[a, b]`` with adaptive Simpson's rule.

    Uses the usual Richardson-corrected acceptance test
    ``|S_left + S_right - S_whole| <= 15 * tol`` with the tolerance halved on
    each bisection. Subintervals that reach ``max_depth`` are accepted as they
    stand; at that depth their width is below ``(b - a) * 2**-50``.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
    return sign * total


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Root of ``f`` on ``[lo, hi]`` where ``f(lo)`` and ``f(hi)`` differ in sign.

    Returns the midpoint of the final bracket.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NumericError(f"root not bracketed on [{lo}, {hi}]: f = ({flo}, {fhi})")
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_last_true(
    pred: Callable[[float], bool], lo: float, hi: float, xtol: float = 1e-12
) -> float:
    """Boundary of a predicate that is true on the left and false on the right.

    ``pred(lo)`` must be true and ``pred(hi)`` false; the returned point is the
    left end of the final bracket, so ``pred`` holds there.
    """
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def bisect_first_true(
    pred: Callable[[float], bool], lo: float, hi: float, xtol: float = 1e-12
) -> float:
    """Mirror of :func:`bisect_last_true`: false on the left, true on the right.

    Returns the right end of the final bracket, where ``pred`` holds.
    """
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def largest_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    steps: int = 1000,
    xtol: float = 1e-10,
) -> float:
    """Rightmost zero of ``f`` on ``[lo, hi]``.

    Scans downward from ``hi`` in ``steps`` equal steps to bracket the last
    sign change, then bisects. Points where ``f`` vanishes exactly count as
    roots, so a flat zero set resolves to its right end.
    """
    if hi < lo:
        raise NumericError(f"empty interval [{lo}, {hi}]")
    f_right = f(hi)
    if f_right == 0.0:
        return hi
    h = (hi - lo) / steps
    right = hi
    for k in range(steps - 1, -1, -1):
        left = lo + k * h if k else lo
        f_left = f(left)
        if f_left == 0.0:
            # walk right inside the zero set so the answer is its right end
            return bisect_last_true(lambda x: f(x) == 0.0, left, right, xtol)
        if (f_left > 0) != (f_right > 0):
            return bisect_root(f, left, right, xtol)
        right, f_right = left, f_left
    raise NumericError(f"no sign change of f on [{lo}, {hi}]")


def golden_section_max(
    f: Callable[[float], float], a: float, b: float, xtol: float = 1e-10
) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``.

    The endpoints are also evaluated and win ties, which keeps the search
    honest when the maximum sits on the boundary of the bracket.
    """
    lo, hi = a, b
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > xtol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    candidates = [(a, f(a)), (c, fc), (d, fd), (b, f(b))]
    best_x, best_f = candidates[0]
    for x, fx in candidates[1:]:
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def grid_refine_max(
    f: Callable[[float], float],
    grid: Sequence[float] | np.ndarray,
    values: Sequence[float] | np.ndarray | None = None,
    xtol: float = 1e-10,
) -> tuple[float, float]:
    """Maximize ``f`` over a grid, then polish with golden section.

    The refinement runs on the two cells adjacent to the best grid point and
    is kept only if it strictly improves on the grid value, so the smallest
    maximizing grid point is what comes back on ties.
    """
    grid = np.asarray(grid, dtype=float)
    if values is None:
        values = np.array([f(float(x)) for x in grid])
    values = np.asarray(values, dtype=float)
    i = int(np.argmax(values))
    best_x, best_f = float(grid[i]), float(values[i])
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    if hi > lo:
        x, fx = golden_section_max(f, lo, hi, xtol)
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f
