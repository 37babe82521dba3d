"""Bounded one-dimensional search: log-grid scan + golden section, and bisection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerOptions:
    gamma_max: float = 1e6
    coarse_points: int = 200
    refine_tol: float = 1e-10
    value_tol: float = 1e-12
    max_iter: int = 500

    def __post_init__(self):
        if not self.gamma_max > 1.0:
            raise DomainError("gamma_max", f"must exceed 1, got {self.gamma_max}")
        if self.coarse_points < 3:
            raise DomainError("coarse_points", f"need at least 3, got {self.coarse_points}")


@dataclass(frozen=True)
class ScalarMax:
    value: float
    argmax: float
    at_upper_boundary: bool
    evaluations: int

    def __iter__(self):
        # unpacks as (value, argmax)
        yield self.value
        yield self.argmax


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float, max_iter: int = 500):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x), n_evals)``."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    n = 2
    while hi - lo > tol and n < max_iter:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
        n += 1
    return (x1, f1, n) if f1 >= f2 else (x2, f2, n)


def maximize_log_grid(f: Callable, opts: OptimizerOptions, vectorized: bool = True) -> ScalarMax:
    """Maximize ``f`` over ``[1, opts.gamma_max]``.

    A log-spaced scan locates the best grid point; golden-section search then
    refines inside the two neighbouring cells.  Values within
    ``opts.value_tol`` of each other count as ties and the smallest argument
    wins, so a flat ``f`` returns ``1``.  The result is never worse than the
    best grid value.
    """
    grid = np.geomspace(1.0, opts.gamma_max, opts.coarse_points)
    grid[0], grid[-1] = 1.0, opts.gamma_max
    vals = np.asarray(f(grid) if vectorized else [f(x) for x in grid], dtype=float)
    if np.any(np.isnan(vals)):
        raise ArithmeticError("objective returned NaN on the coarse grid")
    best = float(np.max(vals))
    i = int(np.argmax(vals >= best - opts.value_tol))
    x_best, v_best = float(grid[i]), float(vals[i])
    n_eval = len(grid)

    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    scalar = (lambda x: float(f(np.array([x]))[0])) if vectorized else f
    x_ref, v_ref, n = golden_section_max(scalar, float(lo), float(hi), opts.refine_tol, opts.max_iter)
    n_eval += n
    if v_ref > v_best + opts.value_tol:
        x_best, v_best = x_ref, v_ref
    at_boundary = x_best >= opts.gamma_max * (1.0 - 1e-6)
    return ScalarMax(v_best, x_best, at_boundary, n_eval)


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)


def bisect_sign(f: Callable[[float], float], lo: float, hi: float, tol: float, f_lo=None, f_hi=None) -> Bracket:
    """Shrink ``[lo, hi]`` around a sign change of ``f`` until narrower than ``tol``."""
    f_lo = f(lo) if f_lo is None else f_lo
    f_hi = f(hi) if f_hi is None else f_hi
    if (f_lo > 0) == (f_hi > 0):
        raise DomainError("bracket", f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return Bracket(lo, hi, f_lo, f_hi)
