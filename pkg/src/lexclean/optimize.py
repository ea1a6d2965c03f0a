"""Nelder-Mead downhill simplex minimization.

Written against the classic reflect / expand / contract / shrink scheme
(Nelder & Mead 1965) with O'Neill-style restarts: after convergence a fresh
simplex is built around the best vertex and the search continues until a
restart no longer improves the minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    iterations: int
    evaluations: int
    converged: bool
    restarts: int


def _initial_simplex(x0: np.ndarray, step: np.ndarray) -> np.ndarray:
    simplex = np.tile(x0, (len(x0) + 1, 1))
    for i in range(len(x0)):
        simplex[i + 1, i] += step[i]
    return simplex


def _run(f, simplex, fvals, ftol, max_iter, counter):
    n = simplex.shape[1]
    for it in range(1, max_iter + 1):
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if np.isfinite(fvals[-1]) and fvals[-1] - fvals[0] < ftol:
            return simplex, fvals, it - 1, True

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + REFLECT * (centroid - worst)
        fr = counter(xr)
        if fr < fvals[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = counter(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            # outside contraction
            xc = centroid + CONTRACT * (xr - centroid)
            fc = counter(xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = centroid + CONTRACT * (worst - centroid)
            fc = counter(xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
                continue
        best = simplex[0]
        for i in range(1, n + 1):
            simplex[i] = best + SHRINK * (simplex[i] - best)
            fvals[i] = counter(simplex[i])
    order = np.argsort(fvals, kind="stable")
    simplex, fvals = simplex[order], fvals[order]
    converged = bool(np.isfinite(fvals[-1]) and fvals[-1] - fvals[0] < ftol)
    return simplex, fvals, max_iter, converged


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    step: float | Sequence[float] = 1.0,
    ftol: float = 1e-9,
    max_iter: int = 500,
    max_restarts: int = 3,
) -> SimplexResult:
    """Minimize ``f`` from ``x0``.

    Stops when the spread of function values over the simplex falls below
    ``ftol`` or after ``max_iter`` iterations in total. ``f`` may return
    ``inf`` for infeasible points; the starting point must be feasible.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    step = np.broadcast_to(np.asarray(step, dtype=np.float64), x0.shape).copy()
    evals = 0

    def counter(x):
        nonlocal evals
        evals += 1
        val = float(f(x))
        return val if not np.isnan(val) else np.inf

    f0 = counter(x0)
    if not np.isfinite(f0):
        raise ValueError("starting point is infeasible")
    simplex = _initial_simplex(x0, step)
    fvals = np.array([f0] + [counter(x) for x in simplex[1:]])

    total = 0
    restarts = 0
    converged = False
    while True:
        simplex, fvals, used, converged = _run(f, simplex, fvals, ftol, max_iter - total, counter)
        total += used
        best_x, best_f = simplex[0].copy(), fvals[0]
        if not converged or total >= max_iter or restarts >= max_restarts:
            break
        # restart around the best vertex with a smaller simplex
        scale = np.maximum(np.abs(simplex[1:] - best_x).max(axis=0), 1e-3)
        simplex = _initial_simplex(best_x, scale)
        fvals = np.array([best_f] + [counter(x) for x in simplex[1:]])
        restarts += 1
        if fvals.min() >= best_f - ftol:
            # no vertex of the fresh simplex improves; check the far side too
            simplex = _initial_simplex(best_x, -scale)
            fvals = np.array([best_f] + [counter(x) for x in simplex[1:]])
            if fvals.min() >= best_f - ftol:
                break
    return SimplexResult(best_x, float(best_f), total, evals, converged, restarts)
