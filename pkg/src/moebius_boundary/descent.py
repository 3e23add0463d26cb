"""Minimax descent in the hyperbolic disk.

The objective is phi(y) = max_j v_j(y) where every term v_j is a
Busemann function of y plus a constant (or minus one), hence 1-Lipschitz,
and moving y a small distance t toward the boundary direction d_j changes
v_j by about -t cos(angle to d_j).  A step is taken along the bisector
of the smallest arc containing the directions of the nearly active terms.
When those directions do not fit in an open half-plane the point is
delta-stationary: for one-sided (convex) objectives this certifies
phi(y) - min phi <= delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .disk import MoebiusTransform
from .errors import ProjectionNotConverged

TWO_PI = 2 * math.pi


@dataclass
class DescentResult:
    point: complex
    value: float
    certified_delta: float  # smallest delta at which stationarity was certified
    iterations: int
    evaluations: int
    history: list = field(default_factory=list, repr=False)


def containing_bisector(angles):
    """Bisector of the smallest arc containing all angles, or None if it spans >= pi."""
    a = np.sort(np.mod(angles, TWO_PI))
    if len(a) == 1:
        return float(a[0])
    gaps = np.diff(np.concatenate([a, [a[0] + TWO_PI]]))
    k = int(np.argmax(gaps))
    if gaps[k] <= math.pi + 1e-12:
        return None
    start = a[(k + 1) % len(a)]
    return float(start + (TWO_PI - gaps[k]) / 2)


def move(y: complex, direction: float, t: float) -> complex:
    """Point at distance t from y in the given direction (measured in the frame of y)."""
    T = MoebiusTransform.to_origin(y)
    return complex(T.inverse().apply(math.tanh(t / 2) * complex(math.cos(direction), math.sin(direction))))


def minimax_descent(
    evaluate,
    start: complex,
    tol: float = 1e-8,
    delta0: float = 0.25,
    step0: float = 0.5,
    max_step: float = 4.0,
    min_step: float = 1e-13,
    max_iter: int = 5000,
    noise: float = 1e-12,
) -> DescentResult:
    """Minimize max_j v_j(y); ``evaluate(y)`` returns (values, unit directions in the frame of y).

    A step counts as a decrease only if it beats ``noise`` (the evaluation
    error of the sampled maximum); otherwise delta shrinks.
    """
    y = complex(start)
    vals, dirs = evaluate(y)
    phi = float(np.max(vals))
    n_eval = 1
    delta, step = delta0, step0
    certified = math.inf
    history = [phi]
    it = 0
    while delta >= tol:
        it += 1
        if it > max_iter:
            raise ProjectionNotConverged(
                "minimax descent did not reach tolerance",
                diagnostics={"point": y, "value": phi, "delta": delta, "certified": certified},
            )
        active = vals >= phi - delta
        psi = containing_bisector(np.angle(dirs[active]))
        if psi is None:
            certified = min(certified, delta)
            delta /= 4
            continue
        t = step
        accepted = False
        while t >= min_step:
            y2 = move(y, psi, t)
            v2, d2 = evaluate(y2)
            n_eval += 1
            p2 = float(np.max(v2))
            if p2 < phi - noise:
                accepted = True
                break
            t /= 2
        if not accepted:
            delta /= 4
            continue
        y, vals, dirs, phi = y2, v2, d2, p2
        history.append(phi)
        step = min(2 * t, max_step)
    return DescentResult(y, phi, certified, it, n_eval, history)


def refine_maxima(fn, params, values, top: int = 3, sign: float = 1.0):
    """Refine the largest local maxima of ``sign * values`` over a sorted periodic grid.

    ``fn`` maps an array of parameters to values; returns refined parameters.
    """
    n = len(params)
    w = sign * values
    loc = np.flatnonzero((w >= np.roll(w, 1)) & (w >= np.roll(w, -1)))
    loc = loc[np.argsort(w[loc])[::-1][:top]]
    out = []
    for k in loc:
        lo = params[k - 1] if k > 0 else params[-1] - TWO_PI
        hi = params[k + 1] if k < n - 1 else params[0] + TWO_PI
        res = minimize_scalar(
            lambda s: -sign * float(fn(np.array([s]))[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-13},
        )
        out.append(res.x if -res.fun >= w[k] else params[k])
    return np.array(out, dtype=float)
