"""Adaptive Simpson quadrature with an explicit error estimate.

Classic bisection scheme: an interval is accepted when the two-half Simpson
sum agrees with the one-panel sum to 15x the local tolerance, and the
Richardson term (difference / 15) is both added as a correction and summed
into the reported error estimate.  Integrable endpoint singularities are the
caller's business (the two-node module clips its integration variable away
from the boundary before calling in).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import math

from .errors import QuadratureError


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float


def _eval(f: Callable[[float], float], x: float) -> float:
    y = float(f(x))
    if not math.isfinite(y):
        raise QuadratureError(f"integrand not finite at x={x!r}")
    return y


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 50,
) -> QuadratureResult:
    """Integrate f over [a, b] to absolute tolerance ``tol``.

    Raises QuadratureError on a non-finite integrand value or when the
    subdivision depth limit is reached without the local error dropping,
    which is how a divergent integrand announces itself.
    """
    if a == b:
        return QuadratureResult(0.0, 0.0)
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0

    fa, fb = _eval(f, a), _eval(f, b)
    m = 0.5 * (a + b)
    fm = _eval(f, m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    err = 0.0
    min_width = max(abs(a), abs(b), 1.0) * 1e-15
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a0, b0, f0, f1, f2, s0, tol0, depth = stack.pop()
        m0 = 0.5 * (a0 + b0)
        lm, rm = 0.5 * (a0 + m0), 0.5 * (m0 + b0)
        flm, frm = _eval(f, lm), _eval(f, rm)
        left = (m0 - a0) / 6.0 * (f0 + 4.0 * flm + f1)
        right = (b0 - m0) / 6.0 * (f1 + 4.0 * frm + f2)
        delta = left + right - s0
        if abs(delta) <= 15.0 * tol0 or (b0 - a0) <= min_width:
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
        elif depth >= max_depth:
            raise QuadratureError(
                f"no convergence on [{a0!r}, {b0!r}] after depth {max_depth}; "
                "integrand looks divergent"
            )
        else:
            half = 0.5 * tol0
            stack.append((a0, m0, f0, flm, f1, left, half, depth + 1))
            stack.append((m0, b0, f1, frm, f2, right, half, depth + 1))
    return QuadratureResult(sign * total, err)


def composite_simpson(values, dx: float) -> float:
    """Plain composite Simpson on equispaced samples (odd count required)."""
    n = len(values)
    if n < 3 or n % 2 == 0:
        raise QuadratureError(f"composite Simpson needs an odd sample count >= 3, got {n}")
    acc = values[0] + values[-1] + 4.0 * sum(values[1:-1:2]) + 2.0 * sum(values[2:-2:2])
    return acc * dx / 3.0
