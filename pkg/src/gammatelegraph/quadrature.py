"""Tanh-sinh (double-exponential) quadrature on a finite interval.

The integrand is called as ``func(x, dist_a, dist_b)`` where ``dist_a = x - a``
and ``dist_b = b - x`` are computed from the transform itself rather than by
subtraction, so integrands with power-law singularities at the endpoints can
be evaluated at nodes arbitrarily close to them.
"""

import math
from dataclasses import dataclass

from .errors import QuadratureError

_HALF_PI = math.pi / 2
# Nodes run out to |t| = 6.5, where the distance to the endpoint is ~1e-300.
_T_MAX = 6.5


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int
    level: int


def _node(t):
    """Abscissa offset and weight at parameter t, plus distance to the near end."""
    s = _HALF_PI * math.sinh(abs(t))
    ch = math.cosh(s)
    # 1 - tanh(s) without cancellation
    complement = math.exp(-s) / ch
    weight = _HALF_PI * math.cosh(t) / (ch * ch)
    return complement, weight


def tanh_sinh(func, a, b, tol=1e-10, max_level=10, min_level=3):
    """Integrate ``func`` over ``[a, b]``; ``tol`` is an absolute error target.

    The step is halved level by level; the error estimate is the change
    between the last two levels.
    """
    if not b > a:
        raise ValueError(f"need b > a, got a={a!r}, b={b!r}")
    half = (b - a) / 2
    mid = a + half
    evaluations = 0

    def sample(t):
        nonlocal evaluations
        if t == 0:
            evaluations += 1
            return func(mid, half, half) * _HALF_PI
        complement, weight = _node(t)
        if weight == 0.0 or complement == 0.0:
            return 0.0
        d = half * complement
        if d == 0.0:
            return 0.0
        total = 0.0
        # right node sits d from b, left node d from a
        evaluations += 2
        total += func(b - d, 2 * half - d, d) * weight
        total += func(a + d, d, 2 * half - d) * weight
        return total

    def tail_sum(h, start, step, scale):
        total = 0.0
        k = start
        small = 0
        while k * h <= _T_MAX:
            term = sample(k * h)
            total += term
            if abs(term) < 1e-18 * max(abs(total), scale, 1e-300):
                small += 1
                if small >= 2:
                    break
            else:
                small = 0
            k += step
        return total

    h = 1.0
    raw = sample(0.0)
    raw += tail_sum(h, 1, 1, abs(raw))
    estimate = raw * h * half
    error = math.inf
    for level in range(1, max_level + 1):
        h /= 2
        raw += tail_sum(h, 1, 2, abs(raw))
        new = raw * h * half
        error = abs(new - estimate)
        estimate = new
        if level >= min_level and error <= tol:
            return QuadResult(estimate, error, evaluations, level)
    raise QuadratureError("tanh-sinh quadrature did not converge", estimate, error)
