"""Conditional mean of X_t when both sojourn laws are the same gamma law."""

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError
from .law import DEFAULT_CONTROL, InitialVelocity, MotionParams
from .specfun import reg_lower_gamma


@dataclass(frozen=True)
class SymmetricGammaParams:
    """Speeds plus one (rate, shape) pair shared by forward and backward sojourns."""

    c: float
    v: float
    lam: float
    alpha: float

    def __post_init__(self):
        for name in ("c", "v", "lam", "alpha"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    def motion(self):
        return MotionParams(self.c, self.v, self.lam, self.alpha, self.lam, self.alpha)

    @classmethod
    def from_motion(cls, params):
        if not params.symmetric_sojourns:
            raise DomainError(
                "the mean formula needs identically distributed sojourns (lambda == mu and alpha == beta)"
            )
        return cls(params.c, params.v, params.lam, params.alpha)


def _sum_alternating(term, ctl, label, min_blocks=1):
    """Sum sum_{k>=1} (-1)^k term(k) in blocks (k odd, k even).

    Stops once ``consecutive_small`` successive blocks are below
    ``rel_tol`` times the running magnitude.
    """
    total = 0.0
    small = 0
    k = 1
    for block_no in range(1, ctl.max_terms // 2 + 1):
        block = term(k + 1) - term(k)
        k += 2
        total += block
        if block_no >= min_blocks and abs(block) <= ctl.rel_tol * abs(total):
            small += 1
            if small >= ctl.consecutive_small:
                return total
        else:
            small = 0
    raise ConvergenceError(f"{label} series did not converge", total, k - 1)


def _check_time(t):
    if not (t >= 0 and math.isfinite(t)):
        raise DomainError(f"time must be non-negative and finite, got {t!r}")


def mean_conditional(params, t, v0=InitialVelocity.FORWARD, ctl=DEFAULT_CONTROL):
    """E[X_t | V_0] from the alternating gamma series."""
    _check_time(t)
    v0 = InitialVelocity.parse(v0)
    start_velocity = params.c if v0 is InitialVelocity.FORWARD else -params.v
    if t == 0:
        return 0.0
    lam, alpha = params.lam, params.alpha
    u = lam * t

    def term(k):
        # lam * integral_0^t P(k alpha, lam s) ds
        a = k * alpha
        return u * reg_lower_gamma(a, u) - a * reg_lower_gamma(a + 1.0, u)

    # blocks only start to shrink once k * alpha passes lam * t
    min_blocks = int(u / (2 * alpha)) + 1
    series = _sum_alternating(term, ctl, "mean", min_blocks)
    return start_velocity * t + (params.c + params.v) / lam * v0.sign * series


def parity_expectation(params, s, ctl=DEFAULT_CONTROL):
    """E[(-1)^{N_s}] = 1 + 2 sum_k (-1)^k P(k alpha, lam s)."""
    _check_time(s)
    if s == 0:
        return 1.0
    u = params.lam * s
    min_blocks = int(u / (2 * params.alpha)) + 1
    series = _sum_alternating(lambda k: reg_lower_gamma(k * params.alpha, u), ctl, "parity", min_blocks)
    return 1.0 + 2.0 * series


def erlang_parity_expectation(n, lam, s):
    """E[(-1)^{N_s}] for Erlang(n, lam) sojourns via the Poisson block sum.

    A reversal happens every n Poisson(lam) events, so N_s is odd exactly
    when the Poisson count falls in a block [2nk + n, 2nk + 2n - 1].
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not lam > 0:
        raise DomainError(f"lam must be positive, got {lam!r}")
    _check_time(s)
    n = int(n)
    x = lam * s
    if x == 0:
        return 1.0
    log_x = math.log(x)
    odd_mass = 0.0
    k = 0
    while True:
        lo = 2 * n * k + n
        block = sum(math.exp(j * log_x - x - math.lgamma(j + 1)) for j in range(lo, lo + n))
        odd_mass += block
        if lo > x and block < 1e-15 * odd_mass:
            break
        if lo > x + 50.0 * math.sqrt(x) + 1000.0 and block == 0.0:
            break
        k += 1
    return 1.0 - 2.0 * odd_mass


def erlang_mean_closed_form(n, params, t, v0=InitialVelocity.FORWARD):
    """E[X_t | V_0] for Erlang(n, lam) sojourns, n in 1..4 (``params.alpha`` is ignored)."""
    if n not in (1, 2, 3, 4):
        raise DomainError(f"closed form available for n in 1..4, got {n!r}")
    _check_time(t)
    v0 = InitialVelocity.parse(v0)
    c, v, lam = params.c, params.v, params.lam
    drift = (c - v) * t / 2
    sgn = v0.sign
    lt = lam * t
    if n == 1:
        return drift + (c + v) / (4 * lam) * sgn * -math.expm1(-2 * lt)
    scale = (c + v) / (2 * lam) * sgn
    if n == 2:
        return drift + scale * (1 - math.exp(-lt) * math.cos(lt))
    if n == 3:
        bracket = -math.expm1(-2 * lt) / 6 + 4 / 3 * (1 - math.exp(-lt / 2) * math.cos(math.sqrt(3) / 2 * lt))
        return drift + scale * bracket
    r = math.sqrt(2) / 2
    osc = math.cos(r * lt)
    bracket = (1 - (1 + r) * math.exp(-lt * (1 - r)) * osc) + (1 - (1 - r) * math.exp(-lt * (1 + r)) * osc)
    return drift + scale * bracket
