"""Exact law of (X_t, V_t) for gamma-distributed alternating sojourns.

The particle starts at the origin and moves at ``+c`` during forward
sojourns (gamma with rate ``lam`` and shape ``alpha``) and at ``-v`` during
backward sojourns (rate ``mu``, shape ``beta``).  At time ``t`` the law has an
atom at ``V_0 * t`` (no reversal yet) and densities ``f`` (currently moving
forward) and ``b`` (currently moving backward) on ``(-v t, c t)``.

Formulas are written for a forward start.  A backward start is handled by
reflecting space, which swaps the two sojourn laws and the two speeds.
"""

import enum
import math
from dataclasses import dataclass
from typing import Literal

from .errors import ConvergenceError, DomainError
from .specfun import reg_gamma_pair, reg_upper_gamma

# Relative distance to an endpoint below which point evaluation is refused.
BOUNDARY_GUARD = 1e-12


class InitialVelocity(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"

    @property
    def sign(self):
        return 1 if self is InitialVelocity.FORWARD else -1

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"initial velocity must be 'forward' or 'backward', got {value!r}") from None


@dataclass(frozen=True)
class MotionParams:
    """Speeds and gamma sojourn parameters (rate, shape) of the motion."""

    c: float
    v: float
    lam: float
    alpha: float
    mu: float
    beta: float

    def __post_init__(self):
        for name in ("c", "v", "lam", "alpha", "mu", "beta"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    def reflected(self):
        """Parameters of the mirrored motion -X_t (roles of the two directions swapped)."""
        return MotionParams(c=self.v, v=self.c, lam=self.mu, alpha=self.beta, mu=self.lam, beta=self.alpha)

    @property
    def symmetric_sojourns(self):
        return self.lam == self.mu and self.alpha == self.beta


@dataclass(frozen=True)
class SpaceTimePoint:
    x: float
    t: float
    c: float
    v: float

    @property
    def x_bar(self):
        """Total time spent moving backward."""
        return (self.c * self.t - self.x) / (self.c + self.v)

    @property
    def x_star(self):
        """Total time spent moving forward."""
        return (self.v * self.t + self.x) / (self.c + self.v)


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-12
    consecutive_small: int = 3
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if self.consecutive_small < 1:
            raise DomainError("consecutive_small must be at least 1")
        if self.max_terms < self.consecutive_small:
            raise DomainError("max_terms must be at least consecutive_small")


DEFAULT_CONTROL = SeriesControl()


@dataclass(frozen=True)
class LawPoint:
    forward_density: float
    backward_density: float
    total_density: float
    truncation_index_f: int
    truncation_index_b: int


@dataclass(frozen=True)
class BoundaryLimit:
    """Closed-form endpoint limit; ``infinite`` marks analytic divergence."""

    value: float
    infinite: bool = False


BoundaryCase = Literal["f_at_minus_vt", "f_at_ct", "b_at_ct", "b_at_minus_vt"]


def _check_time(t):
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f"t must be positive and finite, got {t!r}")


def atom_probability(params, t, v0=InitialVelocity.FORWARD):
    """Probability of no velocity reversal in [0, t], i.e. X_t = V_0 t."""
    _check_time(t)
    if InitialVelocity.parse(v0) is InitialVelocity.FORWARD:
        return reg_upper_gamma(params.alpha, params.lam * t)
    return reg_upper_gamma(params.beta, params.mu * t)


def _sum_series(terms, ctl, label, min_terms=1):
    """Sum an iterator of non-negative terms under the truncation rule.

    The stopping rule is not armed before ``min_terms`` terms, which keeps
    underflowed leading terms from ending the sum early.
    """
    total = 0.0
    small = 0
    n = 0
    for term in terms:
        n += 1
        total += term
        if n >= min_terms and term <= ctl.rel_tol * total:
            small += 1
            if small >= ctl.consecutive_small:
                return total, n
        else:
            small = 0
        if n >= ctl.max_terms:
            break
    raise ConvergenceError(f"{label} series did not converge", total, n)


def _renewal_brackets(shape, arg):
    """Yield P(k*shape, arg) - P((k+1)*shape, arg) for k = 1, 2, ..."""
    k = 1
    p_prev, q_prev = reg_gamma_pair(shape, arg)
    while True:
        p_next, q_next = reg_gamma_pair((k + 1) * shape, arg)
        if p_prev > 0.5:
            yield q_next - q_prev
        else:
            yield p_prev - p_next
        p_prev, q_prev = p_next, q_next
        k += 1


def forward_terms(params, x_bar, x_star):
    """Terms of the forward-density series (without the 1/(c+v) factor)."""
    mu, beta = params.mu, params.beta
    log_mu, log_xb = math.log(mu), math.log(x_bar)
    k = 1
    for bracket in _renewal_brackets(params.alpha, params.lam * x_star):
        kb = k * beta
        weight = math.exp(kb * log_mu + (kb - 1.0) * log_xb - math.lgamma(kb) - mu * x_bar)
        yield weight * bracket
        k += 1


def backward_terms(params, x_bar, x_star):
    """Terms of the backward-density series after the leading term."""
    lam, alpha = params.lam, params.alpha
    log_lam, log_xs = math.log(lam), math.log(x_star)
    k = 1
    for bracket in _renewal_brackets(params.beta, params.mu * x_bar):
        ka = (k + 1) * alpha
        weight = math.exp(ka * log_lam + (ka - 1.0) * log_xs - math.lgamma(ka) - lam * x_star)
        yield weight * bracket
        k += 1


def _forward_from_times(params, x_bar, x_star, ctl):
    min_terms = int(params.mu * x_bar / params.beta) + 1
    total, n = _sum_series(forward_terms(params, x_bar, x_star), ctl, "forward density", min_terms)
    return total / (params.c + params.v), n


def _backward_from_times(params, x_bar, x_star, ctl):
    lam, alpha = params.lam, params.alpha
    lead = math.exp(alpha * math.log(lam) + (alpha - 1.0) * math.log(x_star) - math.lgamma(alpha) - lam * x_star)
    lead *= reg_upper_gamma(params.beta, params.mu * x_bar)
    min_terms = int(lam * x_star / alpha) + 1
    tail, n = _sum_series(backward_terms(params, x_bar, x_star), ctl, "backward density", min_terms)
    return (lead + tail) / (params.c + params.v), n


def _law_from_times(params, x_bar, x_star, ctl):
    """Forward-start law at the point with the given backward/forward times.

    Internal entry that bypasses the endpoint guard; callers that already
    hold the two time coordinates (quadrature) keep full precision near the
    endpoints this way.
    """
    f, nf = _forward_from_times(params, x_bar, x_star, ctl)
    b, nb = _backward_from_times(params, x_bar, x_star, ctl)
    return LawPoint(f, b, f + b, nf, nb)


def _checked_point(params, point):
    _check_time(point.t)
    c, v, t, x = params.c, params.v, point.t, point.x
    if not (-v * t < x < c * t):
        raise DomainError(f"x={x!r} outside the open support ({-v * t!r}, {c * t!r})")
    guard = BOUNDARY_GUARD * (c + v) * t
    if c * t - x < guard or x + v * t < guard:
        raise DomainError(f"x={x!r} is within {guard:.3g} of an endpoint; use boundary_limit there")
    return point.x_bar, point.x_star


def forward_density(params, point, ctl=DEFAULT_CONTROL):
    """f(x, t | c) and its truncation index."""
    x_bar, x_star = _checked_point(params, point)
    return _forward_from_times(params, x_bar, x_star, ctl)


def backward_density(params, point, ctl=DEFAULT_CONTROL):
    """b(x, t | c) and its truncation index."""
    x_bar, x_star = _checked_point(params, point)
    return _backward_from_times(params, x_bar, x_star, ctl)


def density(params, x, t, v0=InitialVelocity.FORWARD, ctl=DEFAULT_CONTROL):
    """Full continuous law ``(f, b, p = f + b)`` at ``(x, t)`` given ``V_0``."""
    if InitialVelocity.parse(v0) is InitialVelocity.FORWARD:
        point = SpaceTimePoint(x, t, params.c, params.v)
        x_bar, x_star = _checked_point(params, point)
        return _law_from_times(params, x_bar, x_star, ctl)
    mirror = density(params.reflected(), -x, t, InitialVelocity.FORWARD, ctl)
    return LawPoint(
        forward_density=mirror.backward_density,
        backward_density=mirror.forward_density,
        total_density=mirror.backward_density + mirror.forward_density,
        truncation_index_f=mirror.truncation_index_b,
        truncation_index_b=mirror.truncation_index_f,
    )


def boundary_limit(params, which: BoundaryCase, t):
    """Limit of f or b at an endpoint of the support, for a forward start."""
    _check_time(t)
    c, v, lam, alpha, mu, beta = params.c, params.v, params.lam, params.alpha, params.mu, params.beta
    if which == "f_at_minus_vt":
        return BoundaryLimit(0.0)
    if which == "f_at_ct":
        if beta < 1:
            return BoundaryLimit(math.inf, infinite=True)
        if beta > 1:
            return BoundaryLimit(0.0)
        p_a, _ = reg_gamma_pair(alpha, lam * t)
        p_2a, _ = reg_gamma_pair(2 * alpha, lam * t)
        return BoundaryLimit(mu / (c + v) * (p_a - p_2a))
    if which == "b_at_ct":
        log_val = alpha * math.log(lam) - lam * t + (alpha - 1) * math.log(t) - math.lgamma(alpha)
        return BoundaryLimit(math.exp(log_val) / (c + v))
    if which == "b_at_minus_vt":
        if alpha < 1:
            return BoundaryLimit(math.inf, infinite=True)
        if alpha > 1:
            return BoundaryLimit(0.0)
        # alpha == 1 so Gamma(alpha) == 1
        return BoundaryLimit(lam * reg_upper_gamma(beta, mu * t) / (c + v))
    raise DomainError(f"unknown boundary case {which!r}")


def boundary_exponent(params, which: BoundaryCase):
    """Leading power of the distance to the endpoint in the approach to the limit.

    Negative means divergence, positive means decay to zero, zero means a
    finite non-zero limit.
    """
    if which == "f_at_minus_vt":
        return params.alpha
    if which == "f_at_ct":
        return params.beta - 1.0
    if which == "b_at_ct":
        return 0.0
    if which == "b_at_minus_vt":
        return params.alpha - 1.0
    raise DomainError(f"unknown boundary case {which!r}")


def probe_point(params, which: BoundaryCase, t, eps):
    """Position ``c t (1 - eps)`` or ``-v t (1 - eps)`` used by limit probes."""
    if which in ("f_at_ct", "b_at_ct"):
        return params.c * t * (1.0 - eps)
    return -params.v * t * (1.0 - eps)


def probe_value(params, which: BoundaryCase, t, eps, ctl=DEFAULT_CONTROL):
    """Evaluate the component named by ``which`` at its probe point."""
    law = density(params, probe_point(params, which, t, eps), t, InitialVelocity.FORWARD, ctl)
    return law.forward_density if which.startswith("f") else law.backward_density
