"""Cross-checks between the analytic law, the moments and the simulator."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, QuadratureError
from .law import (
    DEFAULT_CONTROL,
    InitialVelocity,
    _law_from_times,
    atom_probability,
    boundary_exponent,
    boundary_limit,
    probe_value,
)
from .moments import SymmetricGammaParams, mean_conditional
from .quadrature import tanh_sinh
from .simulate import ensemble

NORMALIZATION_TOL = 1e-6
ATOM_Z_MAX = 4.0
BIN_SIGMA = 3.0
BIN_COVERAGE_MIN = 0.95
MEAN_Z_MAX = 4.0
PROBE_EPS = (1e-3, 1e-4, 1e-5)
LIMIT_REL_TOL = 1e-3
SLOPE_TOL = 0.1
BOUNDARY_CASES = ("f_at_minus_vt", "f_at_ct", "b_at_ct", "b_at_minus_vt")


def _forward_frame(params, v0):
    """Parameters of the forward-start motion equivalent to ``v0`` (x mirrored if backward)."""
    if InitialVelocity.parse(v0) is InitialVelocity.FORWARD:
        return params, False
    return params.reflected(), True


def _component_integrand(params, ctl, component, left_gap=0.0, right_gap=0.0):
    """Integrand in the forward frame taking endpoint distances from the quadrature."""
    speed = params.c + params.v

    def func(x, da, db):
        law = _law_from_times(params, (right_gap + db) / speed, (left_gap + da) / speed, ctl)
        if component == "f":
            return law.forward_density
        if component == "b":
            return law.backward_density
        return law.total_density

    return func


def integrate_component(params, t, v0=InitialVelocity.FORWARD, component="p", tol=1e-10, ctl=DEFAULT_CONTROL):
    """Integral over the support of f, b or p (``component`` in 'f', 'b', 'p') given ``v0``."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    frame, mirrored = _forward_frame(params, v0)
    if mirrored and component != "p":
        component = "b" if component == "f" else "f"
    func = _component_integrand(frame, ctl, component)
    return tanh_sinh(func, -frame.v * t, frame.c * t, tol=tol).value


def integrate_density(params, t, v0=InitialVelocity.FORWARD, tol=1e-10, ctl=DEFAULT_CONTROL):
    """Integral of p(x, t | v0) over (-v t, c t)."""
    return integrate_component(params, t, v0, "p", tol, ctl)


def bin_masses(params, t, v0, edges, tol=1e-11, ctl=DEFAULT_CONTROL):
    """Analytic mass of p in each histogram bin (bin-averaged density times width)."""
    edges = np.asarray(edges, dtype=float)
    frame, mirrored = _forward_frame(params, v0)
    lo, hi = -frame.v * t, frame.c * t
    if mirrored:
        edges = -edges[::-1]
    out = np.empty(edges.size - 1)
    for i in range(edges.size - 1):
        a, b = edges[i], edges[i + 1]
        func = _component_integrand(frame, ctl, "p", left_gap=a - lo, right_gap=hi - b)
        out[i] = tanh_sinh(func, a, b, tol=tol).value
    return out[::-1] if mirrored else out


@dataclass
class Check:
    label: str
    status: str  # "pass", "fail", "skip" or "info"
    observed: float = math.nan
    expected: float = math.nan
    detail: str = ""


@dataclass
class ValidationReport:
    normalization_defect: float = math.nan
    l1_histogram_distance: float = math.nan
    bins_within_3sigma: float = math.nan
    mean_z_score: float = math.nan
    checks: list = field(default_factory=list)
    limit_checks: list = field(default_factory=list)

    @property
    def all_checks(self):
        return self.checks + self.limit_checks

    @property
    def passed(self):
        return all(c.status != "fail" for c in self.all_checks)

    def to_key_value(self):
        lines = [
            f"normalization_defect={self.normalization_defect:.6e}",
            f"l1_histogram_distance={self.l1_histogram_distance:.6e}",
            f"bins_within_3sigma={self.bins_within_3sigma:.6f}",
            f"mean_z_score={self.mean_z_score:.6f}",
        ]
        for c in self.all_checks:
            lines.append(f"check.{c.label}={c.status}")
            lines.append(f"check.{c.label}.observed={c.observed:.10g}")
            lines.append(f"check.{c.label}.expected={c.expected:.10g}")
            if c.detail:
                lines.append(f"check.{c.label}.detail={c.detail}")
        lines.append(f"overall={'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"

    def to_text(self):
        rows = [f"{'check':<28} {'status':<6} {'observed':>16} {'expected':>16}"]
        for c in self.all_checks:
            rows.append(f"{c.label:<28} {c.status:<6} {c.observed:>16.8g} {c.expected:>16.8g}  {c.detail}")
        rows.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(rows) + "\n"


def probe_limit(params, which, t, ctl=DEFAULT_CONTROL):
    """Compare f or b near an endpoint against its closed-form limit.

    Finite limits pass when the value at the smallest eps is within
    ``LIMIT_REL_TOL``, or when the error keeps shrinking by at least half per
    decade of eps.  Zero and infinite limits pass when the sequence is
    monotone in the right direction and its log-slope over the last decade
    matches the leading power of the distance to the endpoint.
    """
    limit = boundary_limit(params, which, t)
    values = [probe_value(params, which, t, eps, ctl) for eps in PROBE_EPS]
    exponent = boundary_exponent(params, which)
    if limit.infinite or limit.value == 0.0:
        slope = math.log10(values[-2] / values[-1]) / math.log10(PROBE_EPS[-2] / PROBE_EPS[-1]) if values[-1] > 0 else math.nan
        if limit.infinite:
            monotone = values[0] < values[1] < values[2]
        else:
            monotone = values[0] > values[1] > values[2]
        ok = monotone and abs(slope - exponent) <= SLOPE_TOL
        kind = "diverges" if limit.infinite else "vanishes"
        detail = f"{kind}; growth x{values[-1] / values[0]:.4g} over eps 1e-3..1e-5, slope {slope:.4f} vs {exponent:.4f}"
        return Check(f"limit.{which}", "pass" if ok else "fail", values[-1], limit.value, detail)
    errors = [abs(val / limit.value - 1.0) for val in values]
    contracting = all(e1 <= 0.5 * e0 for e0, e1 in zip(errors, errors[1:]))
    ok = errors[-1] <= LIMIT_REL_TOL or (contracting and errors[-1] <= 10 * LIMIT_REL_TOL)
    detail = "rel errors " + ", ".join(f"{e:.2e}" for e in errors)
    return Check(f"limit.{which}", "pass" if ok else "fail", values[-1], limit.value, detail)


def validate(params, t, v0=InitialVelocity.FORWARD, n_samples=100_000, seed=0, n_bins=100, ctl=DEFAULT_CONTROL, workers=1):
    """Run every cross-check and collect the outcome; failures are recorded, not raised."""
    v0 = InitialVelocity.parse(v0)
    report = ValidationReport()
    atom = atom_probability(params, t, v0)

    try:
        integral = integrate_density(params, t, v0, tol=1e-10, ctl=ctl)
        report.normalization_defect = abs(1.0 - atom - integral)
        ok = report.normalization_defect <= NORMALIZATION_TOL
        report.checks.append(Check("normalization", "pass" if ok else "fail", atom + integral, 1.0))
    except (ConvergenceError, QuadratureError) as exc:
        report.checks.append(Check("normalization", "fail", detail=str(exc)))

    if n_samples > 0:
        _simulation_checks(report, params, t, v0, n_samples, seed, n_bins, atom, ctl, workers)
    else:
        for label in ("atom_frequency", "bin_coverage", "l1_histogram", "mean"):
            report.checks.append(Check(label, "skip", detail="no samples"))

    for which in BOUNDARY_CASES:
        try:
            report.limit_checks.append(probe_limit(params, which, t, ctl))
        except (ConvergenceError, DomainError) as exc:
            report.limit_checks.append(Check(f"limit.{which}", "fail", detail=str(exc)))
    return report


def _simulation_checks(report, params, t, v0, n, seed, n_bins, atom, ctl, workers):
    emp = ensemble(params, t, v0, n, n_bins, seed, workers=workers)
    se = math.sqrt(atom * (1 - atom) / n)
    z = (emp.atom_frequency - atom) / se if se > 0 else 0.0
    report.checks.append(Check("atom_frequency", "pass" if abs(z) <= ATOM_Z_MAX else "fail", emp.atom_frequency, atom, f"z={z:.3f}"))

    try:
        expected = bin_masses(params, t, v0, emp.bin_edges, ctl=ctl)
    except (ConvergenceError, QuadratureError) as exc:
        report.checks.append(Check("bin_coverage", "fail", detail=str(exc)))
    else:
        sd = np.sqrt(n * expected * (1 - expected))
        dev = np.abs(emp.bin_counts - n * expected)
        within = np.where(sd > 0, dev <= BIN_SIGMA * sd, dev == 0)
        report.bins_within_3sigma = float(within.mean())
        report.l1_histogram_distance = float(np.abs(emp.bin_masses - expected).sum())
        ok = report.bins_within_3sigma >= BIN_COVERAGE_MIN
        report.checks.append(Check("bin_coverage", "pass" if ok else "fail", report.bins_within_3sigma, BIN_COVERAGE_MIN))
        report.checks.append(Check("l1_histogram", "info", report.l1_histogram_distance, 0.0))

    if params.symmetric_sojourns and n > 1:
        try:
            exact = mean_conditional(SymmetricGammaParams.from_motion(params), t, v0, ctl)
        except ConvergenceError as exc:
            report.checks.append(Check("mean", "fail", detail=str(exc)))
            return
        report.mean_z_score = (emp.position_mean - exact) / (emp.position_std / math.sqrt(n))
        ok = abs(report.mean_z_score) <= MEAN_Z_MAX
        report.checks.append(Check("mean", "pass" if ok else "fail", emp.position_mean, exact, f"z={report.mean_z_score:.3f}"))
    else:
        report.checks.append(Check("mean", "skip", detail="sojourn laws differ"))
