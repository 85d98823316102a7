"""Telegraph-type random motion with gamma-distributed alternating sojourns."""

from .errors import ConvergenceError, DomainError, QuadratureError
from .law import (
    BoundaryLimit,
    InitialVelocity,
    LawPoint,
    MotionParams,
    SeriesControl,
    SpaceTimePoint,
    atom_probability,
    backward_density,
    boundary_limit,
    density,
    forward_density,
)
from .moments import (
    SymmetricGammaParams,
    erlang_mean_closed_form,
    erlang_parity_expectation,
    mean_conditional,
    parity_expectation,
)
from .simulate import EmpiricalLaw, PathSample, ensemble, sample_gamma, sample_path
from .specfun import log_gamma, reg_lower_gamma, upper_gamma
from .harness import ValidationReport, integrate_density, validate

__all__ = [
    "BoundaryLimit", "ConvergenceError", "DomainError", "EmpiricalLaw", "InitialVelocity", "LawPoint",
    "MotionParams", "PathSample", "QuadratureError", "SeriesControl", "SpaceTimePoint",
    "SymmetricGammaParams", "ValidationReport", "atom_probability", "backward_density", "boundary_limit",
    "density", "ensemble", "erlang_mean_closed_form", "erlang_parity_expectation", "forward_density",
    "integrate_density", "log_gamma", "mean_conditional", "parity_expectation", "reg_lower_gamma",
    "sample_gamma", "sample_path", "upper_gamma", "validate",
]
