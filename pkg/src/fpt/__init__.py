"""First-passage times of one-dimensional diffusions with piecewise-linear drift."""
from .bounds import anderson_crossing, crossing_diff_bound, density_upper_bound
from .config import RunConfig, load_config, parse_config
from .drift import (
    DriftFunction,
    PiecewiseLinearDrift,
    constant_drift,
    from_nodes,
    lamperti,
    linearize,
    make_piecewise,
)
from .errors import ConfigError, FPTError, NumericalError
from .expr import DriftExpression, parse_expression
from .invert import InversionConfig, SurvivalCurve, invert_cdf, invert_density, survival_curve
from .lapsolve import FirstPassageQuery, laplace_fpt, solve_u
from .mc import McConfig, McEstimate, estimate_crossing

__all__ = [
    "anderson_crossing", "crossing_diff_bound", "density_upper_bound",
    "RunConfig", "load_config", "parse_config",
    "DriftFunction", "PiecewiseLinearDrift", "constant_drift", "from_nodes", "lamperti",
    "linearize", "make_piecewise",
    "ConfigError", "FPTError", "NumericalError",
    "DriftExpression", "parse_expression",
    "InversionConfig", "SurvivalCurve", "invert_cdf", "invert_density", "survival_curve",
    "FirstPassageQuery", "laplace_fpt", "solve_u",
    "McConfig", "McEstimate", "estimate_crossing",
]
