"""Simulation and sampling of optically regularized Glauber-Sudarshan P functions."""

from .ecf import ECFConfig, sample_displacements, truncation_error
from .errors import (
    BracketError,
    DivergenceError,
    NonclassicalInputError,
    QuadratureError,
    RangeError,
    RegpError,
    SchemaError,
    SeedError,
)
from .filters import INF, FilterSpec, MultimodeFilterSpec, SParam, filter_table, ft_filter
from .process import ProcessConfig, critical_width, output_min_variance, simulate_bhd
from .sampling import QuasiprobEstimate, estimate_Pw_balanced, estimate_Pw_unbalanced, pattern_post, xi_post
from .states import Coherent, QuadratureData, SqueezedVacuum, Thermal, Vacuum, reference_Pw, sample_quadratures
from .syserr import SysErrReport, fake_negativity_bound

__version__ = "0.1.0"

__all__ = [
    "INF", "BracketError", "Coherent", "DivergenceError", "ECFConfig", "FilterSpec", "MultimodeFilterSpec",
    "NonclassicalInputError", "ProcessConfig", "QuadratureData", "QuadratureError", "QuasiprobEstimate",
    "RangeError", "RegpError", "SParam", "SchemaError", "SeedError", "SqueezedVacuum", "SysErrReport",
    "Thermal", "Vacuum", "critical_width", "estimate_Pw_balanced", "estimate_Pw_unbalanced",
    "fake_negativity_bound", "filter_table", "ft_filter", "output_min_variance", "pattern_post",
    "reference_Pw", "sample_displacements", "sample_quadratures", "simulate_bhd", "truncation_error", "xi_post",
]
