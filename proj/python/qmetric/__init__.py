"""Metric dimension and product entropy experiments for quantum metric spaces."""

from ._qmetric import *  # noqa: F401,F403
from ._qmetric import (
    NumericalError,
    PreconditionError,
    ResourceLimitError,
    run_experiment,
)

__all__ = [
    "NumericalError",
    "PreconditionError",
    "ResourceLimitError",
    "box_bound_card",
    "box_dimension",
    "clock_shift",
    "commands",
    "dim_exact_orthonormal",
    "dim_lower_spectral",
    "dim_upper_svd",
    "eigen_entropy",
    "fejer_abs_moment",
    "fejer_eval",
    "lattice_orbit_card",
    "net_statistics",
    "run_experiment",
    "shift_entropy_bracket",
    "torus_lip_bounds",
    "twisted_product",
    "weyl_coefficients",
    "weyl_lip_norm",
    "weyl_monomial",
]
