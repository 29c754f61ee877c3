"""Kerner-Wong dynamics of isospin particles in static gauge fields.

Thin wrapper over the C++ core. Vectors are numpy arrays of length 3; reports
are returned as plain dictionaries.
"""

from ._core import (
    DegenerateCharge,
    GaugeField,
    GaugeFunction,
    IntegratorConfig,
    ParticleState,
    ScalarPotential,
    SingularPoint,
    Trajectory,
    ValidationError,
    adjoint,
    bracket,
    builtin_ansatz,
    check_f_from_a,
    exp_rotation,
    gauge_covariance,
    inner,
    integrate,
    kk_compare,
    poisson_bracket,
    simulate,
    van_holten,
)

__all__ = [
    "DegenerateCharge",
    "GaugeField",
    "GaugeFunction",
    "IntegratorConfig",
    "ParticleState",
    "ScalarPotential",
    "SingularPoint",
    "Trajectory",
    "ValidationError",
    "adjoint",
    "bracket",
    "builtin_ansatz",
    "check_f_from_a",
    "exp_rotation",
    "gauge_covariance",
    "inner",
    "integrate",
    "kk_compare",
    "poisson_bracket",
    "simulate",
    "van_holten",
]

__version__ = "0.1.0"
