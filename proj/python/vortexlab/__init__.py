"""Staggered vortex-street arrays: fields, equilibria, topology, bifurcations, dynamics."""

from ._core import (
    CollisionError,
    ConvergenceError,
    DegenerateError,
    Error,
    InvalidBracketError,
    NumericalError,
    SingularPointError,
    StreetParams,
    ValidationError,
    array_potential,
    array_speed,
    array_velocity,
    bifurcation_sequence,
    equilibrium_residual,
    evolve,
    find_bifurcation,
    finite_array,
    fit_scaling,
    run_cli,
    stagnation_points,
    stream_function,
    street_speed,
    topology_class,
)

__all__ = [name for name in dir() if not name.startswith("_")]
