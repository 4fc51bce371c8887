"""Floating-point side: integration, limit cycles, explosion location."""

from canardkit.numerics._kernel import KERNEL
from canardkit.numerics.simulate import (
    DEFAULT_RESOLUTION,
    DEFAULT_THRESHOLD,
    DEFAULT_TOL,
    DEFAULT_TRANSIENT,
    HMIN,
    ExplosionResult,
    LimitCycleSummary,
    NumericSystem,
    SweepRow,
    Trajectory,
    amplitude,
    classify,
    default_start,
    equilibrium_eigenvalues,
    fmt,
    integrate,
    limit_cycle,
    locate_explosion,
    sweep,
    sweep_csv,
    trajectory_csv,
)

__all__ = [
    "KERNEL", "DEFAULT_RESOLUTION", "DEFAULT_THRESHOLD", "DEFAULT_TOL", "DEFAULT_TRANSIENT", "HMIN",
    "ExplosionResult", "LimitCycleSummary", "NumericSystem", "SweepRow", "Trajectory",
    "amplitude", "classify", "default_start", "equilibrium_eigenvalues", "fmt", "integrate", "limit_cycle",
    "locate_explosion", "sweep", "sweep_csv", "trajectory_csv",
]
