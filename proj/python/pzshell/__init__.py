"""Piezoelectric shallow-shell eigenvalue solvers.

Scaled three-dimensional solver, two-dimensional limit model and the
thickness-sweep harness, driven by the same JSON configuration the CLI uses.
"""

try:
    from ._core import (
        ConfigError,
        SolverFailure,
        limit_coefficients,
        solve2d,
        solve3d,
        sweep,
        validate,
    )
except ImportError:  # build-tree layout: extension module next to the package
    from _core import (  # type: ignore
        ConfigError,
        SolverFailure,
        limit_coefficients,
        solve2d,
        solve3d,
        sweep,
        validate,
    )

__all__ = [
    "ConfigError",
    "SolverFailure",
    "limit_coefficients",
    "solve2d",
    "solve3d",
    "sweep",
    "validate",
]
