"""Python bindings for the manev library."""

from ._manev import (
    ManevError,
    classify,
    critical_points,
    equilibria,
    from_mcgehee,
    homographic,
    integrate,
    params,
    potentials,
    reduced_energy,
    section,
    to_mcgehee,
)

__all__ = [
    "ManevError",
    "classify",
    "critical_points",
    "equilibria",
    "from_mcgehee",
    "homographic",
    "integrate",
    "params",
    "potentials",
    "reduced_energy",
    "section",
    "to_mcgehee",
]
