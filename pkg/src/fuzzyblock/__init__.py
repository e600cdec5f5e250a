"""Crisp and fuzzy key-block stability analysis for underground excavations.

Subpackages and modules:

- ``fuzzy_numbers``: trapezoidal fuzzy numbers, alpha-cuts, possibility
  measures, strict exceedance ranking.
- ``plane_geometry``: fuzzy points, lines, segments, polygons, fuzzy distance.
- ``kernel``: crisp key-block theory (pyramids, modes, safety factors,
  volumes, tunnel sweep).
- ``fuzzy_blocks``: fuzzy half-space systems and PJB / PBP / PBR.
- ``surrogate``: dataset generation and the TSK surrogate with damage maps.
- ``cli``: project files, command dispatch, CSV / SVG emitters.
"""
from .fuzzy_numbers import (
    AlphaInterval,
    SampledFuzzyNumber,
    TrapezoidalNumber,
    exceedance_poss,
    fit_trapezoid,
    linear_combine,
    poss_measure_crisp,
    poss_measure_fuzzy,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaInterval",
    "SampledFuzzyNumber",
    "TrapezoidalNumber",
    "exceedance_poss",
    "fit_trapezoid",
    "linear_combine",
    "poss_measure_crisp",
    "poss_measure_fuzzy",
    "__version__",
]
