"""Numerical tolerances used across the package."""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    boundary: float = 1e-12  # chart units, bisection stopping width
    equality: float = 1e-9  # canonical representative comparison
    collinear: float = 1e-8  # 2x2 minors, relative
    activity: float = 1e-9  # active facet test, relative
    max_bisect: int = 200
    membership: float = 1e-9  # limit points accepted as boundary points
    preserve: float = 1e-6  # generator invariance check
    proximal_gap: float = 1e-6  # top eigenvalue must beat the next by this ratio


TOL = Tolerances()
