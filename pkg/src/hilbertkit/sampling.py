"""Deterministic low-discrepancy point sets."""
import numpy as np
from scipy.stats import norm, qmc


def halton(dim: int, n: int) -> np.ndarray:
    """Unscrambled Halton points in (0, 1)^dim, skipping the all-zero first point."""
    return qmc.Halton(d=dim, scramble=False).random(n + 1)[1:]


def sphere_directions(dim: int, n: int) -> np.ndarray:
    """n unit vectors in R^dim spread over the sphere, reproducible bit for bit."""
    if dim == 1:
        return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)[:, None]
    if dim == 2:
        ang = 2 * np.pi * (np.arange(n) + 0.5) / n
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if dim == 3:
        # Fibonacci lattice
        i = np.arange(n) + 0.5
        z = 1 - 2 * i / n
        phi = np.pi * (3 - np.sqrt(5)) * i
        r = np.sqrt(1 - z * z)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    g = norm.ppf(halton(dim, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def ball_fractions(dim: int, n: int) -> np.ndarray:
    """Radial fractions in (0, 1] giving roughly uniform volume density in dim dimensions."""
    h = halton(1, n)[:, 0]
    return h ** (1.0 / dim)
