"""Chords, cross-ratios and the Hilbert distance."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import ConvexBody, PointLike
from .config import TOL
from .errors import DegenerateChord, NotCollinear, NotInterior
from .projective import AffineChart, ProjPoint, ProjTransform


@dataclass(frozen=True)
class Chord:
    """Boundary endpoints (chart coordinates) of the maximal segment through x and y.

    The four points a, x, y, b are aligned in this order.
    """

    a: np.ndarray
    b: np.ndarray


def _is_close(p, q, scale: float) -> bool:
    return bool(np.linalg.norm(np.asarray(p, float) - np.asarray(q, float)) <= TOL.boundary * max(1.0, scale))


def check_collinear(*pts, tol: float = TOL.collinear) -> bool:
    P = np.atleast_2d(np.array(pts, dtype=float))
    V = P[1:] - P[0]
    ref = np.max(np.linalg.norm(V, axis=1)) if len(V) else 0.0
    if ref == 0.0:
        return True
    for i in range(len(V)):
        for j in range(i + 1, len(V)):
            minors = np.outer(V[i], V[j]) - np.outer(V[j], V[i])
            if np.max(np.abs(minors)) > tol * ref * ref:
                return False
    return True


def cross_ratio(a, x, y, b, check: bool = True) -> float:
    """[a, x, y, b] = |b - x| |a - y| / (|a - x| |b - y|) for collinear chart points.

    Returns 1 when x = y and ``math.inf`` when a = x or b = y.
    """
    a, x, y, b = (np.asarray(p, float) for p in (a, x, y, b))
    if check and not check_collinear(a, x, y, b):
        raise NotCollinear("cross-ratio needs four collinear points")
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1.0)
    if _is_close(x, y, scale):
        return 1.0
    if _is_close(a, x, scale) or _is_close(b, y, scale):
        return math.inf
    return float(np.linalg.norm(b - x) * np.linalg.norm(a - y)
                 / (np.linalg.norm(a - x) * np.linalg.norm(b - y)))


def _exit_params(body: ConvexBody, sx, sy, method: str):
    u = sy - sx
    if method == "bisect":
        tb = body.ray_exit_bisect(sy, u)
        ta = body.ray_exit_bisect(sx, -u)
    else:
        tb = body.ray_exit(sy, u)
        ta = body.ray_exit(sx, -u)
    return ta, tb


def chord(body: ConvexBody, x: PointLike, y: PointLike, method: str = "auto") -> Chord:
    sx, sy = body.coords(x), body.coords(y)
    if np.linalg.norm(sx - sy) <= TOL.equality * max(1.0, np.linalg.norm(sx)):
        raise DegenerateChord("x and y coincide")
    _require_interior(body, sx, sy)
    ta, tb = _exit_params(body, sx, sy, method)
    u = sy - sx
    return Chord(a=sx - ta * u, b=sy + tb * u)


def _require_interior(body, *pts):
    for s in pts:
        if not body.margin(s) > 0:
            raise NotInterior("point is not in the interior of the body")


def hilbert_distance(body: ConvexBody, x: PointLike, y: PointLike, method: str = "auto") -> float:
    """Hilbert distance between two interior points.

    Along the chord a, x, y, b the cross-ratio factors as
    (1 + |x-y|/|y-b|)(1 + |x-y|/|a-x|), which is what gets evaluated (log1p form).
    """
    sx, sy = body.coords(x), body.coords(y)
    _require_interior(body, sx, sy)
    if np.array_equal(sx, sy):
        return 0.0
    ta, tb = _exit_params(body, sx, sy, method)
    # ta, tb are in units of |y - x|
    return 0.5 * (math.log1p(1.0 / tb) + math.log1p(1.0 / ta))


def hilbert_distance_many(body: ConvexBody, x: PointLike, ys) -> np.ndarray:
    """Distances from one interior point to each row of ``ys`` (chart coordinates)."""
    sx = body.coords(x)
    Y = np.atleast_2d(np.asarray(ys, float))
    U = Y - sx
    same = ~np.any(U, axis=1)
    U[same] = 1.0  # placeholder direction, result overwritten below
    tb = body.ray_exit_many(Y, U)
    ta = body.ray_exit_many(np.broadcast_to(sx, Y.shape), -U)
    out = 0.5 * (np.log1p(1.0 / tb) + np.log1p(1.0 / ta))
    out[same] = 0.0
    return out


def hilbert_distance_pairs(body: ConvexBody, X, Y) -> np.ndarray:
    """Row-wise distances d(X[i], Y[i]) for chart-coordinate arrays."""
    X = np.atleast_2d(np.asarray(X, float))
    Y = np.atleast_2d(np.asarray(Y, float))
    U = Y - X
    same = ~np.any(U, axis=1)
    U[same] = 1.0
    tb = body.ray_exit_many(Y, U)
    ta = body.ray_exit_many(X, -U)
    out = 0.5 * (np.log1p(1.0 / tb) + np.log1p(1.0 / ta))
    out[same] = 0.0
    return out


def apply_transform(g: ProjTransform, p: ProjPoint) -> ProjPoint:
    return g.apply(p)


def apply_transform_body(g: ProjTransform, body: ConvexBody, chart: AffineChart | None = None) -> ConvexBody:
    """Image g(body), read in ``chart`` (default: the body's own chart)."""
    return body.transformed(g, chart)
