"""Properly convex bodies described in an affine chart.

Every body stores its shape in chart coordinates (R^d), the chart itself, and a
distinguished interior base point. Membership is exposed through a signed
``margin``: a lower bound on the Euclidean distance to the boundary for interior
points, negative outside.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import ClassVar, Union

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .config import TOL
from .errors import ChartViolation, NotInterior, UnboundedBody
from .projective import AffineChart, ProjPoint, ProjTransform, _frozen
from .sampling import sphere_directions

PointLike = Union[ProjPoint, np.ndarray, list, tuple]


@dataclass(frozen=True, eq=False)
class ConvexBody:
    chart: AffineChart
    base: np.ndarray = None

    kind: ClassVar[str] = "abstract"

    # -- coordinates -------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.chart.dim

    def coords(self, p: PointLike) -> np.ndarray:
        """Chart coordinates of a ProjPoint, or a length-d array taken as chart coordinates."""
        if isinstance(p, ProjPoint):
            if p.dim != self.dim:
                raise ValueError("point dimension does not match body")
            return self.chart.to_chart(p.coords)
        s = np.asarray(p, dtype=float)
        if s.shape != (self.dim,):
            raise ValueError(f"expected chart coordinates of length {self.dim}, got shape {s.shape}")
        return s

    def point(self, s) -> ProjPoint:
        return self.chart.point(s)

    @property
    def base_point(self) -> ProjPoint:
        return self.chart.point(self.base)

    # -- membership --------------------------------------------------------
    def margin(self, s):
        raise NotImplementedError

    def is_interior(self, p: PointLike, margin: float = 0.0) -> bool:
        return bool(self.margin(self.coords(p)) > margin)

    def boundary_residual(self, p: PointLike) -> float:
        return float(abs(self.margin(self.coords(p))))

    @property
    def radius_bound(self) -> float:
        """An upper bound on the distance from base to any point of the closure."""
        raise NotImplementedError

    # -- rays --------------------------------------------------------------
    def ray_exit(self, origin, direction) -> float:
        """Parameter t > 0 with origin + t*direction on the boundary (closed form when available)."""
        return self.ray_exit_bisect(origin, direction)

    def ray_exit_many(self, origins, directions) -> np.ndarray:
        origins = np.broadcast_to(np.asarray(origins, float), np.shape(directions))
        return np.array([self.ray_exit(o, u) for o, u in zip(origins, directions)])

    def ray_exit_bisect(self, origin, direction, tol: float = TOL.boundary,
                        max_iter: int = TOL.max_bisect) -> float:
        origin = np.asarray(origin, float)
        direction = np.asarray(direction, float)
        nu = np.linalg.norm(direction)
        u = direction / nu
        if self.margin(origin) <= 0:
            raise NotInterior("ray origin is not interior")
        lo, hi = 0.0, max(1e-3, self.radius_bound + np.linalg.norm(origin - self.base))
        while self.margin(origin + hi * u) > 0:
            hi *= 2.0
        for _ in range(max_iter):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if self.margin(origin + mid * u) > 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi) / nu

    def boundary_samples(self, n: int) -> np.ndarray:
        """n boundary points hit by rays from the base point in spread-out directions."""
        dirs = sphere_directions(self.dim, n)
        t = self.ray_exit_many(self.base, dirs)
        return self.base + t[:, None] * dirs

    # -- projective action -------------------------------------------------
    def transformed(self, g: ProjTransform, chart: AffineChart | None = None) -> "ConvexBody":
        raise NotImplementedError

    def _image_base(self, g: ProjTransform, chart: AffineChart) -> np.ndarray:
        return chart.to_chart(g.matrix @ self.chart.from_chart(self.base))

    def _check_base(self):
        if not self.margin(self.base) >= 10 * TOL.boundary:
            raise NotInterior("base point is not strictly interior")

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _common_dict(self) -> dict:
        return {
            "schema": "hilbert-kit/1",
            "kind": self.kind,
            "chart": self.chart.to_list(),
            "base": [float(c) for c in self.chart.from_chart(self.base)],
        }


def _sign_in_chart(g: ProjTransform, src: AffineChart, dst: AffineChart, pts) -> float:
    """Common sign of dst-covector on g-images of lifted closure points; ChartViolation otherwise."""
    imgs = src.from_chart(np.atleast_2d(pts)) @ g.matrix.T
    vals = imgs @ dst.covector
    scale = np.linalg.norm(imgs, axis=1)
    if np.all(vals > 1e-12 * scale):
        return 1.0
    if np.all(vals < -1e-12 * scale):
        return -1.0
    raise ChartViolation("image of the body meets the hyperplane at infinity of the chart")


@dataclass(frozen=True, eq=False)
class HPolytope(ConvexBody):
    """Polytope {s : A s < b} in chart coordinates. Rows of A are normalized to unit length."""

    A: np.ndarray = None
    b: np.ndarray = None

    kind: ClassVar[str] = "hpolytope"

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, float))
        b = np.asarray(self.b, float).ravel()
        if A.shape != (len(b), self.chart.dim):
            raise ValueError("A must have shape (m, d) matching b and the chart")
        nrm = np.linalg.norm(A, axis=1)
        if np.any(nrm == 0):
            raise ValueError("zero row in A")
        object.__setattr__(self, "A", _frozen(A / nrm[:, None]))
        object.__setattr__(self, "b", _frozen(b / nrm))
        base = self.base
        if base is None:
            base = _chebyshev_center(self.A, self.b)
        object.__setattr__(self, "base", _frozen(base))
        self._check_base()
        _check_bounded(self.A, self.b)

    @classmethod
    def from_homogeneous(cls, H, chart: AffineChart, base=None) -> "HPolytope":
        """Polytope {X : H X < 0} read in ``chart`` (rows of H are covectors)."""
        H = np.atleast_2d(np.asarray(H, float))
        A = H @ chart.basis
        b = -(H @ chart.origin)
        return cls(chart=chart, base=base, A=A, b=b)

    def homogeneous(self) -> np.ndarray:
        """Rows h with interior {h . X < 0} for lifts X having positive covector value."""
        E, o = self.chart.basis, self.chart.origin
        B = np.column_stack([E, o])
        return np.column_stack([self.A, -self.b]) @ np.linalg.inv(B)

    def margin(self, s):
        s = np.asarray(s, float)
        return np.min(self.b - s @ self.A.T, axis=-1)

    def ray_exit(self, origin, direction) -> float:
        origin = np.asarray(origin, float)
        direction = np.asarray(direction, float)
        slack = self.b - self.A @ origin
        if np.min(slack) <= 0:
            raise NotInterior("ray origin is not interior")
        rate = self.A @ direction
        pos = rate > 0
        return float(np.min(slack[pos] / rate[pos]))

    def ray_exit_many(self, origins, directions, chunk: int | None = None) -> np.ndarray:
        directions = np.atleast_2d(np.asarray(directions, float))
        if chunk is None:
            chunk = max(1, (1 << 18) // len(self.b))  # keep temporaries cache sized
        origins = np.broadcast_to(np.asarray(origins, float), directions.shape)
        out = np.empty(len(directions))
        for i in range(0, len(directions), chunk):
            o = origins[i:i + chunk]
            u = directions[i:i + chunk]
            slack = self.b[None, :] - o @ self.A.T
            if np.any(slack <= 0):
                raise NotInterior("ray origin is not interior")
            rate = u @ self.A.T
            t = np.full_like(slack, np.inf)
            np.divide(slack, rate, out=t, where=rate > 0)
            out[i:i + chunk] = t.min(axis=1)
        return out

    @cached_property
    def vertices(self) -> np.ndarray:
        if self.dim == 1:
            lo = np.max(self.b[self.A[:, 0] < 0] / self.A[self.A[:, 0] < 0, 0])
            hi = np.min(self.b[self.A[:, 0] > 0] / self.A[self.A[:, 0] > 0, 0])
            return np.array([[lo], [hi]])
        hs = HalfspaceIntersection(np.column_stack([self.A, -self.b]), self.base)
        V = hs.intersections
        # merge numerically coincident vertices
        key = np.round(V / 1e-9).astype(np.int64)
        _, idx = np.unique(key, axis=0, return_index=True)
        return V[np.sort(idx)]

    @property
    def radius_bound(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices - self.base, axis=1)))

    def transformed(self, g: ProjTransform, chart: AffineChart | None = None) -> "HPolytope":
        chart = chart or self.chart
        sign = _sign_in_chart(g, self.chart, chart, self.vertices)
        H = sign * self.homogeneous() @ np.linalg.inv(g.matrix)
        return HPolytope.from_homogeneous(H, chart, base=self._image_base(g, chart))

    def to_dict(self) -> dict:
        d = self._common_dict()
        d.update(A=self.A.tolist(), b=self.b.tolist())
        return d


def _chebyshev_center(A, b) -> np.ndarray:
    m, d = A.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.column_stack([A, np.ones(m)]), b_ub=b,
                  bounds=[(None, None)] * d + [(0, None)], method="highs")
    if res.status != 0 or res.x[-1] <= 0:
        raise NotInterior("polytope has empty interior")
    return res.x[:d]


def _check_bounded(A, b):
    d = A.shape[1]
    for k in range(d):
        for sgn in (1.0, -1.0):
            c = np.zeros(d)
            c[k] = -sgn
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * d, method="highs")
            if res.status == 3:
                raise UnboundedBody("polytope is unbounded in its chart")


@dataclass(frozen=True, eq=False)
class Ellipsoid(ConvexBody):
    """{s : (s - center)^T shape (s - center) < 1} with ``shape`` positive definite."""

    center: np.ndarray = None
    shape: np.ndarray = None

    kind: ClassVar[str] = "ellipsoid"

    def __post_init__(self):
        c = np.asarray(self.center, float).ravel()
        M = np.atleast_2d(np.asarray(self.shape, float))
        M = 0.5 * (M + M.T)
        if c.shape != (self.chart.dim,) or M.shape != (len(c), len(c)):
            raise ValueError("center/shape dimensions do not match the chart")
        ev = np.linalg.eigvalsh(M)
        if ev[0] <= 0:
            raise UnboundedBody("ellipsoid shape matrix must be positive definite")
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "shape", _frozen(M))
        object.__setattr__(self, "base", _frozen(c if self.base is None else self.base))
        self._check_base()

    @cached_property
    def _lam_max(self) -> float:
        return float(np.linalg.eigvalsh(self.shape)[-1])

    def quad(self, s):
        v = np.asarray(s, float) - self.center
        return np.einsum("...i,ij,...j->...", v, self.shape, v)

    def mahalanobis(self, s):
        return np.sqrt(self.quad(s))

    def margin(self, s):
        return (1.0 - np.sqrt(self.quad(s))) / np.sqrt(self._lam_max)

    def ray_exit(self, origin, direction) -> float:
        return float(self.ray_exit_many(np.asarray(origin, float), np.atleast_2d(direction))[0])

    def ray_exit_many(self, origins, directions) -> np.ndarray:
        u = np.atleast_2d(np.asarray(directions, float))
        o = np.broadcast_to(np.asarray(origins, float), u.shape)
        v = o - self.center
        q = np.einsum("ni,ij,nj->n", v, self.shape, v)
        if np.any(q >= 1):
            raise NotInterior("ray origin is not interior")
        Mu = u @ self.shape
        alpha = np.einsum("ni,ni->n", Mu, u)
        beta = np.einsum("ni,ni->n", Mu, v)
        disc = np.sqrt(beta * beta + alpha * (1 - q))
        # stable root selection
        return np.where(beta > 0, (1 - q) / (beta + disc), (disc - beta) / alpha)

    @property
    def radius_bound(self) -> float:
        lam_min = np.linalg.eigvalsh(self.shape)[0]
        return float(1 / np.sqrt(lam_min) + np.linalg.norm(self.base - self.center))

    def homogeneous(self) -> np.ndarray:
        """Symmetric Q with interior {X^T Q X < 0}."""
        M, c = self.shape, self.center
        Qs = np.block([[M, -(M @ c)[:, None]], [-(c @ M)[None, :], np.array([[c @ M @ c - 1]])]])
        Binv = np.linalg.inv(np.column_stack([self.chart.basis, self.chart.origin]))
        return Binv.T @ Qs @ Binv

    @classmethod
    def from_homogeneous(cls, Q, chart: AffineChart, base=None) -> "Ellipsoid":
        B = np.column_stack([chart.basis, chart.origin])
        Qs = B.T @ np.asarray(Q, float) @ B
        Qs = 0.5 * (Qs + Qs.T)
        d = chart.dim
        M, m, k = Qs[:d, :d], Qs[:d, d], Qs[d, d]
        if np.linalg.eigvalsh(M)[0] <= 0:
            raise ChartViolation("quadric is not a bounded ellipsoid in this chart")
        c = -np.linalg.solve(M, m)
        rho = -(k + m @ c)
        if rho <= 0:
            raise ChartViolation("quadric has empty interior in this chart")
        return cls(chart=chart, base=base, center=c, shape=M / rho)

    def transformed(self, g: ProjTransform, chart: AffineChart | None = None) -> "Ellipsoid":
        chart = chart or self.chart
        ginv = np.linalg.inv(g.matrix)
        Q = ginv.T @ self.homogeneous() @ ginv
        return Ellipsoid.from_homogeneous(Q, chart, base=self._image_base(g, chart))

    def to_dict(self) -> dict:
        d = self._common_dict()
        d.update(center=self.center.tolist(), shape=self.shape.tolist())
        return d


def _hull_halfspaces(points: np.ndarray):
    d = points.shape[1]
    if d == 1:
        lo, hi = points.min(), points.max()
        return np.array([[1.0], [-1.0]]), np.array([hi, -lo])
    hull = ConvexHull(points)
    eq = hull.equations  # n . x + off <= 0
    # drop duplicated planes coming from triangulated facets
    key = np.round(eq / 1e-10).astype(np.int64)
    _, idx = np.unique(key, axis=0, return_index=True)
    eq = eq[np.sort(idx)]
    return eq[:, :d], -eq[:, d]


@dataclass(frozen=True, eq=False)
class HullBody(HPolytope):
    """Interior of the convex hull of finitely many chart points."""

    points: np.ndarray = None

    kind: ClassVar[str] = "hull"

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.points, float))
        if P.shape[1] != self.chart.dim:
            raise ValueError("points must be chart coordinates")
        object.__setattr__(self, "points", _frozen(P))
        A, b = _hull_halfspaces(P)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if self.base is None:
            object.__setattr__(self, "base", _frozen(P[ConvexHull(P).vertices].mean(axis=0)
                                                    if P.shape[1] > 1 else P.mean(axis=0)))
        super().__post_init__()

    @classmethod
    def from_homogeneous_points(cls, X, chart: AffineChart, base=None) -> "HullBody":
        X = np.atleast_2d(np.asarray(X, float))
        vals = X @ chart.covector
        if not (np.all(vals > 0) or np.all(vals < 0)):
            raise ChartViolation("hull points straddle the hyperplane at infinity")
        return cls(chart=chart, base=base, points=chart.to_chart(X))

    def transformed(self, g: ProjTransform, chart: AffineChart | None = None) -> "HullBody":
        chart = chart or self.chart
        _sign_in_chart(g, self.chart, chart, self.points)
        X = self.chart.from_chart(self.points) @ g.matrix.T
        return HullBody(chart=chart, base=self._image_base(g, chart), points=chart.to_chart(X))

    def to_dict(self) -> dict:
        d = self._common_dict()
        d.update(points=self.points.tolist())
        return d


# -- convenience constructors ------------------------------------------------

def unit_ball(d: int, radius: float = 1.0) -> Ellipsoid:
    return Ellipsoid(chart=AffineChart.standard(d), base=None,
                     center=np.zeros(d), shape=np.eye(d) / radius**2)


def box(half_widths) -> HPolytope:
    h = np.asarray(half_widths, float)
    d = len(h)
    A = np.vstack([np.eye(d), -np.eye(d)])
    return HPolytope(chart=AffineChart.standard(d), base=np.zeros(d), A=A, b=np.concatenate([h, h]))


def segment(lo: float = -1.0, hi: float = 1.0) -> HPolytope:
    return HPolytope(chart=AffineChart.standard(1), base=np.array([0.5 * (lo + hi)]),
                     A=np.array([[1.0], [-1.0]]), b=np.array([hi, -lo]))


def simplex(d: int = 2) -> HPolytope:
    """Open standard simplex {x_i > 0} of P(R^{d+1}) in the chart sum(x) = 1."""
    chart = AffineChart(np.ones(d + 1))
    base = chart.to_chart(np.ones(d + 1))
    return HPolytope.from_homogeneous(-np.eye(d + 1), chart, base=base)


def regular_polygon(n: int, radius: float = 1.0, phase: float = 0.0) -> HullBody:
    ang = phase + 2 * np.pi * np.arange(n) / n
    pts = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    return HullBody(chart=AffineChart.standard(2), base=np.zeros(2), points=pts)


def boundary_ray(body: ConvexBody, origin: PointLike, direction, method: str = "auto") -> np.ndarray:
    """Boundary point of the ray from an interior origin, in chart coordinates.

    ``method="bisect"`` forces bisection on the membership oracle even when a
    closed form exists.
    """
    o = body.coords(origin)
    u = np.asarray(direction, float)
    if not np.any(u):
        raise ValueError("direction must be nonzero")
    if body.margin(o) <= 0:
        raise NotInterior("ray origin is not interior")
    t = body.ray_exit_bisect(o, u) if method == "bisect" else body.ray_exit(o, u)
    return o + t * u


def random_interior_points(body: ConvexBody, n: int, rng: np.random.Generator,
                           max_fraction: float = 0.95) -> np.ndarray:
    """Random interior points: rays from the base point, stopped at a uniform fraction of the exit."""
    u = rng.normal(size=(n, body.dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    t = body.ray_exit_many(body.base, u)
    frac = rng.uniform(0.0, max_fraction, size=n)
    return body.base + (frac * t)[:, None] * u
