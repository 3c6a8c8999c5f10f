"""Open faces of the closure, the extended metric and closed balls on the closure."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bodies import ConvexBody, Ellipsoid, HPolytope, PointLike
from .config import TOL
from .errors import OutsideClosure
from .metric import hilbert_distance, hilbert_distance_many
from .projective import AffineChart, _frozen
from .sampling import ball_fractions, sphere_directions


@dataclass(frozen=True, eq=False)
class FaceDescriptor:
    """The open face F(x) of a closure point x.

    Face coordinates are ``t = basis.T @ (s - origin)``; ``basis`` has orthonormal
    columns so chart distances are preserved. ``sub_body`` is the face as a
    properly convex open set in face coordinates (None for a point face).
    """

    anchor: np.ndarray
    origin: np.ndarray
    basis: np.ndarray
    sub_body: Optional[ConvexBody]
    active: Optional[tuple] = None

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_extremal(self) -> bool:
        return self.dim == 0

    def to_face(self, s) -> np.ndarray:
        return (np.asarray(s, float) - self.origin) @ self.basis

    def from_face(self, t) -> np.ndarray:
        return self.origin + np.asarray(t, float) @ self.basis.T

    @property
    def anchor_face_coords(self) -> np.ndarray:
        return self.to_face(self.anchor)

    def span(self, chart: AffineChart) -> np.ndarray:
        """Homogeneous vectors (columns) spanning the projective subspace of the face."""
        cols = [chart.from_chart(self.anchor)] + [chart.basis @ v for v in self.basis.T]
        return np.column_stack(cols)

    def off_span(self, s) -> float:
        v = np.asarray(s, float) - self.origin
        return float(np.linalg.norm(v - self.basis @ (self.basis.T @ v)))

    def contains(self, s, tol: float = TOL.activity) -> bool:
        s = np.asarray(s, float)
        scale = max(1.0, float(np.linalg.norm(s)))
        if self.dim == 0:
            return bool(np.linalg.norm(s - self.anchor) <= tol * scale)
        if self.off_span(s) > tol * scale:
            return False
        return bool(self.sub_body.margin(self.to_face(s)) > tol * scale)

    def same_as(self, other: "FaceDescriptor", tol: float = 1e-7) -> bool:
        if self.dim != other.dim:
            return False
        if self.dim == 0:
            return bool(np.linalg.norm(self.anchor - other.anchor) <= tol)
        if self.active is not None and other.active is not None:
            return self.active == other.active
        return other.contains(self.anchor) and self.contains(other.anchor)


@dataclass(frozen=True, eq=False)
class ClosurePoint:
    point: np.ndarray
    face: FaceDescriptor

    @property
    def is_interior(self) -> bool:
        return self.face.active == ()

    @property
    def is_extremal(self) -> bool:
        return self.face.is_extremal


@dataclass(frozen=True)
class ExtendedDistance:
    """Value of the extended metric; ``math.inf`` marks points in distinct faces."""

    value: float

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def __float__(self):
        return float(self.value)

    def to_json(self):
        return "inf" if self.is_infinite else float(self.value)


def _activity_tol(s) -> float:
    return TOL.activity * max(1.0, float(np.linalg.norm(s)))


def _whole_body_face(body: ConvexBody, s) -> FaceDescriptor:
    d = body.dim
    return FaceDescriptor(anchor=_frozen(s), origin=_frozen(np.zeros(d)), basis=_frozen(np.eye(d)),
                          sub_body=body, active=())


def _point_face(body: ConvexBody, s, active=None) -> FaceDescriptor:
    return FaceDescriptor(anchor=_frozen(s), origin=_frozen(s), basis=_frozen(np.zeros((body.dim, 0))),
                          sub_body=None, active=active)


def polytope_face(P: HPolytope, s) -> FaceDescriptor:
    s = np.asarray(s, float)
    slack = P.b - P.A @ s
    tol = _activity_tol(s)
    if slack.min() < -tol:
        raise OutsideClosure("point lies outside the closed polytope")
    active = np.flatnonzero(slack <= tol)
    if len(active) == 0:
        return _whole_body_face(P, s)
    _, sv, Vt = np.linalg.svd(P.A[active])
    rank = int(np.sum(sv > 1e-9 * sv[0]))
    N = Vt[rank:].T
    key = tuple(int(i) for i in active)
    if N.shape[1] == 0:
        return _point_face(P, s, key)
    inactive = np.setdiff1d(np.arange(len(P.b)), active)
    A_sub = P.A[inactive] @ N
    b_sub = slack[inactive]
    keep = np.linalg.norm(A_sub, axis=1) > 1e-12
    k = N.shape[1]
    sub = HPolytope(chart=AffineChart.standard(k), base=np.zeros(k), A=A_sub[keep], b=b_sub[keep])
    return FaceDescriptor(anchor=_frozen(s), origin=_frozen(s), basis=_frozen(N), sub_body=sub, active=key)


def face_of(body: ConvexBody, x: PointLike) -> FaceDescriptor:
    """Open face of a point of the closure."""
    s = body.coords(x)
    exact = getattr(body, "exact_face", None)
    if exact is not None:
        F = exact(s)
        if F is not None:
            return F
    if isinstance(body, HPolytope):
        return polytope_face(body, s)
    m = float(body.margin(s))
    tol = _activity_tol(s)
    if m > tol:
        return _whole_body_face(body, s)
    if m < -tol:
        raise OutsideClosure("point lies outside the closure")
    if isinstance(body, Ellipsoid):
        return _point_face(body, s)
    raise NotImplementedError(f"no face rule for body kind {body.kind!r}")


def closure_point(body: ConvexBody, x: PointLike) -> ClosurePoint:
    s = body.coords(x)
    return ClosurePoint(point=_frozen(s), face=face_of(body, s))


def _as_closure_point(body, x) -> ClosurePoint:
    return x if isinstance(x, ClosurePoint) else closure_point(body, x)


def face_distance(F: FaceDescriptor, x, y) -> float:
    """Hilbert distance inside the open face F (both points assumed in F)."""
    if F.dim == 0:
        return 0.0
    return hilbert_distance(F.sub_body, F.to_face(x), F.to_face(y))


def extended_distance(body: ConvexBody, x, y) -> ExtendedDistance:
    """Hilbert distance of the face of x when y shares that face, infinity otherwise."""
    cx = _as_closure_point(body, x)
    sy = y.point if isinstance(y, ClosurePoint) else body.coords(y)
    if np.array_equal(cx.point, sy):
        return ExtendedDistance(0.0)
    F = cx.face
    if not F.contains(sy):
        return ExtendedDistance(math.inf)
    return ExtendedDistance(face_distance(F, cx.point, sy))


def ball_radius_along(sub: ConvexBody, t0, u, R: float) -> np.ndarray:
    """Distance from t0 to the boundary of the closed Hilbert ball B(t0, R) along unit directions u."""
    u = np.atleast_2d(u)
    beta = sub.ray_exit_many(t0, u)
    alpha = sub.ray_exit_many(t0, -u)
    e = math.exp(2 * R)
    return alpha * beta * (e - 1) / (beta + e * alpha)


def closure_ball_sample(body: ConvexBody, x, R: float, n: int = 512,
                        boundary_fraction: float = 0.5) -> np.ndarray:
    """Deterministic points of the closed ball of radius R around x (chart coordinates).

    The first ``boundary_fraction`` of the points lie on the relative boundary of
    the ball; the rest fill its interior. Extremal x gives the single point x.
    """
    if R <= 0:
        raise ValueError("radius must be positive")
    cx = _as_closure_point(body, x)
    F = cx.face
    if F.dim == 0:
        return cx.point[None, :].copy()
    t0 = F.anchor_face_coords
    nb = int(round(n * boundary_fraction))
    dirs = sphere_directions(F.dim, n)
    rho = ball_radius_along(F.sub_body, t0, dirs, R)
    frac = np.ones(n)
    if n > nb:
        frac[nb:] = ball_fractions(F.dim, n - nb)
    T = t0 + (frac * rho)[:, None] * dirs
    return F.from_face(T)


def homothety(a, t: float, p) -> np.ndarray:
    """Image of p under the homothety of centre a and ratio t."""
    if t <= 0:
        raise ValueError("ratio must be positive")
    a = np.asarray(a, float)
    return a + t * (np.asarray(p, float) - a)


def face_distances_from_anchor(F: FaceDescriptor, T) -> np.ndarray:
    """Extended distances from the anchor of F to face-coordinate points T (inf outside F)."""
    T = np.atleast_2d(T)
    t0 = F.anchor_face_coords
    out = np.full(len(T), math.inf)
    inside = F.sub_body.margin(T) > 0
    if np.any(inside):
        out[inside] = hilbert_distance_many(F.sub_body, t0, T[inside])
    return out
