"""The cylinder-like bodies Omega_f built from a periodic step function f >= 1.

Omega_f is the interior of the convex hull of the two curves
(cos t, sin t, +-f(t)). Its side wall is foliated by vertical segments
{(cos t, sin t, z) : |z| < f(t)}, each an open face, and the metric on such a
face is the one-dimensional Hilbert metric of (-f(t), f(t)). The hull of a
finite angular grid is the computable stand-in; the analytic formulas below
describe the continuum body.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Optional

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from .bodies import HPolytope, _hull_halfspaces
from .errors import BadRadii, BadSpec, OutsideFace
from .faces import ExtendedDistance, FaceDescriptor, _point_face
from .facts import ConvergingPairs, ProbeReport
from .projective import AffineChart, _frozen

TWO_PI = 2 * math.pi
ANGLE_TOL = 1e-12


def _wrap(theta):
    return np.mod(theta, TWO_PI)


def _angle_gap(a, b):
    d = np.abs(_wrap(np.asarray(a, float) - np.asarray(b, float)))
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True)
class StepFunctionSpec:
    """Periodic step function: ``values[j]`` on the open interval (breakpoints[j], breakpoints[j+1]).

    The last interval wraps around to breakpoints[0] + 2 pi. With no breakpoints
    ``values`` holds the single constant. ``point_values`` overrides f at
    breakpoints; the default is the larger one-sided limit, which keeps f upper
    semi-continuous.
    """

    breakpoints: tuple = ()
    values: tuple = (1.0,)
    point_values: dict = field(default_factory=dict)

    def __post_init__(self):
        bp = tuple(float(_wrap(t)) for t in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if list(bp) != sorted(bp) or len(set(bp)) != len(bp):
            raise BadSpec("breakpoints must be distinct and sorted in [0, 2 pi)")
        if len(vals) != max(1, len(bp)):
            raise BadSpec("need one value per interval")
        if any(not (v >= 1 and math.isfinite(v)) for v in vals):
            raise BadSpec("f must be >= 1 and finite")
        pv = {}
        for key, v in dict(self.point_values).items():
            t = float(_wrap(float(key)))
            j = self._index_of(bp, t)
            if j is None:
                raise BadSpec(f"point value at {t} is not at a breakpoint")
            pv[j] = float(v)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        full = {}
        for j in range(len(bp)):
            left, right = vals[j - 1], vals[j]
            v = pv.get(j, max(left, right))
            if v < max(left, right):
                raise BadSpec("f must be upper semi-continuous at every breakpoint")
            full[bp[j]] = v
        object.__setattr__(self, "point_values", full)

    @staticmethod
    def _index_of(bp, t) -> Optional[int]:
        for j, b in enumerate(bp):
            if _angle_gap(b, t) <= ANGLE_TOL:
                return j
        return None

    @classmethod
    def constant(cls, c: float = 1.0) -> "StepFunctionSpec":
        return cls((), (c,))

    @property
    def n_intervals(self) -> int:
        return len(self.values)

    def interval_of(self, theta: float) -> Optional[int]:
        """Index of the open interval containing theta, None at a breakpoint."""
        if not self.breakpoints:
            return 0
        t = float(_wrap(theta))
        if self._index_of(self.breakpoints, t) is not None:
            return None
        j = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return j % len(self.breakpoints)

    def __call__(self, theta):
        th = np.atleast_1d(np.asarray(theta, float))
        out = np.empty(len(th))
        for i, t in enumerate(th):
            j = self.interval_of(t)
            if j is None:
                out[i] = self.point_values[self.breakpoints[self._index_of(self.breakpoints, _wrap(t))]]
            else:
                out[i] = self.values[j]
        return out if np.ndim(theta) else float(out[0])

    def one_sided_limits(self, theta: float) -> tuple:
        """(limit from the left, limit from the right) of f at theta."""
        j = self._index_of(self.breakpoints, _wrap(theta)) if self.breakpoints else None
        if j is None:
            v = self(theta)
            return v, v
        return self.values[j - 1], self.values[j]

    def midpoints(self) -> list:
        bp = self.breakpoints
        if not bp:
            return []
        nxt = list(bp[1:]) + [bp[0] + TWO_PI]
        return [float(_wrap(0.5 * (a + b))) for a, b in zip(bp, nxt)]

    def to_dict(self) -> dict:
        return {"schema": "hilbert-kit/1", "breakpoints": list(self.breakpoints),
                "values": list(self.values),
                "point_values": {repr(t): v for t, v in self.point_values.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "StepFunctionSpec":
        unknown = set(d) - {"schema", "breakpoints", "values", "point_values"}
        if unknown:
            raise BadSpec(f"unknown keys {sorted(unknown)}")
        return cls(tuple(d.get("breakpoints", ())), tuple(d.get("values", (1.0,))),
                   {float(k): v for k, v in d.get("point_values", {}).items()})


JUMP_OFFSET = 1e-5


def omega_f_grid(spec: StepFunctionSpec, grid_n: int) -> np.ndarray:
    """Uniform angles plus breakpoints, breakpoints +- JUMP_OFFSET and interval midpoints.

    Between two grid angles the hull wall is a planar facet whose height
    interpolates the heights at its ends. The shoulder angles confine that
    interpolation at a jump to a cell of width JUMP_OFFSET; everywhere else the
    hull wall has height f(theta). Uniform angles too close to an extra angle are dropped.
    """
    uni = TWO_PI * np.arange(grid_n) / grid_n
    bp = np.array(spec.breakpoints)
    extra = np.concatenate([bp, bp - JUMP_OFFSET, bp + JUMP_OFFSET, spec.midpoints()])
    if len(extra):
        keep = np.min(_angle_gap(uni[:, None], extra[None, :]), axis=1) > 1e-3 / grid_n
        uni = uni[keep]
    ang = np.concatenate([uni, extra])
    ang = np.unique(np.round(_wrap(ang), 15))
    return ang


@dataclass(frozen=True, eq=False)
class OmegaFBody(HPolytope):
    """Hull of (cos t_k, sin t_k, +-f(t_k)) over a grid of angles t_k, with analytic vertical faces."""

    spec: StepFunctionSpec = None
    grid_n: int = 720
    angles: np.ndarray = None
    heights: np.ndarray = None

    kind: ClassVar[str] = "omegaf"

    def __post_init__(self):
        A, b = _hull_halfspaces(self.generators)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        super().__post_init__()

    @property
    def generators(self) -> np.ndarray:
        c, s, h = np.cos(self.angles), np.sin(self.angles), self.heights
        return np.vstack([np.column_stack([c, s, h]), np.column_stack([c, s, -h])])

    def grid_index(self, s) -> Optional[int]:
        """Index of the grid angle whose vertical line carries the chart point s, if any."""
        s = np.asarray(s, float)
        rho = math.hypot(s[0], s[1])
        if abs(rho - 1) > 1e-9:
            return None
        t = math.atan2(s[1], s[0]) % TWO_PI
        gap = _angle_gap(self.angles, t)
        k = int(np.argmin(gap))
        return k if gap[k] <= 1e-9 else None

    def exact_face(self, s) -> Optional[FaceDescriptor]:
        """Analytic face for points on the vertical segment at a grid angle, None elsewhere."""
        k = self.grid_index(s)
        if k is None:
            return None
        s = np.asarray(s, float)
        f = float(self.heights[k])
        z = float(s[2])
        if abs(z) > f + 1e-9 * f:
            return None
        if abs(abs(z) - f) <= 1e-9 * f:
            return _point_face(self, s, ("vertex", k, int(np.sign(z))))
        sub = HPolytope(chart=AffineChart.standard(1), base=np.zeros(1),
                        A=np.array([[1.0], [-1.0]]), b=np.array([f - z, f + z]))
        return FaceDescriptor(anchor=_frozen(s), origin=_frozen(s),
                              basis=_frozen(np.array([[0.0], [0.0], [1.0]])), sub_body=sub,
                              active=("vertical", k))

    def wall_point(self, theta: float, z: float) -> np.ndarray:
        """Chart point at angle theta and height z, on the grid wall (radially projected onto the hull)."""
        rho = self.wall_radius(theta)
        return np.array([rho * math.cos(theta), rho * math.sin(theta), z])

    def wall_radius(self, theta: float) -> float:
        """Distance from the axis to the hull side at angle theta (1 at grid angles)."""
        u = np.array([math.cos(theta), math.sin(theta), 0.0])
        return float(self.ray_exit(np.zeros(3), u))

    def as_polytope(self) -> HPolytope:
        """The same hull without the analytic face rule (generic face computation)."""
        return HPolytope(chart=self.chart, base=self.base, A=self.A, b=self.b)

    def to_dict(self) -> dict:
        d = self._common_dict()
        d.update(spec=self.spec.to_dict(), grid_n=self.grid_n)
        return d


def build_omega_f(spec: StepFunctionSpec, grid_n: int = 720) -> OmegaFBody:
    if grid_n < 64:
        raise BadSpec("grid_n must be at least 64")
    ang = omega_f_grid(spec, grid_n)
    h = spec(ang)
    return OmegaFBody(chart=AffineChart.standard(3), base=np.zeros(3), spec=spec, grid_n=grid_n,
                      angles=_frozen(ang), heights=_frozen(h))


def hull_vertices_match(body: OmegaFBody, tol: float = 1e-9) -> bool:
    """Every generator point is a vertex of the hull."""
    G = body.generators
    V = G[ConvexHull(G).vertices]
    d, _ = cKDTree(V).query(G)
    return bool(np.all(d <= tol))


def vertical_face_distance(spec_or_body, theta: float, z1: float, z2: float) -> ExtendedDistance:
    """Hilbert distance between heights z1, z2 on the vertical face at angle theta.

    Equals (1/2) log[((f - z1)(f + z2)) / ((f + z1)(f - z2))] for z1 <= z2, i.e.
    |artanh(z2/f) - artanh(z1/f)|.
    """
    spec = spec_or_body.spec if isinstance(spec_or_body, OmegaFBody) else spec_or_body
    f = spec(theta)
    if not (abs(z1) < f and abs(z2) < f):
        raise OutsideFace("heights must satisfy |z| < f(theta)")
    if z1 == z2:
        return ExtendedDistance(0.0)
    return ExtendedDistance(abs(math.atanh(z2 / f) - math.atanh(z1 / f)))


def ball_height(f: float, z0: float, R: float) -> tuple:
    """Closed ball of radius R about height z0 on a face of half-height f, as a height interval."""
    u0 = math.atanh(z0 / f)
    return f * math.tanh(u0 - R), f * math.tanh(u0 + R)


def wall_distance(spec: StepFunctionSpec, p, q) -> float:
    """Extended distance between wall points given as (theta, z) in the continuum body."""
    (t1, z1), (t2, z2) = p, q
    if _angle_gap(t1, t2) > ANGLE_TOL:
        return math.inf
    f = spec(t1)
    if abs(z1) >= f or abs(z2) >= f:
        # extremal points on the top and bottom curves
        return 0.0 if (z1 == z2) else math.inf
    return float(vertical_face_distance(spec, t1, z1, z2))


# -- almost continuity -------------------------------------------------------

def is_almost_continuous(spec: StepFunctionSpec, theta: float, eps: float) -> bool:
    """f(t) - eps <= liminf f <= limsup f <= f(t) at theta (step functions: one-sided limits)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    left, right = spec.one_sided_limits(theta)
    v = spec(theta)
    return bool(v - eps <= min(left, right) and max(left, right) <= v)


def almost_continuity_points(spec: StepFunctionSpec, eps: float) -> list:
    """One representative angle per qualifying interval (its midpoint) and each qualifying breakpoint."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not spec.breakpoints:
        return [0.0]
    pts = list(spec.midpoints())
    pts += [t for t in spec.breakpoints if is_almost_continuous(spec, t, eps)]
    return sorted(pts)


# -- grain of sand -----------------------------------------------------------

def ball_hypothesis_holds(spec: StepFunctionSpec, theta: float, z0: float, r: float, R: float) -> bool:
    """The closed r-ball about (theta, z0) fits inside the R-balls about (theta, z0) read in the
    neighbouring faces, on both sides (what coverage needs at a jump anchor)."""
    f0 = spec(theta)
    lo, hi = ball_height(f0, z0, r)
    for f in spec.one_sided_limits(theta):
        if abs(z0) >= f:
            return False
        a, b = ball_height(f, z0, R)
        if lo < a - 1e-12 or hi > b + 1e-12:
            return False
    return True


def grain_of_sand_probe(spec_or_body, theta: float, z0: float, r: float, R: float,
                        u_halfwidth: float = 0.05, delta: float = 1e-3, samples: int = 64,
                        u_height: float | None = None, y_grid: int = 2001) -> ProbeReport:
    """Sampled check that the closed r-ball about the wall point x = (theta, z0) lies in
    the relative interior of the uniform R-neighbourhood of the wall band
    U = {|t - theta| <= u_halfwidth, |z - z0| <= u_height}.

    Points z of the ball are perturbed along the wall by up to delta in angle and
    height; a perturbation is covered when some y of a fine grid on U is within
    extended distance R. Since distinct vertical faces are at infinite distance,
    only grid points at the perturbed angle can cover. A perturbation leaving the
    wall counts as uncovered. If f is not continuous at theta (the ball map is
    then discontinuous at x) the report has status ``hypothesis-not-met``;
    ``ball_condition`` records the weaker containment of the r-ball in the
    neighbouring R-balls.
    """
    spec = spec_or_body.spec if isinstance(spec_or_body, OmegaFBody) else spec_or_body
    if not 0 < r < R:
        raise BadRadii("need 0 < r < R")
    uh = u_halfwidth if u_height is None else u_height
    if not (0 < delta < u_halfwidth and delta < uh):
        raise ValueError("delta must be smaller than the band")
    f0 = spec(theta)
    config = {"theta": theta, "z0": z0, "r": r, "R": R, "u_halfwidth": u_halfwidth,
              "u_height": uh, "delta": delta, "samples": samples}
    if abs(z0) >= f0:
        return ProbeReport("grain-of-sand", True, R, config, [],
                           {"status": "pass", "extremal": True, "hypothesis_met": True})
    # the ball map is continuous at a wall point exactly when f is continuous there
    left, right = spec.one_sided_limits(theta)
    hyp = left == right == f0
    ball_ok = ball_hypothesis_holds(spec, theta, z0, r, R)
    lo, hi = ball_height(f0, z0, r)
    zs = np.linspace(lo, hi, samples)
    offsets = delta * np.array([[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1],
                                [1, 1], [1, -1], [-1, 1], [-1, -1]], float)
    yz = np.linspace(z0 - uh, z0 + uh, y_grid)
    worst = math.inf
    witnesses = []
    for z in zs:
        for dt, dz in offsets:
            t2, z2 = theta + dt, z + dz
            f2 = spec(t2)
            if abs(z2) >= f2:
                margin = -math.inf
            else:
                ok = np.abs(yz) < f2
                if not np.any(ok):
                    margin = -math.inf
                else:
                    d = np.abs(np.arctanh(yz[ok] / f2) - math.atanh(z2 / f2))
                    margin = R - float(d.min())
            worst = min(worst, margin)
            if margin < 0 and len(witnesses) < 5:
                witnesses.append([t2, z2])
    covered = worst >= 0
    status = "pass" if (hyp and covered) else ("hypothesis-not-met" if not hyp else "fail")
    return ProbeReport("grain-of-sand", status == "pass", float(worst), config, witnesses,
                       {"status": status, "extremal": False, "hypothesis_met": hyp,
                        "ball_condition": ball_ok, "covered": bool(covered), "ball": [lo, hi]})


def random_step_spec(rng: np.random.Generator, max_pieces: int = 6, max_value: float = 3.0) -> StepFunctionSpec:
    k = int(rng.integers(1, max_pieces + 1))
    bp = np.sort(rng.uniform(0, TWO_PI, size=k))
    while k > 1 and np.min(np.diff(np.concatenate([bp, [bp[0] + TWO_PI]]))) < 0.2:
        bp = np.sort(rng.uniform(0, TWO_PI, size=k))
    vals = rng.uniform(1.0, max_value, size=k)
    return StepFunctionSpec(tuple(bp), tuple(vals))


# -- semi-continuity sequences on the wall -----------------------------------

def jump_sequences(spec: StepFunctionSpec, n_terms: int = 24) -> list:
    """Wall sequences (in (theta, z) coordinates) converging to a point of each breakpoint's face.

    Same-angle pairs approach from either side, where the face is shorter and the
    distance larger; opposite-side pairs sit in distinct faces (infinite terms).
    """
    out = []
    eps = 2.0 ** -np.arange(1, n_terms + 1)
    for t in spec.breakpoints:
        m = min(spec.one_sided_limits(t))
        z1, z2 = -0.3 * m, 0.5 * m
        for side, name in ((1, "right"), (-1, "left")):
            th = t + side * eps
            xs = np.column_stack([th, np.full(n_terms, z1)])
            ys = np.column_stack([th, np.full(n_terms, z2)])
            out.append(ConvergingPairs(xs, ys, np.array([t, z1]), np.array([t, z2]),
                                       f"jump@{t:.6f}:{name}"))
        xs = np.column_stack([t + eps, np.full(n_terms, z1)])
        ys = np.column_stack([t - eps, np.full(n_terms, z2)])
        out.append(ConvergingPairs(xs, ys, np.array([t, z1]), np.array([t, z2]),
                                   f"jump@{t:.6f}:across"))
    return out
