"""Shadows of Hilbert balls on the boundary, seen from a light source."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from .bodies import ConvexBody, boundary_ray, random_interior_points
from .config import TOL
from .errors import HypothesisViolated, NotInterior
from .faces import ClosurePoint, closure_ball_sample
from .metric import hilbert_distance, hilbert_distance_pairs
from .dynamics import LimitSetApprox

GOLDEN = (math.sqrt(5) - 1) / 2
S_EPS = 1e-9


@dataclass(frozen=True)
class ShadowQuery:
    """Light source x in the closure, ball centre y in the interior, radius R."""

    light: np.ndarray
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError("shadow radius must be finite and positive")
        light = self.light.point if isinstance(self.light, ClosurePoint) else self.light
        object.__setattr__(self, "light", np.asarray(light, float))
        object.__setattr__(self, "center", np.asarray(self.center, float))


@dataclass(frozen=True)
class ShadowResult:
    contained: bool
    min_distance: float
    argmin: float = math.nan  # segment parameter s of the closest point
    empty_segment: bool = False


def _lower_ends(body: ConvexBody, X) -> np.ndarray:
    """Segment parameter where the search starts: 0 for interior lights, S_EPS on the boundary."""
    return np.where(body.margin(X) > 0, 0.0, S_EPS)


def _profile_many(body, Y, X, XI, S):
    """d(Y[i], X[i] + S[i, j] (XI[i] - X[i])); +inf where rounding puts the point outside the body."""
    S = np.asarray(S, float)
    P = X[:, None, :] + S[..., None] * (XI - X)[:, None, :]
    C = np.broadcast_to(Y[:, None, :], P.shape)
    P2, C2 = P.reshape(-1, P.shape[-1]), C.reshape(-1, P.shape[-1])
    out = np.full(len(P2), math.inf)
    inside = body.margin(P2) > 0
    if np.any(inside):
        out[inside] = hilbert_distance_pairs(body, C2[inside], P2[inside])
    return out.reshape(S.shape)


def golden_section(f, lo, hi, tol: float = 1e-12, max_iter: int = 200):
    """Minimize quasi-convex functions on [lo, hi] by golden-section search.

    Works elementwise on arrays of brackets: ``f`` maps an array of abscissae to
    the array of values. Returns (argmin, min).
    """
    a, b = np.array(lo, float), np.array(hi, float)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if np.all(b - a <= tol):
            break
        left = fc <= fd
        # left: minimum in [a, d]; right: minimum in [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = np.where(left, b - GOLDEN * (b - a), d)
        d_new = np.where(left, c, a + GOLDEN * (b - a))
        f_old_c, f_old_d = fc, fd
        probe = np.where(left, c_new, d_new)
        fp = f(probe)
        fc = np.where(left, fp, f_old_d)
        fd = np.where(left, f_old_c, fp)
        c, d = c_new, d_new
    left = fc <= fd
    return np.where(left, c, d), np.where(left, fc, fd)


def segment_min_distance_many(body: ConvexBody, Y, X, XI, grid: int = 64):
    """Row-wise min over the open segment (X[i], XI[i]) of d(Y[i], .).

    Returns (s, value, empty): ``empty`` marks segments lying in the boundary, for
    which the value is +inf. A coarse grid brackets the minimizer, taking the span
    of all grid minimizers so flat stretches of the profile cannot hide it, then
    golden-section search refines inside the bracket.
    """
    Y, X, XI = (np.atleast_2d(np.asarray(v, float)) for v in (Y, X, XI))
    n = len(X)
    empty = body.margin(0.5 * (X + XI)) <= TOL.boundary
    s_best = np.full(n, math.nan)
    v_best = np.full(n, math.inf)
    ok = ~empty
    if not np.any(ok):
        return s_best, v_best, empty
    Yo, Xo, XIo = Y[ok], X[ok], XI[ok]
    lo = _lower_ends(body, Xo)
    hi = 1.0 - S_EPS
    u = np.linspace(0.0, 1.0, grid + 1)
    S = lo[:, None] + u[None, :] * (hi - lo)[:, None]
    V = _profile_many(body, Yo, Xo, XIo, S)
    m = V.min(axis=1, keepdims=True)
    hit = V <= m
    first = np.argmax(hit, axis=1)
    last = grid - np.argmax(hit[:, ::-1], axis=1)
    rows = np.arange(len(S))
    a = S[rows, np.maximum(first - 1, 0)]
    b = S[rows, np.minimum(last + 1, grid)]
    t, ft = golden_section(lambda z: _profile_many(body, Yo, Xo, XIo, z[:, None])[:, 0], a, b)
    k = np.argmin(V, axis=1)
    use_grid = V[rows, k] < ft
    s_best[ok] = np.where(use_grid, S[rows, k], t)
    v_best[ok] = np.where(use_grid, V[rows, k], ft)
    return s_best, v_best, empty


def segment_min_distance(body: ConvexBody, y, x, xi, grid: int = 64):
    """min over the open segment (x, xi) of d(y, .) as (s, value), or None if the segment lies in the boundary."""
    s, v, empty = segment_min_distance_many(body, [y], [x], [xi], grid)
    return None if empty[0] else (float(s[0]), float(v[0]))


def _check_center(body, Y):
    if np.any(body.margin(np.atleast_2d(Y)) <= 0):
        raise NotInterior("shadow centre must be interior")


def shadow_contains(body: ConvexBody, q: ShadowQuery, xi) -> ShadowResult:
    """Whether xi lies in the shadow of B(y, R) lit from x, with the minimal distance achieved."""
    _check_center(body, q.center)
    res = segment_min_distance(body, q.center, q.light, xi)
    if res is None:
        return ShadowResult(False, math.inf, math.nan, True)
    s, m = res
    return ShadowResult(bool(m < q.radius), m, s)


def shadow_minima(body: ConvexBody, q: ShadowQuery, boundary_points) -> np.ndarray:
    """Shadow minimum (min of d(y, .) over (x, xi)) for each boundary point xi; +inf on empty segments."""
    _check_center(body, q.center)
    XI = np.atleast_2d(np.asarray(boundary_points, float))
    n = len(XI)
    _, v, _ = segment_min_distance_many(body, np.tile(q.center, (n, 1)), np.tile(q.light, (n, 1)), XI)
    return v


def dense_segment_min(body: ConvexBody, y, x, xi, n: int = 10_000) -> float:
    """Reference minimum of d(y, .) over n evenly spaced points of the open segment."""
    x, xi, y = (np.asarray(v, float) for v in (x, xi, y))
    if body.margin(0.5 * (x + xi)) <= TOL.boundary:
        return math.inf
    lo = float(_lower_ends(body, x[None])[0])
    s = np.linspace(lo, 1.0 - S_EPS, n)
    return float(_profile_many(body, y[None], x[None], xi[None], s[None])[0].min())


def shadow_sample(body: ConvexBody, q: ShadowQuery, boundary_samples) -> np.ndarray:
    """The boundary samples lying in the shadow (open condition min < R)."""
    pts = np.atleast_2d(np.asarray(boundary_samples, float))
    return pts[shadow_minima(body, q, pts) < q.radius]


# -- shadow lemma ------------------------------------------------------------

@dataclass
class ShadowLemmaReport:
    R_grid: list
    hit_rates: list
    threshold: float  # smallest grid R with full hit rate, inf if none
    pair_minima: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.threshold)

    def to_json(self) -> dict:
        return {"config": self.config, "pass": self.passed,
                "threshold": self.threshold if self.passed else "inf",
                "rows": [{"R": r, "hit_rate": h} for r, h in zip(self.R_grid, self.hit_rates)],
                "pair_minima": self.pair_minima}


def default_R_grid() -> list:
    return [0.5 * k for k in range(1, 17)]


def pair_shadow_minimum(body: ConvexBody, limit: LimitSetApprox, x, y, k: int = 16) -> float:
    """Smallest R such that the shadow of B(y, R) from x contains one of the k limit
    points nearest to where the ray from x through y leaves the body."""
    exit_pt = boundary_ray(body, x, np.asarray(y) - np.asarray(x))
    _, idx = cKDTree(limit.points).query(exit_pt, k=min(k, len(limit)))
    XI = limit.points[np.atleast_1d(idx)]
    _, v, _ = segment_min_distance_many(body, np.tile(y, (len(XI), 1)), np.tile(x, (len(XI), 1)), XI)
    return float(v.min())


def shadow_lemma_probe(body: ConvexBody, limit: LimitSetApprox, R_grid=None, trials: int = 100,
                       seed: int = 0, k: int = 16) -> ShadowLemmaReport:
    """Hit rate of limit points in shadows over random interior pairs, for each R in the grid."""
    R_grid = list(R_grid) if R_grid is not None else default_R_grid()
    rng = np.random.default_rng(seed)
    X = random_interior_points(body, trials, rng)
    Y = random_interior_points(body, trials, rng)
    minima = [pair_shadow_minimum(body, limit, x, y, k) for x, y in zip(X, Y)]
    m = np.array(minima)
    rates = [float(np.mean(m < R)) for R in R_grid]
    threshold = next((R for R, h in zip(R_grid, rates) if h == 1.0), math.inf)
    return ShadowLemmaReport(R_grid, rates, threshold, [float(v) for v in minima],
                             {"trials": trials, "seed": seed, "k_nearest": k,
                              "limit_points": len(limit), "level": limit.max_length})


# -- stereographic projection ------------------------------------------------

@dataclass
class StereographicReport:
    passed: bool
    forward_worst: float  # max over projected ball points of (shadow minimum - R)
    converse_worst: float  # max over shadow points of (ray minimum - R)
    forward_checked: int
    converse_checked: int
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"config": self.config, "pass": self.passed, "forward_worst": self.forward_worst,
                "converse_worst": self.converse_worst, "forward_checked": self.forward_checked,
                "converse_checked": self.converse_checked}


def ray_min_distance(body: ConvexBody, y, o, XI, n: int = 2000) -> np.ndarray:
    """min of d(y, .) on each segment from interior o to boundary XI[i]: dense scan, then Brent refinement."""
    o, y = np.asarray(o, float), np.asarray(y, float)
    XI = np.atleast_2d(np.asarray(XI, float))
    m = len(XI)
    Y, O = np.tile(y, (m, 1)), np.tile(o, (m, 1))
    s = np.linspace(0.0, 1.0 - S_EPS, n)
    V = _profile_many(body, Y, O, XI, np.tile(s, (m, 1)))
    out = np.empty(m)
    for i in range(m):
        k = int(np.argmin(V[i]))
        a, b = s[max(k - 1, 0)], s[min(k + 1, n - 1)]
        f = lambda t: float(_profile_many(body, Y[i:i + 1], O[i:i + 1], XI[i:i + 1], [[t]])[0, 0])
        res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-13})
        out[i] = min(res.fun, V[i, k])
    return out


def stereographic_consistency(body: ConvexBody, o, y, R: float, n: int = 128,
                              boundary_n: int = 256, tol: float = 1e-6) -> StereographicReport:
    """Radial projection from o maps the closed ball B(y, R) onto the closed shadow seen from o.

    Forward: every sampled ball point projects to a boundary point whose shadow
    minimum is <= R + tol. Converse: every sampled boundary point whose shadow
    minimum is <= R has, on its ray from o, a point at distance <= R + tol from y
    (found independently by dense scan plus Brent refinement).
    """
    o, y = np.asarray(o, float), np.asarray(y, float)
    if hilbert_distance(body, o, y) <= R:
        raise HypothesisViolated("the ball must not contain the projection centre")
    q = ShadowQuery(o, y, R)
    U = closure_ball_sample(body, y, R, n) - o
    proj = o + body.ray_exit_many(o, U)[:, None] * U
    fwd = shadow_minima(body, q, proj) - R
    bd = body.boundary_samples(boundary_n)
    in_shadow = bd[shadow_minima(body, q, bd) <= R]
    conv = ray_min_distance(body, y, o, in_shadow) - R if len(in_shadow) else np.array([-math.inf])
    fw, cw = float(fwd.max()), float(conv.max())
    return StereographicReport(bool(fw <= tol and cw <= tol), fw, cw, len(fwd), len(in_shadow),
                               {"o": o.tolist(), "y": y.tolist(), "R": R, "n": n,
                                "boundary_n": boundary_n, "tol": tol})
