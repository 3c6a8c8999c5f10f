"""Sampled checks of the homothety bounds between faces and closed balls, and of
lower semi-continuity of the extended metric."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .bodies import ConvexBody, HPolytope, HullBody
from .errors import BadRadii, ExtremalAnchor
from .faces import (FaceDescriptor, closure_ball_sample, closure_point, extended_distance,
                    face_distances_from_anchor, face_of, homothety)
from .projective import AffineChart
from .sampling import ball_fractions, sphere_directions

CHECK_TOL = 1e-8


@dataclass
class ProbeReport:
    name: str
    passed: bool
    worst_margin: float
    config: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = asdict(self)
        d["worst_margin"] = _json_float(self.worst_margin)
        return d

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: worst margin {self.worst_margin:.3e}"


def _json_float(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def face_diameter(F: FaceDescriptor) -> float:
    sub = F.sub_body
    if not isinstance(sub, HPolytope):
        raise NotImplementedError("face diameter is only implemented for polyhedral faces")
    V = sub.vertices
    return float(np.max(pdist(V))) if len(V) > 1 else 0.0


def distance_to_relative_boundary(F: FaceDescriptor) -> float:
    sub = F.sub_body
    if not isinstance(sub, HPolytope):
        raise NotImplementedError("only implemented for polyhedral faces")
    t0 = F.anchor_face_coords
    return float(np.min(sub.b - sub.A @ t0))


def face_ratio(diam: float, dist: float, r: float) -> float:
    """Homothety ratio bringing the closed face into the closed r-ball."""
    e = math.exp(2 * r)
    return diam * (e + 1) / (dist * (e - 1))


def ball_ratio(r: float, R: float, rule: str = "stated") -> float:
    """Homothety ratio carrying the closed r-ball into the closed R-ball.

    ``"stated"`` is (e^{2R}-1)/(e^{2r}-1). ``"sharp"`` is (1-e^{-2R})/(1-e^{-2r}),
    the infimum over all face shapes of the actual ratio; the stated value
    exceeds it whenever r < R.
    """
    if not 0 < r < R:
        raise BadRadii("need 0 < r < R")
    if rule == "stated":
        return math.expm1(2 * R) / math.expm1(2 * r)
    if rule == "sharp":
        return -math.expm1(-2 * R) / -math.expm1(-2 * r)
    raise ValueError(f"unknown ratio rule {rule!r}")


def closed_face_samples(F: FaceDescriptor, n: int) -> np.ndarray:
    """Points of the closed face in face coordinates: vertices, boundary points, interior points."""
    sub = F.sub_body
    t0 = F.anchor_face_coords
    dirs = sphere_directions(F.dim, n)
    ext = sub.ray_exit_many(t0, dirs)
    half = n // 2
    frac = np.ones(n)
    frac[half:] = ball_fractions(F.dim, n - half)
    pts = t0 + (frac * ext)[:, None] * dirs
    if isinstance(sub, HPolytope):
        pts = np.vstack([sub.vertices, pts])
    return pts


def check_face_in_scaled_ball(body: ConvexBody, x, r: float, samples: int = 256) -> ProbeReport:
    """Closed face of x inside the image of the closed r-ball under the homothety
    of centre x and ratio diam(F)(e^{2r}+1) / (d(x, rel. boundary of F)(e^{2r}-1))."""
    if r <= 0:
        raise BadRadii("radius must be positive")
    cx = closure_point(body, x)
    F = cx.face
    if F.is_extremal:
        raise ExtremalAnchor("face is a single point; the containment is vacuous")
    diam = face_diameter(F)
    dist = distance_to_relative_boundary(F)
    if dist <= 1e-9:
        raise ExtremalAnchor("anchor is too close to the relative boundary of its face")
    lam = face_ratio(diam, dist, r)
    t0 = F.anchor_face_coords
    P = closed_face_samples(F, samples)
    Q = homothety(t0, 1.0 / lam, P)
    d = face_distances_from_anchor(F, Q)
    margins = r - d
    worst = int(np.argmin(margins))
    passed = bool(np.all(d <= r + CHECK_TOL))
    bad = np.flatnonzero(d > r + CHECK_TOL)[:5]
    return ProbeReport(
        name="face-in-scaled-ball",
        passed=passed,
        worst_margin=float(margins[worst]),
        config={"x": cx.point.tolist(), "r": r, "samples": samples},
        witnesses=[F.from_face(P[i]).tolist() for i in (bad if len(bad) else [worst])],
        details={"lambda": lam, "diameter": diam, "boundary_distance": dist, "face_dim": F.dim},
    )


def check_scaled_ball_in_ball(body: ConvexBody, x, r: float, R: float, samples: int = 256,
                              rule: str = "stated") -> ProbeReport:
    """Image of the closed r-ball under the homothety of centre x and ratio
    ``ball_ratio(r, R, rule)`` inside the closed R-ball."""
    mu = ball_ratio(r, R, rule)
    cx = closure_point(body, x)
    F = cx.face
    config = {"x": cx.point.tolist(), "r": r, "R": R, "samples": samples, "rule": rule}
    if F.is_extremal:
        return ProbeReport("scaled-ball-in-ball", True, R, config, [], {"mu": mu, "face_dim": 0})
    t0 = F.anchor_face_coords
    B = F.to_face(closure_ball_sample(body, cx, r, samples))
    Q = homothety(t0, mu, B)
    d = face_distances_from_anchor(F, Q)
    margins = R - d
    worst = int(np.argmin(margins))
    bad = np.flatnonzero(d > R + CHECK_TOL)
    return ProbeReport(
        name="scaled-ball-in-ball",
        passed=len(bad) == 0,
        worst_margin=float(margins[worst]),
        config=config,
        witnesses=[F.from_face(B[i]).tolist() for i in (bad[:5] if len(bad) else [worst])],
        details={"mu": mu, "face_dim": F.dim, "violations": int(len(bad)), "checked": len(B)},
    )


# -- lower semi-continuity ---------------------------------------------------

@dataclass
class ConvergingPairs:
    """Terms (xs[n], ys[n]) converging to (x, y); all chart coordinates."""

    xs: np.ndarray
    ys: np.ndarray
    x: np.ndarray
    y: np.ndarray
    label: str = ""


def _default_distance(body):
    return lambda p, q: float(extended_distance(body, p, q))


def semicontinuity_probe(body: ConvexBody | None, sequences: Sequence[ConvergingPairs],
                         tol: float = 1e-6, tail: int = 5, extrapolate: bool = True,
                         distance: Callable | None = None) -> ProbeReport:
    """liminf d(x_n, y_n) >= d(x, y) - tol on each sequence.

    The liminf is estimated by the minimum over the last ``tail`` terms. With
    ``extrapolate`` the terms are first Richardson-accelerated as 2 v[n+1] - v[n],
    which removes the leading error of sequences approaching their limit at rate
    2^-n (the rate of the generated sequences). For an infinite limit the raw
    tail must be strictly increasing and exceed every earlier value.
    """
    dist = distance or _default_distance(body)
    worst = math.inf
    witnesses = []
    rows = []
    for seq in sequences:
        vals = np.array([dist(p, q) for p, q in zip(seq.xs, seq.ys)])
        lim = dist(seq.x, seq.y)
        tail_vals = vals[-tail:]
        if math.isinf(lim):
            ok = bool(np.all(np.isfinite(vals)) and np.all(np.diff(tail_vals) > 0)
                      and tail_vals[-1] >= vals.max())
            margin = math.inf if ok else -math.inf
            liminf = math.inf if ok else float(tail_vals.min())
        else:
            acc = vals
            if extrapolate and len(vals) > 1:
                finite = np.isfinite(vals[1:]) & np.isfinite(vals[:-1])
                acc = np.where(finite, 2 * vals[1:] - np.where(finite, vals[:-1], 0.0), vals[1:])
            liminf = float(acc[-tail:].min())
            margin = liminf - lim
            ok = margin >= -tol
        worst = min(worst, margin)
        rows.append({"label": seq.label, "limit": _json_float(float(lim)),
                     "liminf": _json_float(liminf), "ok": bool(ok)})
        if not ok:
            witnesses.append({"label": seq.label, "x": np.asarray(seq.x).tolist(),
                              "y": np.asarray(seq.y).tolist()})
    return ProbeReport(
        name="lower-semicontinuity",
        passed=not witnesses,
        worst_margin=float(worst),
        config={"tol": tol, "sequences": len(sequences)},
        witnesses=witnesses,
        details={"rows": rows},
    )


def _approach(p, c, n_terms):
    # stop well above the activity tolerance so terms stay classified as interior
    k = 2.0 ** -np.arange(1, n_terms + 1)
    return p + k[:, None] * (c - p)


def face_sequences(body: HPolytope, n_pairs: int = 8, n_terms: int = 24, seed: int = 0) -> list:
    """Converging pairs on a polytope: interior approach to same-face and distinct-face
    pairs, and (d >= 2) approach from inside a facet to a pair on its relative boundary."""
    rng = np.random.default_rng(seed)
    c = body.base
    out = []
    bpts = body.boundary_samples(max(4 * n_pairs, 16))
    for i in range(n_pairs):
        x = bpts[rng.integers(len(bpts))]
        F = face_of(body, x)
        if F.dim == 0:
            continue
        sub = F.sub_body
        t0 = F.anchor_face_coords
        u = rng.normal(size=F.dim)
        u /= np.linalg.norm(u)
        y = F.from_face(t0 + rng.uniform(0.1, 0.9) * sub.ray_exit(t0, u) * u)
        out.append(ConvergingPairs(_approach(x, c, n_terms), _approach(y, c, n_terms), x, y,
                                   f"interior->same-face#{i}"))
        z = bpts[rng.integers(len(bpts))]
        if not F.contains(z) and not np.allclose(z, x):
            out.append(ConvergingPairs(_approach(x, c, n_terms), _approach(z, c, n_terms), x, z,
                                       f"interior->distinct-faces#{i}"))
        if body.dim >= 2 and F.dim >= 1:
            # p, q on the relative boundary of F, approached from inside F
            p = F.from_face(t0 + sub.ray_exit(t0, u) * u)
            G = face_of(body, p)
            if G.dim >= 1:
                w = rng.normal(size=G.dim)
                w /= np.linalg.norm(w)
                s0 = G.anchor_face_coords
                q = G.from_face(s0 + rng.uniform(0.1, 0.9) * G.sub_body.ray_exit(s0, w) * w)
            else:
                q = p
            out.append(ConvergingPairs(_approach(p, x, n_terms), _approach(q, x, n_terms), p, q,
                                       f"facet->boundary-face#{i}"))
    return out


# -- random configurations ---------------------------------------------------

def random_polytope(rng: np.random.Generator, d: int) -> HullBody:
    """Hull of a few random points around the unit sphere (generic, with faces of every dimension)."""
    n = int(rng.integers(d + 3, d + 9))
    P = rng.normal(size=(n, d))
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    P *= rng.uniform(0.6, 1.4, size=(n, 1))
    return HullBody(chart=AffineChart.standard(d), points=P)


def random_boundary_point(rng: np.random.Generator, body: HPolytope, max_codim: int | None = None) -> np.ndarray:
    """Boundary point on a face of random dimension >= 1 (walks to lower faces by ray casting)."""
    d = body.dim
    u = rng.normal(size=d)
    x = body.base + body.ray_exit(body.base, u) * u
    target = int(rng.integers(1, d)) if d > 1 else 0
    F = face_of(body, x)
    while F.dim > max(target, 1):
        t0 = F.anchor_face_coords
        w = rng.normal(size=F.dim)
        t0 = t0 + F.sub_body.ray_exit(t0, w) * w
        x = F.from_face(t0)
        F = face_of(body, x)
    return x


def random_fact_configuration(rng: np.random.Generator):
    d = int(rng.integers(2, 4))
    body = random_polytope(rng, d)
    while True:
        x = random_boundary_point(rng, body)
        if face_of(body, x).dim >= 1:
            break
    r = float(rng.uniform(0.05, 2.0))
    R = r + float(rng.uniform(0.05, 2.0))
    return body, x, r, R
