"""Minimal SVG output for planar chart slices and the two orthographic views of Omega_f."""
from __future__ import annotations

import json

import numpy as np

from .bodies import ConvexBody, HPolytope
from .io import jsonable

SIZE = 480
PAD = 20


def _fmt(x: float) -> str:
    return f"{x:.4f}"


class _Canvas:
    def __init__(self, points: np.ndarray, size: int = SIZE):
        lo, hi = points.min(axis=0), points.max(axis=0)
        span = float(np.max(hi - lo)) or 1.0
        self.lo, self.scale, self.size = lo, (size - 2 * PAD) / span, size
        self.items = []

    def xy(self, p):
        x = PAD + (p[0] - self.lo[0]) * self.scale
        y = self.size - PAD - (p[1] - self.lo[1]) * self.scale
        return x, y

    def polyline(self, pts, stroke="black", width=1.0, close=True):
        coords = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in (self.xy(p) for p in pts))
        tag = "polygon" if close else "polyline"
        self.items.append(f'<{tag} points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')

    def dots(self, pts, fill="red", r=1.5):
        for p in pts:
            x, y = self.xy(p)
            self.items.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{fill}"/>')

    def segment(self, p, q, stroke="blue", width=1.5):
        (x1, y1), (x2, y2) = self.xy(p), self.xy(q)
        self.items.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
                          f'stroke="{stroke}" stroke-width="{width}"/>')

    def svg(self) -> str:
        return "\n".join(self.items)


def _document(groups: list, width: int, height: int, metadata: dict | None) -> str:
    head = f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
    meta = ""
    if metadata is not None:
        meta = "<metadata>" + json.dumps(jsonable(metadata), sort_keys=True).replace("&", "&amp;") \
            .replace("<", "&lt;") + "</metadata>"
    body = "\n".join(f'<g transform="translate({dx},0)">\n{g}\n</g>' for dx, g in groups)
    return "\n".join([head, meta, body, "</svg>"]) + "\n"


def boundary_polyline(body: ConvexBody, n: int = 512) -> np.ndarray:
    if isinstance(body, HPolytope) and body.dim == 2:
        V = body.vertices
        c = V.mean(axis=0)
        return V[np.argsort(np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0]))]
    return body.boundary_samples(n)


def render_planar(body: ConvexBody, points=None, highlight=None, metadata: dict | None = None) -> str:
    """Boundary polyline, optional points (red) and highlighted points (blue) for a 2-d body."""
    if body.dim != 2:
        raise ValueError("planar rendering needs a 2-dimensional chart")
    bd = boundary_polyline(body)
    cv = _Canvas(bd)
    cv.polyline(bd)
    if points is not None and len(points):
        cv.dots(np.atleast_2d(points))
    if highlight is not None and len(highlight):
        cv.dots(np.atleast_2d(highlight), fill="blue", r=2.5)
    return _document([(0, cv.svg())], SIZE, SIZE, metadata)


def render_omega_f(body, ball_segment=None, every: int = 12, metadata: dict | None = None) -> str:
    """Top view (x, y) and side view (x, z) of an Omega_f hull, vertical faces drawn every few grid angles."""
    G = body.generators
    n = len(body.angles)
    top = G[:n, :2]
    side_pts = G[:, [0, 2]]
    cv1 = _Canvas(top)
    cv1.polyline(top)
    cv2 = _Canvas(side_pts)
    for k in range(0, n, every):
        c = np.cos(body.angles[k])
        h = body.heights[k]
        cv2.segment((c, -h), (c, h), stroke="gray", width=0.5)
    cv2.polyline(G[:n][:, [0, 2]], stroke="black", close=False)
    cv2.polyline(G[n:][:, [0, 2]], stroke="black", close=False)
    if ball_segment is not None:
        p, q = np.asarray(ball_segment[0]), np.asarray(ball_segment[1])
        cv2.segment(p[[0, 2]], q[[0, 2]], stroke="red", width=2.5)
        cv1.dots([p[:2]], fill="red", r=3)
    return _document([(0, cv1.svg()), (SIZE, cv2.svg())], 2 * SIZE, SIZE, metadata)
