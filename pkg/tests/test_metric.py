import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hilbertkit.bodies import (Ellipsoid, HullBody, box, random_interior_points, regular_polygon, segment,
                               simplex, unit_ball)
from hilbertkit.errors import ChartViolation, DegenerateChord, NotCollinear, NotInterior
from hilbertkit.metric import chord, cross_ratio, hilbert_distance, hilbert_distance_many
from hilbertkit.projective import AffineChart, ProjTransform


def klein(x, y):
    """Hyperbolic distance in the Beltrami-Klein unit ball."""
    num = 1 - x @ y
    return math.acosh(max(1.0, num / math.sqrt((1 - x @ x) * (1 - y @ y))))


def random_ellipsoid(rng, d):
    M = rng.normal(size=(d, d))
    S = M @ M.T + 0.5 * np.eye(d)
    return Ellipsoid(chart=AffineChart.standard(d), center=rng.normal(size=d), shape=S)


def to_ball(E, s):
    L = np.linalg.cholesky(E.shape)
    return L.T @ (s - E.center)


def simplex_oracle(body, x, y):
    X, Y = body.chart.from_chart(x), body.chart.from_chart(y)
    r = X / Y
    return 0.5 * math.log(r.max() / r.min())


def body_zoo():
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(12, 3))
    return [random_ellipsoid(rng, 2), box([1.0, 2.0, 0.5]), simplex(2),
            HullBody(chart=AffineChart.standard(3), base=None, points=pts - pts.mean(axis=0)),
            regular_polygon(7)]


@pytest.mark.parametrize("method", ["auto", "bisect"])
def test_klein_oracle_ellipsoid(method):
    rng = np.random.default_rng(3)
    tol = 1e-8 if method == "auto" else 1e-6
    for d in (2, 3):
        E = random_ellipsoid(rng, d)
        X = random_interior_points(E, 40, rng)
        Y = random_interior_points(E, 40, rng)
        for x, y in zip(X, Y):
            want = klein(to_ball(E, x), to_ball(E, y))
            assert abs(hilbert_distance(E, x, y, method=method) - want) <= tol * max(1, want)


def test_distance_from_center_is_artanh():
    E = unit_ball(3, radius=2.0)
    for r in (0.1, 0.9, 1.99):
        assert hilbert_distance(E, np.zeros(3), [0, r, 0]) == pytest.approx(math.atanh(r / 2), rel=1e-12)


def test_disk_example():
    assert hilbert_distance(unit_ball(2), [0, 0], [0.5, 0]) == pytest.approx(0.5 * math.log(3), rel=1e-14)


def test_segment_oracle():
    I = segment(-1, 1)
    for a, b in [(-0.5, 0.5), (0.0, 0.99), (-0.9, -0.1)]:
        want = 0.5 * abs(math.log((1 + b) * (1 - a) / ((1 - b) * (1 + a))))
        assert hilbert_distance(I, [a], [b]) == pytest.approx(want, rel=1e-12)


@given(st.lists(st.floats(0.05, 1.0), min_size=6, max_size=6))
def test_simplex_oracle(w):
    S = simplex(2)
    x = S.chart.to_chart(np.array(w[:3]))
    y = S.chart.to_chart(np.array(w[3:]))
    assert hilbert_distance(S, x, y) == pytest.approx(simplex_oracle(S, x, y), abs=1e-9)


@given(st.lists(st.floats(0.5, 2.0), min_size=3, max_size=3))
def test_simplex_diagonal_isometries(diag):
    S = simplex(2)
    g = ProjTransform(np.diag(diag))
    rng = np.random.default_rng(0)
    x, y = random_interior_points(S, 2, rng, 0.8)
    gx = S.chart.to_chart(g.matrix @ S.chart.from_chart(x))
    gy = S.chart.to_chart(g.matrix @ S.chart.from_chart(y))
    assert hilbert_distance(S, gx, gy) == pytest.approx(hilbert_distance(S, x, y), abs=1e-9)


@pytest.mark.parametrize("idx", range(5))
def test_metric_axioms(idx):
    body = body_zoo()[idx]
    rng = np.random.default_rng(idx)
    P = random_interior_points(body, 3 * 60, rng).reshape(60, 3, body.dim)
    for x, y, z in P:
        dxy, dyx = hilbert_distance(body, x, y), hilbert_distance(body, y, x)
        assert abs(dxy - dyx) <= 1e-8 * max(1, dxy)
        assert dxy <= hilbert_distance(body, x, z) + hilbert_distance(body, z, y) + 1e-8
        assert dxy >= 0


def _random_transform(rng, d):
    return ProjTransform(np.eye(d + 1) + 0.15 * rng.normal(size=(d + 1, d + 1)))


@pytest.mark.parametrize("idx", range(5))
def test_projective_invariance(idx):
    body = body_zoo()[idx]
    rng = np.random.default_rng(100 + idx)
    used = 0
    for _ in range(8):
        g = _random_transform(rng, body.dim)
        try:
            gb = body.transformed(g)
        except ChartViolation:
            continue
        used += 1
        x, y = random_interior_points(body, 2, rng, 0.9)
        gx, gy = (gb.coords(g.apply(body.point(s))) for s in (x, y))
        d0, d1 = hilbert_distance(body, x, y), hilbert_distance(gb, gx, gy)
        assert abs(d0 - d1) <= 1e-8 * max(1, d0)
    assert used >= 4


def test_chord_endpoints_on_boundary():
    sq = box([1.0, 1.0])
    c = chord(sq, [0, 0], [0.5, 0.25])
    assert np.allclose(c.a, [-1, -0.5]) and np.allclose(c.b, [1, 0.5])
    assert cross_ratio(c.a, [0, 0], [0.5, 0.25], c.b) == pytest.approx(3.0)


def test_many_matches_scalar():
    D = unit_ball(2)
    Y = random_interior_points(D, 20, np.random.default_rng(2))
    ref = [hilbert_distance(D, [0.1, 0.2], y) for y in Y]
    assert np.allclose(hilbert_distance_many(D, [0.1, 0.2], Y), ref, rtol=1e-12)


def test_errors():
    sq = box([1.0, 1.0])
    with pytest.raises(NotInterior):
        hilbert_distance(sq, [0, 0], [1.0, 0])
    with pytest.raises(DegenerateChord):
        chord(sq, [0, 0], [0, 0])
    with pytest.raises(NotCollinear):
        cross_ratio([0, 0], [1, 0], [1, 1], [3, 0])
    assert hilbert_distance(sq, [0.3, 0.3], [0.3, 0.3]) == 0.0
