import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hilbertkit.bodies import box, simplex, unit_ball
from hilbertkit.errors import OutsideClosure
from hilbertkit.faces import closure_ball_sample, extended_distance, face_of, homothety


def test_square_face_dimensions():
    sq = box([1.0, 1.0])
    assert face_of(sq, [1.0, 0.3]).dim == 1
    assert face_of(sq, [1.0, 1.0]).dim == 0
    assert face_of(sq, [0.2, 0.3]).dim == 2
    with pytest.raises(OutsideClosure):
        face_of(sq, [1.2, 0.0])


def test_cube_faces():
    c = box([1.0, 1.0, 1.0])
    assert [face_of(c, p).dim for p in ([1, 0, 0], [1, 1, 0], [1, 1, 1])] == [2, 1, 0]


def test_disk_boundary_is_extremal():
    assert face_of(unit_ball(2), [math.cos(1), math.sin(1)]).is_extremal


def test_edge_distance_example():
    sq = box([1.0, 1.0])
    d = extended_distance(sq, [1.0, 0.0], [1.0, 0.5])
    assert float(d) == pytest.approx(0.5 * math.log(3), rel=1e-12)
    assert extended_distance(sq, [1.0, 0.0], [0.0, 1.0]).is_infinite
    assert extended_distance(sq, [1.0, 0.0], [0.0, 0.0]).is_infinite
    assert float(extended_distance(sq, [1.0, 1.0], [1.0, 1.0])) == 0.0


@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99))
def test_extended_distance_symmetric_on_faces(a, b):
    sq = box([1.0, 1.0])
    d1 = float(extended_distance(sq, [a, -1.0], [b, -1.0]))
    d2 = float(extended_distance(sq, [b, -1.0], [a, -1.0]))
    assert d1 == pytest.approx(d2, abs=1e-10)
    want = 0.5 * abs(math.log((1 + b) * (1 - a) / ((1 - b) * (1 + a))))
    assert d1 == pytest.approx(want, abs=1e-9)


def test_simplex_edge_face():
    S = simplex(2)
    x = S.chart.to_chart(np.array([1.0, 1.0, 0.0]))
    F = face_of(S, x)
    assert F.dim == 1 and F.contains(S.chart.to_chart(np.array([1.0, 3.0, 0.0])))


def test_closure_ball_examples():
    B = closure_ball_sample(unit_ball(2), [0, 0], 0.5 * math.log(3), n=256)
    assert np.max(np.linalg.norm(B, axis=1)) == pytest.approx(0.5, rel=1e-12)
    E = closure_ball_sample(box([1.0, 1.0]), [1.0, 0.0], 0.5 * math.log(3), n=64)
    assert np.allclose(E[:, 0], 1.0)
    assert E[:, 1].max() == pytest.approx(0.5) and E[:, 1].min() == pytest.approx(-0.5)
    V = closure_ball_sample(box([1.0, 1.0]), [1.0, 1.0], 2.0)
    assert V.shape == (1, 2)


@given(st.floats(0.05, 3.0), st.floats(-0.8, 0.8))
def test_ball_samples_within_radius(R, z):
    sq = box([1.0, 1.0])
    S = closure_ball_sample(sq, [z, 0.1], R, n=64)
    d = [float(extended_distance(sq, [z, 0.1], s)) for s in S[1:]]
    assert max(d) <= R + 1e-9


def test_ball_is_convex():
    # midpoints of closed-ball samples stay in the ball
    sq = box([1.0, 2.0])
    x, R = np.array([0.3, -0.5]), 0.8
    S = closure_ball_sample(sq, x, R, n=64)
    rng = np.random.default_rng(0)
    for i, j in rng.integers(0, len(S), size=(100, 2)):
        m = 0.5 * (S[i] + S[j])
        assert float(extended_distance(sq, x, m)) <= R + 1e-9


def test_homothety():
    assert np.allclose(homothety([1, 0], 0.25, [1, 1]), [1, 0.25])
    with pytest.raises(ValueError):
        homothety([0, 0], 0.0, [1, 1])
