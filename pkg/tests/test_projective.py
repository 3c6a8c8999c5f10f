import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hilbertkit.errors import ChartViolation, SingularTransform
from hilbertkit.projective import AffineChart, ProjPoint, ProjTransform, canonical

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vec3 = arrays(float, 3, elements=finite).filter(lambda v: np.linalg.norm(v) > 1e-3)


@given(vec3, st.floats(-100, 100).filter(lambda c: abs(c) > 1e-3))
def test_canonical_is_scale_invariant(v, c):
    assert np.allclose(canonical(v), canonical(c * v), atol=1e-12)
    assert ProjPoint(v) == ProjPoint(c * v)


@given(arrays(float, 2, elements=finite))
def test_chart_roundtrip(s):
    ch = AffineChart(np.array([1.0, 2.0, 0.5]))
    assert np.allclose(ch.to_chart(ch.from_chart(s)), s, atol=1e-9)


def test_chart_preserves_hyperplane_distances():
    ch = AffineChart(np.array([0.3, -1.0, 2.0]))
    s, t = np.array([0.2, -1.0]), np.array([1.5, 0.4])
    X, Y = ch.from_chart(s), ch.from_chart(t)
    assert np.isclose(ch.covector @ X, 1.0) and np.isclose(ch.covector @ Y, 1.0)
    assert np.isclose(np.linalg.norm(X - Y), np.linalg.norm(s - t))


def test_chart_rejects_points_at_infinity():
    ch = AffineChart.standard(2)
    with pytest.raises(ChartViolation):
        ch.to_chart(np.array([1.0, 0.0, 0.0]))


def test_transform_composition_and_inverse():
    rng = np.random.default_rng(1)
    A, B = (ProjTransform(np.eye(3) + 0.3 * rng.normal(size=(3, 3))) for _ in range(2))
    p = ProjPoint(rng.normal(size=3))
    assert (A @ B).apply(p).close_to(A.apply(B.apply(p)))
    assert (A @ A.inverse()).same_as(ProjTransform.identity(3))
    assert ProjTransform(-2.5 * A.matrix).same_as(A)


def test_singular_transform_rejected():
    with pytest.raises(SingularTransform):
        ProjTransform(np.ones((3, 3)))
