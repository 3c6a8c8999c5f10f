import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hilbertkit.dynamics import (build_simplex_diagonal_group, coverage_gap, enumerate_words, fixed_point_residual,
                                 hausdorff, limit_set_approx, proximality, triangle_cartan, triangle_reflections)
from hilbertkit.errors import BudgetExceeded, EmptyLimitSet, NotHyperbolicType, NotPreserving
from hilbertkit.dynamics import build_triangle_reflection_group
from hilbertkit.projective import ProjPoint, ProjTransform, canonical, canonical_rows

COVERAGE_T2 = [1.2639, 0.9029, 0.4475, 0.2830, 0.2012, 0.0921, 0.0819, 0.0385, 0.0276]
COUNTS_T2 = [20, 30, 84, 228, 398, 1054, 1902, 4364, 8252]


def test_proximality_diagonal():
    r = proximality(ProjTransform(np.diag([4.0, 2.0, 1.0])))
    assert r.is_proximal and r.gap == pytest.approx(0.5)
    assert np.allclose(np.abs(r.attracting.coords), [1, 0, 0])
    assert not proximality(ProjTransform(np.diag([2.0, 2.0, 1.0]))).is_proximal


def test_rotation_not_proximal():
    c, s = math.cos(0.3), math.sin(0.3)
    r = proximality(ProjTransform(np.array([[c, -s, 0], [s, c, 0], [0, 0, 0.5]])))
    assert not r.is_proximal and "complex" in r.reason


def test_negative_top_eigenvalue_is_proximal():
    r = proximality(ProjTransform(np.diag([-3.0, 1.0, 0.5])))
    assert r.is_proximal


@given(arrays(float, (3, 3), elements=st.floats(-2, 2)))
def test_attracting_point_is_fixed(M):
    M = M + 4 * np.diag([1.0, 0.0, 0.0]) + 0.1 * np.eye(3)
    try:
        g = ProjTransform(M)
    except Exception:
        return
    r = proximality(g)
    if r.is_proximal and r.gap < 0.9:
        assert fixed_point_residual(g, r.attracting) <= 1e-8


def test_iterates_converge_to_attracting_point():
    rng = np.random.default_rng(4)
    g = ProjTransform(np.diag([3.0, 1.0, 0.5]) + 0.2 * rng.normal(size=(3, 3)))
    r = proximality(g)
    x = rng.normal(size=3)
    for _ in range(60):
        x = canonical(g.matrix @ x)
    assert ProjPoint(x).close_to(r.attracting, 1e-8)


def test_word_counts_free_and_reflection():
    rng = np.random.default_rng(0)
    gens = [ProjTransform(np.eye(3) + 0.5 * rng.normal(size=(3, 3))) for _ in range(2)]
    assert len(enumerate_words(gens, 2)) == 1 + 4 + 12
    refl = triangle_reflections(triangle_cartan(3, 3, 4, 2.0))
    words = enumerate_words(refl, 3, [True] * 3)
    # (ab)^3 = (ac)^3 = 1 identify aba = bab and aca = cac
    assert len(words) == 1 + 3 + 6 + 12 - 2
    assert [len(w.label) for w in words] == sorted(len(w.label) for w in words)


def test_word_cap():
    with pytest.raises(BudgetExceeded):
        enumerate_words([ProjTransform(np.eye(3))], 17)


def test_coxeter_relations():
    A = triangle_cartan(3, 3, 4, t=2.0)
    a, b, c = (np.eye(3) - np.outer(A[:, i], np.eye(3)[i]) for i in range(3))
    I = np.eye(3)
    for g in (a, b, c):
        assert np.allclose(g @ g, I)
    assert np.allclose(np.linalg.matrix_power(a @ b, 3), I)
    assert np.allclose(np.linalg.matrix_power(a @ c, 3), I)
    assert np.allclose(np.linalg.matrix_power(b @ c, 4), I)
    assert not np.allclose(np.linalg.matrix_power(b @ c, 2), I)


def test_triangle_rejects_non_hyperbolic():
    with pytest.raises(NotHyperbolicType):
        build_triangle_reflection_group(2, 3, 6)


def test_simplex_diagonal_limit_set_is_vertices():
    G = build_simplex_diagonal_group()
    for L in (1, 2, 6, 10):
        lam = G.limit_set(L)
        assert len(lam) == 3
        V = G.body.chart.from_chart(lam.points)
        assert np.allclose(np.sort(np.abs(canonical_rows_max(V)), axis=None), [0] * 6 + [1] * 3, atol=1e-9)
    gap = coverage_gap(G.limit_set(10), G.body.boundary_samples(2000))
    assert gap >= 0.2


def canonical_rows_max(V):
    return V / np.max(np.abs(V), axis=1, keepdims=True)


def test_preservation_enforced():
    G = build_simplex_diagonal_group()
    with pytest.raises(NotPreserving):
        limit_set_approx(G.body, [ProjTransform(np.array([[1.0, 0.3, 0], [0, 1, 0], [0, 0, 1]]))], 2)


def test_empty_limit_set():
    G = build_simplex_diagonal_group()
    lam = limit_set_approx(G.body, [ProjTransform(np.eye(3))], 2)
    assert lam.is_empty
    with pytest.raises(EmptyLimitSet):
        coverage_gap(lam, G.body.boundary_samples(10))


def test_triangle_limit_points_on_boundary(triangle):
    lam = triangle.limit_set(6)
    assert len(lam) == COUNTS_T2[4] and lam.min_proximal_length == 3
    m = np.abs(triangle.body.margin(lam.points))
    assert m.max() <= 1e-9


def test_triangle_equivariance(triangle):
    # g maps level L into level L+1
    l5, l6 = triangle.limit_set(5), triangle.limit_set(6)
    for g in triangle.generators:
        img = canonical_rows(l5.homogeneous @ g.matrix.T)
        ref = canonical_rows(l6.homogeneous)
        d = np.min(np.linalg.norm(img[:, None, :] - ref[None, :, :], axis=2), axis=1)
        assert d.max() <= 1e-8


def test_triangle_coverage_regression(triangle):
    bd = triangle.body.boundary_samples(2000)
    full = triangle.limit_set(10)
    gaps = [coverage_gap(full.truncate(L), bd) for L in range(2, 11)]
    counts = [len(full.truncate(L)) for L in range(2, 11)]
    assert counts == COUNTS_T2
    assert np.allclose(gaps, COVERAGE_T2, atol=1e-4)
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))


def test_deformation_changes_body(triangle, triangle_t1):
    assert triangle.params["measured_defect"] < 1e-5
    h = hausdorff(triangle.body.points, triangle_t1.body.points)
    assert h == pytest.approx(0.9804, abs=1e-3)
