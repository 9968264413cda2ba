import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drnv import errors
from drnv.inner_eval import (
    CaseId,
    classify_case,
    crossover_order,
    eval_F,
    eval_F_plane,
    g_inner,
    newsvendor_loss,
    psi,
    stationary_points,
    sup_g,
    sup_g_ab,
    sup_g_dense,
)
from drnv.model import CostParams, DualPoint, make_instance
from drnv.oracle import brute_sup_g_ab

C = CostParams(20, 10)
ONE = CostParams(1, 1)

pos = st.floats(1e-3, 50.0)
curv = st.floats(1e-3, 5.0)
lin = st.floats(-50.0, 50.0)
qty = st.floats(0.0, 20.0)


@pytest.mark.parametrize("x, Q, expected", [(7, 7, 0), (10, 7, 60), (4, 7, 30)])
def test_newsvendor_loss(x, Q, expected):
    assert newsvendor_loss(x, Q, C) == expected


def test_newsvendor_loss_vectorised():
    assert np.allclose(newsvendor_loss(np.array([4, 7, 10]), 7, C), [30, 0, 60])


def test_classify_case_q0():
    case, ic = classify_case(ONE, 1.0, 0.0)
    assert case == CaseId.CASE1
    assert ic.as_tuple() == (1.0, -1.0, 0.0, 1.0)


def test_classify_case_example2():
    case, ic = classify_case(C, 1.0, 5.0)
    assert case == CaseId.CASE1
    assert ic.beta3 == -5.0
    assert ic.beta4 == pytest.approx(20 - 2 * math.sqrt(150))
    assert ic[4] == ic.beta4


def test_classify_case_example3():
    case, ic = classify_case(ONE, 1.0, 2.0)
    assert case == CaseId.CASE3
    assert ic.beta3 == -4.0 and ic.beta2 == -1.0 and ic.beta4 == -3.0


def test_classify_case_nonpositive_curvature():
    with pytest.raises(errors.NonpositiveCurvature):
        classify_case(ONE, 0.0, 1.0)


def test_sup_g_examples():
    r = sup_g_ab(1.0, 0.0, 0.0, ONE)
    assert (r.region_id, r.x_star, r.g_value) == (2, 0.5, 0.25)
    r = sup_g_ab(1.0, -10.0, 2.0, ONE)
    assert (r.region_id, r.x_star, r.g_value) == (0, 0.0, 2.0)
    r = sup_g_ab(0.5, 3.0, 5.0, C)
    assert r.region_id == 2 and r.x_star == pytest.approx(26.0) and r.g_value == pytest.approx(238.0)


def test_sup_g_via_dual_point():
    # b = lambda1 * x - lambda2 / 2 = 3 with a = 0.5
    lam = DualPoint(0.25, -4.0, 0.25)
    r = sup_g(4.0, lam, 5.0, C)
    assert r.g_value == pytest.approx(238.0)


def test_sup_g_requires_positive_a():
    with pytest.raises(errors.NonpositiveCurvature):
        sup_g(1.0, DualPoint(0.0, 0.0, 0.0), 1.0, ONE)


def test_psi_examples():
    assert psi(0.0, DualPoint(0, 0, 1), 0.0, ONE) == pytest.approx(0.25)
    assert psi(0.0, DualPoint(1, 0, 0), 0.0, ONE) == pytest.approx(0.25)
    lam = DualPoint(1.0, 0.5, 0.5)
    assert psi(2.0, lam, 1.0, ONE) <= sup_g(2.0, lam, 1.0, ONE).g_value


def test_eval_F_examples(single_sample):
    assert eval_F(DualPoint(0, 0, 1), 0.0, single_sample) == pytest.approx(2.25)
    assert eval_F(DualPoint(1, 0, 0), 0.0, single_sample) == pytest.approx(0.75)
    with pytest.raises(errors.InfiniteValue):
        eval_F(DualPoint(0.5, 0.0, -1.5), 0.0, single_sample)


def test_eval_F_plane_matches_scalar(rng):
    inst = make_instance(rng.uniform(0, 20, 7), 3.0, 20, 10)
    for _ in range(50):
        l1, l2, xi, Q = rng.uniform(0, 3), rng.uniform(-30, 30), rng.uniform(0.05, 5), rng.uniform(0, 25)
        v = eval_F_plane(l1, l2, xi, Q, inst)[0]
        assert v == pytest.approx(eval_F(DualPoint.from_plane(l1, l2, xi), Q, inst), rel=1e-12, abs=1e-10)


def test_eval_F_unweighted_scales_sum():
    w = make_instance([1.0, 2.0], 1.0, 1, 1)
    u = make_instance([1.0, 2.0], 1.0, 1, 1, unweighted=True)
    lam = DualPoint(0.5, 0.0, 0.5)
    base = 0.5 * 1.0 + 0.5 * w.m2
    assert eval_F(lam, 1.0, u) - base == pytest.approx(2 * (eval_F(lam, 1.0, w) - base))


@settings(max_examples=300, deadline=None)
@given(c1=pos, c2=pos, a=curv, b=lin, Q=qty)
def test_sup_g_dominates_grid_and_is_attained(c1, c2, a, b, Q):
    costs = CostParams(c1, c2)
    r = sup_g_ab(a, b, Q, costs)
    assert r.x_star >= 0
    # region consistency: g(x*) reproduces the value
    assert float(g_inner(r.x_star, a, b, Q, costs)) == pytest.approx(r.g_value, rel=1e-12, abs=1e-9)
    v_bf, _ = brute_sup_g_ab(a, b, Q, costs)
    assert r.g_value == pytest.approx(v_bf, rel=1e-6, abs=1e-6)
    assert r.case_id in (1, 3)


@settings(max_examples=200, deadline=None)
@given(c1=pos, c2=pos, a=curv, b=lin, Q=qty)
def test_dense_matches_scalar(c1, c2, a, b, Q):
    costs = CostParams(c1, c2)
    assert sup_g_dense(a, np.array([b]), Q, costs)[0] == pytest.approx(sup_g_ab(a, b, Q, costs).g_value, rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(c1=pos, c2=pos, a=curv, b=st.floats(1.0, 50.0))
def test_crossover_between_stationary_points(c1, c2, a, b):
    costs = CostParams(c1, c2)
    x1, x2 = stationary_points(a, b, costs)
    if x1 <= 1e-6:
        return
    qc = crossover_order(a, b, costs)
    eps = 1e-6 * (1 + qc)
    assert sup_g_ab(a, b, qc - eps, costs).region_id == 2
    assert sup_g_ab(a, b, qc + eps, costs).region_id == 1


@settings(max_examples=200, deadline=None)
@given(
    xs=st.lists(st.floats(0, 20), min_size=1, max_size=6),
    p=st.tuples(st.floats(0, 3), st.floats(-30, 30), st.floats(0.05, 5), st.floats(0, 20)),
    q=st.tuples(st.floats(0, 3), st.floats(-30, 30), st.floats(0.05, 5), st.floats(0, 20)),
    t=st.floats(0, 1),
)
def test_F_jointly_convex(xs, p, q, t):
    inst = make_instance(xs, 2.0, 7.0, 3.0)

    def F(v):
        l1, l2, xi, Q = v
        return eval_F(DualPoint.from_plane(l1, l2, xi), Q, inst)

    mid = tuple(t * a + (1 - t) * b for a, b in zip(p, q))
    assert F(mid) <= t * F(p) + (1 - t) * F(q) + 1e-9 * (1 + abs(F(p)) + abs(F(q)))


def test_ties_pick_lower_region():
    # Case 1 at t = beta4 exactly: regions 0 and 2 tie, region 0 is returned
    a, Q = 1.0, 1.0
    _, ic = classify_case(C, a, Q)
    r = sup_g_ab(a, -ic.beta4 / 2.0, Q, C)
    assert r.region_id == 0
