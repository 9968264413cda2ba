import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drnv import errors, kernels
from drnv.dd_solver import build_geometry, dd_minimize, dump_geometry
from drnv.inner_eval import eval_F, eval_F_plane
from drnv.model import DualPoint, make_instance
from drnv.oracle import GridSpec, grid_minimize
from drnv.verify import ORACLE_GRID, random_small_instance


def test_single_sample_geometry():
    inst = make_instance([4.0], 1.0, 20, 10)
    g = build_geometry(inst, 1.0, 0.5)
    assert g.case == 1
    assert len(g.lines) <= 4
    # every line meets the axis lambda1 = 0
    for ln in g.lines:
        assert any(abs(v[0]) < 1e-15 and abs(v[1] - ln.intercept) < 1e-12 for v in g.vertices)


def test_parallel_lines_do_not_intersect():
    inst = make_instance([3.0, 1.0], 1.0, 20, 10)
    g = build_geometry(inst, 1.0, 2.0)
    for v in g.vertices:
        if v[0] > 0:
            on = [ln for ln in g.lines if abs(ln.at(v[0]) - v[1]) < 1e-9 * (1 + abs(v[1]))]
            assert len({ln.slope for ln in on}) >= 2


def test_three_sample_vertex_count():
    inst = make_instance([1, 3, 2], 1.0, 20, 10)
    g = build_geometry(inst, 1.0, 2.0)
    assert [ln.slope for ln in g.lines][::3] == [6.0, 4.0, 2.0]
    assert len(g.lines) <= 9
    assert len(g.vertices) <= 36 + 9
    assert np.all(g.vertices[:, 0] >= 0)
    # deduplicated
    assert len(np.unique(np.round(g.vertices, 9), axis=0)) == len(g.vertices)


def test_only_active_intercepts_instantiated():
    inst = make_instance([1, 3, 2], 1.0, 1, 1)
    g = build_geometry(inst, 1.0, 2.0)  # Case 3
    assert g.case == 3
    assert {ln.intercept_index for ln in g.lines} <= set(kernels.CASE_LINES[3])


def test_duplicate_samples_share_lines():
    inst = make_instance([2, 2, 5], 1.0, 3, 4)
    g = build_geometry(inst, 0.7, 1.0)
    assert len({ln.slope for ln in g.lines}) == 2
    assert any(len(ln.samples) == 2 for ln in g.lines)


def test_nonpositive_xi():
    inst = make_instance([1.0], 1.0, 1, 1)
    with pytest.raises(errors.NonpositiveXi):
        build_geometry(inst, 0.0, 1.0)
    with pytest.raises(errors.NonpositiveXi):
        dd_minimize(inst, -1.0, 1.0)


def test_spec_single_sample_is_unbounded(single_sample):
    """The spec's example (x1=0, delta=0.5, mu=1, sigma=1) cannot meet E[Y^2]=2 with a
    transport budget of 0.5, so f = -inf: DD reports it, the grid runs into its bounds."""
    with pytest.raises(errors.DualUnbounded):
        dd_minimize(single_sample, 1.0, 0.0)
    g = grid_minimize(single_sample, 1.0, 0.0, GridSpec(max_doublings=3))
    assert g.boundary_incumbent


def test_single_sample_matches_grid():
    inst = make_instance([0.0], 2.5, 1.0, 1.0, mu=1.0, sigma=1.0)
    r = dd_minimize(inst, 1.0, 0.0)
    g = grid_minimize(inst, 1.0, 0.0, ORACLE_GRID)
    assert not g.boundary_incumbent
    assert r.f_value == pytest.approx(g.f_value, abs=1e-4)


def test_f_value_is_exact_reevaluation(rng):
    inst = random_small_instance(rng)
    r = dd_minimize(inst, 0.8, 3.0)
    assert r.lambda1_star >= 0
    lam = DualPoint.from_plane(r.lambda1_star, r.lambda2_star, 0.8)
    assert r.f_value == pytest.approx(eval_F(lam, 3.0, inst), rel=1e-13, abs=1e-12)


def test_large_delta_pins_axis():
    inst = make_instance([3.0, 9.0, 12.0], 1e9, 20, 10)
    r = dd_minimize(inst, 1.0, 8.0)
    assert r.lambda1_star == 0.0
    l2 = np.linspace(r.lambda2_star - 5, r.lambda2_star + 5, 20001)
    axis_min = eval_F_plane(np.zeros_like(l2), l2, 1.0, 8.0, inst).min()
    assert r.f_value <= axis_min + 1e-9


def test_descent_path_strictly_decreasing(rng):
    for _ in range(10):
        inst = random_small_instance(rng)
        r = dd_minimize(inst, float(rng.uniform(0.1, 3)), float(rng.uniform(0, 20)))
        vals = [p[2] for p in r.path]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert r.steps == len(r.path) - 1


def test_visit_bound(rng):
    for _ in range(10):
        inst = random_small_instance(rng)
        xi, Q = float(rng.uniform(0.1, 3)), float(rng.uniform(0, 20))
        r = dd_minimize(inst, xi, Q)
        g = build_geometry(inst, xi, Q)
        assert r.visited_regions <= g.region_bound()
        assert r.visited_rays <= g.n_lines + 1


def test_optimality_certificate(rng):
    """No direction from the returned point descends (F is convex)."""
    ang = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    for _ in range(15):
        inst = random_small_instance(rng)
        xi, Q = float(rng.uniform(0.05, 5)), float(rng.uniform(0, 20))
        r = dd_minimize(inst, xi, Q)
        for eps in (1e-6, 1e-3, 1e-1):
            l1 = r.lambda1_star + eps * np.cos(ang)
            l2 = r.lambda2_star + eps * np.sin(ang)
            ok = l1 >= 0
            vals = eval_F_plane(l1[ok], l2[ok], xi, Q, inst)
            assert vals.min() >= r.f_value - 1e-9 * (1 + abs(r.f_value))


def test_budget_exceeded():
    inst = make_instance(np.linspace(1, 20, 8), 3.0, 20, 10)
    r = dd_minimize(inst, 5.0, 10.0)
    assert r.steps > 0
    with pytest.raises(errors.IterationBudgetExceeded):
        dd_minimize(inst, 5.0, 10.0, budget=0)


def test_dual_unbounded_when_moments_unreachable():
    inst = make_instance([10.0], 0.0, 1, 1, mu=1.0, sigma=0.0)
    with pytest.raises(errors.DualUnbounded):
        dd_minimize(inst, 1.0, 1.0)


def test_geometry_dump(tmp_path):
    inst = make_instance([1, 3, 2], 1.0, 20, 10)
    res = dump_geometry(tmp_path / "g.json", inst, 1.0, 2.0)
    doc = json.loads((tmp_path / "g.json").read_text())
    assert len(doc["lines"]) == len(build_geometry(inst, 1.0, 2.0).lines)
    assert doc["path"][-1][2] == pytest.approx(res.f_value)


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")
def test_numpy_backend_agrees(rng):
    cases = []
    for _ in range(8):
        inst = random_small_instance(rng)
        cases.append((inst, float(rng.uniform(0.05, 5)), float(rng.uniform(0, 20))))
    ref = [dd_minimize(i, xi, Q).f_value for i, xi, Q in cases]
    prev = kernels.set_backend("numpy")
    try:
        got = [dd_minimize(i, xi, Q).f_value for i, xi, Q in cases]
    finally:
        kernels.set_backend(prev)
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(
    xs=st.lists(st.floats(0, 20), min_size=1, max_size=6),
    delta=st.floats(0, 20),
    c1=st.floats(0.5, 30),
    c2=st.floats(0.5, 30),
    xi=st.floats(0.02, 10),
    Q=st.floats(0, 25),
)
def test_dd_never_worse_than_grid(xs, delta, c1, c2, xi, Q):
    inst = make_instance(xs, delta, c1, c2)
    r = dd_minimize(inst, xi, Q)
    g = grid_minimize(inst, xi, Q, GridSpec(steps=100, refinements=3, zoom=4))
    assert r.f_value <= g.f_value + 1e-9 * (1 + abs(g.f_value))
