"""Independent verifiers: 1-D brute force, the (lambda1, lambda2) grid search and
the discretised primal transport LP."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import errors
from .inner_eval import eval_F_plane, g_inner, newsvendor_loss, stationary_points
from .model import CostParams, DualPoint, ProblemInstance, validate_instance
from .simplex import linprog_max


# ---------------------------------------------------------------- inner brute force
def brute_sup_g_ab(a: float, b: float, Q: float, costs: CostParams, grid_step: Optional[float] = None):
    """Dense scan of g over [0, x_max] plus a parabola refinement on each smooth piece."""
    if not a > 0:
        raise errors.NonpositiveCurvature(f"a must be > 0, got {a}")
    _, x2 = stationary_points(a, b, costs)
    x_max = max(Q, float(x2), 10.0 * (abs(b) + costs.c1) / a, 1e-12)
    if grid_step is None:
        grid_step = x_max / 20000.0
    if not grid_step > 0:
        raise ValueError("grid_step must be > 0")
    best_v, best_x = -math.inf, 0.0
    for lo, hi in ((0.0, min(Q, x_max)), (min(Q, x_max), x_max)):
        if hi < lo:
            continue
        k = max(int(math.ceil((hi - lo) / grid_step)), 1)
        xs = np.linspace(lo, hi, k + 1)
        vs = g_inner(xs, a, b, Q, costs)
        j = int(np.argmax(vs))
        if vs[j] > best_v:
            best_v, best_x = float(vs[j]), float(xs[j])
        if 0 < j < k:
            # g is an exact concave quadratic on this piece: the 3-point vertex is exact.
            h = xs[1] - xs[0]
            y0, y1, y2 = vs[j - 1], vs[j], vs[j + 1]
            den = y0 - 2.0 * y1 + y2
            if den < 0:
                xv = float(np.clip(xs[j] + 0.5 * h * (y0 - y2) / den, lo, hi))
                vv = float(g_inner(xv, a, b, Q, costs))
                if vv > best_v:
                    best_v, best_x = vv, xv
    return best_v, best_x


def brute_sup_g(x_i: float, lam: DualPoint, Q: float, costs: CostParams, grid_step: Optional[float] = None):
    if not lam.a > 0:
        raise errors.NonpositiveCurvature(f"a must be > 0, got {lam.a}")
    return brute_sup_g_ab(lam.a, float(lam.b(x_i)), Q, costs, grid_step)


# ---------------------------------------------------------------- grid search
@dataclass(frozen=True)
class GridSpec:
    lambda1_max: Optional[float] = None  # default 10*max(c)/(1+delta)
    lambda2_max: Optional[float] = None  # default 10*(c1+c2)*(1+max sample)
    steps: int = 400
    refinements: int = 2
    zoom: float = 10.0
    max_doublings: int = 20

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        for v in (self.lambda1_max, self.lambda2_max):
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ValueError("grid ranges must be finite and positive")


@dataclass
class GridResult:
    lambda1: float
    lambda2: float
    f_value: float
    boundary_incumbent: bool = False
    history: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.lambda1, self.lambda2, self.f_value))


def _scan(inst, xi, Q, lo1, hi1, lo2, hi2, steps):
    L1 = np.linspace(lo1, hi1, steps + 1)
    L2 = np.linspace(lo2, hi2, steps + 1)
    G1, G2 = np.meshgrid(L1, L2, indexing="ij")
    v = eval_F_plane(G1.ravel(), G2.ravel(), xi, Q, inst)
    v = np.where(np.isfinite(v), v, np.inf)
    k = int(np.argmin(v))  # first minimum: deterministic reduction
    i, j = divmod(k, steps + 1)
    return float(L1[i]), float(L2[j]), float(v[k]), i, j


def grid_minimize(inst: ProblemInstance, xi: float, Q: float, spec: Optional[GridSpec] = None) -> GridResult:
    """The paper's section-3 grid search for f(xi, Q) with zoom refinement."""
    if not xi > 0:
        raise errors.NonpositiveXi(f"xi must be > 0, got {xi}")
    spec = spec or GridSpec()
    inst = validate_instance(inst)
    c = inst.costs
    L1 = spec.lambda1_max or 10.0 * max(c.c1, c.c2) / (1.0 + inst.delta)
    L2 = spec.lambda2_max or 10.0 * (c.c1 + c.c2) * (1.0 + float(inst.samples.max()))
    n = spec.steps
    boundary = False
    for _ in range(spec.max_doublings + 1):
        l1, l2, fv, i, j = _scan(inst, xi, Q, 0.0, L1, -L2, L2, n)
        on1, on2 = i == n, j in (0, n)
        if not (on1 or on2):
            break
        L1 = L1 * 2 if on1 else L1
        L2 = L2 * 2 if on2 else L2
    else:
        boundary = True
    history = [fv]
    w1, w2 = L1, 2.0 * L2
    for _ in range(spec.refinements):
        w1, w2 = w1 / spec.zoom, w2 / spec.zoom
        lo1 = max(0.0, l1 - w1 / 2)
        lo2 = l2 - w2 / 2
        c1_, c2_, cv, _, _ = _scan(inst, xi, Q, lo1, lo1 + w1, lo2, lo2 + w2, n)
        if cv < fv:
            l1, l2, fv = c1_, c2_, cv
        history.append(fv)
    return GridResult(l1, l2, fv, boundary_incumbent=boundary, history=history)


# ---------------------------------------------------------------- primal LP
@dataclass(frozen=True)
class SupportGrid:
    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.size < 2 or y[0] != 0.0 or np.any(np.diff(y) <= 0):
            raise ValueError("support grid must start at 0, be increasing and have m >= 2 points")
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return int(np.asarray(self.y).size)

    @classmethod
    def uniform(cls, y_max: float, m: int) -> "SupportGrid":
        return cls(np.linspace(0.0, y_max, m))

    @classmethod
    def spaced(cls, step: float, m: int) -> "SupportGrid":
        return cls(step * np.arange(m))

    @classmethod
    def for_instance(cls, inst: ProblemInstance, m: int = 200, Q: float = 0.0, include_samples: bool = True) -> "SupportGrid":
        """Uniform grid over [0, y_max]; with ``include_samples`` the sample values are
        merged in, so the identity plan is feasible and the moment constraints can be
        imposed exactly (then weak duality is rigorous, not approximate)."""
        inst = validate_instance(inst)
        y_max = max(float(inst.samples.max()), Q) + inst.mu + 6.0 * inst.sigma + math.sqrt(inst.delta)
        y = np.linspace(0.0, max(y_max, 1.0), m)
        if include_samples:
            y = np.unique(np.concatenate([y, inst.samples]))
        return cls(y)


@dataclass
class PrimalResult:
    value: float
    plan: np.ndarray
    grid: SupportGrid
    iterations: int

    def __iter__(self):
        return iter((self.value, self.plan))

    def write_plan_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["sample"] + [f"{y:.6g}" for y in self.grid.y])
            for i, row in enumerate(self.plan):
                wr.writerow([i] + [f"{v:.6g}" for v in row])


def primal_lp_value(
    inst: ProblemInstance,
    Q: float,
    grid: Optional[SupportGrid] = None,
    moment_slack: float = 0.0,
) -> PrimalResult:
    """Worst-case expected loss over transport plans from the samples onto ``grid``.

    ``moment_slack = 0`` imposes the moment constraints as equalities.
    """
    inst = validate_instance(inst)
    if grid is None:
        grid = SupportGrid.for_instance(inst, Q=Q)
    y = np.asarray(grid.y, dtype=float)
    x, w = inst.samples, inst.weights
    n, m = x.size, y.size
    nv = n * m
    obj = np.tile(newsvendor_loss(y, Q, inst.costs), n)
    A_eq = np.zeros((n, nv))
    for i in range(n):
        A_eq[i, i * m : (i + 1) * m] = 1.0
    b_eq = list(w)
    transport = ((y[None, :] - x[:, None]) ** 2).ravel()
    m1 = np.tile(y, n)
    m2 = np.tile(y * y, n)
    A_ub = [transport]
    b_ub = [inst.delta]
    if moment_slack > 0:
        A_ub += [m1, -m1, m2, -m2]
        b_ub += [inst.mu + moment_slack, -(inst.mu - moment_slack), inst.m2 + moment_slack, -(inst.m2 - moment_slack)]
        A_eq_all, b_eq_all = A_eq, np.array(b_eq)
    else:
        A_eq_all = np.vstack([A_eq, m1, m2])
        b_eq_all = np.array(b_eq + [inst.mu, inst.m2])
    res = linprog_max(obj, np.array(A_ub), np.array(b_ub), A_eq_all, b_eq_all)
    plan = res.x.reshape(n, m)
    if np.max(np.abs(plan.sum(axis=1) - w)) > 1e-9:
        raise errors.PrimalInfeasible("transport plan violates its row marginals")
    return PrimalResult(value=float(obj @ res.x), plan=plan, grid=grid, iterations=res.iterations)
