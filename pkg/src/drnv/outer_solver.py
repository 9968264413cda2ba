"""Outer loops of the dual: golden-section over xi, subgradient bisection over Q.

``h(Q) = min_{xi > 0} f(xi, Q)`` where ``f`` is evaluated by directional descent (or
the grid oracle).  ``h`` is convex with Lipschitz constant ``max(c1, c2)``, so a
bisection on the sign of a subgradient finds the robust order quantity.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import lsq_linear

from . import errors, kernels
from .dd_solver import dd_minimize
from .inner_eval import eval_F
from .model import (
    CostParams,
    DualPoint,
    MomentSpec,
    ProblemInstance,
    ProfitParams,
    RegionOutcome,
    SolveReport,
    validate_instance,
)
from .oracle import GridSpec, grid_minimize

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
KINK_RTOL = 1e-9


@dataclass(frozen=True)
class OuterConfig:
    xi_lo: float = 1e-6  # smallest xi probed; the bracket starts here without a hint
    xi_cap: float = 1e9  # largest xi probed before declaring the optimum at infinity
    xi_tol: float = 1e-6  # relative tolerance of the golden-section search
    q_max: Optional[float] = None  # default max(samples) + mu + 6 sigma
    q_tol: Optional[float] = None  # default 1e-5 * (1 + q_max)
    max_bisection_steps: Optional[int] = None
    mode: str = "dd"  # "dd" or "grid"
    grid_spec: Optional[GridSpec] = None
    warm_start: bool = True  # bracket xi around the previous Q's optimum

    def __post_init__(self):
        if not (0 < self.xi_lo < self.xi_cap and self.xi_tol > 0):
            raise ValueError("need 0 < xi_lo < xi_cap and xi_tol > 0")
        if self.q_tol is not None and not self.q_tol > 0:
            raise ValueError("q_tol must be > 0")
        if self.q_max is not None and not self.q_max > 0:
            raise ValueError("q_max must be > 0")
        if self.mode not in ("dd", "grid"):
            raise ValueError(f"mode must be 'dd' or 'grid', got {self.mode!r}")

    def resolved(self, inst: ProblemInstance) -> tuple[float, float, int]:
        q_max = self.q_max or float(inst.samples.max()) + inst.mu + 6.0 * inst.sigma
        q_max = max(q_max, 1e-9)
        q_tol = self.q_tol or 1e-5 * (1.0 + q_max)
        steps = self.max_bisection_steps or int(math.ceil(math.log2(max(q_max / q_tol, 2.0)))) + 8
        return q_max, q_tol, steps


@dataclass
class XiResult:
    xi_star: float
    h_value: float
    inner: object  # DdResult or GridResult at xi_star
    evaluations: int
    flags: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.xi_star, self.h_value, self.inner))

    @property
    def lambda1(self) -> float:
        return self.inner.lambda1_star if hasattr(self.inner, "lambda1_star") else self.inner.lambda1

    @property
    def lambda2(self) -> float:
        return self.inner.lambda2_star if hasattr(self.inner, "lambda2_star") else self.inner.lambda2

    @property
    def dual_point(self) -> DualPoint:
        return DualPoint.from_plane(self.lambda1, self.lambda2, self.xi_star)


def _inner(inst, xi, Q, cfg):
    if cfg.mode == "grid":
        r = grid_minimize(inst, xi, Q, cfg.grid_spec)
        return r.f_value, r
    r = dd_minimize(inst, xi, Q)
    return r.f_value, r


def minimize_xi(inst: ProblemInstance, Q: float, cfg: Optional[OuterConfig] = None, xi_hint: Optional[float] = None) -> XiResult:
    """Golden-section search for h(Q) = min over xi of f(xi, Q), run in log(xi)."""
    cfg = cfg or OuterConfig()
    inst = validate_instance(inst)
    cache: dict = {}

    def f(u):
        if u not in cache:
            try:
                cache[u] = _inner(inst, math.exp(u), Q, cfg)
            except errors.DualUnbounded as exc:
                raise errors.Infeasible(_infeasible_message(inst)) from exc
        return cache[u][0]

    u_lo, u_cap = math.log(cfg.xi_lo), math.log(cfg.xi_cap)
    step = math.log(2.0)
    flags: dict = {}
    if xi_hint is not None and cfg.warm_start:
        u0 = min(max(math.log(xi_hint), u_lo), u_cap)
    else:
        u0 = u_lo
    # Find a < b < c with f(b) <= f(a), f(c): walk downhill from u0 by doubling xi.
    fu0 = f(u0)
    if u0 < u_cap and f(min(u0 + step, u_cap)) < fu0:
        direction = 1.0
    elif u0 > u_lo and f(max(u0 - step, u_lo)) < fu0:
        direction = -1.0
    else:
        direction = 0.0
    if direction == 0.0:
        a, b, c = max(u0 - step, u_lo), u0, min(u0 + step, u_cap)
    else:
        pts = [u0]
        while True:
            nxt = pts[-1] + direction * step
            nxt = min(max(nxt, u_lo), u_cap)
            if nxt == pts[-1]:
                break
            pts.append(nxt)
            if f(nxt) >= f(pts[-2]):
                break
        if f(pts[-1]) < f(pts[-2]) or len(pts) == 1:
            # monotone all the way to a limit of the bracket
            if direction > 0:
                _check_divergence(inst, [f(p) for p in pts])
                flags["xi_at_cap"] = True
            else:
                flags["xi_at_floor"] = True
            a, b, c = pts[-1], pts[-1], pts[-1]
        else:
            b = pts[-2]
            a = pts[-3] if len(pts) >= 3 else (b - direction * step)
            c = pts[-1]
            a = min(max(a, u_lo), u_cap)
            a, c = min(a, c), max(a, c)

    tol = math.log1p(cfg.xi_tol)
    if c - a > tol:
        x1 = c - INV_PHI * (c - a)
        x2 = a + INV_PHI * (c - a)
        f1, f2 = f(x1), f(x2)
        while c - a > tol:
            if f1 <= f2:
                c, x2, f2 = x2, x1, f1
                x1 = c - INV_PHI * (c - a)
                f1 = f(x1)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + INV_PHI * (c - a)
                f2 = f(x2)
    finite = [(v[0], u) for u, v in cache.items() if math.isfinite(v[0])]
    if not finite:
        raise errors.BracketExpansionFailed("no finite f found for any probed xi")
    # best evaluated point, ties broken towards smaller xi for determinism
    best_v, best_u = min(finite)
    if best_u <= u_lo + tol and not flags:
        flags["xi_at_floor"] = True
    return XiResult(math.exp(best_u), best_v, cache[best_u][1], len(cache), flags)


def _infeasible_message(inst: ProblemInstance) -> str:
    from .model import empirical_moments

    mu_hat, sd_hat = empirical_moments(inst)
    return (
        f"moment targets (mu={inst.mu:.6g}, sigma={inst.sigma:.6g}) are not reachable within the "
        f"Wasserstein ball of radius delta={inst.delta:.6g} around the samples "
        f"(empirical mu={mu_hat:.6g}, sigma={sd_hat:.6g})"
    )


def _check_divergence(inst: ProblemInstance, values: list) -> None:
    """f decreasing up to the xi cap: a finite limit shows shrinking decrements,
    an unbounded dual shows decrements that keep pace with the doubling of xi."""
    dec = -np.diff(np.asarray(values, dtype=float))
    if dec.size >= 4 and np.all(dec[-3:] > 0) and np.all(dec[-3:] >= 0.9 * dec[-4:-1]):
        raise errors.Infeasible(_infeasible_message(inst))


# ------------------------------------------------------------------ envelope and subgradient
def _piece_grad(t, r, xi, Q, c1, c2):
    """(d/dt, d/dxi, d/dQ) of the regime-r piece of the per-sample dual term."""
    if r == 0:
        return 0.0, 0.0, c2
    if r == 1:
        d = t + c2
        return d / (2.0 * xi), -d * d / (4.0 * xi * xi), c2
    d = c1 - t
    return -d / (2.0 * xi), -d * d / (4.0 * xi * xi), -c1


def envelope_regions(
    inst: ProblemInstance, xi: float, lambda1: float, lambda2: float, Q: float, xi_free: bool = True
) -> list[RegionOutcome]:
    """Per-sample inner optimisers at the dual optimum, with kink mixing weights.

    A sample whose ``t`` sits on a kink of its dual term contributes a convex
    combination of the two adjacent pieces.  The weights are chosen so that the
    mixed gradient of F in (lambda1, lambda2, xi) vanishes (optimality of the dual
    point); ``share_above`` is the resulting weight on the above-order branch.
    """
    inst = validate_instance(inst)
    c1, c2 = inst.costs.c1, inst.costs.c2
    x, w = inst.samples, inst.psi_weights
    b = kernels.intercepts(xi, Q, c1, c2)
    case = kernels.case_of(*b)
    t = lambda2 - 2.0 * x * lambda1
    reg = kernels.regimes_np(t, case, *b)
    scale = 1.0 + abs(lambda2) + np.abs(2.0 * x * lambda1)

    lo_reg = reg.copy()
    kink_key = np.full(x.size, -1, dtype=np.int64)
    for j in kernels.CASE_LINES[case]:
        beta = b[j - 1]
        on = np.abs(t - beta) <= KINK_RTOL * (scale + abs(beta))
        for i in np.nonzero(on & (kink_key < 0))[0]:
            flags = [t[i] >= bb for bb in b]
            flags[j - 1] = False
            r_lo = kernels.regime_from_flags(case, *flags)
            flags[j - 1] = True
            r_hi = kernels.regime_from_flags(case, *flags)
            if r_lo != r_hi:
                reg[i], lo_reg[i] = r_hi, r_lo
                kink_key[i] = j

    def grad(i, r):
        dt, dxi, _ = _piece_grad(t[i], r, xi, Q, c1, c2)
        return np.array([-2.0 * x[i] * dt, dt, dxi])

    G0 = np.array([inst.delta - inst.m2 - float(w @ (x * x)), inst.mu, inst.m2])
    groups: dict = {}
    for i in range(x.size):
        G0 += w[i] * grad(i, lo_reg[i])
        if kink_key[i] >= 0:
            groups.setdefault((float(x[i]), int(kink_key[i])), []).append(i)
    theta = np.zeros(x.size)  # weight on the r_hi piece
    undetermined = np.zeros(x.size, dtype=bool)
    if groups:
        cols, bounds_hi = [], []
        for members in groups.values():
            i = members[0]
            W = float(w[members].sum())
            cols.append(W * (grad(i, reg[i]) - grad(i, lo_reg[i])))
            bounds_hi.append(1.0)
        rows = [0, 1, 2] if xi_free else [0, 1]
        M = np.array(cols).T[rows]
        rhs = -G0[rows]
        lower = [0.0] * len(cols)
        if lambda1 <= 0.0:
            # lambda1 = 0 is active: only dF/dlambda1 >= 0 is required
            M = np.hstack([M, -np.eye(len(rows))[:, :1]])
            lower.append(0.0)
            bounds_hi.append(np.inf)
        # A group whose two pieces have the same gradient (x* = Q on both sides)
        # leaves theta undetermined; it is put on the overage side, which gives the
        # right derivative in Q.
        ng = len(groups)
        live = np.abs(M[:, :ng]).max(axis=0) > KINK_RTOL * max(1.0, float(np.abs(M).max()))
        keep = np.concatenate([live, np.ones(M.shape[1] - ng, dtype=bool)])
        if live.any():
            Mk = M[:, keep]
            rs = np.maximum(np.abs(Mk).max(axis=1), 1.0)
            sol = lsq_linear(
                Mk / rs[:, None], rhs / rs,
                bounds=(np.asarray(lower)[keep], np.asarray(bounds_hi)[keep]), method="bvls",
            )
            full = np.zeros(M.shape[1])
            full[keep] = sol.x
            for gi, members in enumerate(groups.values()):
                theta[members] = float(np.clip(full[gi], 0.0, 1.0))
        for gi, members in enumerate(groups.values()):
            if not live[gi]:
                theta[members] = 1.0 if lo_reg[members[0]] == 2 else 0.0
                undetermined[members] = True

    out = []
    for i in range(x.size):
        r_hi, r_lo = int(reg[i]), int(lo_reg[i])
        if kink_key[i] >= 0:
            share = (theta[i] if r_hi == 2 else 0.0) + ((1.0 - theta[i]) if r_lo == 2 else 0.0)
            r_main = r_hi if theta[i] >= 0.5 else r_lo
            if undetermined[i]:
                share = 0.0
        else:
            # regime 2 with x* = Q (possible where the beta lines coincide, e.g. Q = 0)
            # sits on the loss kink; like the mixed kinks it counts as overage.
            at_q = r_hi == 2 and c1 - t[i] <= 2.0 * xi * Q + KINK_RTOL * (scale[i] + c1)
            share = 1.0 if (r_hi == 2 and not at_q) else 0.0
            r_main = r_hi
        x_star = 0.0 if r_main == 0 else ((-t[i] - c2) if r_main == 1 else (c1 - t[i])) / (2.0 * xi)
        out.append(
            RegionOutcome(
                region_id=r_main,
                x_star=float(x_star),
                g_value=float(kernels.phi_value(t[i], r_main, xi, Q, c1, c2)),
                case_id=int(case),
                share_above=float(share),
            )
        )
    return out


def h_subgradient(inst: ProblemInstance, Q: float, regions: list) -> float:
    """Envelope derivative sum_i w_i (c2 (1 - theta_i) - c1 theta_i).

    ``theta_i`` is the weight on the above-order branch (``share_above``).  At
    Q = 0 a sample at x* = 0 counts as overage, which gives the right derivative.
    """
    inst = validate_instance(inst)
    c1, c2 = inst.costs.c1, inst.costs.c2
    w = inst.psi_weights
    theta = np.array([r.share_above for r in regions], dtype=float)
    return float(np.sum(w * (c2 * (1.0 - theta) - c1 * theta)))


# ------------------------------------------------------------------ bisection on Q
@dataclass
class _Probe:
    Q: float
    h: float
    g: float
    xr: XiResult
    regions: list


def _bisect_Q(probe, q_max, q_tol, max_steps, flags):
    """Bisection on the sign of the exact (DD-based) subgradient."""
    steps = 0
    p0 = probe(0.0)
    if p0.g >= 0:
        flags["q_star_at_zero"] = True
        return p0, steps
    lo, hi = 0.0, q_max
    phi_ = probe(hi)
    if phi_.g <= 0:
        flags["no_sign_change"] = True
        return phi_, steps
    while hi - lo > q_tol and steps < max_steps:
        mid = 0.5 * (lo + hi)
        pm = probe(mid)
        steps += 1
        if pm.g == 0:
            return pm, steps
        if pm.g > 0:
            hi = mid
        else:
            lo = mid
    if hi - lo > q_tol:
        flags["bisection_budget_exhausted"] = True
    return min((probe(lo), probe(hi), probe(0.5 * (lo + hi))), key=lambda p: (p.h, p.Q)), steps


def _golden_Q(probe, q_max, q_tol, max_steps, flags):
    """Golden-section search on h values only.

    Used in grid mode: the grid incumbent is only approximately dual-optimal, so the
    Danskin subgradient built from it can have the wrong sign, while h itself is
    convex in Q and accurate to the grid tolerance.
    """
    a, c = 0.0, q_max
    x1, x2 = c - INV_PHI * (c - a), a + INV_PHI * (c - a)
    p1, p2 = probe(x1), probe(x2)
    steps = 0
    budget = 2 * max_steps
    while c - a > q_tol and steps < budget:
        steps += 1
        if p1.h <= p2.h:
            c, x2, p2 = x2, x1, p1
            x1 = c - INV_PHI * (c - a)
            p1 = probe(x1)
        else:
            a, x1, p1 = x1, x2, p2
            x2 = a + INV_PHI * (c - a)
            p2 = probe(x2)
    if c - a > q_tol:
        flags["bisection_budget_exhausted"] = True
    cands = [probe(a), p1, p2, probe(c)]
    if a == 0.0:
        cands.append(probe(0.0))
    best = min(cands, key=lambda p: (p.h, p.Q))
    if best.Q == 0.0:
        flags["q_star_at_zero"] = True
    elif best.Q == q_max:
        flags["no_sign_change"] = True
    return best, steps


def solve(inst: ProblemInstance, cfg: Optional[OuterConfig] = None) -> SolveReport:
    """Robust order quantity and worst-case expected cost."""
    cfg = cfg or OuterConfig()
    inst = validate_instance(inst)
    t0 = time.perf_counter()
    q_max, q_tol, max_steps = cfg.resolved(inst)
    trace: list = []
    probes: dict = {}
    hint = [None]
    totals = {"xi_evaluations": 0, "dd_steps": 0, "visited_regions": 0, "visited_rays": 0}

    def probe(Q: float) -> _Probe:
        if Q in probes:
            return probes[Q]
        xr = minimize_xi(inst, Q, cfg, xi_hint=hint[0])
        hint[0] = xr.xi_star
        regions = envelope_regions(inst, xr.xi_star, xr.lambda1, xr.lambda2, Q, xi_free=not xr.flags)
        g = h_subgradient(inst, Q, regions)
        totals["xi_evaluations"] += xr.evaluations
        if hasattr(xr.inner, "steps"):
            totals["dd_steps"] += xr.inner.steps
            totals["visited_regions"] += xr.inner.visited_regions
            totals["visited_rays"] += xr.inner.visited_rays
        trace.append((Q, xr.h_value, g, xr.xi_star))
        p = _Probe(Q, xr.h_value, g, xr, regions)
        probes[Q] = p
        return p

    flags: dict = {}
    steps = 0
    if cfg.mode == "grid":
        best, steps = _golden_Q(probe, q_max, q_tol, max_steps, flags)
    else:
        best, steps = _bisect_Q(probe, q_max, q_tol, max_steps, flags)
    for k in ("xi_at_cap", "xi_at_floor"):
        if best.xr.flags.get(k):
            flags[k] = True

    dual = best.xr.dual_point
    cost = eval_F(dual, best.Q, inst)
    return SolveReport(
        q_star=float(best.Q),
        worst_case_cost=float(cost),
        dual_point=dual,
        xi_star=float(best.xr.xi_star),
        per_sample_regions=best.regions,
        iterations={"bisection_steps": steps, "q_probes": len(probes), **totals,
                    "elapsed_s": time.perf_counter() - t0},
        tolerances={"xi_tol": cfg.xi_tol, "q_tol": q_tol, "q_max": q_max,
                    "cost_error_bound": max(inst.costs.c1, inst.costs.c2) * q_tol},
        subgradient_trace=trace,
        flags=flags,
    )


def h_value(inst: ProblemInstance, Q: float, cfg: Optional[OuterConfig] = None) -> float:
    return minimize_xi(inst, Q, cfg).h_value


def subgradient_at(inst: ProblemInstance, Q: float, cfg: Optional[OuterConfig] = None) -> float:
    xr = minimize_xi(inst, Q, cfg)
    regions = envelope_regions(inst, xr.xi_star, xr.lambda1, xr.lambda2, Q, xi_free=not xr.flags)
    return h_subgradient(inst, Q, regions)


# ------------------------------------------------------------------ baselines and conversions
def scarf_solution(moments: MomentSpec, costs: CostParams) -> tuple[float, float]:
    """Classical moments-only robust newsvendor (the delta -> infinity limit)."""
    if moments.sigma == 0:
        return float(moments.mu), 0.0
    r = math.sqrt(costs.c1 / costs.c2)
    q = moments.mu + 0.5 * moments.sigma * (r - 1.0 / r)
    return float(q), float(moments.sigma * math.sqrt(costs.c1 * costs.c2))


def profit_params_to_costs(pp: ProfitParams) -> CostParams:
    return CostParams(pp.p - pp.c, pp.c - pp.s)


def empirical_profit(samples, Q: float, pp: ProfitParams) -> float:
    """Pi_2(Q): sample-average profit with salvage."""
    x = np.asarray(samples, dtype=float)
    sold = np.minimum(x, Q)
    return float(np.mean(pp.p * sold + pp.s * np.maximum(Q - x, 0.0) - pp.c * Q))


def empirical_cost(samples, Q: float, costs: CostParams) -> float:
    """Pi_1(Q): sample-average underage/overage loss."""
    x = np.asarray(samples, dtype=float)
    return float(np.mean(costs.c1 * np.maximum(x - Q, 0.0) + costs.c2 * np.maximum(Q - x, 0.0)))
