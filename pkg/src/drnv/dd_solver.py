"""Directional descent over the (lambda1 >= 0, lambda2) half-plane.

At fixed ``xi = lambda1 + lambda3`` and order quantity ``Q`` the dual objective is a
convex piecewise quadratic in ``(lambda1, lambda2)``.  The pieces are cut out by the
lines ``lambda2 = 2 x_i lambda1 + beta_j``.  Descent starts from the best vertex of
that arrangement and alternates two kinds of move:

* region moves: minimise the quadratic of an adjacent cell over the closed cell;
* ray moves: exact line search along an incident cut line (or the axis).

Both moves report the minimum over a whole cell or line, so once a cell or line has
been searched it can never produce descent again; the loop visits each at most once.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import errors, kernels
from .inner_eval import CaseId, Intercepts, classify_case
from .model import ProblemInstance, validate_instance

INCIDENCE_RTOL = 1e-10
VERTEX_ATOL = 1e-12


@dataclass(frozen=True)
class CutLine:
    sample_index: int
    intercept_index: int
    slope: float
    intercept: float
    samples: tuple = ()

    def at(self, lambda1):
        return self.slope * np.asarray(lambda1) + self.intercept


@dataclass
class PlaneGeometry:
    xi: float
    Q: float
    case: CaseId
    intercepts: Intercepts
    lines: list
    slopes: np.ndarray
    offsets: np.ndarray
    vertices: np.ndarray
    # sample_lines[i, m] is the unique-line index of sample i's m-th active intercept
    sample_lines: np.ndarray
    active: tuple

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    def region_bound(self) -> int:
        """Upper bound on the number of cells of the arrangement in the half-plane."""
        return 1 + (self.n_lines + 1) + len(self.vertices)

    def to_json(self, path: Optional[list] = None) -> dict:
        return {
            "xi": self.xi,
            "Q": self.Q,
            "case": int(self.case),
            "intercepts": list(self.intercepts.as_tuple()),
            "lines": [
                {"slope": ln.slope, "intercept": ln.intercept, "intercept_index": ln.intercept_index,
                 "samples": list(ln.samples)}
                for ln in self.lines
            ],
            "vertices": self.vertices.tolist(),
            "path": [] if path is None else [list(map(float, p)) for p in path],
        }


@dataclass
class DdResult:
    lambda1_star: float
    lambda2_star: float
    f_value: float
    visited_regions: int
    visited_rays: int
    steps: int
    path: list = field(default_factory=list)
    certified: bool = True
    geometry: Optional[PlaneGeometry] = None


def build_geometry(inst: ProblemInstance, xi: float, Q: float) -> PlaneGeometry:
    if not xi > 0:
        raise errors.NonpositiveXi(f"xi must be > 0, got {xi}")
    if Q < 0:
        raise ValueError(f"Q must be >= 0, got {Q}")
    inst = validate_instance(inst)
    case, ic = classify_case(inst.costs, xi, Q)
    active = kernels.CASE_LINES[int(case)]
    x = inst.samples  # already decreasing

    # unique slopes (equal samples share a line) and unique intercepts (beta4 = beta1 at Q = 0)
    x_new = np.ones(x.size, dtype=bool)
    x_new[1:] = np.abs(np.diff(x)) > 1e-12 * (1.0 + np.abs(x[1:]))
    x_group = np.cumsum(x_new) - 1
    betas = [ic[j] for j in active]
    b_group, b_heads = [], []
    for m, beta in enumerate(betas):
        for g, h in enumerate(b_heads):
            if abs(betas[h] - beta) <= 1e-12 * (1.0 + abs(beta)):
                b_group.append(g)
                break
        else:
            b_group.append(len(b_heads))
            b_heads.append(m)
    nb = len(b_heads)
    sample_lines = x_group[:, None] * nb + np.asarray(b_group)[None, :]
    heads = np.nonzero(x_new)[0]
    lines = []
    for gx, i0 in enumerate(heads):
        members = tuple(int(i) for i in np.nonzero(x_group == gx)[0])
        for h in b_heads:
            lines.append(CutLine(int(i0), active[h], 2.0 * float(x[i0]), betas[h], members))
    S = np.array([ln.slope for ln in lines])
    B = np.array([ln.intercept for ln in lines])
    return PlaneGeometry(
        xi=float(xi), Q=float(Q), case=case, intercepts=ic, lines=lines, slopes=S, offsets=B,
        vertices=_vertices(S, B), sample_lines=sample_lines, active=active,
    )


def _vertices(S: np.ndarray, B: np.ndarray) -> np.ndarray:
    K = S.size
    iu, ju = np.triu_indices(K, k=1)
    ds = S[iu] - S[ju]
    keep = np.abs(ds) > 1e-12 * (1 + np.abs(S[iu]))
    iu, ju, ds = iu[keep], ju[keep], ds[keep]
    l1 = (B[ju] - B[iu]) / ds
    l2 = S[iu] * l1 + B[iu]
    pts = np.stack([l1, l2], axis=1)
    pts = pts[pts[:, 0] >= -VERTEX_ATOL]
    pts[:, 0] = np.maximum(pts[:, 0], 0.0)
    axis = np.stack([np.zeros(K), B], axis=1)
    pts = np.concatenate([axis, pts])
    return _dedupe(pts)


def _dedupe(pts: np.ndarray) -> np.ndarray:
    if len(pts) < 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    keep = np.ones(len(pts), dtype=bool)
    diff = np.abs(np.diff(pts, axis=0))
    keep[1:] = ~np.all(diff <= VERTEX_ATOL, axis=1)
    return pts[keep]


class _Plane:
    """Per-solve state: instance data, geometry and the quadratic of any cell."""

    def __init__(self, inst: ProblemInstance, geom: PlaneGeometry):
        self.inst = inst
        self.geom = geom
        self.x = inst.samples
        self.w = inst.psi_weights
        c = inst.costs
        self.args = (geom.xi, geom.Q, self.x, self.w, c.c1, c.c2, inst.delta, inst.mu, inst.m2)
        self.lin = np.array([inst.delta - inst.m2 - float(self.w @ (self.x * self.x)), inst.mu])
        self.const0 = geom.xi * inst.m2
        self.E = np.stack([-2.0 * self.x, np.ones_like(self.x)], axis=1)

    def F(self, p) -> float:
        xi, Q, x, w, c1, c2, delta, mu, m2 = self.args
        return float(kernels.eval_F_points(np.array([p[0]]), np.array([p[1]]), xi, Q, x, w, c1, c2, delta, mu, m2)[0])

    def F_many(self, pts: np.ndarray) -> np.ndarray:
        xi, Q, x, w, c1, c2, delta, mu, m2 = self.args
        return kernels.eval_F_points(pts[:, 0], pts[:, 1], xi, Q, x, w, c1, c2, delta, mu, m2)

    def regimes(self, line_flags: np.ndarray) -> np.ndarray:
        g = self.geom
        flags = {j: line_flags[g.sample_lines[:, m]] for m, j in enumerate(g.active)}
        off = np.zeros(self.x.size, dtype=bool)
        return kernels.regimes_from_flags_np(int(g.case), *[flags.get(j, off) for j in (1, 2, 3, 4)])

    def quadratic(self, reg: np.ndarray):
        """(H, g, const) with F = 0.5 l'Hl + g'l + const on the cell with these regimes."""
        xi, Q = self.geom.xi, self.geom.Q
        c = self.inst.costs
        kappa = np.where(reg == 0, 0.0, 1.0 / (4.0 * xi))
        tau = np.where(reg == 1, -c.c2, np.where(reg == 2, c.c1, 0.0))
        nu = np.where(reg == 2, -c.c1 * Q, c.c2 * Q)
        wk = self.w * kappa
        H = 2.0 * (self.E * wk[:, None]).T @ self.E
        g = self.lin - 2.0 * (wk * tau) @ self.E
        const = self.const0 + float(self.w @ (kappa * tau * tau + nu))
        return H, g, const


def dd_minimize(
    inst: ProblemInstance,
    xi: float,
    Q: float,
    budget: Optional[int] = None,
    keep_geometry: bool = False,
) -> DdResult:
    """Evaluate f(xi, Q) = min over (lambda1 >= 0, lambda2) of F exactly."""
    inst = validate_instance(inst)
    geom = build_geometry(inst, xi, Q)
    plane = _Plane(inst, geom)
    n = inst.n
    if budget is None:
        budget = 10 * (n * n + n)
    S, B = geom.slopes, geom.offsets

    vals = plane.F_many(geom.vertices)
    k0 = int(np.argmin(vals))
    p = geom.vertices[k0].copy()
    fp = float(vals[k0])
    path = [(p[0], p[1], fp)]

    seen_cells: set = set()
    seen_lines: set = set()
    steps = 0
    while True:
        tol_f = 1e-12 * (1.0 + abs(fp))
        if p[0] <= VERTEX_ATOL * (1.0 + abs(p[1])):
            p[0] = 0.0
        on_axis = p[0] == 0.0
        resid = p[1] - S * p[0] - B
        incident = np.abs(resid) <= INCIDENCE_RTOL * (1.0 + np.abs(B) + np.abs(S * p[0]) + abs(p[1]))

        best = None
        for d in _sector_directions(S[incident], on_axis):
            flags = resid > 0
            if d is not None:
                flags = flags.copy()
                flags[incident] = (d[1] - S[incident] * d[0]) > 0
            key = flags.tobytes()
            if key in seen_cells:
                continue
            seen_cells.add(key)
            reg = plane.regimes(flags)
            H, g, const = plane.quadratic(reg)
            sgn = np.where(flags, 1.0, -1.0)
            A = np.concatenate([np.stack([-sgn * S, sgn], axis=1), [[1.0, 0.0]]])
            bb = np.concatenate([sgn * B, [0.0]])
            status, q0, q1, qv = kernels.cell_qp(H, g, A, bb)
            if status == kernels.STATUS_UNBOUNDED:
                raise errors.DualUnbounded(f"F is unbounded below at xi={xi}, Q={Q}")
            if status != kernels.STATUS_OK:
                continue
            q = np.array([max(q0, 0.0), q1])
            fq = plane.F(q)
            if fq < fp - tol_f and (best is None or fq < best[1]):
                best = (q, fq)
        if best is not None:
            if steps >= budget:
                raise errors.IterationBudgetExceeded(f"directional descent exceeded {budget} steps")
            p, fp = best
            steps += 1
            path.append((p[0], p[1], fp))
            continue

        cands = [("line", int(k)) for k in np.nonzero(incident)[0]]
        if on_axis:
            cands.append(("axis", -1))
        for kind, k in cands:
            if (kind, k) in seen_lines:
                continue
            seen_lines.add((kind, k))
            if kind == "axis":
                u = np.array([0.0, 1.0])
                s_lo, s_hi = -np.inf, np.inf
            else:
                u = np.array([1.0, S[k]]) / math.hypot(1.0, S[k])
                s_lo, s_hi = -p[0] / u[0], np.inf
            status, s = kernels.line_min(p, u, s_lo, s_hi, *plane.args)
            if status == kernels.STATUS_UNBOUNDED:
                raise errors.DualUnbounded(f"F is unbounded below along a cut line at xi={xi}, Q={Q}")
            q = p + s * u
            q[0] = max(q[0], 0.0)
            fq = plane.F(q)
            if fq < fp - tol_f and (best is None or fq < best[1]):
                best = (q, fq)
        if best is not None:
            if steps >= budget:
                raise errors.IterationBudgetExceeded(f"directional descent exceeded {budget} steps")
            p, fp = best
            steps += 1
            path.append((p[0], p[1], fp))
            continue
        break

    # Each visited cell/line is a distinct cell/line of the arrangement (plus the axis).
    if len(seen_cells) + len(seen_lines) > geom.region_bound() + geom.n_lines + 1:
        raise AssertionError("directional descent visited more regions/rays than the arrangement has")
    return DdResult(
        lambda1_star=float(p[0]),
        lambda2_star=float(p[1]),
        f_value=fp,
        visited_regions=len(seen_cells),
        visited_rays=len(seen_lines),
        steps=steps,
        path=path,
        geometry=geom if keep_geometry else None,
    )


def _sector_directions(slopes: np.ndarray, on_axis: bool) -> list:
    """Bisectors of the angular sectors cut around a point by its incident lines."""
    angles = []
    for s in np.unique(slopes):
        th = math.atan2(s, 1.0)
        angles += [th, th + math.pi]
    if on_axis:
        angles += [math.pi / 2, -math.pi / 2]
    if not angles:
        return [None]
    angles = np.unique(np.mod(np.array(angles), 2 * math.pi))
    nxt = np.roll(angles, -1)
    nxt[-1] += 2 * math.pi
    if len(angles) == 1:
        nxt = angles + 2 * math.pi
    mids = 0.5 * (angles + nxt)
    out = []
    for th in mids:
        d = np.array([math.cos(th), math.sin(th)])
        if on_axis and d[0] <= 0:
            continue
        out.append(d)
    return out


def dump_geometry(path, inst: ProblemInstance, xi: float, Q: float) -> DdResult:
    """Solve at (xi, Q) and write lines, vertices and the descent path as JSON."""
    res = dd_minimize(inst, xi, Q, keep_geometry=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(res.geometry.to_json(res.path), fh, indent=2)
    return res
