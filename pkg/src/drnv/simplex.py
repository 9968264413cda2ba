"""Dense two-phase tableau simplex with Bland's anti-cycling rule as fallback.

Solves ``max c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0``.  It exists so the
primal oracle does not depend on an external LP solver; the problems it sees are
small (a few dozen rows, a few thousand columns).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import errors


@dataclass
class LpResult:
    x: np.ndarray
    value: float
    iterations: int


def _pivot(T: np.ndarray, z: np.ndarray, basis: np.ndarray, r: int, j: int) -> None:
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    z -= z[j] * T[r]
    basis[r] = j


def _run(T, z, basis, allowed: np.ndarray, tol: float, max_iter: int, iters: int, stall_limit: int) -> int:
    """Phase loop on tableau ``T`` (last column = rhs) with reduced-cost row ``z``.

    Maximises; ``z[j] < 0`` means column ``j`` improves the objective.  Pricing is
    Dantzig's (most negative reduced cost) until ``stall_limit`` consecutive
    degenerate pivots; from then on Bland's rule (lowest index enters, lowest basic
    index leaves among ratio ties) is used until the objective strictly improves.
    Bland's rule cannot cycle, and a strict improvement can never return to an
    earlier basis, so the loop terminates.
    """
    stall = 0
    while True:
        eligible = (z[:-1] < -tol) & allowed
        cand = np.nonzero(eligible)[0]
        if cand.size == 0:
            return iters
        if iters >= max_iter:
            raise errors.IterationBudgetExceeded(f"simplex exceeded {max_iter} pivots")
        bland = stall >= stall_limit
        j = int(cand[0]) if bland else int(cand[np.argmin(z[cand])])
        colj = T[:, j]
        rows = np.nonzero(colj > tol)[0]
        if rows.size == 0:
            raise errors.UnboundedLp(f"LP is unbounded along column {j}")
        ratios = T[rows, -1] / colj[rows]
        rmin = ratios.min()
        ties = rows[ratios <= rmin + tol * (1.0 + abs(rmin))]
        r = int(ties[np.argmin(basis[ties])])
        before = z[-1]
        _pivot(T, z, basis, r, j)
        iters += 1
        stall = 0 if z[-1] > before + tol * (1.0 + abs(before)) else stall + 1


def linprog_max(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    tol: float = 1e-9,
    max_iter: Optional[int] = None,
    stall_limit: int = 50,
) -> LpResult:
    """``stall_limit = 0`` gives pure Bland pricing."""
    c = np.asarray(c, dtype=float)
    nv = c.size
    A_ub = np.zeros((0, nv)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, nv)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, nv)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, nv)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    mu_, me = A_ub.shape[0], A_eq.shape[0]
    m = mu_ + me

    # columns: structural | slacks (one per ub row) | artificials (one per row)
    A = np.zeros((m, nv + mu_))
    A[:mu_, :nv] = A_ub
    A[:mu_, nv:] = np.eye(mu_)
    A[mu_:, :nv] = A_eq
    b = np.concatenate([b_ub, b_eq])
    scale = np.maximum(np.abs(A).max(axis=1, initial=0.0), np.abs(b))
    scale[scale == 0] = 1.0
    A /= scale[:, None]
    b = b / scale
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    ncol = nv + mu_ + m
    T = np.zeros((m, ncol + 1))
    T[:, : nv + mu_] = A
    T[:, nv + mu_ : ncol] = np.eye(m)
    T[:, -1] = b
    basis = np.arange(nv + mu_, ncol)
    if max_iter is None:
        max_iter = 50 * (m + ncol)

    # Phase 1: maximise -sum(artificials).
    z = np.zeros(ncol + 1)
    z[nv + mu_ : ncol] = 1.0
    z -= T.sum(axis=0)
    z[nv + mu_ : ncol] = 0.0
    allowed = np.ones(ncol, dtype=bool)
    iters = _run(T, z, basis, allowed, tol, max_iter, 0, stall_limit)
    if -z[-1] > 1e-7 * (1.0 + np.abs(b).sum()):
        raise errors.PrimalInfeasible(f"LP infeasible (phase-1 residual {-z[-1]:.3g})")

    # Drive zero-level artificials out of the basis; drop redundant rows.
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if basis[r] >= nv + mu_:
            row = T[r, : nv + mu_]
            nz = np.nonzero(np.abs(row) > tol)[0]
            if nz.size:
                _pivot(T, z, basis, r, int(nz[0]))
            else:
                keep[r] = False
    T = T[keep]
    basis = basis[keep]
    allowed = np.zeros(ncol, dtype=bool)
    allowed[: nv + mu_] = True

    # Phase 2.
    cfull = np.zeros(ncol + 1)
    cfull[:nv] = c
    z = -cfull.copy()
    z += cfull[basis] @ T
    iters = _run(T, z, basis, allowed, tol, max_iter, iters, stall_limit)

    x = np.zeros(ncol)
    x[basis] = T[:, -1]
    xs = np.maximum(x[:nv], 0.0)
    return LpResult(x=xs, value=float(c @ xs), iterations=iters)
