"""Hot numeric kernels with two interchangeable backends.

Every kernel exists twice: an explicit-loop version compiled with ``numba.njit`` and
a vectorised pure-numpy version.  ``DRNV_BACKEND=numpy`` (or a missing numba) selects
the numpy path at import time; :func:`set_backend` switches at runtime.

All kernels work at a fixed curvature ``a = xi > 0``.  Per-sample state is described
by ``t = lambda2 - 2 * x * lambda1`` and a *regime*: 0 when the inner maximiser is
demand 0, 1 when it is the below-order stationary point, 2 when it is the
above-order stationary point.  Within a regime the inner value is the quadratic
``kappa * (t - tau)**2 + nu``.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

STATUS_OK = 0
STATUS_UNBOUNDED = 1
STATUS_EMPTY = 2

# intercept indices (1-based, matching beta1..beta4) bounding the regions of each case
CASE_LINES = {1: (1, 4, 2), 2: (1, 4, 2, 3), 3: (1, 2, 3), 4: (1, 2)}


# ---------------------------------------------------------------------------
# scalar helpers (shared by both backends; jitted when numba is present)
# ---------------------------------------------------------------------------

def intercepts(a, Q, c1, c2):
    b1 = c1
    b2 = -c2
    b3 = 0.5 * (c1 - c2) - 2.0 * a * Q
    b4 = c1 - 2.0 * math.sqrt(a * (c1 + c2) * Q)
    return b1, b2, b3, b4


def case_of(b1, b2, b3, b4):
    in_range = b2 <= b4 and b4 <= b1
    if b3 >= b2:
        return 1 if in_range else 4
    return 2 if in_range else 3


def regime_from_flags(case, ge1, ge2, ge3, ge4):
    """Regime given which intercepts ``t`` lies on or above."""
    if case == 1:
        return 0 if ge4 else 2
    if case == 3:
        if ge2:
            return 0
        return 1 if ge3 else 2
    if case == 2:
        if ge4:
            return 0
        if ge2:
            return 2
        return 1 if ge3 else 2
    return 0 if ge1 else 2


def regime_of(t, case, b1, b2, b3, b4):
    return regime_from_flags(case, t >= b1, t >= b2, t >= b3, t >= b4)


def phi_value(t, r, a, Q, c1, c2):
    if r == 0:
        return c2 * Q
    if r == 1:
        d = t + c2
        return c2 * Q + d * d / (4.0 * a)
    d = c1 - t
    return d * d / (4.0 * a) - c1 * Q


def phi_slope(t, r, a, c1, c2):
    if r == 0:
        return 0.0
    if r == 1:
        return (t + c2) / (2.0 * a)
    return (t - c1) / (2.0 * a)


if HAVE_NUMBA:
    _jit = numba.njit(cache=True)
    _intercepts_j = _jit(intercepts)
    _case_of_j = _jit(case_of)
    _regime_from_flags_j = _jit(regime_from_flags)

    @numba.njit(cache=True)
    def _regime_of_j(t, case, b1, b2, b3, b4):
        return _regime_from_flags_j(case, t >= b1, t >= b2, t >= b3, t >= b4)

    _phi_value_j = _jit(phi_value)
    _phi_slope_j = _jit(phi_slope)


# ---------------------------------------------------------------------------
# F(lambda1, lambda2; xi, Q) at many points
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _eval_F_points_jit(l1, l2, xi, Q, xs, ws, c1, c2, delta, mu, m2):
        b1, b2, b3, b4 = _intercepts_j(xi, Q, c1, c2)
        case = _case_of_j(b1, b2, b3, b4)
        sx2 = 0.0
        for i in range(xs.size):
            sx2 += ws[i] * xs[i] * xs[i]
        lin1 = delta - m2 - sx2
        out = np.empty(l1.size)
        for k in range(l1.size):
            acc = 0.0
            for i in range(xs.size):
                t = l2[k] - 2.0 * xs[i] * l1[k]
                r = _regime_of_j(t, case, b1, b2, b3, b4)
                acc += ws[i] * _phi_value_j(t, r, xi, Q, c1, c2)
            out[k] = l1[k] * lin1 + l2[k] * mu + xi * m2 + acc
        return out


def _phi_vec(t, a, Q, c1, c2):
    b1, b2, b3, b4 = intercepts(a, Q, c1, c2)
    case = case_of(b1, b2, b3, b4)
    reg = regimes_np(t, case, b1, b2, b3, b4)
    val = np.where(
        reg == 0,
        c2 * Q,
        np.where(reg == 1, c2 * Q + (t + c2) ** 2 / (4.0 * a), (c1 - t) ** 2 / (4.0 * a) - c1 * Q),
    )
    return val, reg


def regimes_np(t, case, b1, b2, b3, b4):
    t = np.asarray(t, dtype=float)
    return regimes_from_flags_np(case, t >= b1, t >= b2, t >= b3, t >= b4)


def regimes_from_flags_np(case, ge1, ge2, ge3, ge4):
    """Vectorised :func:`regime_from_flags`."""
    if case == 1:
        return np.where(ge4, 0, 2)
    if case == 3:
        return np.where(ge2, 0, np.where(ge3, 1, 2))
    if case == 2:
        return np.where(ge4, 0, np.where(ge2, 2, np.where(ge3, 1, 2)))
    return np.where(ge1, 0, 2)


def _eval_F_points_np(l1, l2, xi, Q, xs, ws, c1, c2, delta, mu, m2, chunk=8192):
    lin1 = delta - m2 - float(np.dot(ws, xs * xs))
    out = np.empty(l1.size)
    for start in range(0, l1.size, chunk):
        a1 = l1[start:start + chunk]
        a2 = l2[start:start + chunk]
        t = a2[:, None] - 2.0 * xs[None, :] * a1[:, None]
        val, _ = _phi_vec(t, xi, Q, c1, c2)
        out[start:start + chunk] = a1 * lin1 + a2 * mu + xi * m2 + val @ ws
    return out


# ---------------------------------------------------------------------------
# convex quadratic over a polygon {x : A x >= bb}
# ---------------------------------------------------------------------------

def _cell_qp_py(H00, H01, H11, g0, g1, A, bb):
    """Minimise 0.5 x'Hx + g'x over {A x >= bb} in the plane.

    Returns (status, x0, x1, value).  The minimum of a convex quadratic over a
    polygon is either an interior stationary point or lies on an edge, so every
    edge is minimised in closed form after clipping it against the other rows.
    """
    K = A.shape[0]
    tr = H00 + H11
    det = H00 * H11 - H01 * H01
    gn = math.sqrt(g0 * g0 + g1 * g1)
    tiny = 1e-14 * (1.0 + abs(tr))

    # interior stationary points
    if tr > tiny and det > 1e-12 * tr * tr:
        x0 = -(H11 * g0 - H01 * g1) / det
        x1 = -(-H01 * g0 + H00 * g1) / det
        ok = True
        for j in range(K):
            lhs = A[j, 0] * x0 + A[j, 1] * x1
            tol = 1e-11 * (1.0 + abs(bb[j]) + abs(A[j, 0] * x0) + abs(A[j, 1] * x1))
            if lhs < bb[j] - tol:
                ok = False
                break
        if ok:
            return 0, x0, x1, 0.5 * (H00 * x0 * x0 + 2 * H01 * x0 * x1 + H11 * x1 * x1) + g0 * x0 + g1 * x1
    elif tr > tiny:
        # rank one: H = tr * e e', null direction v
        if H00 >= H11:
            e0, e1 = H00, H01
        else:
            e0, e1 = H01, H11
        en = math.sqrt(e0 * e0 + e1 * e1)
        e0 /= en
        e1 /= en
        v0, v1 = -e1, e0
        gv = g0 * v0 + g1 * v1
        if abs(gv) <= 1e-12 * (1.0 + gn):
            ge = g0 * e0 + g1 * e1
            p0 = -ge / tr * e0
            p1 = -ge / tr * e1
            lo = -np.inf
            hi = np.inf
            empty = False
            for j in range(K):
                den = A[j, 0] * v0 + A[j, 1] * v1
                num = bb[j] - (A[j, 0] * p0 + A[j, 1] * p1)
                tol = 1e-11 * (1.0 + abs(bb[j]) + abs(A[j, 0] * p0) + abs(A[j, 1] * p1))
                if abs(den) <= 1e-14:
                    if num > tol:
                        empty = True
                        break
                elif den > 0:
                    lo = max(lo, num / den)
                else:
                    hi = min(hi, num / den)
            if not empty and lo <= hi + 1e-12 * (1.0 + abs(lo) + abs(hi)):
                s = min(max(0.0, lo), hi) if lo <= hi else 0.5 * (lo + hi)
                x0 = p0 + s * v0
                x1 = p1 + s * v1
                return 0, x0, x1, 0.5 * (H00 * x0 * x0 + 2 * H01 * x0 * x1 + H11 * x1 * x1) + g0 * x0 + g1 * x1
        else:
            # recession along the null direction
            for sgn in (-1.0, 1.0):
                d0 = sgn * v0
                d1 = sgn * v1
                if g0 * d0 + g1 * d1 < -1e-12 * (1.0 + gn):
                    inside = True
                    for j in range(K):
                        if A[j, 0] * d0 + A[j, 1] * d1 < -1e-12 * (abs(A[j, 0]) + abs(A[j, 1])):
                            inside = False
                            break
                    if inside:
                        return 1, np.nan, np.nan, -np.inf
    else:
        # (numerically) linear objective: probe -g and every edge direction
        if gn > 1e-300:
            for c in range(2 * K + 1):
                if c == 2 * K:
                    d0, d1 = -g0, -g1
                else:
                    sgn = 1.0 if c % 2 == 0 else -1.0
                    d0 = -sgn * A[c // 2, 1]
                    d1 = sgn * A[c // 2, 0]
                if g0 * d0 + g1 * d1 < -1e-12 * gn * math.sqrt(d0 * d0 + d1 * d1):
                    inside = True
                    for j in range(K):
                        if A[j, 0] * d0 + A[j, 1] * d1 < -1e-12 * (abs(A[j, 0]) + abs(A[j, 1])) * math.sqrt(d0 * d0 + d1 * d1):
                            inside = False
                            break
                    if inside:
                        return 1, np.nan, np.nan, -np.inf

    best = np.inf
    bx0 = np.nan
    bx1 = np.nan
    for k in range(K):
        a0 = A[k, 0]
        a1 = A[k, 1]
        nrm = a0 * a0 + a1 * a1
        p0 = a0 * bb[k] / nrm
        p1 = a1 * bb[k] / nrm
        u0 = -a1
        u1 = a0
        lo = -np.inf
        hi = np.inf
        empty = False
        for j in range(K):
            if j == k:
                continue
            den = A[j, 0] * u0 + A[j, 1] * u1
            num = bb[j] - (A[j, 0] * p0 + A[j, 1] * p1)
            tol = 1e-11 * (1.0 + abs(bb[j]) + abs(A[j, 0] * p0) + abs(A[j, 1] * p1))
            if abs(den) <= 1e-13 * math.sqrt((A[j, 0] ** 2 + A[j, 1] ** 2) * nrm):
                if num > tol:
                    empty = True
                    break
            elif den > 0:
                lo = max(lo, num / den)
            else:
                hi = min(hi, num / den)
        if empty:
            continue
        if lo > hi:
            if lo - hi > 1e-9 * (1.0 + abs(lo) + abs(hi)):
                continue
            lo = hi = 0.5 * (lo + hi)
        alpha = H00 * u0 * u0 + 2 * H01 * u0 * u1 + H11 * u1 * u1
        beta = (H00 * p0 + H01 * p1 + g0) * u0 + (H01 * p0 + H11 * p1 + g1) * u1
        if alpha > 1e-13 * (1.0 + abs(tr)) * nrm:
            s = -beta / alpha
        elif beta > 1e-12 * (1.0 + gn) * math.sqrt(nrm):
            s = lo
        elif beta < -1e-12 * (1.0 + gn) * math.sqrt(nrm):
            s = hi
        else:
            s = 0.0
        if s < lo:
            s = lo
        if s > hi:
            s = hi
        if not math.isfinite(s):
            return 1, np.nan, np.nan, -np.inf
        x0 = p0 + s * u0
        x1 = p1 + s * u1
        val = 0.5 * (H00 * x0 * x0 + 2 * H01 * x0 * x1 + H11 * x1 * x1) + g0 * x0 + g1 * x1
        if val < best:
            best = val
            bx0 = x0
            bx1 = x1
    if not math.isfinite(best):
        return 2, np.nan, np.nan, np.inf
    return 0, bx0, bx1, best


def _cell_qp_np(H00, H01, H11, g0, g1, A, bb):
    """Vectorised twin of :func:`_cell_qp_py`: all edges clipped at once."""
    A = np.asarray(A, dtype=float)
    bb = np.asarray(bb, dtype=float)
    H = np.array([[H00, H01], [H01, H11]])
    g = np.array([g0, g1])
    tr = H00 + H11
    det = H00 * H11 - H01 * H01
    gn = float(np.hypot(g0, g1))
    tiny = 1e-14 * (1.0 + abs(tr))

    def q(x):
        return 0.5 * x @ H @ x + g @ x

    def feasible(x):
        lhs = A @ x
        tol = 1e-11 * (1.0 + np.abs(bb) + np.abs(A * x).sum(axis=1))
        return bool(np.all(lhs >= bb - tol))

    def in_cone(d):
        return bool(np.all(A @ d >= -1e-12 * np.abs(A).sum(axis=1) * np.hypot(*d)))

    if tr > tiny and det > 1e-12 * tr * tr:
        x = np.linalg.solve(H, -g)
        if feasible(x):
            return 0, float(x[0]), float(x[1]), float(q(x))
    elif tr > tiny:
        e = np.array([H00, H01]) if H00 >= H11 else np.array([H01, H11])
        e = e / np.hypot(*e)
        v = np.array([-e[1], e[0]])
        if abs(g @ v) <= 1e-12 * (1.0 + gn):
            p = -(g @ e) / tr * e
            den = A @ v
            num = bb - A @ p
            tol = 1e-11 * (1.0 + np.abs(bb) + np.abs(A * p).sum(axis=1))
            par = np.abs(den) <= 1e-14
            if not np.any(par & (num > tol)):
                with np.errstate(divide="ignore", invalid="ignore"):
                    ratio = num / den
                lo = np.max(ratio[~par & (den > 0)], initial=-np.inf)
                hi = np.min(ratio[~par & (den < 0)], initial=np.inf)
                if lo <= hi + 1e-12 * (1.0 + abs(lo) + abs(hi)):
                    s = min(max(0.0, lo), hi) if lo <= hi else 0.5 * (lo + hi)
                    x = p + s * v
                    return 0, float(x[0]), float(x[1]), float(q(x))
        else:
            for d in (-v, v):
                if g @ d < -1e-12 * (1.0 + gn) and in_cone(d):
                    return 1, np.nan, np.nan, -np.inf
    elif gn > 1e-300:
        dirs = np.concatenate([np.stack([-A[:, 1], A[:, 0]], 1), np.stack([A[:, 1], -A[:, 0]], 1), -g[None, :]])
        for d in dirs:
            if g @ d < -1e-12 * gn * np.hypot(*d) and in_cone(d):
                return 1, np.nan, np.nan, -np.inf

    nrm = (A * A).sum(axis=1)
    P = A * (bb / nrm)[:, None]
    U = np.stack([-A[:, 1], A[:, 0]], axis=1)
    den = A @ U.T  # den[j, k] = A_j . u_k
    num = bb[:, None] - A @ P.T
    tol = 1e-11 * (1.0 + np.abs(bb)[:, None] + np.abs(A[:, 0:1] * P[:, 0][None, :]) + np.abs(A[:, 1:2] * P[:, 1][None, :]))
    par = np.abs(den) <= 1e-13 * np.sqrt(nrm[:, None] * nrm[None, :])
    np.fill_diagonal(par, True)
    np.fill_diagonal(num, 0.0)
    empty = np.any(par & (num > tol), axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = num / den
    lo = np.max(np.where(~par & (den > 0), ratio, -np.inf), axis=0)
    hi = np.min(np.where(~par & (den < 0), ratio, np.inf), axis=0)
    gap = lo - hi
    empty |= gap > 1e-9 * (1.0 + np.abs(lo) + np.abs(hi))
    squeeze = (gap > 0) & ~empty
    mid = 0.5 * (lo + hi)
    lo = np.where(squeeze, mid, lo)
    hi = np.where(squeeze, mid, hi)
    alpha = np.einsum("ki,ij,kj->k", U, H, U)
    beta = np.einsum("ki,ki->k", P @ H + g[None, :], U)
    scale = 1e-12 * (1.0 + gn) * np.sqrt(nrm)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(
            alpha > 1e-13 * (1.0 + abs(tr)) * nrm,
            -beta / alpha,
            np.where(beta > scale, lo, np.where(beta < -scale, hi, 0.0)),
        )
    s = np.minimum(np.maximum(s, lo), hi)
    live = ~empty
    if np.any(live & ~np.isfinite(s)):
        return 1, np.nan, np.nan, -np.inf
    if not np.any(live):
        return 2, np.nan, np.nan, np.inf
    X = P + s[:, None] * U
    vals = 0.5 * np.einsum("ki,ij,kj->k", X, H, X) + X @ g
    vals = np.where(live, vals, np.inf)
    k = int(np.argmin(vals))
    return 0, float(X[k, 0]), float(X[k, 1]), float(vals[k])


# ---------------------------------------------------------------------------
# exact minimisation of F along a line  lambda = p + s u,  s in [s_lo, s_hi]
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _line_min_jit(p1, p2, u1, u2, s_lo, s_hi, xi, Q, xs, ws, c1, c2, delta, mu, m2):
        b1, b2, b3, b4 = _intercepts_j(xi, Q, c1, c2)
        case = _case_of_j(b1, b2, b3, b4)
        betas = np.array([b1, b2, b3, b4])
        n = xs.size
        sx2 = 0.0
        for i in range(n):
            sx2 += ws[i] * xs[i] * xs[i]
        lin = (delta - m2 - sx2) * u1 + mu * u2
        t0 = np.empty(n)
        e = np.empty(n)
        for i in range(n):
            t0[i] = p2 - 2.0 * xs[i] * p1
            e[i] = u2 - 2.0 * xs[i] * u1
        bp = np.empty(4 * n + 2)
        m = 0
        for i in range(n):
            if e[i] != 0.0:
                for j in range(4):
                    s = (betas[j] - t0[i]) / e[i]
                    if s > s_lo and s < s_hi:
                        bp[m] = s
                        m += 1
        pts = np.empty(m + 2)
        pts[0] = s_lo
        srt = np.sort(bp[:m])
        for k in range(m):
            pts[k + 1] = srt[k]
        pts[m + 1] = s_hi
        for k in range(m + 1):
            lo = pts[k]
            hi = pts[k + 1]
            if hi <= lo and k < m:
                continue
            if math.isinf(lo) and math.isinf(hi):
                smid = 0.0
            elif math.isinf(lo):
                smid = hi - 1.0
            elif math.isinf(hi):
                smid = lo + 1.0
            else:
                smid = 0.5 * (lo + hi)
            D = lin
            B = 0.0
            for i in range(n):
                t = t0[i] + smid * e[i]
                r = _regime_of_j(t, case, b1, b2, b3, b4)
                if r != 0:
                    D += ws[i] * _phi_slope_j(t, r, xi, c1, c2) * e[i]
                    B += ws[i] * e[i] * e[i] / (2.0 * xi)
            dscale = 1e-12 * (1.0 + abs(lin) + abs(D))
            if math.isinf(hi):
                d_hi = np.inf if B > 0 else D
            else:
                d_hi = D + B * (hi - smid)
            if d_hi < -dscale:
                if math.isinf(hi):
                    return 1, np.nan
                continue
            if math.isinf(lo):
                d_lo = -np.inf if B > 0 else D
            else:
                d_lo = D + B * (lo - smid)
            if d_lo >= -dscale:
                if math.isinf(lo):
                    if d_lo > dscale:
                        return 1, np.nan
                    return 0, min(0.0, hi) if not math.isinf(hi) else 0.0
                return 0, lo
            return 0, smid - D / B
        return 0, s_hi


def _line_min_np(p1, p2, u1, u2, s_lo, s_hi, xi, Q, xs, ws, c1, c2, delta, mu, m2):
    b1, b2, b3, b4 = intercepts(xi, Q, c1, c2)
    case = case_of(b1, b2, b3, b4)
    betas = np.array([b1, b2, b3, b4])
    lin = (delta - m2 - float(np.dot(ws, xs * xs))) * u1 + mu * u2
    t0 = p2 - 2.0 * xs * p1
    e = u2 - 2.0 * xs * u1
    nz = e != 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        bp = ((betas[None, :] - t0[nz, None]) / e[nz, None]).ravel()
    bp = np.sort(bp[(bp > s_lo) & (bp < s_hi)])
    pts = np.concatenate([[s_lo], bp, [s_hi]])
    lo = pts[:-1]
    hi = pts[1:]
    smid = np.where(
        np.isinf(lo) & np.isinf(hi), 0.0,
        np.where(np.isinf(lo), hi - 1.0, np.where(np.isinf(hi), lo + 1.0, 0.5 * (lo + hi))),
    )
    t = t0[None, :] + smid[:, None] * e[None, :]
    reg = regimes_np(t, case, b1, b2, b3, b4)
    slope = np.where(reg == 1, (t + c2) / (2 * xi), np.where(reg == 2, (t - c1) / (2 * xi), 0.0))
    D = lin + (slope * e[None, :]) @ ws
    B = np.where(reg != 0, 1.0, 0.0) @ (ws * e * e / (2.0 * xi))
    dscale = 1e-12 * (1.0 + abs(lin) + np.abs(D))
    with np.errstate(invalid="ignore"):
        d_hi = np.where(np.isinf(hi), np.where(B > 0, np.inf, D), D + B * (hi - smid))
        d_lo = np.where(np.isinf(lo), np.where(B > 0, -np.inf, D), D + B * (lo - smid))
    valid = hi > lo
    valid[-1] = True
    cand = np.nonzero(valid & (d_hi >= -dscale))[0]
    if cand.size == 0:
        if np.isinf(s_hi):
            return 1, np.nan
        return 0, s_hi
    k = int(cand[0])
    if d_lo[k] >= -dscale[k]:
        if np.isinf(lo[k]):
            if d_lo[k] > dscale[k]:
                return 1, np.nan
            return 0, min(0.0, hi[k]) if np.isfinite(hi[k]) else 0.0
        return 0, float(lo[k])
    return 0, float(smid[k] - D[k] / B[k])


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

_NUMPY = {
    "eval_F_points": _eval_F_points_np,
    "cell_qp": _cell_qp_np,
    "line_min": _line_min_np,
}

if HAVE_NUMBA:
    _NUMBA = {
        "eval_F_points": _eval_F_points_jit,
        "cell_qp": numba.njit(cache=True)(_cell_qp_py),
        "line_min": _line_min_jit,
    }
else:  # pragma: no cover
    _NUMBA = None

_requested = os.environ.get("DRNV_BACKEND", "numba").strip().lower()
_active = "numba" if (_requested != "numpy" and HAVE_NUMBA) else "numpy"


def backend() -> str:
    return _active


def set_backend(name: str) -> str:
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend name."""
    global _active
    name = name.lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    prev, _active = _active, name
    return prev


def _table():
    return _NUMBA if _active == "numba" else _NUMPY


def eval_F_points(l1, l2, xi, Q, xs, ws, c1, c2, delta, mu, m2):
    l1 = np.ascontiguousarray(l1, dtype=float)
    l2 = np.ascontiguousarray(l2, dtype=float)
    return _table()["eval_F_points"](
        l1, l2, float(xi), float(Q), np.ascontiguousarray(xs, dtype=float),
        np.ascontiguousarray(ws, dtype=float), float(c1), float(c2), float(delta), float(mu), float(m2),
    )


def cell_qp(H, g, A, bb):
    return _table()["cell_qp"](
        float(H[0, 0]), float(H[0, 1]), float(H[1, 1]), float(g[0]), float(g[1]),
        np.ascontiguousarray(A, dtype=float), np.ascontiguousarray(bb, dtype=float),
    )


def line_min(p, u, s_lo, s_hi, xi, Q, xs, ws, c1, c2, delta, mu, m2):
    return _table()["line_min"](
        float(p[0]), float(p[1]), float(u[0]), float(u[1]), float(s_lo), float(s_hi),
        float(xi), float(Q), np.ascontiguousarray(xs, dtype=float), np.ascontiguousarray(ws, dtype=float),
        float(c1), float(c2), float(delta), float(mu), float(m2),
    )
