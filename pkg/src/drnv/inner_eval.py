"""Closed-form inner supremum and the dual objective F(lambda, Q).

For one sample the inner problem is

    sup_{x >= 0}  c1 (x - Q)^+ + c2 (Q - x)^+ - a x**2 + 2 b x

whose maximiser is one of ``0``, ``x1 = (2b - c2) / (2a)`` or
``x2 = (2b + c1) / (2a)``.  Which one wins depends only on
``t = -2b = lambda2 - 2 x_i lambda1`` relative to four intercepts.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import errors, kernels
from .model import CostParams, DualPoint, ProblemInstance, RegionOutcome, validate_instance


class CaseId(enum.IntEnum):
    CASE1 = 1
    CASE2 = 2
    CASE3 = 3
    CASE4 = 4


@dataclass(frozen=True)
class Intercepts:
    beta1: float
    beta2: float
    beta3: float
    beta4: float

    def as_tuple(self) -> tuple:
        return (self.beta1, self.beta2, self.beta3, self.beta4)

    def __getitem__(self, j: int) -> float:
        """1-based access, ``ic[4] == ic.beta4``."""
        return self.as_tuple()[j - 1]


def newsvendor_loss(x, Q, costs: CostParams):
    """Pointwise underage/overage loss; works on scalars and arrays."""
    x = np.asarray(x, dtype=float)
    out = costs.c1 * np.maximum(x - Q, 0.0) + costs.c2 * np.maximum(Q - x, 0.0)
    return float(out) if out.ndim == 0 else out


def g_inner(x, a: float, b, Q: float, costs: CostParams):
    """The inner objective g_i(x) evaluated directly (no case analysis)."""
    x = np.asarray(x, dtype=float)
    return costs.c1 * np.maximum(x - Q, 0.0) + costs.c2 * np.maximum(Q - x, 0.0) - a * x * x + 2.0 * b * x


def classify_case(costs: CostParams, a: float, Q: float) -> tuple[CaseId, Intercepts]:
    if not a > 0:
        raise errors.NonpositiveCurvature(f"a must be > 0, got {a}")
    if Q < 0:
        raise ValueError(f"Q must be >= 0, got {Q}")
    ic = Intercepts(*kernels.intercepts(a, Q, costs.c1, costs.c2))
    return CaseId(kernels.case_of(*ic.as_tuple())), ic


def stationary_points(a: float, b, costs: CostParams):
    """(x1, x2): maximisers of the below-order and above-order quadratic pieces."""
    b = np.asarray(b, dtype=float)
    return (2.0 * b - costs.c2) / (2.0 * a), (2.0 * b + costs.c1) / (2.0 * a)


def _g_piece(region: int, a: float, b: float, Q: float, costs: CostParams) -> tuple[float, float]:
    x1, x2 = stationary_points(a, b, costs)
    x1, x2 = float(x1), float(x2)
    if region == 0:
        return 0.0, costs.c2 * Q
    if region == 1:
        return x1, costs.c2 * (Q - x1) - a * x1 * x1 + 2.0 * b * x1
    return x2, costs.c1 * (x2 - Q) - a * x2 * x2 + 2.0 * b * x2


def sup_g_ab(a: float, b: float, Q: float, costs: CostParams) -> RegionOutcome:
    """Inner supremum in terms of the curvature ``a`` and linear term ``b``."""
    case, ic = classify_case(costs, a, Q)
    t = -2.0 * b
    region = kernels.regime_of(t, int(case), *ic.as_tuple())
    x_star, val = _g_piece(region, a, b, Q, costs)
    return RegionOutcome(
        region_id=region, x_star=x_star, g_value=val, case_id=int(case),
        share_above=1.0 if region == 2 else 0.0,
    )


def sup_g(x_i: float, lam: DualPoint, Q: float, costs: CostParams) -> RegionOutcome:
    if not lam.a > 0:
        raise errors.NonpositiveCurvature(f"a = lambda1 + lambda3 must be > 0, got {lam.a}")
    return sup_g_ab(lam.a, float(lam.b(x_i)), Q, costs)


def psi(x_i: float, lam: DualPoint, Q: float, costs: CostParams) -> float:
    return -lam.lambda1 * x_i * x_i + sup_g(x_i, lam, Q, costs).g_value


def regions_at(inst: ProblemInstance, lam: DualPoint, Q: float) -> list[RegionOutcome]:
    return [sup_g(float(x), lam, Q, inst.costs) for x in inst.samples]


def eval_F(lam: DualPoint, Q: float, inst: ProblemInstance) -> float:
    """Dual objective; raises :class:`InfiniteValue` when ``a <= 0``."""
    if not lam.a > 0:
        raise errors.InfiniteValue(f"F is +inf for a = {lam.a} <= 0")
    inst = validate_instance(inst)
    if Q < 0:
        raise ValueError(f"Q must be >= 0, got {Q}")
    w = inst.psi_weights
    total = 0.0
    for wi, x in zip(w, inst.samples):
        total += wi * psi(float(x), lam, Q, inst.costs)
    return lam.lambda1 * inst.delta + lam.lambda2 * inst.mu + lam.lambda3 * inst.m2 + total


def eval_F_plane(l1, l2, xi: float, Q: float, inst: ProblemInstance) -> np.ndarray:
    """Vectorised F over points of the (lambda1, lambda2) plane at fixed xi."""
    if not xi > 0:
        raise errors.InfiniteValue(f"F is +inf for xi = {xi} <= 0")
    return kernels.eval_F_points(
        np.atleast_1d(l1), np.atleast_1d(l2), xi, Q, inst.samples, inst.psi_weights,
        inst.costs.c1, inst.costs.c2, inst.delta, inst.mu, inst.m2,
    )


def sup_g_dense(a: float, b, Q: float, costs: CostParams) -> np.ndarray:
    """Vectorised closed-form supremum over an array of ``b`` values."""
    if not a > 0:
        raise errors.NonpositiveCurvature(f"a must be > 0, got {a}")
    t = -2.0 * np.asarray(b, dtype=float)
    val, _ = kernels._phi_vec(t, a, Q, costs.c1, costs.c2)
    return val


def crossover_order(a: float, b: float, costs: CostParams) -> float:
    """Order quantity at which the two stationary points give equal value."""
    x1, x2 = stationary_points(a, b, costs)
    return 0.5 * float(x1 + x2)
