"""Domain types shared by the solvers and the oracles.

Units follow the case-study convention: demand in thousands of units and costs in
thousands of currency per unit, so a cost figure reads in millions.  The Wasserstein
radius ``delta`` is in squared demand units because the ground cost is ``(x - y)**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import errors


@dataclass(frozen=True)
class CostParams:
    c1: float  # underage cost per unit
    c2: float  # overage cost per unit

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise errors.NonpositiveCost(f"costs must be positive, got c1={self.c1}, c2={self.c2}")

    @property
    def c_tilde(self) -> float:
        return self.c1 + self.c2


@dataclass(frozen=True)
class ProfitParams:
    p: float  # sale price
    c: float  # unit cost
    s: float  # salvage value

    def __post_init__(self):
        if not (self.p > self.c > self.s > 0):
            raise errors.OrderingViolation(
                f"need p > c > s > 0, got p={self.p}, c={self.c}, s={self.s}"
            )


@dataclass(frozen=True)
class MomentSpec:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma >= 0:
            raise errors.NegativeSigma(f"sigma must be >= 0, got {self.sigma}")

    @property
    def m2(self) -> float:
        """Second raw moment mu**2 + sigma**2."""
        return self.mu * self.mu + self.sigma * self.sigma


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Demand samples plus the ambiguity and cost data of one newsvendor problem.

    ``moments=None`` means "use the empirical moments of the samples", which keeps
    the ``delta = 0`` problem feasible.  ``unweighted=True`` sums the per-sample dual
    terms without the ``1/n`` factor (literal reading of the dual objective); the
    default weights them by the empirical measure.
    """

    samples: np.ndarray
    delta: float
    costs: CostParams
    moments: Optional[MomentSpec] = None
    sample_weight: Optional[np.ndarray] = None
    unweighted: bool = False
    validated: bool = field(default=False, compare=False)

    @property
    def n(self) -> int:
        return int(len(self.samples))

    @property
    def weights(self) -> np.ndarray:
        if self.sample_weight is None:
            return np.full(self.n, 1.0 / self.n)
        return np.asarray(self.sample_weight, dtype=float)

    @property
    def psi_weights(self) -> np.ndarray:
        """Weights applied to the per-sample terms of the dual objective."""
        return np.ones(self.n) if self.unweighted else self.weights

    @property
    def mu(self) -> float:
        return self.moments.mu if self.moments is not None else empirical_moments(self)[0]

    @property
    def sigma(self) -> float:
        return self.moments.sigma if self.moments is not None else empirical_moments(self)[1]

    @property
    def m2(self) -> float:
        return self.mu**2 + self.sigma**2


def make_instance(
    samples: Sequence[float],
    delta: float,
    c1: float,
    c2: float,
    mu: Optional[float] = None,
    sigma: Optional[float] = None,
    **kwargs,
) -> ProblemInstance:
    """Build and validate an instance from plain numbers."""
    moments = None
    if mu is not None or sigma is not None:
        if mu is None or sigma is None:
            raise errors.InvalidInstance("mu and sigma must be given together")
        moments = MomentSpec(float(mu), float(sigma))
    inst = ProblemInstance(
        samples=np.asarray(samples, dtype=float),
        delta=float(delta),
        costs=CostParams(float(c1), float(c2)),
        moments=moments,
        **kwargs,
    )
    return validate_instance(inst)


def validate_instance(inst: ProblemInstance) -> ProblemInstance:
    """Check the invariants and return a copy with samples sorted in decreasing order.

    Moments left unspecified are filled in with the empirical ones.
    """
    if inst.validated:
        return inst
    x = np.asarray(inst.samples, dtype=float).ravel()
    if x.size == 0:
        raise errors.EmptySamples("at least one demand sample is required")
    if not np.all(np.isfinite(x)):
        raise errors.NegativeSample("samples must be finite")
    if np.any(x < 0):
        raise errors.NegativeSample(f"samples must be >= 0, got min {x.min()}")
    if not (inst.delta >= 0 and math.isfinite(inst.delta)):
        raise errors.NegativeDelta(f"delta must be a finite value >= 0, got {inst.delta}")
    if inst.sample_weight is None:
        w = np.full(x.size, 1.0 / x.size)
    else:
        w = np.asarray(inst.sample_weight, dtype=float).ravel()
        if w.shape != x.shape or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise errors.InvalidWeights("sample weights must be nonnegative and sum to 1")
    order = np.argsort(-x, kind="stable")
    x = x[order]
    w = w[order]
    x.flags.writeable = False
    w.flags.writeable = False
    out = replace(inst, samples=x, sample_weight=w, validated=True)
    if out.moments is None:
        mu_hat, sigma_hat = empirical_moments(out)
        out = replace(out, moments=MomentSpec(mu_hat, sigma_hat))
    return out


def empirical_moments(inst: ProblemInstance) -> tuple[float, float]:
    """Weighted sample mean and standard deviation."""
    x = np.asarray(inst.samples, dtype=float)
    if x.size == 0:
        raise errors.EmptySamples("at least one demand sample is required")
    w = inst.weights
    mu_hat = float(np.dot(w, x))
    if np.all(x == x[0]):
        return float(x[0]), 0.0
    var = float(np.dot(w, x * x)) - mu_hat * mu_hat
    return mu_hat, math.sqrt(max(var, 0.0))


@dataclass(frozen=True)
class DualPoint:
    lambda1: float
    lambda2: float
    lambda3: float

    @property
    def a(self) -> float:
        return self.lambda1 + self.lambda3

    @property
    def xi(self) -> float:
        return self.lambda1 + self.lambda3

    def b(self, x_i):
        """Linear coefficient of the inner objective for sample(s) ``x_i``."""
        return self.lambda1 * np.asarray(x_i, dtype=float) - self.lambda2 / 2.0

    @classmethod
    def from_plane(cls, lambda1: float, lambda2: float, xi: float) -> "DualPoint":
        return cls(lambda1, lambda2, xi - lambda1)


@dataclass(frozen=True)
class RegionOutcome:
    """Where one sample's inner maximization lands.

    ``region_id`` is 0, 1 or 2 for the regions with optimal demand ``0``, the
    below-order stationary point and the above-order stationary point.
    ``share_above`` is the envelope weight placed on the above-order branch when
    the sample sits on a kink; away from kinks it is 1.0 for region 2 and 0.0
    otherwise.
    """

    region_id: int
    x_star: float
    g_value: float
    case_id: int
    share_above: float = 0.0


@dataclass
class SolveReport:
    q_star: float
    worst_case_cost: float
    dual_point: DualPoint
    xi_star: float
    per_sample_regions: list
    iterations: dict
    tolerances: dict
    subgradient_trace: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "q_star": self.q_star,
            "worst_case_cost": self.worst_case_cost,
            "dual_point": {
                "lambda1": self.dual_point.lambda1,
                "lambda2": self.dual_point.lambda2,
                "lambda3": self.dual_point.lambda3,
            },
            "xi_star": self.xi_star,
            "per_sample_regions": [
                {"region_id": r.region_id, "x_star": r.x_star, "g_value": r.g_value,
                 "case_id": r.case_id, "share_above": r.share_above}
                for r in self.per_sample_regions
            ],
            "iterations": dict(self.iterations),
            "tolerances": dict(self.tolerances),
            "subgradient_trace": [list(map(float, t)) for t in self.subgradient_trace],
            "flags": dict(self.flags),
        }
