import math

import numpy as np
import pytest

from drnv import errors
from drnv.model import (
    CostParams,
    DualPoint,
    MomentSpec,
    ProblemInstance,
    ProfitParams,
    empirical_moments,
    make_instance,
    validate_instance,
)


def test_validate_sorts_decreasing():
    inst = make_instance([3, 1, 2], 1.0, 20, 10, mu=2, sigma=1)
    assert list(inst.samples) == [3, 2, 1]


def test_negative_sample_rejected():
    with pytest.raises(errors.NegativeSample):
        make_instance([-1], 1.0, 20, 10, mu=2, sigma=1)


def test_point_mass_instance_valid():
    inst = make_instance([5], 0.0, 1, 1, mu=5, sigma=0)
    assert inst.n == 1 and inst.mu == 5 and inst.sigma == 0


@pytest.mark.parametrize(
    "kwargs, exc",
    [
        (dict(samples=[], delta=1.0, c1=1, c2=1), errors.EmptySamples),
        (dict(samples=[1.0], delta=-1.0, c1=1, c2=1), errors.NegativeDelta),
        (dict(samples=[1.0], delta=1.0, c1=0, c2=1), errors.NonpositiveCost),
        (dict(samples=[1.0], delta=1.0, c1=1, c2=-2), errors.NonpositiveCost),
        (dict(samples=[1.0], delta=1.0, c1=1, c2=1, mu=1, sigma=-1), errors.NegativeSigma),
        (dict(samples=[float("nan")], delta=1.0, c1=1, c2=1), errors.NegativeSample),
    ],
)
def test_invariant_errors(kwargs, exc):
    with pytest.raises(exc):
        make_instance(**kwargs)


def test_errors_are_value_errors():
    assert issubclass(errors.NegativeSample, ValueError)
    assert issubclass(errors.InvalidInstance, errors.DrnvError)


def test_validate_idempotent():
    inst = make_instance([1, 4, 2], 1.0, 2, 3)
    assert validate_instance(inst) is inst


def test_validated_arrays_are_read_only():
    inst = make_instance([1, 4, 2], 1.0, 2, 3)
    with pytest.raises(ValueError):
        inst.samples[0] = 7.0


def test_moments_default_to_empirical():
    inst = make_instance([2, 4], 0.0, 1, 1)
    assert inst.mu == 3 and inst.sigma == 1 and inst.m2 == 10


def test_mu_sigma_together():
    with pytest.raises(errors.InvalidInstance):
        make_instance([1.0], 1.0, 1, 1, mu=1.0)


def test_weights_reordered_with_samples():
    inst = validate_instance(
        ProblemInstance(np.array([1.0, 3.0]), 0.0, CostParams(1, 1), sample_weight=np.array([0.25, 0.75]))
    )
    assert list(inst.samples) == [3.0, 1.0]
    assert list(inst.weights) == [0.75, 0.25]


def test_invalid_weights():
    with pytest.raises(errors.InvalidWeights):
        validate_instance(ProblemInstance(np.array([1.0, 3.0]), 0.0, CostParams(1, 1), sample_weight=np.array([0.5, 0.6])))


def test_unweighted_switch():
    inst = make_instance([1, 2, 3], 0.0, 1, 1, unweighted=True)
    assert np.all(inst.psi_weights == 1.0)
    assert np.allclose(inst.weights, 1 / 3)


@pytest.mark.parametrize(
    "samples, weights, expected",
    [
        ([2, 4], [0.5, 0.5], (3.0, 1.0)),
        ([5], None, (5.0, 0.0)),
        ([1, 2, 3, 4], None, (2.5, math.sqrt(1.25))),
    ],
)
def test_empirical_moments(samples, weights, expected):
    inst = ProblemInstance(np.asarray(samples, float), 0.0, CostParams(1, 1),
                           sample_weight=None if weights is None else np.asarray(weights))
    mu, sd = empirical_moments(inst)
    assert mu == pytest.approx(expected[0], abs=1e-15)
    assert sd == pytest.approx(expected[1], abs=1e-15)


def test_point_mass_moments_exact():
    x = 0.1 + 0.2  # not exactly representable sums must not leak into sigma
    inst = ProblemInstance(np.full(7, x), 0.0, CostParams(1, 1))
    assert empirical_moments(inst) == (x, 0.0)


def test_cost_params_c_tilde():
    assert CostParams(20, 10).c_tilde == 30


def test_profit_params_ordering():
    ProfitParams(30, 20, 10)
    with pytest.raises(errors.OrderingViolation):
        ProfitParams(30, 10, 0)
    with pytest.raises(errors.OrderingViolation):
        ProfitParams(10, 20, 5)


def test_moment_spec_m2():
    assert MomentSpec(3.0, 4.0).m2 == 25.0


def test_dual_point_derived():
    lam = DualPoint(1.0, 4.0, 2.0)
    assert lam.a == lam.xi == 3.0
    assert lam.b(5.0) == 1.0 * 5.0 - 2.0
    assert DualPoint.from_plane(1.0, 4.0, 3.0) == lam
