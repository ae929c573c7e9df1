import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hardy_admit.catalog import radial_decreasing_catalog
from hardy_admit.exponents import ball_volume
from hardy_admit.profiles import ConstProfile, PowerLogProfile, PowerProfile, ShiftedPowerProfile
from hardy_admit.rearrange import SampledFunction, StepRearrangement, radial_shortcut
from hardy_admit.spaces import (
    lorentz_norm,
    lorentz_quasinorm,
    lorentz_zygmund_norm,
    lorentz_zygmund_quasinorm,
    weak_triple_norm,
    weighted_lebesgue_norm,
)

W3 = ball_volume(3)
INF = math.inf


def indicator(measure=1.0):
    return StepRearrangement(np.array([1.0]), np.array([measure]))


def test_quasinorm_examples():
    assert lorentz_quasinorm(radial_shortcut(PowerProfile(1.0), 3), 3, INF).value == pytest.approx(W3 ** (1 / 3), rel=1e-9)
    assert lorentz_quasinorm(indicator(), 2, 2).value == pytest.approx(1.0)
    assert lorentz_quasinorm(indicator(), 2, 1).value == pytest.approx(2.0)


def test_norm_examples():
    assert lorentz_norm(radial_shortcut(PowerProfile(1.0), 3), 3, INF).value == pytest.approx(1.5 * W3 ** (1 / 3), abs=1e-6)
    assert lorentz_norm(radial_shortcut(PowerProfile(2.0), 3), 1.5, INF).value == pytest.approx(3 * W3 ** (2 / 3), abs=1e-6)
    assert lorentz_norm(StepRearrangement(np.array([0.0]), np.array([1.0])), 2, INF).value == 0.0


def test_norm_of_non_integrable_weight_is_infinite():
    res = lorentz_norm(radial_shortcut(PowerProfile(3.0), 3), 1.0, INF)
    assert not res.finite and math.isinf(res.value)


def test_lorentz_zygmund_examples():
    N, R = 2, 1.0
    R1 = R * math.exp((1 - N) / N)
    g = radial_shortcut(PowerLogProfile(N, N, R1, c=N ** -N), N, b=R1)
    assert lorentz_zygmund_quasinorm(g, 1, INF, N).value <= ball_volume(N) * (1 + 1e-9)
    assert lorentz_zygmund_quasinorm(indicator(1.0), 1, INF, 0).value == pytest.approx(1.0)
    # t log(e^2 / t) on (0, e) peaks at t = e
    assert lorentz_zygmund_quasinorm(indicator(math.e), 1, INF, 1).value == pytest.approx(math.e, rel=1e-9)
    assert lorentz_zygmund_norm(g, 1, INF, N - 1).finite


def test_weighted_lebesgue_examples():
    assert weighted_lebesgue_norm(ShiftedPowerProfile(3.0, 1.0), 1, theta=1.0).value == pytest.approx(0.5, rel=1e-9)
    assert math.isinf(weighted_lebesgue_norm(PowerProfile(2.0), 1, theta=1.0).value)
    assert weighted_lebesgue_norm(ConstProfile(0.0), 1, theta=1.0).value == 0.0


def test_weak_triple_examples():
    v = weak_triple_norm(radial_shortcut(PowerProfile(1.0), 3), 3, 2).value
    assert 2.418 - 1e-3 <= v <= math.sqrt(3) * 2.41799 + 1e-3
    assert weak_triple_norm(SampledFunction(np.ones(4), np.full(4, 0.5)), 2, 1).value == pytest.approx(math.sqrt(2.0))
    assert weak_triple_norm(SampledFunction(np.zeros(3), np.ones(3)), 2, 1).value == 0.0


tables = st.integers(1, 25).flatmap(
    lambda n: st.tuples(arrays(np.float64, n, elements=st.floats(0.01, 10)), arrays(np.float64, n, elements=st.floats(0.05, 3)))
)


@settings(max_examples=200, deadline=None)
@given(tables, st.sampled_from([0.5, 2.0]), st.floats(0.5, 5), st.one_of(st.floats(0.5, 6), st.just(INF)))
def test_power_identity(tab, a, p, q):
    f = SampledFunction(*tab)
    fa = SampledFunction(f.values ** a, f.weights)
    lhs = lorentz_quasinorm(fa, p / a, q / a).value
    assert lhs == pytest.approx(lorentz_quasinorm(f, p, q).value ** a, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(tables, st.floats(1.1, 5), st.one_of(st.floats(1.0, 6), st.just(INF)))
def test_quasinorm_below_norm(tab, p, q):
    f = SampledFunction(*tab)
    assert lorentz_quasinorm(f, p, q).value <= lorentz_norm(f, p, q).value * (1 + 1e-9)


CATALOG = radial_decreasing_catalog()


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_nesting_and_sandwich(name):
    g = radial_shortcut(CATALOG[name], 3, b=1.0)
    p = 1.2
    values = [lorentz_quasinorm(g, p, q) for q in (1.5, 3.0, INF)]
    first = next((i for i, v in enumerate(values) if v.finite), None)
    if first is not None:
        assert all(v.finite for v in values[first:])
    s = 1.1
    triple = weak_triple_norm(g, p, s).value
    weak = lorentz_quasinorm(g, p, INF).value
    strong = lorentz_norm(g, p, INF).value
    assert weak * (1 - 1e-6) <= triple <= (p / (p - s)) ** (1 / s) * weak * (1 + 1e-6)
    assert strong * (1 - 1e-6) <= triple


def test_lorentz_zygmund_log_log_divergence():
    from hardy_admit.admit import DomainSpec
    from hardy_admit.rearrange import decreasing_rearrangement

    # on the unit disc f** = 2 pi / (t L) with L = 1 + log(pi/t)/2
    r = decreasing_rearrangement(DomainSpec.ball(2, 1.0).radial_function(PowerLogProfile(2.0, 2.0, 1.0)))
    assert lorentz_zygmund_norm(r, 1.0, 2.0, 0.0).value == pytest.approx(2 * math.sqrt(2) * math.pi, rel=1e-8)
    # one more half power of the logarithm makes the integral diverge like log log
    assert not lorentz_zygmund_norm(r, 1.0, 2.0, 0.5).finite
    slower = decreasing_rearrangement(DomainSpec.ball(2, 1.0).radial_function(PowerLogProfile(2.0, 1.2, 1.0)))
    assert not lorentz_zygmund_norm(slower, 1.0, 2.0, 0.0).finite
    assert lorentz_zygmund_quasinorm(slower, 1.0, 2.0, 0.5).finite
