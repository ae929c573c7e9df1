import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hardy_admit.errors import DivergentMaximalFunction, ValidationError
from hardy_admit.exponents import ball_volume
from hardy_admit.profiles import ConstProfile, ExpProfile, IndicatorProfile, PowerLogProfile, PowerProfile
from hardy_admit.rearrange import (
    RadialFunction,
    SampledFunction,
    decreasing_rearrangement,
    distribution,
    maximal_function,
    radial_shortcut,
)

W3 = ball_volume(3)


def test_distribution_examples():
    assert distribution(RadialFunction(IndicatorProfile(1.0), 3), 0.5) == pytest.approx(W3)
    assert distribution(RadialFunction(PowerProfile(1.0), 3), 2.0) == pytest.approx(math.pi / 6)
    assert distribution(RadialFunction(ConstProfile(0.0), 3), 0.3) == 0.0


def test_rearrangement_of_inverse_distance():
    r = decreasing_rearrangement(RadialFunction(PowerProfile(1.0), 3))
    t = np.array([1e-6, 0.3, 1.0, 50.0])
    np.testing.assert_allclose(r(t), (W3 / t) ** (1 / 3), rtol=1e-12)
    np.testing.assert_allclose(r.maximal(t), 1.5 * (W3 / t) ** (1 / 3), rtol=1e-8)


def test_rearrangement_of_indicator():
    r = decreasing_rearrangement(SampledFunction(np.array([1.0]), np.array([1.0])))
    np.testing.assert_allclose(r(np.array([0.2, 0.9, 1.5])), [1, 1, 0])
    assert r.maximal(2.0) == pytest.approx(0.5)


def test_critical_log_weight_closed_form():
    # |x|^-N log(e (R/|x|)^N)^-N written as c r^-N log(e R1 / r)^-N
    N, R = 2, 1.0
    R1 = R * math.exp((1 - N) / N)
    g = PowerLogProfile(N, N, R1, c=N ** -N)
    r = decreasing_rearrangement(RadialFunction(g, N, 0.0, R1))
    w = ball_volume(N)
    t = np.array([1e-8, 1e-3, 0.3, 1.0])
    expected = (w / t) * np.log(math.e * w * R ** N / t) ** (-N)
    np.testing.assert_allclose(r(t), expected, rtol=1e-9)


def test_divergent_maximal_function():
    r = decreasing_rearrangement(RadialFunction(PowerProfile(3.0), 3))
    with pytest.raises(DivergentMaximalFunction):
        maximal_function(r)


def test_shortcut_examples():
    assert radial_shortcut(PowerProfile(2.0), 3)(1.0) == pytest.approx(W3 ** (2 / 3))
    assert radial_shortcut(ExpProfile(1.0), 2)(math.pi) == pytest.approx(math.exp(-1))
    assert radial_shortcut(ConstProfile(2.5), 3, b=2.0)(1.0) == pytest.approx(2.5)


@pytest.mark.parametrize("profile", [PowerProfile(1.0), ExpProfile(1.0), PowerProfile(2.0)])
def test_shortcut_matches_root_finding(profile):
    fast = radial_shortcut(profile, 3)
    slow = decreasing_rearrangement(RadialFunction(profile, 3), force_generic=True)
    for t in (1e-3, 0.1, 1.0, 10.0):
        assert slow.exact(t) == pytest.approx(fast(t), rel=1e-10)


def test_shortcut_rejects_increasing():
    with pytest.raises(ValidationError):
        radial_shortcut(PowerProfile(-1.0), 3)


tables = st.integers(1, 30).flatmap(
    lambda n: st.tuples(arrays(np.float64, n, elements=st.floats(0, 10)), arrays(np.float64, n, elements=st.floats(0.01, 3)))
)


@settings(max_examples=200, deadline=None)
@given(tables, st.floats(0, 10))
def test_equimeasurable(tab, s):
    f = SampledFunction(*tab)
    r = decreasing_rearrangement(f)
    mids = r.starts + 0.5 * r.widths
    star = SampledFunction(r(mids), r.widths)
    mu = distribution(f, s)
    assert abs(distribution(star, s) - mu) <= 1e-9 * (1 + mu)


@settings(max_examples=200, deadline=None)
@given(tables, st.data())
def test_maximal_dominates_and_decreases(tab, data):
    r = decreasing_rearrangement(SampledFunction(*tab))
    t = np.sort(np.array(data.draw(st.lists(st.floats(1e-3, 100), min_size=2, max_size=20))))
    star, dstar = r(t), r.maximal(t)
    assert np.all(dstar >= star * (1 - 1e-12) - 1e-300)
    assert np.all(np.diff(star) <= 1e-12) and np.all(np.diff(dstar) <= 1e-12 * (1 + dstar[:-1]))


def test_radial_majorant_from_directions():
    from hardy_admit.profiles import radial_majorant

    rng = np.random.default_rng(3)
    dirs = rng.normal(size=(400, 3))
    radii = np.linspace(0.1, 2.0, 20)
    # |x|^-1 (1 + x_1^2/|x|^2) peaks at 2/|x| along the first axis
    f = lambda x: (1 + x[:, 0] ** 2 / np.sum(x ** 2, axis=1)) / np.linalg.norm(x, axis=1)
    prof = radial_majorant(f, radii, dirs)
    assert np.all(prof.values <= 2 / radii + 1e-12)
    assert np.all(prof.values >= 0.98 * 2 / radii)
    exact = radial_majorant(f, radii, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    assert np.allclose(exact.values, 2 / radii)
