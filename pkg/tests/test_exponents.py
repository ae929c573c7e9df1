import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardy_admit.errors import ExponentRangeError
from hardy_admit.exponents import (
    ExponentContext,
    ball_volume,
    conjugate,
    interpolated_sobolev,
    is_conjugate_triple,
    lebesgue_index,
    lorentz_index,
    lorentz_index_in_range,
    sobolev_conjugate,
)


def test_lorentz_index_values():
    assert lorentz_index(3, 2, 2) == pytest.approx(1.5)
    assert math.isinf(lorentz_index(3, 2, 6))
    # (p*/q)' with p* = 4, q = 3 gives 4
    assert lorentz_index(4, 2, 3) == pytest.approx(4.0)
    assert lorentz_index(4, 2, 3) == pytest.approx(conjugate(sobolev_conjugate(4, 2) / 3))


def test_lorentz_index_beyond_conjugate_is_negative():
    assert lorentz_index(3, 2, 7) < 0
    assert not lorentz_index_in_range(3, 2, 7)
    assert lorentz_index_in_range(3, 2, 5)


def test_interpolated_sobolev_values():
    assert interpolated_sobolev(3, 2, 0) == pytest.approx(6)
    assert interpolated_sobolev(3, 2, 2) == pytest.approx(2)
    assert interpolated_sobolev(4, 2, 1) == pytest.approx(3)


def test_lebesgue_index_values():
    assert lebesgue_index(3, 2, 2) == pytest.approx(1.0)
    assert math.isinf(lebesgue_index(3, 2, 4))
    assert lebesgue_index(3, 2, 2.5) == pytest.approx(4 / 3)


def test_conjugates():
    assert conjugate(2) == 2
    assert math.isinf(conjugate(1))
    assert conjugate(3) == pytest.approx(1.5)
    assert conjugate(math.inf) == 1.0
    assert is_conjugate_triple(2, math.inf, 2)
    assert is_conjugate_triple(3, 3, 3)
    s, p = 1.5, 2.0
    assert is_conjugate_triple(s / (s - 1), s * p / (p - s), p)
    assert not is_conjugate_triple(2, 2, 2)


def test_ball_volume():
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)
    assert ball_volume(2) == pytest.approx(math.pi)


@pytest.mark.parametrize("N,k,p,q", [(0, 1, 2, 2), (3, 4, 2, 2), (3, 3, 1, 2), (3, 3, 2, 0), (3, 3, math.inf, 2)])
def test_context_rejects(N, k, p, q):
    with pytest.raises(ExponentRangeError):
        ExponentContext(N, k, p, q)


def test_context_derived():
    d = ExponentContext(3, 3, 2, 2).derived()
    assert d.alpha == pytest.approx(1.5) and d.p_star == pytest.approx(6) and d.beta == pytest.approx(1)
    assert d.alpha_in_range
    assert ExponentContext(2, 2, 2, 3).derived().beta is None


@settings(max_examples=300, deadline=None)
@given(N=st.integers(2, 8), p=st.floats(0.0, 0.95), frac=st.floats(0.01, 1.0))
def test_round_trip_identities(N, p, frac):
    p = 1.05 + p * (N - 1.1)
    s = frac * p
    q = interpolated_sobolev(N, p, s)
    assert lorentz_index(N, p, q) == pytest.approx(N / s, rel=1e-10)
    assert interpolated_sobolev(N, p, N / lorentz_index(N, p, q)) == pytest.approx(q, rel=1e-10)
