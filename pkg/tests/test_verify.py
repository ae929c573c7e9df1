import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardy_admit.admit import DomainSpec, WeightSpec
from hardy_admit.errors import ValidationError
from hardy_admit.exponents import ExponentContext, ball_volume
from hardy_admit.profiles import ConstProfile, PowerLogProfile, PowerProfile
from hardy_admit.rearrange import radial_shortcut
from hardy_admit.verify import (
    CylindricalTestFunction,
    TestFunction,
    check_embedding,
    check_one_dim_hardy,
    empirical_best_constant,
    hardy_ratio,
    polya_szego_check,
    power_cutoff_family,
    scaling_invariance_check,
    sin_dilate_family,
)

CTX = ExponentContext(3, 3, 2, 2)
BALL = DomainSpec.ball(3, 1.0)
W3 = ball_volume(3)


def test_cone_ratio_constant_weight():
    rep = hardy_ratio(CTX, BALL, WeightSpec.radial(ConstProfile(1.0)), TestFunction.cone(1.0))
    assert rep.lhs == pytest.approx(2 * math.pi / 15, rel=1e-9)
    assert rep.rhs == pytest.approx(4 * math.pi / 3, rel=1e-9)
    assert rep.ratio == pytest.approx(0.1, rel=1e-9)


def test_cone_ratio_inverse_square():
    rep = hardy_ratio(CTX, BALL, WeightSpec.radial(PowerProfile(2.0)), TestFunction.cone(1.0))
    assert rep.lhs == pytest.approx(4 * math.pi / 3, rel=1e-9) and rep.ratio == pytest.approx(1.0, rel=1e-9)


def test_zero_function():
    rep = hardy_ratio(CTX, BALL, WeightSpec.radial(ConstProfile(1.0)), TestFunction.zero(1.0))
    assert rep.lhs == 0.0 and rep.rhs == 0.0


def test_support_outside_domain_rejected():
    with pytest.raises(ValidationError):
        hardy_ratio(CTX, BALL, WeightSpec.radial(ConstProfile(1.0)), TestFunction.cone(2.0))


def test_sin_family_approaches_first_eigenvalue():
    est = empirical_best_constant(CTX, BALL, WeightSpec.radial(ConstProfile(1.0)), sin_dilate_family(1.0),
                                  np.linspace(0.5, 1.0, 20), log_scale=False)
    assert est.sup_ratio == pytest.approx(1 / math.pi ** 2, rel=1e-6)
    assert len(est.rows()) == 20


def test_power_cutoff_ratio_grows_as_eps_shrinks():
    w = WeightSpec.radial(PowerProfile(2.0))
    full = DomainSpec.full_space(3)
    fam = power_cutoff_family(3, 2)
    ratios = [hardy_ratio(CTX, full, w, fam(e)).ratio for e in (0.4, 0.1, 0.02)]
    assert ratios[0] < ratios[1] < ratios[2] < 4.0


def test_scaling_invariance_cylindrical():
    ctx = ExponentContext(4, 3, 2, 2)
    dom = DomainSpec.product(4, 3)
    u = CylindricalTestFunction(TestFunction.cone(1.0), TestFunction.cone(1.0))
    exact = scaling_invariance_check(ctx, dom, WeightSpec.cylindrical(PowerProfile(2.0)), u, (0.5, 1.0, 2.0, 4.0))
    assert exact["deviation"] < 1e-8
    off = scaling_invariance_check(ctx, dom, WeightSpec.cylindrical(PowerProfile(2.5)), u, (1.0, 2.0, 4.0))
    dev = off["per_lambda"]
    assert dev[1.0] < 1e-12 and dev[2.0] < dev[4.0] and dev[4.0] > 0.1


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.5, 3.0))
def test_dilation_covariance(lam, d):
    # for g = r^-d the ratio scales by lam^(d - 2) when u -> u(lam x) in R^3 with p = q = 2
    w = WeightSpec.radial(PowerProfile(d))
    full = DomainSpec.full_space(3)
    u = TestFunction.cone(1.0)
    base = hardy_ratio(CTX, full, w, u).ratio
    scaled = hardy_ratio(CTX, full, w, u.dilate(lam)).ratio
    assert scaled == pytest.approx(base * lam ** (d - 2), rel=1e-8)


def test_one_dimensional_reduction():
    g = radial_shortcut(PowerProfile(2.0), 3)
    out = check_one_dim_hardy(CTX, g, TestFunction.cone(1.0))
    assert out["holds"] and out["lhs"] > 0
    zero = check_one_dim_hardy(CTX, g, TestFunction.zero(1.0))
    assert zero["lhs"] == 0.0 and zero["holds"]


def test_one_dimensional_reduction_borderline():
    ctx = ExponentContext(2, 2, 2, 3)
    R1 = math.exp(-0.5)
    g = radial_shortcut(PowerLogProfile(2, 2, R1, c=0.25), 2, b=R1)
    out = check_one_dim_hardy(ctx, g, TestFunction.cone(g.measure))
    assert out["holds"]


def test_embeddings_finite():
    out = check_embedding(CTX, [TestFunction.cone(1.0), TestFunction.cone(2.0), TestFunction.sin_profile(1.0)])
    assert all(math.isfinite(r) for r in out["ratios"]) and out["max_ratio"] > 0
    ctx = ExponentContext(2, 2, 2, 2)
    out = check_embedding(ctx, [TestFunction.log_cutoff(r0, 1.0) for r0 in (0.1, 0.01)], DomainSpec.ball(2, 1.0))
    assert all(math.isfinite(r) for r in out["ratios"])


def test_polya_szego():
    cone = polya_szego_check(TestFunction.cone(1.0), 3, 2)
    assert cone["lhs_1d"] == pytest.approx(4 * math.pi / 3, rel=1e-6)
    assert cone["rhs_Nd"] == pytest.approx(4 * math.pi / 3, rel=1e-6)
    bumps = polya_szego_check(TestFunction.bumps([0.5, 1.5], 0.4), 3, 2)
    assert bumps["lhs_1d"] < bumps["rhs_Nd"] and bumps["holds"]
    zero = polya_szego_check(TestFunction.zero(1.0), 3, 2)
    assert zero["lhs_1d"] == 0.0 and zero["holds"]
