import math

import pytest

from hardy_admit.admit import (
    HYPOTHESES,
    Certificate,
    DomainSpec,
    WeightSpec,
    classify,
    interpolate_potentials,
    product_lift,
    register_hypothesis,
    sectorial_lift,
)
from hardy_admit.catalog import incomparable_pair
from hardy_admit.errors import ExponentRangeError, InvalidDomainError, ValidationError
from hardy_admit.exponents import ExponentContext, ball_volume, lorentz_index
from hardy_admit.profiles import (
    ConstProfile,
    ExpProfile,
    PowerLogProfile,
    PowerProfile,
    ShiftedPowerProfile,
)

W3 = ball_volume(3)


def branch(verdict, criterion):
    return next(b for b in verdict.theorems_applied if b.criterion == criterion)


def test_inverse_square_admissible_in_weak_space():
    v = classify(ExponentContext(3, 3, 2, 2), DomainSpec.full_space(3), WeightSpec.radial(PowerProfile(2.0)))
    assert v.status == "admissible" and v.admissible is True
    best = branch(v, "symmetrization.lorentz")
    assert best.space == "L^{1.5,inf}"
    assert best.norms["L^{1.5,inf}"] == pytest.approx(3 * W3 ** (2 / 3), rel=1e-6)


def test_cylindrical_power_branch():
    v = classify(ExponentContext(4, 3, 2, 2), DomainSpec.product(4, 3), WeightSpec.cylindrical(PowerProfile(2.0)))
    assert v.status == "admissible"
    assert v.accepted_by("cylindrical.power")


def test_above_sobolev_conjugate_is_excluded():
    v = classify(ExponentContext(3, 3, 2, 7), DomainSpec.full_space(3), WeightSpec.radial(ExpProfile(1.0)))
    assert v.status == "excluded" and v.admissible is False and not v.theorems_applied


def test_not_locally_integrable_is_excluded():
    v = classify(ExponentContext(3, 3, 2, 2), DomainSpec.full_space(3), WeightSpec.radial(PowerProfile(3.0)))
    assert v.status == "excluded"


def test_decaying_bounded_weight_accepted_by_two_criteria():
    v = classify(ExponentContext(3, 3, 2, 2), DomainSpec.full_space(3), WeightSpec.radial(ShiftedPowerProfile(3.0, 1.0)))
    assert v.accepted_by("symmetrization") and v.accepted_by("polar")


def test_borderline_dimension_uses_log_space():
    v = classify(ExponentContext(2, 2, 2, 2), DomainSpec.ball(2, 1.0), WeightSpec.radial(PowerLogProfile(2, 2, 1.0)))
    assert v.accepted_by("symmetrization.lorentz_zygmund")


def test_low_dimension_uses_plain_integrability():
    v = classify(ExponentContext(2, 2, 3, 2), DomainSpec.ball(2, 1.0), WeightSpec.radial(ConstProfile(1.0)))
    br = branch(v, "symmetrization.lebesgue")
    assert br.norms["L^1"] == pytest.approx(math.pi)


def test_unknown_when_no_criterion_applies():
    v = classify(ExponentContext(3, 3, 2, 3), DomainSpec.full_space(3), WeightSpec.radial(PowerProfile(2.0)))
    assert v.status == "unknown" and v.admissible is None and v.failure_reasons


def test_verdict_json_shape():
    d = classify(ExponentContext(3, 3, 2, 2), DomainSpec.full_space(3), WeightSpec.radial(PowerProfile(2.0))).to_dict()
    assert set(d) >= {"status", "admissible", "theorems_applied", "branches", "failure_reasons"}
    assert set(d["branches"][0]) >= {"theorem", "space", "norm", "range_checks", "admissible", "constant_form"}


def test_dimension_mismatch_rejected():
    with pytest.raises(ValidationError):
        classify(ExponentContext(3, 3, 2, 2), DomainSpec.full_space(4), WeightSpec.radial(ConstProfile(1.0)))


@pytest.mark.parametrize("kw", [dict(kind="product", N=3, k=3), dict(kind="ball", N=3, a=0.0, b=-1.0),
                                dict(kind="exterior", N=3, a=0.0, b=math.inf)])
def test_invalid_domains(kw):
    with pytest.raises(InvalidDomainError):
        DomainSpec(**kw)


def test_incomparable_pair_memberships():
    alpha = lorentz_index(3, 2, 2)
    g1, g2 = incomparable_pair(3, alpha)
    ctx, dom = ExponentContext(3, 3, 2, 2), DomainSpec.full_space(3)
    v1 = classify(ctx, dom, WeightSpec.radial(g1))
    v2 = classify(ctx, dom, WeightSpec.radial(g2))
    assert v1.accepted_by("symmetrization.lorentz") and not v1.accepted_by("polar")
    assert v2.accepted_by("polar")


def cert(q, p=2.0, kind="hardy", c=1.0):
    return Certificate(ConstProfile(1.0), p, q, c, kind=kind)


def test_interpolation():
    c1 = cert(2.0)
    assert interpolate_potentials(c1, cert(4.0), 1.0) is c1
    mixed = interpolate_potentials(c1, cert(4.0, c=4.0), 0.5)
    assert mixed.q == pytest.approx(3.0) and mixed.constant == pytest.approx(2.0)
    assert interpolate_potentials(c1, cert(None, kind="integrable"), 0.5).q == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        interpolate_potentials(c1, cert(4.0), 1.5)


def test_product_lift():
    lifted = product_lift(cert(2.0, c=3.0), 1.0)
    assert lifted.constant == pytest.approx(3.0) and "L^inf" in lifted.norms
    vol = 2.0
    sub = product_lift(cert(1.0, c=1.0), vol ** 0.5)
    assert "L^2" in sub.norms
    with pytest.raises(ExponentRangeError):
        product_lift(cert(2.1), 1.0)


def test_sectorial_lift_exponents():
    ctx = ExponentContext(5, 3, 2, 2)
    dom = DomainSpec.product(5, 3, a=1.0, b=2.0)
    q = 1.5
    c = sectorial_lift(ctx, dom, ConstProfile(1.0), ExpProfile(1.0), PowerProfile(-(2 - 3) * q / 2), 0.0, q / 2, "radial-1")
    assert c.q == pytest.approx(q)
    assert "L^4((0,inf), r^1)" in c.norms
    full = sectorial_lift(ctx, dom, ConstProfile(1.0), ExpProfile(1.0), PowerProfile(-(1 + 3 - 5)), 0.5, 0.5,
                          "radial-3", swap_roles=True)
    assert full.q == pytest.approx(0.5 * 2 + 0.5 * 10 / 3)
    assert any(k.startswith("L^inf") for k in full.norms)


def test_sectorial_lift_needs_registered_hypothesis():
    ctx = ExponentContext(5, 3, 2, 2)
    dom = DomainSpec.product(5, 3, a=1.0, b=2.0)
    with pytest.raises(ValidationError):
        sectorial_lift(ctx, dom, ConstProfile(1.0), ConstProfile(1.0), ConstProfile(1.0), 0.0, 0.5, "nope")
    register_hypothesis("nope", "test entry")
    try:
        sectorial_lift(ctx, dom, ConstProfile(1.0), ExpProfile(1.0), ConstProfile(1.0), 0.0, 0.5, "nope")
    finally:
        HYPOTHESES.pop("nope")


def test_unit_exponent_tries_both_log_indices():
    ctx = ExponentContext(2, 2, 2, 1)
    v = classify(ctx, DomainSpec.ball(2, 1.0), WeightSpec.radial(PowerLogProfile(2.0, 3.0, 1.0)))
    spaces = sorted(b.space for b in v.branches if b.criterion == "symmetrization.lorentz_zygmund")
    assert spaces == ["LZ^{1,2;0.5}", "LZ^{1,2;0}"]
    assert v.status == "admissible"
