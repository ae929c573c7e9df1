import math

import numpy as np
import pytest

from hardy_admit.admit import DomainSpec
from hardy_admit.errors import UnsupportedCaseError, ValidationError
from hardy_admit.exponents import ExponentContext
from hardy_admit.profiles import BumpProfile, ConstProfile
from hardy_admit.solve import (
    RadialMesh,
    SolverOptions,
    homogeneity_rescale,
    minimize_rayleigh,
    richardson,
    weak_residual,
)

CTX = ExponentContext(3, 3, 2, 2)
BALL = DomainSpec.ball(3, 1.0)


@pytest.fixture(scope="module")
def laplacian():
    return minimize_rayleigh(CTX, BALL, ConstProfile(1.0), RadialMesh.graded(0.0, 1.0, 400))


@pytest.fixture(scope="module")
def bump_pair():
    ctx = ExponentContext(3, 3, 2, 3)
    return minimize_rayleigh(ctx, BALL, BumpProfile(0.5, 0.2), RadialMesh.graded(0.0, 1.0, 400))


def test_mesh_properties():
    m = RadialMesh.graded(0.0, 1.0, 500)
    assert m.cells == 500 and m.grading <= 1.05 + 1e-9 and m.radius == 1.0
    g = RadialMesh.geometric(10.0, r_min=1e-3)
    assert g.grading <= 1.05 + 1e-9 and g.cells >= 100
    with pytest.raises(ValidationError):
        RadialMesh.graded(0.0, 1.0, 50)


def test_laplacian_ground_state(laplacian):
    assert laplacian.lam == pytest.approx(math.pi ** 2, rel=5e-3)
    assert laplacian.lam > math.pi ** 2
    assert laplacian.residual < 1e-6 and laplacian.attained
    assert np.all(laplacian.u >= 0) and laplacian.u[-1] == 0.0
    assert not laplacian.diagnostics["nonconvex"]


def test_richardson_on_known_rate():
    assert richardson(1.0 + 4e-4, 1.0 + 1e-4) == pytest.approx(1.0)


def test_larger_weight_lowers_quotient():
    mesh = RadialMesh.graded(0.0, 1.0, 200)
    small = minimize_rayleigh(CTX, BALL, ConstProfile(1.0), mesh).lam
    large = minimize_rayleigh(CTX, BALL, ConstProfile(3.0), mesh).lam
    assert large == pytest.approx(small / 3, rel=1e-9)


def test_bump_weight_attained(bump_pair):
    assert bump_pair.attained and bump_pair.residual < 1e-6


def test_residual_sensitive_to_multiplier(laplacian):
    assert weak_residual(laplacian, multiplier=1.01 * laplacian.lam) > 1e3 * laplacian.residual


def test_rescaling(bump_pair):
    same = homogeneity_rescale(bump_pair, bump_pair.lam)
    assert same.diagnostics["rescale_factor"] == pytest.approx(1.0)
    double = homogeneity_rescale(bump_pair, 2 * bump_pair.lam)
    assert double.diagnostics["rescale_factor"] == pytest.approx(0.5)
    assert double.residual < 1e-6


def test_rescaling_rejects_equal_exponents(laplacian):
    with pytest.raises(ValidationError):
        homogeneity_rescale(laplacian, 1.0)


def test_rejects_sublinear_and_cylindrical():
    with pytest.raises(ValidationError):
        minimize_rayleigh(ExponentContext(3, 3, 2, 1), BALL, ConstProfile(1.0), RadialMesh.graded(0.0, 1.0, 200))
    with pytest.raises(UnsupportedCaseError):
        minimize_rayleigh(ExponentContext(4, 3, 2, 2), DomainSpec.product(4, 3, 0.0, 1.0), ConstProfile(1.0),
                          RadialMesh.graded(0.0, 1.0, 200))


def test_annulus_needs_inner_condition():
    ann = DomainSpec.annulus(3, 0.5, 1.0)
    res = minimize_rayleigh(CTX, ann, ConstProfile(1.0), RadialMesh.graded(0.5, 1.0, 200))
    # first Dirichlet eigenvalue of the shell: (pi / width)^2
    assert res.lam == pytest.approx((math.pi / 0.5) ** 2, rel=1e-3)
    assert res.u[0] == 0.0


def test_p_not_two_converges():
    ctx = ExponentContext(3, 3, 3, 3)
    res = minimize_rayleigh(ctx, BALL, ConstProfile(1.0), RadialMesh.graded(0.0, 1.0, 200), SolverOptions())
    assert res.residual < 1e-6 and res.lam > 0
