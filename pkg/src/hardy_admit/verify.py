"""Both sides of the weighted Sobolev inequality on explicit radial test functions.

Every N-dimensional integral is reduced to a radial one (two radial variables
for cylindrical weights) and evaluated in logarithmic coordinates ``s = log r``,
so power-type singularities at the origin become exponential tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from .admit import DomainSpec, WeightSpec
from .conditions import MuckenhouptInput, muckenhoupt_constant
from .errors import NumericFailure, ValidationError
from .exponents import ExponentContext, ball_volume, sobolev_conjugate, sphere_area
from .profiles import CallableProfile, PowerProfile, RadialProfile
from .quadrature import log_integrate
from .rearrange import RadialFunction, Rearrangement, decreasing_rearrangement
from .spaces import lorentz_norm, lorentz_zygmund_norm

__all__ = [
    "TestFunction",
    "CylindricalTestFunction",
    "RatioReport",
    "BestConstantEstimate",
    "hardy_ratio",
    "empirical_best_constant",
    "scaling_invariance_check",
    "check_one_dim_hardy",
    "check_embedding",
    "polya_szego_check",
    "power_cutoff_family",
    "log_power_family",
    "sin_dilate_family",
]

_TOL = 1e-11


def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def _smoothstep_slope(x):
    inside = (x > 0) & (x < 1)
    return np.where(inside, 6.0 * x * (1.0 - x), 0.0)


@dataclass(frozen=True)
class TestFunction:
    """Radial profile ``u(r)`` with derivative, vanishing outside ``support``.

    ``breaks`` lists radii where ``u`` or ``u'`` is not smooth; they become
    quadrature breakpoints.  ``decreasing`` marks profiles known to be
    non-increasing on their support.
    """

    __test__ = False  # not a pytest class

    kind: str
    value: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    breaks: tuple[float, ...] = ()
    decreasing: bool = False
    params: dict = field(default_factory=dict)
    # optional evaluators for profiles singular at 0: in s = log r,
    # log|u| = powers[0] s + log_fn(s) and log|u'| = powers[1] s + log_slope_fn(s)
    log_fn: Callable[[np.ndarray], np.ndarray] | None = None
    log_slope_fn: Callable[[np.ndarray], np.ndarray] | None = None
    powers: tuple[float, float] = (0.0, 0.0)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.support
        with np.errstate(all="ignore"):
            v = np.where((r >= lo) & (r <= hi), self.value(r), 0.0)
        return v

    def slope(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.support
        with np.errstate(all="ignore"):
            return np.where((r > lo) & (r < hi), self.deriv(r), 0.0)

    def dilate(self, lam: float) -> "TestFunction":
        """``r -> u(lam r)``."""
        if not lam > 0:
            raise ValidationError("dilation factor must be positive")
        v, d = self.value, self.deriv
        lo, hi = self.support
        shift = math.log(lam)
        lf, ld = self.log_fn, self.log_slope_fn
        a0, a1 = self.powers
        return TestFunction(self.kind, lambda r: v(lam * np.asarray(r)), lambda r: lam * d(lam * np.asarray(r)),
                            (lo / lam, hi / lam), tuple(b / lam for b in self.breaks), self.decreasing,
                            {**self.params, "dilation": self.params.get("dilation", 1.0) * lam},
                            None if lf is None else (lambda s: lf(np.asarray(s) + shift) + a0 * shift),
                            None if ld is None else (lambda s: ld(np.asarray(s) + shift) + (a1 + 1.0) * shift),
                            self.powers)

    def scaled(self, c: float) -> "TestFunction":
        v, d = self.value, self.deriv
        lc = math.log(abs(c)) if c != 0 else -math.inf
        lf, ld = self.log_fn, self.log_slope_fn
        return TestFunction(self.kind, lambda r: c * v(r), lambda r: c * d(r), self.support, self.breaks,
                            self.decreasing and c >= 0, {**self.params, "scale": c},
                            None if lf is None else (lambda s: lf(s) + lc),
                            None if ld is None else (lambda s: ld(s) + lc), self.powers)

    def _inside(self, s, out, closed: bool):
        lo, hi = self.support
        s_lo = math.log(lo) if lo > 0 else -math.inf
        s_hi = math.log(hi) if math.isfinite(hi) else math.inf
        keep = (s >= s_lo) & (s <= s_hi) if closed else (s > s_lo) & (s < s_hi)
        return np.where(keep & ~np.isnan(out), out, -np.inf)

    def log_abs_parts(self):
        """``(power, rest)`` with ``log|u(e^s)| = power * s + rest(s)``."""
        if self.log_fn is not None:
            return self.powers[0], lambda s: self._inside(np.asarray(s, dtype=float), self.log_fn(s), True)

        def rest(s):
            with np.errstate(all="ignore"):
                out = np.log(np.abs(self(np.exp(s))))
            return np.where(np.isnan(out), -np.inf, out)
        return 0.0, rest

    def log_slope_parts(self):
        """``(power, rest)`` with ``log|u'(e^s)| = power * s + rest(s)``."""
        if self.log_slope_fn is not None:
            return self.powers[1], lambda s: self._inside(np.asarray(s, dtype=float), self.log_slope_fn(s), False)

        def rest(s):
            with np.errstate(all="ignore"):
                out = np.log(np.abs(self.slope(np.exp(s))))
            return np.where(np.isnan(out), -np.inf, out)
        return 0.0, rest

    def log_abs(self, s: np.ndarray) -> np.ndarray:
        power, rest = self.log_abs_parts()
        s = np.asarray(s, dtype=float)
        return power * s + rest(s)

    def log_abs_slope(self, s: np.ndarray) -> np.ndarray:
        power, rest = self.log_slope_parts()
        s = np.asarray(s, dtype=float)
        return power * s + rest(s)

    def as_profile(self) -> RadialProfile:
        return CallableProfile(lambda r: np.abs(self(r)), (self.support[0], self.support[1]), self.decreasing,
                               self.kind)

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, R: float = 1.0) -> "TestFunction":
        z = lambda r: np.zeros_like(np.asarray(r, dtype=float))
        return cls("zero", z, z, (0.0, R), (), True)

    @classmethod
    def cone(cls, r0: float = 1.0) -> "TestFunction":
        """``(r0 - r)_+``."""
        return cls("cone", lambda r: r0 - np.asarray(r), lambda r: -np.ones_like(np.asarray(r, dtype=float)),
                   (0.0, r0), (), True, {"r0": r0})

    @classmethod
    def log_cutoff(cls, r0: float, R: float) -> "TestFunction":
        """``log(R / max(r, r0))`` on ``r < R``: constant on the inner ball, logarithmic outside."""
        if not 0 < r0 < R:
            raise ValidationError("need 0 < r0 < R")

        def value(r):
            r = np.asarray(r, dtype=float)
            return np.log(R / np.maximum(r, r0))

        def deriv(r):
            r = np.asarray(r, dtype=float)
            return np.where(r > r0, -1.0 / r, 0.0)

        return cls("log_cutoff", value, deriv, (0.0, R), (r0,), True, {"r0": r0, "R": R})

    @classmethod
    def power_cutoff(cls, eps: float, N: int, p: float, r1: float = 0.0, r2: float = 1.0,
                     width: float = 2.0) -> "TestFunction":
        """``r^(-(N-p)/p + eps)`` with C^1 cutoffs.

        The outer cutoff ramps down over ``[r2, r2 e^width]`` in log-radius; with
        ``r1 > 0`` an inner cutoff ramps up over ``[r1 e^-width, r1]``.
        """
        if not r2 > 0 or r1 < 0 or (r1 > 0 and not r1 < r2) or not width > 0:
            raise ValidationError("need 0 <= r1 < r2 and a positive cutoff width")
        a = -(N - p) / p + eps
        s2 = math.log(r2)
        s1 = math.log(r1) if r1 > 0 else -math.inf

        def cut(s):
            c = _smoothstep((s2 + width - s) / width)
            dc = -_smoothstep_slope((s2 + width - s) / width) / width
            if r1 > 0:
                ci = _smoothstep((s - s1 + width) / width)
                dci = _smoothstep_slope((s - s1 + width) / width) / width
                dc = dc * ci + c * dci
                c = c * ci
            return c, dc

        def value(r):
            s = np.log(np.asarray(r, dtype=float))
            return np.exp(a * s) * cut(s)[0]

        def deriv(r):
            s = np.log(np.asarray(r, dtype=float))
            c, dc = cut(s)
            return np.exp((a - 1.0) * s) * (a * c + dc)

        def log_value(s):
            return np.log(cut(s)[0])

        def log_slope(s):
            c, dc = cut(s)
            return np.log(np.abs(a * c + dc))

        lo = r1 * math.exp(-width) if r1 > 0 else 0.0
        hi = r2 * math.exp(width)
        breaks = (r2,) + ((r1,) if r1 > 0 else ())
        return cls("power_cutoff", value, deriv, (lo, hi), breaks, a <= 0 and r1 == 0,
                   {"eps": eps, "r1": r1, "r2": r2, "width": width}, log_value, log_slope, (a, a - 1.0))

    @classmethod
    def log_power(cls, eps: float, p: float, R: float = 1.0) -> "TestFunction":
        """``log(eR/r)^(1 - 1/p - eps) - 1`` on the ball of radius ``R``."""
        b = 1.0 - 1.0 / p - eps

        def value(r):
            L = np.log(math.e * R / np.asarray(r, dtype=float))
            return L ** b - 1.0

        def deriv(r):
            r = np.asarray(r, dtype=float)
            L = np.log(math.e * R / r)
            return -b * L ** (b - 1.0) / r

        def log_value(s):
            L = 1.0 + math.log(R) - np.asarray(s, dtype=float)
            return np.log(np.abs(np.expm1(b * np.log(L))))

        def log_slope(s):
            s = np.asarray(s, dtype=float)
            L = 1.0 + math.log(R) - s
            return math.log(abs(b)) + (b - 1.0) * np.log(L)

        return cls("log_power", value, deriv, (0.0, R), (), b > 0, {"eps": eps, "R": R}, log_value, log_slope,
                   (0.0, -1.0))

    @classmethod
    def sin_profile(cls, R: float = 1.0) -> "TestFunction":
        """``sin(pi r/R) / (pi r/R)`` on the ball of radius ``R``."""

        def value(r):
            return np.sinc(np.asarray(r, dtype=float) / R)

        def deriv(r):
            x = np.asarray(r, dtype=float) / R
            small = np.abs(x) < 1e-4
            xs = np.where(small, 1.0, x)
            exact = (np.cos(math.pi * xs) - np.sinc(xs)) / xs
            series = -(math.pi ** 2) * x / 3.0 + (math.pi ** 4) * x ** 3 / 30.0
            return np.where(small, series, exact) / R

        return cls("sin", value, deriv, (0.0, R), (), True, {"R": R})

    @classmethod
    def tabulated(cls, r: Sequence[float], values: Sequence[float]) -> "TestFunction":
        """Piecewise-linear profile through ``(r_i, values_i)``, zero beyond the last radius."""
        r = np.asarray(r, dtype=float)
        v = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.size < 2 or r.size != v.size or np.any(np.diff(r) <= 0) or r[0] < 0:
            raise ValidationError("need at least two strictly increasing nonnegative radii with matching values")
        slopes = np.diff(v) / np.diff(r)

        def value(x):
            return np.interp(np.asarray(x, dtype=float), r, v)

        def deriv(x):
            idx = np.clip(np.searchsorted(r, np.asarray(x, dtype=float), side="right") - 1, 0, slopes.size - 1)
            return slopes[idx]

        return cls("tabulated", value, deriv, (float(r[0]), float(r[-1])), tuple(r[1:-1]),
                   bool(np.all(np.diff(v) <= 0)), {"nodes": int(r.size)})

    @classmethod
    def bumps(cls, centers: Sequence[float], width: float, heights: Sequence[float] | None = None) -> "TestFunction":
        """Sum of C^1 bumps ``h * S(1 - |r - c|/width)`` with S the cubic smoothstep."""
        centers = np.asarray(centers, dtype=float)
        heights = np.ones_like(centers) if heights is None else np.asarray(heights, dtype=float)
        if np.any(centers - width < 0):
            raise ValidationError("bumps must stay inside r >= 0")

        def value(r):
            x = 1.0 - np.abs(np.asarray(r, dtype=float)[..., None] - centers) / width
            return np.sum(heights * _smoothstep(x), axis=-1)

        def deriv(r):
            d = np.asarray(r, dtype=float)[..., None] - centers
            x = 1.0 - np.abs(d) / width
            return np.sum(heights * _smoothstep_slope(x) * (-np.sign(d) / width), axis=-1)

        lo = float(np.min(centers) - width)
        hi = float(np.max(centers) + width)
        br = tuple(sorted(set(np.concatenate([centers, centers - width, centers + width]).tolist()) - {lo, hi}))
        return cls("bumps", value, deriv, (lo, hi), br, centers.size == 1 and lo == 0.0,
                   {"centers": centers.tolist(), "width": width})


@dataclass(frozen=True)
class CylindricalTestFunction:
    """``u1(|y|) u2(|z|)`` for ``y`` in R^k and ``z`` in R^(N-k)."""

    __test__ = False

    first: TestFunction
    second: TestFunction

    def dilate(self, lam: float) -> "CylindricalTestFunction":
        return CylindricalTestFunction(self.first.dilate(lam), self.second.dilate(lam))


@dataclass
class RatioReport:
    lhs: float
    rhs: float
    ratio: float
    quadrature_error: float
    divergent: bool = False

    def to_row(self, param=None) -> dict:
        return {"param": param, "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio, "err": self.quadrature_error}


# ----------------------------------------------------------------------------
# radial integrals


def _panels(lo: float, hi: float, breaks: Sequence[float]) -> list[tuple[float, float]]:
    s_lo = math.log(lo) if lo > 0 else -math.inf
    s_hi = math.log(hi) if math.isfinite(hi) else math.inf
    cuts = sorted({math.log(b) for b in breaks if lo < b < hi})
    edges = [s_lo] + cuts + [s_hi]
    return [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _log_radial_integral(logf: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                         breaks: Sequence[float]) -> tuple[float, float]:
    """log of int_lo^hi exp(logf(log r)) dr/r and a relative error bound."""
    total, rel = -math.inf, 0.0
    for a, b in _panels(lo, hi, breaks):
        res = log_integrate(logf, a, b, tol=_TOL)
        if not res.finite:
            return math.inf, 0.0
        if res.log_value > -math.inf:
            new = float(np.logaddexp(total, res.log_value))
            rel = (rel * math.exp(total - new) if total > -math.inf else 0.0) + res.rel_error * math.exp(
                res.log_value - new)
            total = new
    return total, rel


def _weight_log(weight_profile: RadialProfile) -> Callable[[np.ndarray], np.ndarray]:
    return lambda s: weight_profile.log_value(s)


def _radial_sides(dim: int, sigma: float, g: RadialProfile, u: TestFunction, p: float, q: float,
                  lo: float, hi: float) -> tuple[float, float, float, float]:
    """log of int g|u|^q and log of int |u'|^p over the radial set, with error bounds."""
    c = math.log(sphere_area(dim) * sigma)
    lo_u, hi_u = max(u.support[0], lo), min(u.support[1], hi)
    if not hi_u > lo_u:
        return -math.inf, 0.0, -math.inf, 0.0

    pg, rg = g.log_parts()
    pu, ru = u.log_abs_parts()
    pd, rd = u.log_slope_parts()
    # powers of r are summed before multiplying by s
    c_lhs = pg + q * pu + dim
    c_rhs = p * pd + dim

    def lhs_log(s):
        with np.errstate(all="ignore"):
            out = c_lhs * s + rg(s) + q * ru(s)
        return np.where(np.isnan(out), -np.inf, out)

    def rhs_log(s):
        with np.errstate(all="ignore"):
            out = c_rhs * s + p * rd(s)
        return np.where(np.isnan(out), -np.inf, out)

    breaks = tuple(u.breaks) + tuple(getattr(g, "kinks", ()))
    l1, e1 = _log_radial_integral(lhs_log, lo_u, hi_u, breaks)
    l2, e2 = _log_radial_integral(rhs_log, lo_u, hi_u, u.breaks)
    return c + l1, e1, c + l2, e2


def _check_support(u: TestFunction, lo: float, hi: float) -> None:
    if u.support[0] < lo * (1 - 1e-14) or u.support[1] > hi * (1 + 1e-14):
        raise ValidationError(f"test function support {u.support} leaves the radial range ({lo}, {hi})")


def _ratio_from_logs(l_lhs: float, e_lhs: float, l_grad: float, e_grad: float, p: float, q: float) -> RatioReport:
    if l_lhs == math.inf:
        return RatioReport(math.inf, math.exp(q / p * l_grad) if l_grad < 700 else math.inf, math.inf, 0.0, True)
    lhs = math.exp(l_lhs) if l_lhs > -math.inf else 0.0
    l_rhs = q / p * l_grad
    rhs = math.exp(l_rhs) if l_rhs > -math.inf else 0.0
    if l_grad == math.inf:
        return RatioReport(lhs, math.inf, 0.0, 0.0)
    if rhs == 0.0:
        return RatioReport(lhs, 0.0, math.nan if lhs == 0 else math.inf, 0.0)
    ratio = math.exp(l_lhs - l_rhs) if l_lhs > -math.inf else 0.0
    return RatioReport(lhs, rhs, ratio, e_lhs + q / p * e_grad)


def hardy_ratio(ctx: ExponentContext, domain: DomainSpec, weight: WeightSpec,
                u: TestFunction | CylindricalTestFunction) -> RatioReport:
    """``int g |u|^q`` against ``(int |grad u|^p)^(q/p)`` for a radial or cylindrical test function."""
    p, q = ctx.p, ctx.q
    if isinstance(u, CylindricalTestFunction):
        if domain.kind != "product" or weight.form != "cylindrical":
            raise ValidationError("cylindrical test functions need a cylindrical weight on a product domain")
        return _cylindrical_ratio(ctx, domain, weight, u)
    if weight.form != "radial" or domain.kind == "product":
        raise ValidationError("radial test functions need a radial weight on a sectorial domain")
    _check_support(u, domain.a, domain.b)
    l1, e1, l2, e2 = _radial_sides(ctx.N, domain.sigma, weight.profile, u, p, q, domain.a, domain.b)
    return _ratio_from_logs(l1, e1, l2, e2, p, q)


_GL_ORDER = 20
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)


def _tensor_nodes(u: TestFunction, span: float = 60.0, width: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes in s = log r over the support of ``u``."""
    lo, hi = u.support
    s_hi = math.log(hi)
    s_lo = math.log(lo) if lo > 0 else s_hi - span
    cuts = sorted({math.log(b) for b in u.breaks if lo < b < hi})
    edges = [s_lo] + [c for c in cuts if c > s_lo] + [s_hi]
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, int(math.ceil((b - a) / width)))
        e = np.linspace(a, b, n + 1)
        mid = 0.5 * (e[:-1] + e[1:])
        half = 0.5 * np.diff(e)
        nodes.append((mid[:, None] + half[:, None] * _GL_X).ravel())
        weights.append((half[:, None] * _GL_W).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _cylindrical_ratio(ctx: ExponentContext, domain: DomainSpec, weight: WeightSpec,
                       u: CylindricalTestFunction) -> RatioReport:
    N, k, p, q = ctx.N, domain.k, ctx.p, ctx.q
    m = N - k
    _check_support(u.first, domain.a, domain.b)
    g1, g2 = weight.profile, weight.second
    l1, e1, a1, _ = _radial_sides(k, domain.sigma, g1, u.first, p, q, domain.a, domain.b)
    l2, e2, a2, _ = _radial_sides(m, 1.0, g2, u.second, p, q, 0.0, math.inf)
    l_lhs = l1 + l2 if -math.inf not in (l1, l2) else -math.inf
    if p == 2.0:
        # |grad u|^2 = u1'^2 u2^2 + u1^2 u2'^2 separates
        def sq(dim, sigma, w, lo, hi):
            l_val, _, l_slope, _ = _radial_sides(dim, sigma, PowerProfile(0.0), w, 2.0, 2.0, lo, hi)
            return l_val, l_slope

        v1, d1 = sq(k, domain.sigma, u.first, domain.a, domain.b)
        v2, d2 = sq(m, 1.0, u.second, 0.0, math.inf)
        l_grad = float(np.logaddexp(d1 + v2, v1 + d2))
        return _ratio_from_logs(l_lhs, e1 + e2, l_grad, 1e-10, p, q)
    s, ws = _tensor_nodes(u.first)
    t, wt = _tensor_nodes(u.second)
    r, rho = np.exp(s), np.exp(t)
    f1, d1 = u.first(r), u.first.slope(r)
    f2, d2 = u.second(rho), u.second.slope(rho)
    grad = (d1[:, None] ** 2 * f2[None, :] ** 2 + f1[:, None] ** 2 * d2[None, :] ** 2) ** (p / 2.0)
    jac = (ws * r ** k)[:, None] * (wt * rho ** m)[None, :]
    total = float(np.sum(grad * jac)) * sphere_area(k) * domain.sigma * sphere_area(m)
    l_grad = math.log(total) if total > 0 else -math.inf
    return _ratio_from_logs(l_lhs, e1 + e2, l_grad, 1e-9, p, q)


# ----------------------------------------------------------------------------
# sweeps


@dataclass
class BestConstantEstimate:
    """Supremum of the ratio over a test family: a lower bound for the best constant."""

    sup_ratio: float
    argmax_params: float
    params: list
    ratios: list
    reports: list

    def rows(self) -> list[dict]:
        return [rep.to_row(par) for par, rep in zip(self.params, self.reports)]


def empirical_best_constant(ctx: ExponentContext, domain: DomainSpec, weight: WeightSpec,
                            family: Callable[[float], TestFunction], params: Sequence[float],
                            refine: bool = True, log_scale: bool = True) -> BestConstantEstimate:
    """Evaluate the ratio on ``params`` and refine the best grid point by golden-section search."""
    params = [float(x) for x in params]
    if len(params) < 20:
        raise ValidationError("a family sweep needs at least 20 parameter values")
    if log_scale and min(params) <= 0:
        raise ValidationError("log-scale sweeps need positive parameters")
    reports = [hardy_ratio(ctx, domain, weight, family(x)) for x in params]
    ratios = [rep.ratio for rep in reports]
    usable = [i for i, rep in enumerate(reports) if rep.rhs > 0 and not math.isnan(rep.ratio)]
    if not usable:
        raise NumericFailure("every member of the family has a vanishing gradient")
    i = max(usable, key=lambda j: ratios[j])
    best, arg = ratios[i], params[i]
    order = sorted(range(len(params)), key=lambda j: params[j])
    pos = order.index(i)
    if refine and 0 < pos < len(order) - 1 and math.isfinite(best):
        a, c = params[order[pos - 1]], params[order[pos + 1]]
        to = (lambda x: math.log(x)) if log_scale else (lambda x: x)
        back = (lambda y: math.exp(y)) if log_scale else (lambda y: y)

        def neg(y):
            return -hardy_ratio(ctx, domain, weight, family(back(y))).ratio

        res = minimize_scalar(neg, bracket=(to(a), to(arg), to(c)), method="golden", tol=1e-6)
        if -res.fun > best:
            best, arg = -res.fun, back(res.x)
    return BestConstantEstimate(best, arg, params, ratios, reports)


def power_cutoff_family(N: int, p: float, r1: float = 0.0, r2: float = 1.0, width: float = 2.0):
    return lambda eps: TestFunction.power_cutoff(eps, N, p, r1, r2, width)


def log_power_family(p: float, R: float = 1.0):
    return lambda eps: TestFunction.log_power(eps, p, R)


def sin_dilate_family(R: float = 1.0):
    """Dilates ``sin(pi r/(lam R)) / (pi r/(lam R))`` for ``lam`` in (0, 1]."""
    return lambda lam: TestFunction.sin_profile(lam * R)


def scaling_invariance_check(ctx: ExponentContext, domain: DomainSpec, weight: WeightSpec,
                             u: TestFunction | CylindricalTestFunction,
                             lambdas: Sequence[float] = (0.5, 1.0, 2.0, 4.0)) -> dict:
    """Largest relative change of the ratio under ``u -> u(lam x)``."""
    if domain.a != 0 or math.isfinite(domain.b):
        raise ValidationError("scaling needs a dilation-invariant domain (a = 0, b = inf)")
    base = hardy_ratio(ctx, domain, weight, u).ratio
    devs = {}
    for lam in lambdas:
        r = base if lam == 1.0 else hardy_ratio(ctx, domain, weight, u.dilate(lam)).ratio
        devs[float(lam)] = abs(r / base - 1.0)
    return {"deviation": max(devs.values()), "per_lambda": devs, "base_ratio": base}


# ----------------------------------------------------------------------------
# one-dimensional reduction, embeddings, rearrangement of the gradient


def check_one_dim_hardy(ctx: ExponentContext, g: Rearrangement, u_star: TestFunction, slack: float = 1e-8,
                        report=None, norm_value: float | None = None, per_decade: int = 256) -> dict:
    """Both sides of the rearranged inequality for a decreasing profile ``u_star`` in ``t``.

    lhs = int g*(t) u*(t)^q dt and rhs = int t^(p - p/N) |u*'(t)|^p dt.  The bound
    applies the one-dimensional Muckenhoupt estimate with ``v = g*`` and
    ``w = t^(p - p/N)``; pass ``report`` to reuse a computed constant.
    """
    N, p, q = ctx.N, ctx.p, ctx.q
    if u_star.support[1] > g.measure * (1 + 1e-12):
        raise ValidationError("u* must vanish beyond the measure of the domain")
    if report is None:
        inp = MuckenhouptInput(g, PowerProfile(-(p - p / N)), g.measure, p, q, per_decade=per_decade)
        report = muckenhoupt_constant(inp)

    def lhs_log(s):
        with np.errstate(all="ignore"):
            out = g.log_value(s) + q * u_star.log_abs(s) + s
        return np.where(np.isnan(out), -np.inf, out)

    def rhs_log(s):
        with np.errstate(all="ignore"):
            out = (p - p / N) * s + p * u_star.log_abs_slope(s) + s
        return np.where(np.isnan(out), -np.inf, out)

    lo, hi = u_star.support
    l1, _ = _log_radial_integral(lhs_log, lo, hi, u_star.breaks)
    l2, _ = _log_radial_integral(rhs_log, lo, hi, u_star.breaks)
    lhs = math.exp(l1) if l1 > -math.inf else 0.0
    rhs = math.exp(l2) if l2 > -math.inf else 0.0
    const = report.implied_inequality_constant
    bound = const ** q * rhs ** (q / p) if rhs > 0 else 0.0
    out = {"lhs": lhs, "rhs": rhs, "bound": bound, "constant": const, "regime": report.regime,
           "holds": lhs <= bound * (1 + slack) + 1e-300}
    if norm_value is not None:
        out["norm"] = norm_value
        out["rhs_with_norm"] = norm_value * rhs ** (q / p)
    return out


def _gradient_norm(N: int, sigma: float, u: TestFunction, p: float, lo: float, hi: float) -> float:
    _, _, l_grad, _ = _radial_sides(N, sigma, PowerProfile(0.0), u, p, 1.0, lo, hi)
    return math.exp(l_grad / p) if l_grad > -math.inf else 0.0


def check_embedding(ctx: ExponentContext, family: Sequence[TestFunction], domain: DomainSpec | None = None) -> dict:
    """Ratios ``||u||_{p*,p} / ||grad u||_p`` (N > p) or ``||u||_{inf,p;-1} / ||grad u||_p`` (N = p)."""
    N, p = ctx.N, ctx.p
    dom = domain or DomainSpec.full_space(N)
    if N < p:
        raise ValidationError("embeddings are checked for N >= p only")
    if N == p and not dom.bounded:
        raise ValidationError("the limiting embedding needs a bounded domain")
    ratios = []
    for u in family:
        _check_support(u, dom.a, dom.b)
        grad = _gradient_norm(N, dom.sigma, u, p, dom.a, dom.b)
        if grad == 0:
            raise ValidationError("the zero function is excluded")
        rf = RadialFunction(u.as_profile(), N, dom.a, dom.b, dom.sigma)
        rearr = decreasing_rearrangement(rf)
        if N > p:
            val = lorentz_norm(rearr, sobolev_conjugate(N, p), p).value
        else:
            val = lorentz_zygmund_norm(rearr, math.inf, p, -1.0).value
        ratios.append(val / grad)
    finite = all(math.isfinite(r) for r in ratios)
    return {"ratios": ratios, "max_ratio": max(ratios) if ratios else 0.0, "finite": finite,
            "space": "L^{p*,p}" if N > p else "L^{inf,p;-1}"}


def _monotone_pieces(u: TestFunction) -> list[tuple[float, float]]:
    lo, hi = u.support
    grid = np.unique(np.concatenate([np.linspace(lo, hi, 4097), [b for b in u.breaks if lo < b < hi]]))
    d = u.deriv(grid[1:-1])
    cuts = [lo]
    for i in range(d.size - 1):
        a, b = grid[i + 1], grid[i + 2]
        if d[i] == 0 or np.sign(d[i]) == np.sign(d[i + 1]):
            continue
        if d[i + 1] == 0:
            cuts.append(b)
            continue
        try:
            cuts.append(brentq(lambda x: float(u.deriv(np.array([x]))[0]), a, b, xtol=1e-15))
        except ValueError:
            cuts.append(b)
    cuts += [b for b in u.breaks if lo < b < hi]
    cuts.append(hi)
    cuts = sorted(set(cuts))
    return [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


def polya_szego_check(u: TestFunction, N: int, p: float, tol: float = 1e-8) -> dict:
    """Compare the one-dimensional energy of ``u*`` with the Dirichlet energy of ``u``.

    The rearranged side is computed level by level through the coarea formula
    ``int t^(p-p/N)|u*'|^p dt = int mu(s)^(p-p/N) |mu'(s)|^(1-p) ds``, with the
    distribution function ``mu`` assembled from the monotone pieces of ``u``.
    """
    omega = ball_volume(N)
    lo, hi = u.support
    grid = np.linspace(lo, hi, 2001)
    if np.any(u(grid) < -1e-14):
        raise ValidationError("the Polya-Szego check expects a nonnegative profile")
    rhs = _gradient_norm(N, 1.0, u, p, lo, hi) ** p
    pieces = _monotone_pieces(u)
    info = []
    for a, b in pieces:
        ua, ub = float(u(np.array([a]))[0]), float(u(np.array([b]))[0])
        info.append((a, b, ua, ub))
    top = max(max(ua, ub) for _, _, ua, ub in info)
    if top <= 0:
        return {"lhs_1d": 0.0, "rhs_Nd": rhs, "holds": True}

    def level_terms(s: float) -> tuple[float, float]:
        mu, dens = 0.0, 0.0
        for a, b, ua, ub in info:
            if max(ua, ub) <= s:
                continue
            if min(ua, ub) > s:
                mu += omega * (b ** N - a ** N)
                continue
            x = brentq(lambda r: float(u(np.array([r]))[0]) - s, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            if ua > ub:
                mu += omega * (x ** N - a ** N)
            else:
                mu += omega * (b ** N - x ** N)
            slope = abs(float(u.slope(np.array([x]))[0]))
            if slope > 0:
                dens += N * omega * x ** (N - 1) / slope
            else:
                dens = math.inf
        return mu, dens

    def integrand(s: float) -> float:
        mu, dens = level_terms(s)
        if mu <= 0 or dens == 0:
            return 0.0
        if math.isinf(dens):
            return 0.0
        return mu ** (p - p / N) * dens ** (1.0 - p)

    levels = sorted({0.0, top} | {v for *_, ua, ub in info for v in (ua, ub) if 0 < v < top})
    total = 0.0
    for a, b in zip(levels[:-1], levels[1:]):
        val, _ = quad(integrand, a, b, epsabs=0.0, epsrel=1e-12, limit=400)
        total += val
    lhs = N ** p * omega ** (p / N) * total
    return {"lhs_1d": lhs, "rhs_Nd": rhs, "holds": lhs <= rhs * (1 + tol) + 1e-300}
