"""Admissibility classifier for Hardy-type weights, plus certificate algebra.

:func:`classify` runs every sufficient criterion that fits the (N, k, p, q)
regime, the domain and the weight form, and reports a three-valued verdict:

* ``admissible`` when at least one criterion holds with finite norms,
* ``excluded`` for the structural obstructions (q above the Sobolev
  conjugate, or a weight that is not locally integrable),
* ``unknown`` otherwise, since the criteria are sufficient only.

Criterion identifiers name the mechanism behind them:

``symmetrization.lorentz``, ``symmetrization.lorentz_zygmund``, ``symmetrization.lebesgue``
    Norm of the weight in a rearrangement-invariant space.
``polar.weighted_l1``
    Weighted L^1 norm of the radial majorant on a sectorial set.
``cylindrical.power``, ``cylindrical.dominated``
    Weights depending on the first k variables only.
``product.lorentz_strong``, ``product.lorentz_weak``, ``product.weighted_lebesgue``
    Products ``g1(y) g2(z)`` with norms in compatible pairs of spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ExponentRangeError, HardyAdmitError, InvalidDomainError, InvalidWeightError, ValidationError
from .exponents import (
    ExponentContext,
    conjugate,
    interpolated_sobolev,
    lebesgue_index,
    lorentz_index,
    sobolev_conjugate,
)
from .profiles import ConstProfile, PowerProfile, ProductProfile, RadialProfile, sampled_monotonicity
from .rearrange import RadialFunction, decreasing_rearrangement
from .spaces import (
    NormResult,
    lebesgue_norm,
    lorentz_norm,
    lorentz_zygmund_norm,
    weighted_lebesgue_norm,
)

__all__ = [
    "DomainSpec",
    "WeightSpec",
    "Branch",
    "AdmissibilityVerdict",
    "Certificate",
    "classify",
    "interpolate_potentials",
    "product_lift",
    "sectorial_lift",
    "register_hypothesis",
    "HYPOTHESES",
]

_REL = 1e-12
_DOMAIN_KINDS = ("full", "ball", "annulus", "exterior", "sector", "product")


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.6g}"


# ----------------------------------------------------------------------------
# domains and weights


@dataclass(frozen=True)
class DomainSpec:
    """Sectorial set ``{a <= |y| < b, y/|y| in S}`` in R^k, optionally times R^(N-k).

    ``sigma`` is the fraction of the unit sphere covered by ``S``.  ``center``
    records an offset of the symmetry centre; classification works in
    translated coordinates, so it has no further effect.
    """

    kind: str
    N: int
    a: float = 0.0
    b: float = math.inf
    sigma: float = 1.0
    k: int | None = None
    center: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in _DOMAIN_KINDS:
            raise InvalidDomainError(f"unknown domain kind {self.kind!r}")
        if int(self.N) != self.N or self.N < 1:
            raise InvalidDomainError(f"N must be a positive integer, got {self.N}")
        if not (0 <= self.a < self.b):
            raise InvalidDomainError(f"need 0 <= a < b, got a={self.a}, b={self.b}")
        if not (0 < self.sigma <= 1):
            raise InvalidDomainError(f"sector fraction must lie in (0, 1], got {self.sigma}")
        if self.kind == "product":
            if self.k is None or not (1 <= self.k < self.N):
                raise InvalidDomainError("product domains need 1 <= k < N")
        elif self.k not in (None, self.N):
            raise InvalidDomainError("only product domains split the variables")
        expected = {"full": (0.0, math.inf), "ball": (0.0, None), "exterior": (None, math.inf)}
        if self.kind in expected:
            lo, hi = expected[self.kind]
            if (lo is not None and self.a != lo) or (hi is not None and self.b != hi):
                raise InvalidDomainError(f"inconsistent radii for a {self.kind} domain")
            if self.sigma != 1.0:
                raise InvalidDomainError(f"a {self.kind} domain covers the whole sphere")
        if self.kind == "exterior" and self.a <= 0:
            raise InvalidDomainError("an exterior domain needs a > 0")

    # constructors
    @classmethod
    def full_space(cls, N: int) -> "DomainSpec":
        return cls("full", N)

    @classmethod
    def ball(cls, N: int, R: float) -> "DomainSpec":
        return cls("ball", N, 0.0, R)

    @classmethod
    def annulus(cls, N: int, a: float, R: float) -> "DomainSpec":
        return cls("annulus", N, a, R)

    @classmethod
    def exterior(cls, N: int, a: float) -> "DomainSpec":
        return cls("exterior", N, a, math.inf)

    @classmethod
    def sectorial(cls, N: int, a: float, b: float, sigma: float) -> "DomainSpec":
        return cls("sector", N, a, b, sigma)

    @classmethod
    def product(cls, N: int, k: int, a: float = 0.0, b: float = math.inf, sigma: float = 1.0) -> "DomainSpec":
        return cls("product", N, a, b, sigma, k)

    @property
    def split(self) -> int:
        """Dimension of the sectorial factor."""
        return self.k if self.kind == "product" else self.N

    @property
    def first_factor_contains_origin(self) -> bool:
        return self.a == 0 and self.sigma == 1.0

    @property
    def contains_origin(self) -> bool:
        return self.first_factor_contains_origin

    @property
    def bounded(self) -> bool:
        return self.kind != "product" and math.isfinite(self.b)

    @property
    def bounded_one_direction(self) -> bool:
        if math.isfinite(self.b):
            return True
        # a half-space-like sector is unbounded in every direction, so only b counts
        return False

    def radial_function(self, profile: RadialProfile) -> RadialFunction:
        return RadialFunction(profile, self.split, self.a, self.b, self.sigma)


@dataclass(frozen=True)
class WeightSpec:
    """A weight given as a radial profile, a cylindrical product or by its norms alone.

    For ``cylindrical`` weights ``profile`` acts on ``|y|`` (first k variables) and
    ``profile2`` on ``|z|``; ``profile2=None`` means ``g2 = 1``.  For
    ``lorentz_abstract`` weights ``norms`` maps space descriptors such as
    ``"L^{1.5,inf}"`` to values.
    """

    form: str
    profile: RadialProfile | None = None
    profile2: RadialProfile | None = None
    norms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.form not in ("radial", "cylindrical", "lorentz_abstract"):
            raise InvalidWeightError(f"unknown weight form {self.form!r}")
        if self.form in ("radial", "cylindrical") and self.profile is None:
            raise InvalidWeightError(f"a {self.form} weight needs a profile")
        if self.form == "lorentz_abstract" and not self.norms:
            raise InvalidWeightError("an abstract weight needs at least one norm value")

    @classmethod
    def radial(cls, profile: RadialProfile) -> "WeightSpec":
        return cls("radial", profile)

    @classmethod
    def cylindrical(cls, g1: RadialProfile, g2: RadialProfile | None = None) -> "WeightSpec":
        return cls("cylindrical", g1, g2)

    @classmethod
    def abstract(cls, norms: dict) -> "WeightSpec":
        return cls("lorentz_abstract", norms=dict(norms))

    @property
    def second(self) -> RadialProfile:
        return self.profile2 if self.profile2 is not None else ConstProfile(1.0)

    def describe(self) -> str:
        if self.form == "radial":
            return self.profile.describe()
        if self.form == "cylindrical":
            return f"{self.profile.describe()} | {self.second.describe()}"
        return "abstract"


# ----------------------------------------------------------------------------
# verdicts


@dataclass
class Branch:
    criterion: str
    space: str
    norms: dict
    constant_form: str
    range_checks: list
    satisfied: bool
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "theorem": self.criterion,
            "space": self.space,
            "norm": {k: (None if v is None else _json_float(v)) for k, v in self.norms.items()},
            "range_checks": list(self.range_checks),
            "admissible": self.satisfied,
            "constant_form": self.constant_form,
            "notes": list(self.notes),
        }


def _json_float(x: float):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


@dataclass
class AdmissibilityVerdict:
    status: str
    branches: list
    failure_reasons: list
    context: dict

    @property
    def admissible(self) -> bool | None:
        if self.status == "admissible":
            return True
        if self.status == "excluded":
            return False
        return None

    @property
    def theorems_applied(self) -> list:
        return [b for b in self.branches if b.satisfied]

    def accepted_by(self, prefix: str) -> bool:
        return any(b.criterion.startswith(prefix) for b in self.theorems_applied)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "admissible": self.admissible,
            "theorems_applied": [b.to_dict() for b in self.theorems_applied],
            "branches": [b.to_dict() for b in self.branches],
            "failure_reasons": list(self.failure_reasons),
            "context": dict(self.context),
        }


def _finite(res: NormResult | float | None) -> bool:
    if res is None:
        return False
    v = res.value if isinstance(res, NormResult) else res
    return bool(np.isfinite(v))


def _value(res: NormResult | float | None) -> float | None:
    if res is None:
        return None
    return float(res.value if isinstance(res, NormResult) else res)


def _safe(fn: Callable[[], NormResult]) -> tuple[NormResult | None, str | None]:
    try:
        return fn(), None
    except HardyAdmitError as exc:
        return None, f"{type(exc).__name__}: {exc}"


# ----------------------------------------------------------------------------
# criteria


def _lorentz_descriptor(first: float, second: float) -> str:
    return f"L^{{{_fmt(first)},{_fmt(second)}}}"


def _symmetrization(ctx: ExponentContext, dom: DomainSpec, w: WeightSpec) -> list[Branch]:
    N, p, q = ctx.N, ctx.p, ctx.q
    out: list[Branch] = []
    gamma = p / (p - q) if q < p else math.inf

    def norm_of(descriptor: str, compute: Callable[[], NormResult]):
        if w.form == "lorentz_abstract":
            return w.norms.get(descriptor), (None if descriptor in w.norms else "norm not supplied")
        return _safe(compute)

    if w.form == "cylindrical" or dom.kind == "product":
        return out
    f = dom.radial_function(w.profile) if w.form == "radial" else None
    rearr = decreasing_rearrangement(f) if f is not None else None

    if N > p:
        ps = sobolev_conjugate(N, p)
        in_range = q <= ps * (1 + _REL)
        alpha = lorentz_index(N, p, q)
        space = _lorentz_descriptor(alpha, gamma)
        checks = [f"N > p", f"q in (0, p*] = (0, {_fmt(ps)}]: {in_range}"]
        if not in_range:
            out.append(Branch("symmetrization.lorentz", space, {}, "C(N,p,q) ||g||", checks, False,
                              ["q outside the range"]))
            return out
        res, err = norm_of(space, lambda: lorentz_norm(rearr, alpha, gamma))
        ok = _finite(res)
        out.append(Branch("symmetrization.lorentz", space, {space: _value(res)}, f"C(N,p,q) ||g||_{space}",
                          checks, ok, [err] if err else []))
    elif N == p:
        checks = ["N = p", f"domain bounded: {dom.bounded}"]
        if not dom.bounded:
            out.append(Branch("symmetrization.lorentz_zygmund", "LZ", {}, "C(N,p,q) ||g||", checks, False,
                              ["needs a bounded domain"]))
            return out
        powers = []
        # at q = 1 both log indices are available; either finite norm suffices
        if q <= 1 or q >= p:
            powers.append(q / conjugate(p))
        if 1 <= q < p:
            powers.append(q - 1.0)
        for lp in powers:
            space = f"LZ^{{1,{_fmt(gamma)};{_fmt(lp)}}}"
            res, err = norm_of(space, lambda lp=lp: lorentz_zygmund_norm(rearr, 1.0, gamma, lp))
            ok = _finite(res)
            out.append(Branch("symmetrization.lorentz_zygmund", space, {space: _value(res)},
                              f"C(N,p,q) ||g||_{space}", checks + [f"log power {_fmt(lp)}"], ok,
                              [err] if err else []))
    else:
        checks = ["N < p", f"domain bounded in one direction: {dom.bounded_one_direction}"]
        space = "L^1"
        if not dom.bounded_one_direction:
            out.append(Branch("symmetrization.lebesgue", space, {}, "C(N,p,q) ||g||_1", checks, False,
                              ["needs a domain bounded in one direction"]))
            return out
        res, err = norm_of(space, lambda: lebesgue_norm(rearr, 1.0))
        out.append(Branch("symmetrization.lebesgue", space, {space: _value(res)}, "C(N,p,q) ||g||_1", checks,
                          _finite(res), [err] if err else []))
    return out


def _polar(ctx: ExponentContext, dom: DomainSpec, w: WeightSpec) -> list[Branch]:
    if w.form != "radial" or dom.kind == "product":
        return []
    N, p, q = ctx.N, ctx.p, ctx.q
    g = w.profile
    crit = "polar.weighted_l1"
    if N > p:
        ps = sobolev_conjugate(N, p)
        if not q <= ps * (1 + _REL):
            return [Branch(crit, "L^1((a,b), r^(N/alpha-1))", {}, "C ||g~||", [f"q <= p* = {_fmt(ps)}: False"],
                           False)]
        alpha = lorentz_index(N, p, q)
        theta = (0.0 if math.isinf(alpha) else N / alpha) - 1.0
        space = f"L^1(({_fmt(dom.a)},{_fmt(dom.b)}), r^{_fmt(theta)})"
        checks = ["N > p", f"q in (0, p*]"]
        notes = []
        ok_extra = True
        p1 = interpolated_sobolev(N, p, 1.0)
        if q >= p1 * (1 - _REL):
            strict = sampled_monotonicity(g, dom.a, dom.b)
            checks.append(f"q >= P*(1) = {_fmt(p1)} needs a strictly decreasing majorant: {strict}")
            ok_extra = strict
        res, err = _safe(lambda: weighted_lebesgue_norm(g, 1.0, dom.a, dom.b, theta=theta))
        if err:
            notes.append(err)
        return [Branch(crit, space, {space: _value(res)}, f"C(N,p,q) ||g~||_{space}", checks,
                       ok_extra and _finite(res), notes)]
    if N == p:
        checks = ["N = p", f"q in (0, p]: {q <= p}", f"a > 0: {dom.a > 0}"]
        lp = q / conjugate(N)
        space = f"L^1(({_fmt(dom.a)},{_fmt(dom.b)}), r^{N - 1} log(r/a)^{_fmt(lp)})"
        if not (q <= p and dom.a > 0):
            return [Branch(crit, space, {}, "C ||g~||", checks, False)]
        res, err = _safe(lambda: weighted_lebesgue_norm(g, 1.0, dom.a, dom.b, theta=N - 1.0, log_power=lp))
        return [Branch(crit, space, {space: _value(res)}, f"C(N,p,q) ||g~||_{space}", checks, _finite(res),
                       [err] if err else [])]
    origin = dom.contains_origin
    checks = ["N < p", f"q in (0, p]: {q <= p}", f"origin outside the domain: {not origin}"]
    alpha = lorentz_index(N, p, q)
    theta = N / alpha - 1.0
    space = f"L^1(({_fmt(dom.a)},{_fmt(dom.b)}), r^{_fmt(theta)})"
    if not (q <= p and not origin):
        return [Branch(crit, space, {}, "C ||g~||", checks, False)]
    res, err = _safe(lambda: weighted_lebesgue_norm(g, 1.0, dom.a, dom.b, theta=theta))
    return [Branch(crit, space, {space: _value(res)}, f"C(N,p,q) ||g~||_{space}", checks, _finite(res),
                   [err] if err else [])]


def _is_constant(profile: RadialProfile | None) -> bool:
    return profile is None or isinstance(profile, ConstProfile)


def _cylindrical(ctx: ExponentContext, dom: DomainSpec, w: WeightSpec) -> list[Branch]:
    if w.form != "cylindrical" or dom.kind != "product":
        return []
    N, k, p, q = ctx.N, dom.k, ctx.p, ctx.q
    if not N > p:
        return []
    if not _is_constant(w.profile2):
        return []
    ps = sobolev_conjugate(N, p)
    alpha = lorentz_index(N, p, q)
    if alpha <= 0:
        return []
    s_crit = 0.0 if math.isinf(alpha) else N / alpha
    pk = interpolated_sobolev(N, p, k) if k <= N else math.nan
    near = dom.first_factor_contains_origin
    ranges = []
    if k > p:
        ranges.append(("full", p * (1 - _REL) <= q <= ps * (1 + _REL), f"k > p: q in [p, p*] = [{_fmt(p)}, {_fmt(ps)}]"))
    else:
        ranges.append(("full", pk * (1 + _REL) < q <= ps * (1 + _REL),
                       f"k <= p: q in (P*(k), p*] = ({_fmt(pk)}, {_fmt(ps)}]"))
    if k < p and not near:
        ranges.append(("hole", p * (1 - _REL) <= q <= pk * (1 + _REL),
                       f"k < p, origin outside the first factor: q in [p, P*(k)] = [{_fmt(p)}, {_fmt(pk)}]"))
    out = []
    g1 = w.profile
    is_power = isinstance(g1, PowerProfile) and abs(g1.d - s_crit) <= 1e-12 * max(1.0, s_crit)
    scale = getattr(w.profile2, "c", 1.0) if w.profile2 is not None else 1.0
    for tag, ok_range, text in ranges:
        if is_power:
            space = f"|y|^-{_fmt(s_crit)}"
            out.append(Branch(f"cylindrical.power", space, {"scale": g1.c * scale}, "C(N,k,p,q)",
                              [text, tag], ok_range))
        space = f"L^inf(({_fmt(dom.a)},{_fmt(dom.b)}), r^{_fmt(s_crit)})"
        if ok_range:
            res, err = _safe(lambda: weighted_lebesgue_norm(g1, math.inf, dom.a, dom.b, theta=s_crit))
        else:
            res, err = None, None
        val = _value(res)
        out.append(Branch("cylindrical.dominated", space, {space: None if val is None else val * scale},
                          f"C(N,k,p,q) ||g1~||_{space}", [text, tag], ok_range and _finite(res),
                          [err] if err else []))
    return out


def _norm_in(rf: RadialFunction, first: float, second: float) -> NormResult:
    rearr = decreasing_rearrangement(rf)
    if math.isinf(first) and math.isinf(second):
        return lebesgue_norm(rearr, math.inf)
    return lorentz_norm(rearr, first, second)


T_GRID = 64


def _lorentz_product(ctx: ExponentContext, dom: DomainSpec, w: WeightSpec) -> list[Branch]:
    if w.form != "cylindrical" or dom.kind != "product":
        return []
    N, k, p, q = ctx.N, dom.k, ctx.p, ctx.q
    if not p < N:
        return []
    ps = sobolev_conjugate(N, p)
    f1 = RadialFunction(w.profile, k, dom.a, dom.b, dom.sigma)
    f2 = RadialFunction(w.second, N - k, 0.0, math.inf)
    out = []

    def admissible_t(t: float) -> bool:
        return (t <= 0 or k > p) and (t >= 1 or N - k > p)

    ts = np.linspace(0.0, 1.0, T_GRID)
    # strong pair: q = (1 - st) p
    if 0 < q <= p * (1 + _REL):
        st = max(0.0, 1.0 - q / p)
        cand = [(st / t if t > 0 else 0.0, t) for t in ts if (t > 0 and st <= t) or (t == 0 and st == 0)]
        cand = [(s, t) for s, t in cand if s <= 1 and admissible_t(t)]
        if cand and st < 1:
            s, t = cand[0]
            first = k / ((k - p) * st + p)
            second = math.inf if st == 0 else 1.0 / st
            e2 = math.inf if st == 0 else 1.0 / st
            sp1 = _lorentz_descriptor(first, second)
            sp2 = f"L^{_fmt(e2)}"
            r1, e1 = _safe(lambda: _norm_in(f1, first, second))
            r2, e2_ = _safe(lambda: lebesgue_norm(decreasing_rearrangement(f2), e2))
            ok = _finite(r1) and _finite(r2)
            prod = _value(r1) * _value(r2) if ok else math.inf
            out.append(Branch("product.lorentz_strong", f"{sp1} x {sp2}",
                              {sp1: _value(r1), sp2: _value(r2), "product": prod}, "C(N,k,p,q) ||g1|| ||g2||",
                              [f"st = 1 - q/p = {_fmt(st)}", f"(s, t) = ({_fmt(s)}, {_fmt(t)})"], ok,
                              [m for m in (e1, e2_) if m]))
        else:
            out.append(Branch("product.lorentz_strong", "-", {}, "C(N,k,p,q) ||g1|| ||g2||",
                              ["no (s, t) on the grid meets the dimension conditions"], False))
    # weak pair: q = (1 - st) p + st p*
    if p * (1 - _REL) <= q <= ps * (1 + _REL):
        st = min(1.0, max(0.0, (q - p) / (ps - p)))
        best = None
        tried = 0
        for t in ts:
            if t == 0 and st > 0:
                continue
            s = st / t if t > 0 else 0.0
            if s > 1 + 1e-12 or not admissible_t(t):
                continue
            s = min(s, 1.0)
            tried += 1
            a1 = math.inf if (1 - s) * t == 0 else k / ((1 - s) * t * p)
            a2 = math.inf if 1 - t == 0 else (N - k) / ((1 - t) * p)
            r1, e1 = _safe(lambda: _norm_in(f1, a1, math.inf))
            if not _finite(r1):
                continue
            r2, e2 = _safe(lambda: _norm_in(f2, a2, math.inf))
            if _finite(r2):
                best = (s, t, a1, a2, r1, r2)
                break
        if best is not None:
            s, t, a1, a2, r1, r2 = best
            sp1, sp2 = _lorentz_descriptor(a1, math.inf), _lorentz_descriptor(a2, math.inf)
            recovered = (1 - s * t) * p + s * t * ps
            out.append(Branch("product.lorentz_weak", f"{sp1} x {sp2}",
                              {sp1: _value(r1), sp2: _value(r2), "product": _value(r1) * _value(r2)},
                              "C(N,k,p,q) ||g1|| ||g2||",
                              [f"st = (q - p)/(p* - p) = {_fmt(st)}", f"(s, t) = ({_fmt(s)}, {_fmt(t)})",
                               f"recovered q = {recovered!r}"], True))
        else:
            out.append(Branch("product.lorentz_weak", "-", {}, "C(N,k,p,q) ||g1|| ||g2||",
                              [f"st = {_fmt(st)}", f"{tried} grid points tried, none with finite norms"], False))
    return out


def _weighted_lebesgue_product(ctx: ExponentContext, dom: DomainSpec, w: WeightSpec) -> list[Branch]:
    if w.form != "cylindrical" or dom.kind != "product":
        return []
    N, k, p, q = ctx.N, dom.k, ctx.p, ctx.q
    if not p < N:
        return []
    ps = sobolev_conjugate(N, p)
    p1 = interpolated_sobolev(N, p, 1.0)
    checks = [f"k != p: {k != p}", f"a > 0: {dom.a > 0}"]
    crit = "product.weighted_lebesgue"
    if not (k != p and dom.a > 0) or q > ps * (1 + _REL):
        checks.append(f"q <= p*: {q <= ps * (1 + _REL)}")
        return [Branch(crit, "-", {}, "C(N,k,p,q) ||g1~|| ||g2~||", checks, False)]
    g1, g2 = w.profile, w.second
    a, b = dom.a, dom.b
    if q < p:
        th1 = (p - k) * q / p + k - 1.0
        e2 = p / (p - q)
        sp1 = f"L^1(({_fmt(a)},{_fmt(b)}), r^{_fmt(th1)})"
        sp2 = f"L^{_fmt(e2)}((0,inf), r^{N - k - 1})"
        n1 = lambda: weighted_lebesgue_norm(g1, 1.0, a, b, theta=th1)
        n2 = lambda: weighted_lebesgue_norm(g2, e2, 0.0, math.inf, theta=N - k - 1.0)
        checks.append("q < p")
    elif q < p1 * (1 - _REL):
        beta = lebesgue_index(N, p, q)
        e2 = math.inf if beta == 1 else beta / (beta - 1.0)
        sp1 = f"L^{_fmt(beta)}(({_fmt(a)},{_fmt(b)}), r^{_fmt(p - 1)})"
        sp2 = f"L^{_fmt(e2)}((0,inf))"
        n1 = lambda: weighted_lebesgue_norm(g1, beta, a, b, theta=p - 1.0)
        n2 = lambda: weighted_lebesgue_norm(g2, e2, 0.0, math.inf)
        checks.append(f"q in [p, P*(1)) = [{_fmt(p)}, {_fmt(p1)})")
    else:
        alpha = lorentz_index(N, p, q)
        e2 = math.inf if math.isinf(alpha) else alpha / N
        sp1 = f"L^inf(({_fmt(a)},{_fmt(b)}))"
        sp2 = f"L^{_fmt(e2)}((0,inf))"
        n1 = lambda: weighted_lebesgue_norm(g1, math.inf, a, b)
        n2 = lambda: weighted_lebesgue_norm(g2, e2, 0.0, math.inf)
        checks.append(f"q in [P*(1), p*] = [{_fmt(p1)}, {_fmt(ps)}]")
    r1, e1 = _safe(n1)
    r2, e2_ = _safe(n2)
    ok = _finite(r1) and _finite(r2)
    return [Branch(crit, f"{sp1} x {sp2}",
                   {sp1: _value(r1), sp2: _value(r2), "product": _value(r1) * _value(r2) if ok else math.inf},
                   "C(N,k,p,q) ||g1~|| ||g2~||", checks, ok, [m for m in (e1, e2_) if m])]


def _locally_integrable(dom: DomainSpec, w: WeightSpec) -> bool:
    """Integrability near the origin when the origin is an interior point of the (first) factor."""
    if w.form == "lorentz_abstract" or not dom.first_factor_contains_origin:
        return True
    dim = dom.split if w.form == "cylindrical" else dom.N
    top = min(dom.b, 1.0)
    res, _ = _safe(lambda: weighted_lebesgue_norm(w.profile, 1.0, 0.0, top, theta=dim - 1.0))
    return _finite(res)


def _weight_nonzero(w: WeightSpec) -> bool:
    if w.form == "lorentz_abstract":
        return any(v not in (0, 0.0) for v in w.norms.values())
    s = np.linspace(-30, 30, 241)
    vals = w.profile.log_value(s)
    if not np.any(np.isfinite(vals)):
        return False
    if w.form == "cylindrical":
        return bool(np.any(np.isfinite(w.second.log_value(s))))
    return True


def classify(ctx: ExponentContext, domain: DomainSpec, weight: WeightSpec) -> AdmissibilityVerdict:
    """Evaluate every applicable sufficient criterion and combine them into a verdict."""
    if domain.N != ctx.N:
        raise ValidationError(f"domain dimension {domain.N} differs from N = {ctx.N}")
    if weight.form == "cylindrical" and domain.kind != "product":
        raise ValidationError("a cylindrical weight needs a product domain")
    if weight.form == "radial" and domain.kind == "product":
        raise ValidationError("radial weights in all variables are not supported on product domains")
    if domain.kind == "product" and domain.k != ctx.k:
        raise ValidationError(f"product split k = {domain.k} differs from the context k = {ctx.k}")
    N, p, q = ctx.N, ctx.p, ctx.q
    info = {"N": N, "k": ctx.k, "p": p, "q": q, "domain": domain.kind, "weight": weight.describe()}
    if domain.center is not None and any(c != 0 for c in domain.center):
        info["translated_by"] = [-c for c in domain.center]
    reasons = []
    if N > p and q > sobolev_conjugate(N, p) * (1 + _REL) and _weight_nonzero(weight):
        reasons.append(f"q = {q} exceeds p* = {_fmt(sobolev_conjugate(N, p))}: no nonzero weight is admissible")
        return AdmissibilityVerdict("excluded", [], reasons, info)
    if not _locally_integrable(domain, weight):
        reasons.append("weight is not integrable near the origin, which lies inside the domain")
        return AdmissibilityVerdict("excluded", [], reasons, info)
    branches = []
    for fn in (_symmetrization, _polar, _cylindrical, _lorentz_product, _weighted_lebesgue_product):
        branches.extend(fn(ctx, domain, weight))
    if any(b.satisfied for b in branches):
        status = "admissible"
    else:
        status = "unknown"
        if not branches:
            reasons.append("no criterion covers this combination of exponents, domain and weight")
        for b in branches:
            reasons.append(f"{b.criterion}: " + "; ".join([str(c) for c in b.range_checks] + b.notes))
    return AdmissibilityVerdict(status, branches, reasons, info)


# ----------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    """Evidence that a weight satisfies a Hardy-type inequality with exponents (p, q).

    ``kind`` is ``"hardy"`` for an inequality certificate and ``"integrable"``
    for a plain L^1 bound (then ``constant`` is the L^1 norm).  ``constant``
    may be ``None`` when only the structure of the constant is known.
    """

    weight: RadialProfile | None
    p: float
    q: float
    constant: float | None
    constant_form: str = "C"
    kind: str = "hardy"
    origin: str = ""
    norms: dict = field(default_factory=dict)


def _pow_constant(c: float | None, e: float) -> float | None:
    if c is None:
        return None
    return c ** e


def interpolate_potentials(cert1: Certificate, cert2: Certificate, t: float) -> Certificate:
    """Certificate for ``|g1|^t |g2|^(1-t)``.

    Two inequality certificates give ``q = t q1 + (1 - t) q2`` with constant
    ``C1^t C2^(1-t)``; an inequality certificate with ``q1 = p`` and an L^1
    certificate give ``q = t p``.
    """
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"t must lie in [0, 1], got {t}")
    if cert1.p != cert2.p and cert2.kind == "hardy":
        raise ValidationError("both certificates must share p")
    if t == 1.0:
        return cert1
    if cert1.kind != "hardy":
        raise ValidationError("the first certificate must be an inequality certificate")
    if cert2.kind == "integrable":
        if abs(cert1.q - cert1.p) > 1e-12 * cert1.p:
            raise ValidationError("mixing with an integrable weight needs q1 = p")
        if t == 0.0:
            raise ValidationError("t must be positive when mixing with an integrable weight")
        q = t * cert1.p
    else:
        q = t * cert1.q + (1.0 - t) * cert2.q
    c1, c2 = cert1.constant, cert2.constant
    const = None if c1 is None or c2 is None else c1 ** t * c2 ** (1.0 - t)
    weight = None
    if cert1.weight is not None and cert2.weight is not None:
        weight = ProductProfile(cert1.weight, cert2.weight, t, 1.0 - t)
    return Certificate(weight, cert1.p, q, const, f"({cert1.constant_form})^{t:g} ({cert2.constant_form})^{1 - t:g}",
                       "hardy", "interpolation")


def product_lift(cert1: Certificate, g2_norm: float, g2: RadialProfile | None = None) -> Certificate:
    """Certificate for ``g1(y) g2(z)`` given ``||g2||_{p/(p-q)}`` on the second factor."""
    p, q = cert1.p, cert1.q
    if not 0 < q <= p * (1 + _REL):
        raise ExponentRangeError(f"lifting needs q in (0, p], got q={q}, p={p}")
    if not (g2_norm >= 0 and math.isfinite(g2_norm)):
        raise ValidationError("the second factor needs a finite norm")
    const = None if cert1.constant is None else cert1.constant * g2_norm
    e = math.inf if q >= p else p / (p - q)
    return Certificate(cert1.weight, p, q, const, f"{cert1.constant_form} ||g2||_{_fmt(e)}", "hardy", "product",
                       {f"L^{_fmt(e)}": g2_norm, "second_factor": g2.describe() if g2 is not None else None})


# pointwise estimates assumed by :func:`sectorial_lift`; keyed by a short tag
HYPOTHESES: dict[str, str] = {
    "radial-1": "pointwise bound of |u|^q by h(r) times a power of the radial Dirichlet integral (q <= p)",
    "radial-2": "pointwise bound with a logarithmic factor for the borderline dimension",
    "radial-3": "pointwise bound mixing the critical Lebesgue integral and the Dirichlet integral",
}


def register_hypothesis(tag: str, description: str) -> None:
    HYPOTHESES[tag] = description


def sectorial_lift(ctx: ExponentContext, domain: DomainSpec, g1: RadialProfile, g2: RadialProfile,
                   h: RadialProfile, gamma: float, delta: float, hypothesis: str,
                   swap_roles: bool = False) -> Certificate:
    """Certificate for ``g1(|y|) g2(|z|)`` on a sectorial product from an assumed pointwise estimate.

    With ``q = delta p + gamma p*`` the norm product is
    ``||g1~||_{L^1((a,b), r^(k-1) h)} ||g2~||_{L^e((0,inf), r^(N-k-1))}`` with
    ``e = 1/(1 - gamma - delta)`` (``L^inf`` when ``gamma + delta = 1``).
    ``swap_roles`` exchanges the roles of the two factors.
    """
    if domain.kind != "product" and domain.N != ctx.k:
        raise InvalidDomainError("a sectorial product domain is required")
    if hypothesis not in HYPOTHESES:
        raise ValidationError(f"unknown hypothesis tag {hypothesis!r}; register it first")
    if not (gamma >= 0 and delta > 0 and 0 < gamma + delta <= 1 + 1e-15):
        raise ValidationError(f"need gamma >= 0, delta > 0 and 0 < gamma + delta <= 1, got {gamma}, {delta}")
    N, p = ctx.N, ctx.p
    if not p < N:
        raise ExponentRangeError("requires p < N")
    k = domain.k if domain.kind == "product" else ctx.k
    ps = sobolev_conjugate(N, p)
    q = delta * p + gamma * ps
    total = gamma + delta
    e = math.inf if abs(total - 1.0) <= 1e-12 else 1.0 / (1.0 - total)
    a, b = domain.a, domain.b
    hw = ProductProfile(g1 if not swap_roles else g2, h)
    if not swap_roles:
        n1 = weighted_lebesgue_norm(hw, 1.0, a, b, theta=k - 1.0)
        theta2 = 0.0 if math.isinf(e) else N - k - 1.0
        n2 = weighted_lebesgue_norm(g2, e, 0.0, math.inf, theta=theta2)
        sp1 = f"L^1(({_fmt(a)},{_fmt(b)}), r^{k - 1} h)"
        sp2 = f"L^{_fmt(e)}((0,inf)" + ("" if math.isinf(e) else f", r^{N - k - 1}") + ")"
    else:
        theta1 = 0.0 if math.isinf(e) else k - 1.0
        n1 = weighted_lebesgue_norm(g1, e, a, b, theta=theta1)
        n2 = weighted_lebesgue_norm(hw, 1.0, 0.0, math.inf, theta=N - k - 1.0)
        sp1 = f"L^{_fmt(e)}(({_fmt(a)},{_fmt(b)})" + ("" if math.isinf(e) else f", r^{k - 1}") + ")"
        sp2 = f"L^1((0,inf), r^{N - k - 1} h)"
    norms = {sp1: n1.value, sp2: n2.value, "product": n1.value * n2.value, "hypothesis": hypothesis}
    return Certificate(ProductProfile(g1, g2), p, q, None, "C(N,k,p,q) ||g1~|| ||g2~||", "hardy",
                       "sectorial" + (" (swapped)" if swap_roles else ""), norms)
