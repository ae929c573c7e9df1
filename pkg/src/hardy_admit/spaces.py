"""Rearrangement-invariant (quasi)norms and weighted Lebesgue norms.

Norms are computed from a :class:`~hardy_admit.rearrange.Rearrangement`.
Integrals run in ``u = log t``; suprema are taken on a log-uniform grid
(4096 points per decade over thirty decades) extended by a sparse far grid
out to ``|u| ~ 1e12``, followed by a local bounded refinement around the
best grid point.  A supremum is reported infinite when it is attained at
the far end of the extended grid and still growing there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .errors import UnsupportedCaseError, ValidationError
from .profiles import RadialProfile
from .quadrature import log_integrate
from .rearrange import RadialFunction, Rearrangement, SampledFunction, StepRearrangement, decreasing_rearrangement

__all__ = [
    "NormResult",
    "SupResult",
    "MaximalTable",
    "log_sup",
    "lorentz_quasinorm",
    "lorentz_norm",
    "lorentz_zygmund_norm",
    "lorentz_zygmund_quasinorm",
    "lebesgue_norm",
    "weighted_lebesgue_norm",
    "weak_triple_norm",
]

LN10 = math.log(10.0)
PER_DECADE = 4096
DECADES = 30
_FAR = 10.0 ** (np.arange(-24, 12 * 24 + 1) / 24.0)
_GROWTH = math.log(2.0)


@dataclass(frozen=True)
class NormResult:
    value: float
    finite: bool
    quadrature_error_estimate: float
    argmax: float | None = None
    details: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class SupResult:
    log_value: float
    u_argmax: float
    finite: bool

    @property
    def value(self) -> float:
        if not self.finite:
            return math.inf
        return math.exp(min(self.log_value, 709.0)) if self.log_value > -math.inf else 0.0


def sup_grid(hi_u: float = math.inf, center: float | None = None,
             per_decade: int = PER_DECADE, decades: int = DECADES) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(far_low, dense, far_high) grids in ``u``; ``far_high`` is empty when ``hi_u`` is finite."""
    if math.isfinite(hi_u):
        top = hi_u
        bottom = hi_u - decades * LN10
    else:
        c = 0.0 if center is None else center
        top = c + 0.5 * decades * LN10
        bottom = c - 0.5 * decades * LN10
    n = per_decade * decades
    dense = np.linspace(bottom, top, n + 1)
    if math.isfinite(hi_u):
        dense = dense[:-1] + 0.5 * (dense[1] - dense[0])
        far_hi = np.zeros(0)
    else:
        far_hi = top + _FAR
    far_lo = (bottom - _FAR)[::-1]
    return far_lo, dense, far_hi


def log_sup(logh, hi_u: float = math.inf, center: float | None = None, refine: bool = True,
            per_decade: int = PER_DECADE, values: np.ndarray | None = None) -> SupResult:
    """Supremum of ``exp(logh(u))`` over ``u < hi_u``.

    ``logh`` must be vectorised.  Divergence is diagnosed at either far end.
    Precomputed ``values`` on the sup grid may be passed instead (``refine``
    is then ignored).
    """
    far_lo, dense, far_hi = sup_grid(hi_u, center, per_decade=per_decade)
    grid = np.concatenate([far_lo, dense, far_hi])
    if values is not None:
        vals = np.asarray(values, dtype=float)
        refine = False
    else:
        with np.errstate(all="ignore"):
            vals = np.asarray(logh(grid), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    if np.any(vals == np.inf):
        i = int(np.argmax(vals))
        return SupResult(math.inf, float(grid[i]), False)
    # far points carry a rounding error growing like |u| eps; they win only by a clear margin
    margin = np.zeros(grid.size)
    margin[: far_lo.size] = 1e-14 * np.abs(far_lo) + 1e-12
    if far_hi.size:
        margin[-far_hi.size:] = 1e-14 * np.abs(far_hi) + 1e-12
    i = int(np.argmax(vals - margin))
    best = float(vals[i])
    if best == -math.inf:
        return SupResult(-math.inf, float(grid[0]), True)
    # growth at the far ends: compare the last point with one three decades closer
    if i < 24 and vals[0] - vals[72] > _GROWTH:
        return SupResult(math.inf, float(grid[0]), False)
    if far_hi.size and i >= grid.size - 24 and vals[-1] - vals[-73] > _GROWTH:
        return SupResult(math.inf, float(grid[-1]), False)
    refine = refine and far_lo.size <= i < far_lo.size + dense.size
    u_best = float(grid[i])
    if refine and 0 < i < grid.size - 1:
        a, b = float(grid[i - 1]), float(grid[i + 1])

        def neg(x):
            with np.errstate(all="ignore"):
                v = float(np.asarray(logh(np.array([x])), dtype=float)[0])
            return -v if np.isfinite(v) else math.inf

        res = minimize_scalar(neg, bounds=(a, b), method="bounded", options={"xatol": 1e-12 * max(1.0, abs(u_best))})
        if res.success and -res.fun > best:
            best, u_best = float(-res.fun), float(res.x)
    if values is None and math.isfinite(hi_u):
        # the supremum may only be approached as t -> |Omega| from below
        u_end = hi_u - 1e-13 * max(1.0, abs(hi_u))
        with np.errstate(all="ignore"):
            v_end = float(np.asarray(logh(np.array([u_end])), dtype=float)[0])
        if np.isfinite(v_end) and v_end > best:
            best, u_best = v_end, u_end
    return SupResult(best, u_best, True)


class MaximalTable:
    """Tabulated ``log int_0^t f*`` for fast evaluation of the maximal function.

    The table covers the sup grid; outside it the cumulative integral is
    evaluated directly.
    """

    def __init__(self, rearr: Rearrangement, center: float | None = None):
        self.rearr = rearr
        hi = rearr.log_measure
        far_lo, dense, far_hi = sup_grid(hi, center, per_decade=512)
        grid = np.concatenate([far_lo, dense, far_hi])
        if math.isfinite(hi):
            grid = np.append(grid, hi)
        self.grid = grid
        self.logc = rearr.log_cumulative(grid)
        self.finite = not bool(np.any(self.logc == np.inf))
        usable = self.finite and bool(np.all(np.isfinite(self.logc)))
        self._interp = PchipInterpolator(grid, self.logc, extrapolate=False) if usable else None

    def log_cumulative(self, u):
        u = np.asarray(u, dtype=float)
        if not self.finite:
            return np.full(u.shape, math.inf)
        if self.rearr.closed_form or self._interp is None:
            return self.rearr.log_cumulative(u).reshape(u.shape)
        out = self._interp(np.clip(u, self.grid[0], self.grid[-1]))
        outside = (u < self.grid[0]) | (u > self.grid[-1])
        if np.any(outside):
            out = np.array(out, dtype=float)
            if math.isfinite(self.rearr.log_measure):
                beyond = u > self.grid[-1]
                out[beyond] = self.logc[-1]
                outside = outside & ~beyond
            if np.any(outside):
                out[outside] = self.rearr.log_cumulative(u[outside])
        return out

    def log_maximal(self, u):
        u = np.asarray(u, dtype=float)
        return self.log_cumulative(u) - u


def _as_rearrangement(f) -> Rearrangement:
    if isinstance(f, Rearrangement):
        return f
    if isinstance(f, (SampledFunction, RadialFunction)):
        return decreasing_rearrangement(f)
    raise ValidationError(f"expected a rearrangement, got {type(f).__name__}")


def _check_indices(p: float, q: float) -> None:
    if not (0 < p <= math.inf) or not (0 < q <= math.inf):
        raise ValidationError(f"Lorentz indices must be positive, got ({p}, {q})")


def _integral_result(phi, hi_u: float, q: float, breakpoints: np.ndarray) -> NormResult:
    """(int exp(phi) du over (-inf, hi_u))^(1/q)."""
    pts = [b for b in np.sort(breakpoints) if b < hi_u]
    edges = [-math.inf] + pts + [hi_u]
    total, rel = -math.inf, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if not b > a:
            continue
        res = log_integrate(phi, a, b)
        if not res.finite:
            return NormResult(math.inf, False, 0.0)
        if res.log_value > -math.inf:
            new = float(np.logaddexp(total, res.log_value))
            rel = (rel * math.exp(total - new) if total > -math.inf else 0.0) + res.rel_error * math.exp(res.log_value - new)
            total = new
    if total == -math.inf:
        return NormResult(0.0, True, 0.0)
    lv = total / q
    value = math.exp(lv) if lv < 709 else math.inf
    return NormResult(value, math.isfinite(value), value * rel / q)


def _sup_result(sr: SupResult) -> NormResult:
    if not sr.finite:
        return NormResult(math.inf, False, 0.0, argmax=math.exp(sr.u_argmax) if sr.u_argmax < 709 else math.inf)
    v = sr.value
    return NormResult(v, True, abs(v) * 1e-12, argmax=math.exp(sr.u_argmax) if sr.u_argmax < 709 else math.inf)


def lorentz_quasinorm(f, p: float, q: float) -> NormResult:
    """|| t^(1/p - 1/q) f*(t) ||_{L^q(dt)}, built on f* itself."""
    _check_indices(p, q)
    r = _as_rearrangement(f)
    ip = 0.0 if math.isinf(p) else 1.0 / p
    if isinstance(r, StepRearrangement) and ip > 0:
        return _step_quasinorm(r, ip, q)
    hi = r.log_measure
    if math.isinf(q):
        return _sup_result(log_sup(lambda u: ip * u + r.log_value(u), hi))
    return _integral_result(lambda u: q * ip * u + q * r.log_value(u), hi, q, r.breakpoints())


def _step_quasinorm(r: StepRearrangement, ip: float, q: float) -> NormResult:
    """Exact quasinorm of a step rearrangement: each step integrates in closed form."""
    v, ends = r.values, r.ends
    keep = v > 0
    if not np.any(keep):
        return NormResult(0.0, True, 0.0)
    if math.isinf(q):
        # t^(1/p) f*(t) increases on each step; its supremum is approached at the right ends
        logs = ip * np.log(ends[keep]) + np.log(v[keep])
        i = int(np.argmax(logs))
        val = math.exp(logs[i])
        return NormResult(val, True, val * 1e-15, argmax=float(ends[keep][i]))
    c = q * ip
    starts = r.starts[keep]
    pieces = v[keep] ** q * (ends[keep] ** c - starts ** c) / c
    val = float(np.sum(pieces)) ** (1.0 / q)
    return NormResult(val, True, val * 1e-14)


def lorentz_norm(f, p: float, q: float, table: MaximalTable | None = None) -> NormResult:
    """|| t^(1/p - 1/q) f**(t) ||_{L^q(dt)}, the norm variant built on the maximal function."""
    _check_indices(p, q)
    r = _as_rearrangement(f)
    ip = 0.0 if math.isinf(p) else 1.0 / p
    if isinstance(r, StepRearrangement) and math.isinf(q) and ip > 0:
        val = weak_norm_step(r, p)
        return NormResult(val, True, val * 1e-15)
    tab = table or MaximalTable(r)
    if not tab.finite:
        return NormResult(math.inf, False, 0.0, details={"reason": "f* not integrable at 0"})
    hi = r.log_measure
    if math.isinf(q):
        return _sup_result(log_sup(lambda u: ip * u + tab.log_maximal(u), hi))
    if ip == 0.0:
        raise UnsupportedCaseError("L^{inf,q} with q < inf is trivial; use the supremum norm")
    return _integral_result(lambda u: q * ip * u + q * tab.log_maximal(u), hi, q, r.breakpoints())


def lorentz_zygmund_norm(f, p: float, q: float, log_power: float,
                         table: MaximalTable | None = None, sup_limit: float | None = None) -> NormResult:
    """|| t^(1/p - 1/q) log(e|Omega|/t)^log_power f**(t) ||_{L^q(dt)} on a set of finite measure.

    ``sup_limit`` (a fraction below one) truncates the supremum to ``t < sup_limit * |Omega|``.
    """
    _check_indices(p, q)
    r = _as_rearrangement(f)
    hi = r.log_measure
    if not math.isfinite(hi):
        raise UnsupportedCaseError("logarithmic norms need a set of finite measure")
    ip = 0.0 if math.isinf(p) else 1.0 / p
    tab = table or MaximalTable(r)
    if not tab.finite:
        return NormResult(math.inf, False, 0.0, details={"reason": "f* not integrable at 0"})

    def log_ell(u):
        return np.log1p(hi - u)

    if math.isinf(q):
        top = hi + (math.log(sup_limit) if sup_limit else 0.0)
        return _sup_result(log_sup(lambda u: ip * u + log_power * log_ell(u) + tab.log_maximal(u), top))
    return _integral_result(lambda u: q * (ip * u + log_power * log_ell(u) + tab.log_maximal(u)), hi, q,
                            r.breakpoints())


def lorentz_zygmund_quasinorm(f, p: float, q: float, log_power: float) -> NormResult:
    """As :func:`lorentz_zygmund_norm` but built on f* instead of f**."""
    _check_indices(p, q)
    r = _as_rearrangement(f)
    hi = r.log_measure
    if not math.isfinite(hi):
        raise UnsupportedCaseError("logarithmic norms need a set of finite measure")
    ip = 0.0 if math.isinf(p) else 1.0 / p

    def core(u):
        return ip * u + log_power * np.log1p(hi - u) + r.log_value(u)

    if math.isinf(q):
        return _sup_result(log_sup(core, hi))
    return _integral_result(lambda u: q * core(u), hi, q, r.breakpoints())


def lebesgue_norm(f, e: float) -> NormResult:
    """||f||_{L^e} through the rearrangement (L^{e,e} with f*)."""
    return lorentz_quasinorm(f, e, e)


def weighted_lebesgue_norm(profile: RadialProfile, e: float, a: float = 0.0, b: float = math.inf,
                           theta: float = 0.0, log_power: float = 0.0) -> NormResult:
    """(int_a^b g(r)^e r^theta log(r/a)^log_power dr)^(1/e); for e = inf, sup g(r) r^theta.

    With ``log_power != 0`` the inner radius must be positive.
    """
    if not (0 < e <= math.inf):
        raise ValidationError("exponent must be positive")
    if not (0 <= a < b):
        raise ValidationError("need 0 <= a < b")
    if log_power != 0 and a <= 0:
        raise ValidationError("logarithmic weight log(r/a) requires a > 0")
    lo_s = math.log(a) if a > 0 else -math.inf
    hi_s = math.log(b) if math.isfinite(b) else math.inf
    if math.isinf(e):
        def logh(s):
            return profile.log_value(s) + theta * s
        sr = log_sup(logh, hi_s, center=0.0) if lo_s == -math.inf else _bounded_sup(logh, lo_s, hi_s)
        return _sup_result(sr)
    if log_power == 0:
        def phi(s):
            return e * profile.log_value(s) + (theta + 1.0) * s
        kinks = [math.log(k) for k in getattr(profile, "kinks", ()) if a < k < b]
        return _integral_piecewise(phi, lo_s, hi_s, kinks, e)
    # r = a exp(w), w = exp(x): dr = r w dx and log(r/a) = w
    la = math.log(a)
    x_hi = math.log(math.log(b / a)) if math.isfinite(b) else math.inf

    def phi_log(x):
        w = np.exp(np.minimum(x, 700.0))
        s = la + w
        return e * profile.log_value(s) + (theta + 1.0) * s + log_power * x + x

    return _integral_piecewise(phi_log, -math.inf, x_hi, [], e)


def _integral_piecewise(phi, lo, hi, cuts, e) -> NormResult:
    edges = [lo] + sorted(c for c in cuts if lo < c < hi) + [hi]
    total, rel = -math.inf, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        res = log_integrate(phi, a, b)
        if not res.finite:
            return NormResult(math.inf, False, 0.0)
        if res.log_value > -math.inf:
            new = float(np.logaddexp(total, res.log_value))
            rel = (rel * math.exp(total - new) if total > -math.inf else 0.0) + res.rel_error * math.exp(res.log_value - new)
            total = new
    if total == -math.inf:
        return NormResult(0.0, True, 0.0)
    lv = total / e
    value = math.exp(lv) if lv < 709 else math.inf
    return NormResult(value, math.isfinite(value), value * rel / e)


def _bounded_sup(logh, lo: float, hi: float) -> SupResult:
    if math.isinf(hi):
        span = np.concatenate([lo + np.linspace(0, 30 * LN10, PER_DECADE * 30 + 1)[1:], lo + 30 * LN10 + _FAR])
    else:
        span = np.linspace(lo, hi, PER_DECADE * max(1, int(math.ceil((hi - lo) / LN10))) + 1)
    vals = np.asarray(logh(span), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    if math.isinf(hi) and i >= span.size - 24 and vals[-1] - vals[-73] > _GROWTH:
        return SupResult(math.inf, float(span[-1]), False)
    return SupResult(float(vals[i]), float(span[i]), bool(np.isfinite(vals[i])))


def weak_triple_norm(f, p: float, s: float, random_sets: int = 64, seed: int = 42) -> NormResult:
    """sup over sets E of |E|^(1/p - 1/s) (int_E |f|^s)^(1/s), for 0 < s < p.

    The family consists of super-level sets of |f| (every measure level, since
    the integral over a set of given measure is largest on a super-level set)
    together with random unions of cells when ``f`` is a sampled function.
    """
    if not (0 < s < p):
        raise ValidationError("need 0 < s < p")
    gap = 1.0 / p - 1.0 / s
    if isinstance(f, SampledFunction):
        return _weak_triple_sampled(f, p, s, random_sets, seed)
    r = _as_rearrangement(f)
    if isinstance(r, StepRearrangement):
        return _weak_triple_sampled(SampledFunction(r.values, r.widths), p, s, random_sets, seed)
    tab = MaximalTable(r.power(s))
    if not tab.finite:
        return NormResult(math.inf, False, 0.0)
    sr = log_sup(lambda u: gap * u + tab.log_cumulative(u) / s, r.log_measure + 1e-300)
    return _sup_result(sr)


def _weak_triple_sampled(f: SampledFunction, p: float, s: float, random_sets: int, seed: int) -> NormResult:
    gap = 1.0 / p - 1.0 / s
    step = StepRearrangement(f.values, f.weights)
    vs = step.values ** s
    cum = np.concatenate([[0.0], np.cumsum(vs * step.widths)])
    ends = np.concatenate([[0.0], step.ends])
    # prefix sets, plus points inside each step where the objective can peak
    cand = [ends[1:]]
    for k in (0.125, 0.25, 0.5, 0.75, 0.875):
        cand.append(ends[:-1] + k * step.widths)
    # interior critical point of m^(1/p) * (average of f*) used by the weak-type norm
    lin_c = np.concatenate([[0.0], np.cumsum(step.values * step.widths)])
    with np.errstate(divide="ignore", invalid="ignore"):
        crit = (p - 1.0) * (lin_c[:-1] - step.values * ends[:-1]) / step.values
    ok = np.isfinite(crit) & (crit > ends[:-1]) & (crit < ends[1:])
    cand.append(crit[ok])
    m = np.concatenate(cand)
    m = m[m > 0]
    idx = np.searchsorted(step.ends, m, side="left")
    idx = np.minimum(idx, step.values.size - 1)
    mass = cum[idx] + vs[idx] * (m - ends[idx])
    with np.errstate(divide="ignore"):
        logs = gap * np.log(m) + np.log(mass) / s
    best = float(np.max(logs))
    if random_sets:
        rng = np.random.default_rng(seed)
        n = f.values.size
        for _ in range(random_sets):
            pick = rng.random(n) < rng.uniform(0.05, 0.95)
            if not np.any(pick):
                continue
            meas = float(np.sum(f.weights[pick]))
            val = float(np.sum(f.values[pick] ** s * f.weights[pick]))
            if val > 0:
                best = max(best, gap * math.log(meas) + math.log(val) / s)
    v = math.exp(best)
    return NormResult(v, True, v * 1e-14)


def weak_norm_step(step: StepRearrangement, p: float) -> float:
    """Exact sup_t t^(1/p) f**(t) for a step rearrangement."""
    ends = np.concatenate([[0.0], step.ends])
    lin_c = np.concatenate([[0.0], np.cumsum(step.values * step.widths)])
    t = [step.ends]
    with np.errstate(divide="ignore", invalid="ignore"):
        crit = (p - 1.0) * (lin_c[:-1] - step.values * ends[:-1]) / step.values
    ok = np.isfinite(crit) & (crit > ends[:-1]) & (crit < ends[1:])
    t.append(crit[ok])
    tt = np.concatenate(t)
    with np.errstate(divide="ignore"):
        vals = np.log(step.cumulative(tt)) + (1.0 / p - 1.0) * np.log(tt)
    return float(np.exp(np.max(vals)))
