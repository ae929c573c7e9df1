"""Distribution functions and decreasing rearrangements.

A rearrangement object represents ``f*`` on ``(0, |Omega|)`` through
``log_value(u) = log f*(exp(u))`` together with the cumulative integral
``log_cumulative(u) = log int_0^{exp(u)} f*``, from which the maximal
function ``f** = cumulative / t`` follows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRearrangement, DivergentMaximalFunction, InvalidDomainError, ValidationError
from .exponents import ball_volume
from .profiles import PowerProfile, RadialProfile
from .quadrature import log_gap_integrals, log_integrate, tail_log_integrals

__all__ = [
    "RadialFunction",
    "SampledFunction",
    "Rearrangement",
    "RadialRearrangement",
    "StepRearrangement",
    "GenericRearrangement",
    "PowerRearrangement",
    "distribution",
    "decreasing_rearrangement",
    "radial_shortcut",
    "maximal_function",
]


@dataclass(frozen=True)
class RadialFunction:
    """x -> g(|x|) on the sectorial set {a <= |x| < b, x/|x| in S} of R^N, |S| = sigma |S^{N-1}|."""

    profile: RadialProfile
    N: float
    a: float = 0.0
    b: float = math.inf
    sigma: float = 1.0

    def __post_init__(self):
        if not self.N >= 1:
            raise InvalidDomainError("dimension must be >= 1")
        if not (0 <= self.a < self.b):
            raise InvalidDomainError(f"need 0 <= a < b, got a={self.a}, b={self.b}")
        if not (0 < self.sigma <= 1):
            raise InvalidDomainError("sector fraction must lie in (0, 1]")

    @property
    def log_unit(self) -> float:
        """log of the measure of the unit sectorial ball."""
        return math.log(self.sigma * ball_volume(self.N))

    @property
    def measure(self) -> float:
        if math.isinf(self.b):
            return math.inf
        return self.sigma * ball_volume(self.N) * (self.b ** self.N - self.a ** self.N)

    def shell(self, r_lo, r_hi):
        """Measure of the part of the set with r_lo <= |x| < r_hi."""
        lo = np.clip(r_lo, self.a, self.b)
        hi = np.clip(r_hi, self.a, self.b)
        return self.sigma * ball_volume(self.N) * (np.power(hi, self.N) - np.power(lo, self.N))

    def value(self, r):
        r = np.asarray(r, dtype=float)
        v = self.profile(r)
        return np.where((r >= self.a) & (r < self.b), v, 0.0)

    def log_radius_of_measure(self, u: np.ndarray) -> np.ndarray:
        """log rho with shell(a, rho) = exp(u)."""
        u = np.asarray(u, dtype=float)
        if self.a > 0:
            return np.logaddexp(u - self.log_unit, self.N * math.log(self.a)) / self.N
        return (u - self.log_unit) / self.N


@dataclass(frozen=True)
class SampledFunction:
    """A simple function: value ``values[i]`` on a cell of measure ``weights[i]``."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = np.abs(np.asarray(self.values, dtype=float)).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size == 1 and v.size > 1:
            w = np.full(v.size, float(w[0]))
        if v.size != w.size or v.size == 0:
            raise ValidationError("values and cell measures must have equal nonzero length")
        if np.any(w <= 0) or not np.all(np.isfinite(w)) or not np.all(np.isfinite(v)):
            raise ValidationError("cell measures must be positive and values finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)

    @property
    def measure(self) -> float:
        return float(np.sum(self.weights))


def _radial_distribution(f: RadialFunction, s: float) -> float:
    if s < 0:
        raise ValidationError("level must be nonnegative")
    prof = f.profile
    log_s = math.log(s) if s > 0 else -math.inf
    lo = max(f.a, prof.support[0])
    hi = min(f.b, prof.support[1])
    if not lo < hi:
        return 0.0
    if prof.decreasing:
        top = math.log(hi) if math.isfinite(hi) else 700.0
        if prof.log_value(np.array([top]))[0] > log_s and not math.isfinite(hi):
            return math.inf
        bottom = math.log(lo) if lo > 0 else -700.0
        if prof.log_value(np.array([bottom]))[0] <= log_s:
            return 0.0
        if prof.log_value(np.array([top]))[0] > log_s:
            rho = hi
        else:
            a_, b_ = bottom, top
            for _ in range(200):
                m = 0.5 * (a_ + b_)
                if prof.log_value(np.array([m]))[0] > log_s:
                    a_ = m
                else:
                    b_ = m
                if b_ - a_ < 1e-13:
                    break
            rho = math.exp(0.5 * (a_ + b_))
        return float(f.shell(lo, rho))
    # non-monotone: scan a log grid, refine sign changes by bisection
    top = math.log(hi) if math.isfinite(hi) else 60.0
    bottom = math.log(lo) if lo > 0 else -60.0
    grid = np.linspace(bottom, top, 8001)
    above = prof.log_value(grid) > log_s
    if not math.isfinite(hi) and above[-1]:
        return math.inf
    edges = [bottom] if above[0] else []
    for i in np.nonzero(above[1:] != above[:-1])[0]:
        a_, b_ = grid[i], grid[i + 1]
        rising = not above[i]
        for _ in range(100):
            m = 0.5 * (a_ + b_)
            if (prof.log_value(np.array([m]))[0] > log_s) == rising:
                b_ = m
            else:
                a_ = m
            if b_ - a_ < 1e-13:
                break
        edges.append(0.5 * (a_ + b_))
    if above[-1]:
        edges.append(top)
    total = 0.0
    for a_, b_ in zip(edges[0::2], edges[1::2]):
        r_lo = 0.0 if (a_ == bottom and lo == 0) else math.exp(a_)
        total += float(f.shell(r_lo, math.exp(b_) if b_ < top or math.isfinite(hi) else math.inf))
    return total


def distribution(f, s: float) -> float:
    """mu_f(s) = |{|f| > s}|; ``inf`` when the super-level set has infinite measure."""
    if isinstance(f, SampledFunction):
        return float(np.sum(f.weights[f.values > s]))
    if isinstance(f, RadialFunction):
        return _radial_distribution(f, s)
    raise ValidationError(f"unsupported function type {type(f).__name__}")


class Rearrangement:
    """Decreasing rearrangement f* on (0, measure)."""

    measure: float = math.inf
    closed_form: bool = False

    def log_value(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def breakpoints(self) -> np.ndarray:
        """Points (in log t) where ``log_value`` is not smooth."""
        if math.isfinite(self.measure):
            return np.array([math.log(self.measure)])
        return np.zeros(0)

    @property
    def log_measure(self) -> float:
        return math.log(self.measure) if math.isfinite(self.measure) else math.inf

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.exp(np.minimum(self.log_value(np.log(t)), 700.0))
        return out if out.ndim else float(out)

    def _density(self, u):
        return self.log_value(u) + u

    def log_cumulative(self, u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        """log int_0^{exp(u)} f*; ``+inf`` if f* is not integrable at zero."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        order = np.argsort(u)
        us = u[order]
        bp = self.breakpoints()
        bp = bp[(bp > us[0]) & (bp < us[-1])]
        grid = np.union1d(us, bp)
        # points far from their predecessor restart from a direct tail integral
        restart = np.concatenate([[True], np.diff(grid) > 16.0])
        heads = np.full(grid.size, -np.inf)
        idx = np.nonzero(restart)[0]
        heads[idx] = tail_log_integrals(self._density, grid[idx], -1)
        if np.any(heads[idx] == np.inf):
            first_bad = idx[np.argmax(heads[idx] == np.inf)]
        else:
            first_bad = grid.size
        gaps = np.full(grid.size, -np.inf)
        inner = np.nonzero(~restart)[0]
        if inner.size:
            gaps[inner] = log_gap_integrals(self._density, grid[inner - 1], grid[inner])
        cum = np.empty(grid.size)
        for k, start in enumerate(idx):
            stop = idx[k + 1] if k + 1 < idx.size else grid.size
            seq = gaps[start:stop].copy()
            seq[0] = heads[start]
            cum[start:stop] = np.logaddexp.accumulate(seq)
        cum[first_bad:] = np.inf
        out = np.empty_like(u)
        out[order] = cum[np.searchsorted(grid, us)]
        return out

    def log_maximal(self, u: np.ndarray) -> np.ndarray:
        """log f**(exp(u))."""
        u = np.asarray(u, dtype=float)
        return self.log_cumulative(u) - u

    def maximal(self, t):
        t = np.asarray(t, dtype=float)
        out = np.exp(np.minimum(self.log_maximal(np.log(np.atleast_1d(t))), 700.0))
        return out.reshape(t.shape) if t.ndim else float(out[0])

    def power(self, alpha: float) -> "Rearrangement":
        """(f^alpha)* = (f*)^alpha."""
        return PowerRearrangement(self, alpha)

    def integral(self) -> float:
        """int_0^measure f* (equal to the L^1 norm of f)."""
        top = self.log_measure
        if math.isfinite(top):
            return float(np.exp(self.log_cumulative(np.array([top]))[0]))
        return log_integrate(self._density, -math.inf, math.inf).value


class PowerRearrangement(Rearrangement):
    def __init__(self, base: Rearrangement, alpha: float):
        if not alpha > 0:
            raise ValidationError("power must be positive")
        self.base = base
        self.alpha = alpha
        self.measure = base.measure

    def breakpoints(self):
        return self.base.breakpoints()

    def log_value(self, u):
        return self.alpha * self.base.log_value(u)


class RadialRearrangement(Rearrangement):
    """f*(t) = g(rho(t)) for radial non-increasing g, with shell(a, rho) = t."""

    def __init__(self, f: RadialFunction, use_closed_form: bool = True):
        if not f.profile.decreasing:
            raise ValidationError("radial shortcut needs a non-increasing profile")
        self.f = f
        self.measure = f.measure
        prof = f.profile
        self.closed_form = use_closed_form and isinstance(prof, PowerProfile) and f.a == 0
        lo, hi = prof.support
        if hi < f.b:
            self.measure = float(f.shell(f.a, hi))
        if lo > f.a:
            raise ValidationError("profile vanishes near the inner radius; not a decreasing rearrangement")
        # f* may vanish before measure if the profile does; measure stays |Omega| for norms

    def breakpoints(self):
        pts = []
        if math.isfinite(self.measure):
            pts.append(math.log(self.measure))
        for k in self.f.profile.kinks:
            if self.f.a < k < self.f.b:
                m = float(self.f.shell(self.f.a, k))
                if m > 0:
                    pts.append(math.log(m))
        return np.array(sorted(pts))

    def log_value(self, u):
        u = np.asarray(u, dtype=float)
        s = self.f.log_radius_of_measure(u)
        out = self.f.profile.log_value(s)
        if math.isfinite(self.measure):
            out = np.where(u >= math.log(self.measure), -np.inf, out)
        return out

    def log_cumulative(self, u, tol=1e-10):
        if not self.closed_form:
            return super().log_cumulative(u, tol)
        prof = self.f.profile
        u = np.atleast_1d(np.asarray(u, dtype=float))
        expo = prof.d / self.f.N
        if expo >= 1:
            return np.full(u.shape, math.inf)
        uu = np.minimum(u, self.log_measure)
        # int_0^t c (t'/unit)^(-d/N) dt' = c unit^(d/N) t^(1-d/N) / (1-d/N)
        return math.log(prof.c) + expo * self.f.log_unit + (1 - expo) * uu - math.log(1 - expo)


class StepRearrangement(Rearrangement):
    """Right-continuous step function: value ``v_i`` on ``[T_{i-1}, T_i)``."""

    closed_form = True

    def __init__(self, values: np.ndarray, weights: np.ndarray, total_measure: float | None = None):
        order = np.argsort(-values, kind="stable")
        self.values = np.asarray(values, dtype=float)[order]
        self.widths = np.asarray(weights, dtype=float)[order]
        self.ends = np.cumsum(self.widths)
        self.starts = self.ends - self.widths
        self.cum_ends = np.cumsum(self.values * self.widths)
        self.measure = float(self.ends[-1]) if total_measure is None else total_measure

    def breakpoints(self):
        return np.log(self.ends)

    def _index(self, t):
        return np.searchsorted(self.ends, t, side="right")

    def log_value(self, u):
        t = np.exp(np.asarray(u, dtype=float))
        i = self._index(t)
        vals = np.concatenate([self.values, [0.0]])[i]
        with np.errstate(divide="ignore"):
            return np.log(vals)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.concatenate([self.values, [0.0]])[self._index(t)]
        return out if out.ndim else float(out)

    def cumulative(self, t):
        t = np.asarray(t, dtype=float)
        i = self._index(t)
        prev = np.concatenate([[0.0], self.cum_ends])[i]
        start = np.concatenate([self.starts, [self.ends[-1]]])[i]
        vals = np.concatenate([self.values, [0.0]])[i]
        return prev + vals * (np.minimum(t, self.ends[-1]) - start)

    def log_cumulative(self, u, tol=1e-10):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        with np.errstate(divide="ignore"):
            out = np.log(self.cumulative(np.exp(u)))
            # on the first step the integral is v_0 t; keep it exact where exp(u) underflows
            first = u < math.log(self.ends[0])
            out[first] = math.log(self.values[0]) + u[first] if self.values[0] > 0 else -np.inf
        return out


class GenericRearrangement(Rearrangement):
    """f*(t) = inf{s : mu(s) < t} by inverting a distribution function.

    ``log_value`` interpolates a table of levels (log-log, monotone); ``exact``
    evaluates single points by bisection on the level.
    """

    def __init__(self, dist, measure: float, s_min: float, s_max: float, levels: int = 2049):
        if not (0 < s_min < s_max):
            raise DegenerateRearrangement("level range must be positive and nondegenerate")
        self.dist = dist
        self.measure = measure
        self.s_min, self.s_max = s_min, s_max
        ls = np.linspace(math.log(s_min), math.log(s_max), levels)
        mu = np.array([dist(math.exp(x)) for x in ls])
        if np.all(np.isinf(mu)):
            raise DegenerateRearrangement("super-level sets have infinite measure at every level")
        finite = np.isfinite(mu) & (mu > 0)
        self._ls = ls[finite]
        with np.errstate(divide="ignore"):
            self._lmu = np.log(mu[finite])
        self._s_inf_level = ls[~np.isfinite(mu)].max() if np.any(~np.isfinite(mu)) else -math.inf

    def exact(self, t: float, rtol: float = 1e-12) -> float:
        lo, hi = self.s_min * 1e-3, self.s_max * 1e3
        if self.dist(lo) < t:
            return 0.0
        for _ in range(400):
            mid = math.sqrt(lo * hi)
            if self.dist(mid) < t:
                hi = mid
            else:
                lo = mid
            if hi / lo - 1 < rtol:
                break
        return hi

    def log_value(self, u):
        u = np.asarray(u, dtype=float)
        lmu, ls = self._lmu[::-1], self._ls[::-1]   # increasing measure, decreasing level
        if lmu.size < 2:
            return np.full(u.shape, -np.inf)
        out = np.interp(u, lmu, ls, left=np.nan, right=-np.inf)
        # beyond the most singular tabulated level: extrapolate log-log linearly
        slope = (ls[1] - ls[0]) / (lmu[1] - lmu[0]) if lmu[1] != lmu[0] else 0.0
        out = np.where(np.isnan(out), ls[0] + slope * (u - lmu[0]), out)
        return out


def radial_shortcut(profile: RadialProfile, N: float, a: float = 0.0, b: float = math.inf,
                    sigma: float = 1.0, use_closed_form: bool = True) -> RadialRearrangement:
    """Rearrangement of a non-increasing radial profile without root finding."""
    return RadialRearrangement(RadialFunction(profile, N, a, b, sigma), use_closed_form)


def decreasing_rearrangement(f, force_generic: bool = False, levels: int = 2049) -> Rearrangement:
    """Decreasing rearrangement of a sampled or radial function.

    Radial non-increasing profiles use the closed form; other radial
    profiles invert the distribution function, computed by root finding on
    the profile and the shell-volume formula.
    """
    if isinstance(f, SampledFunction):
        return StepRearrangement(f.values, f.weights)
    if not isinstance(f, RadialFunction):
        raise ValidationError(f"unsupported function type {type(f).__name__}")
    if f.profile.decreasing and not force_generic:
        return RadialRearrangement(f)
    lo = max(f.a, f.profile.support[0], 1e-12)
    hi = min(f.b, f.profile.support[1], 1e12)
    s = np.linspace(math.log(lo), math.log(hi), 4001)
    lv = f.profile.log_value(s)
    finite = lv[np.isfinite(lv)]
    if finite.size == 0:
        raise DegenerateRearrangement("profile vanishes identically")
    s_max = math.exp(min(float(finite.max()), 600.0))
    s_min = math.exp(max(float(finite.min()), float(finite.max()) - 60.0))
    if math.isinf(distribution(f, s_max)):
        raise DegenerateRearrangement("super-level sets have infinite measure at every level")
    return GenericRearrangement(lambda x: distribution(f, x), f.measure, s_min, s_max * 1.0000001, levels)


def maximal_function(rearr: Rearrangement, probe: float | None = None):
    """Return t -> f**(t); raises if f* is not integrable near zero."""
    t0 = probe if probe is not None else (min(1.0, rearr.measure / 2))
    if not np.isfinite(rearr.log_cumulative(np.array([math.log(t0)]))[0]):
        raise DivergentMaximalFunction("f* is not integrable near t = 0")
    return rearr.maximal
