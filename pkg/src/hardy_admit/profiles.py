"""Radial profiles r -> g(r) >= 0, evaluated in log-radius coordinates.

Every profile implements ``log_value(s)`` returning ``log g(exp(s))`` (``-inf``
where the profile vanishes).  Working with ``s = log r`` keeps singular and
slowly varying weights representable far beyond the range of doubles, which
matters for logarithmic weights whose mass sits at astronomically small radii.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidTableError, InvalidWeightError

_BIG = 700.0


class RadialProfile:
    """Base class.  Subclasses override ``log_value`` and the metadata attributes."""

    #: open interval (r_lo, r_hi) outside of which the profile is zero
    support: tuple[float, float] = (0.0, math.inf)
    #: radii where the profile is not smooth (used as quadrature breakpoints)
    kinks: tuple[float, ...] = ()

    def log_value(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            s = np.log(r)
        out = np.exp(np.minimum(self.log_value(s), _BIG))
        return out if out.ndim else float(out)

    @property
    def decreasing(self) -> bool:
        """Non-increasing on its support (certified by construction, not by sampling)."""
        return False

    @property
    def strictly_decreasing(self) -> bool:
        return False

    def describe(self) -> str:
        return type(self).__name__

    def log_parts(self):
        """Split ``log_value(s) = power * s + rest(s)``.

        Callers that add further multiples of ``s`` combine the coefficients
        first, avoiding cancellation between large terms at extreme radii.
        """
        return 0.0, self.log_value

    def mask_support(self, s: np.ndarray, out: np.ndarray) -> np.ndarray:
        lo, hi = self.support
        if lo > 0:
            out = np.where(s < math.log(lo), -np.inf, out)
        if hi < math.inf:
            out = np.where(s >= math.log(hi), -np.inf, out)
        return out


@dataclass(frozen=True)
class PowerProfile(RadialProfile):
    """c * r^(-d)."""

    d: float
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidWeightError("power weight needs a positive scale")

    def log_value(self, s):
        s = np.asarray(s, dtype=float)
        return math.log(self.c) - self.d * s

    @property
    def decreasing(self):
        return self.d >= 0

    @property
    def strictly_decreasing(self):
        return self.d > 0

    def describe(self):
        return f"power:{self.d:g}" + ("" if self.c == 1 else f" x{self.c:g}")

    def log_parts(self):
        lc = math.log(self.c)
        return -self.d, lambda s: np.full(np.shape(s), lc)


@dataclass(frozen=True)
class PowerLogProfile(RadialProfile):
    """c * r^(-d) * log(e R / r)^(-kappa) on (0, R), zero outside."""

    d: float
    kappa: float
    R: float
    c: float = 1.0

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise InvalidWeightError("logarithmic weight needs a finite radius R > 0")
        if not self.c > 0:
            raise InvalidWeightError("logarithmic weight needs a positive scale")

    @property
    def support(self):
        return (0.0, self.R)

    def log_value(self, s):
        s = np.asarray(s, dtype=float)
        ell = 1.0 + math.log(self.R) - s
        with np.errstate(invalid="ignore", divide="ignore"):
            out = math.log(self.c) - self.d * s - self.kappa * np.log(ell)
        return self.mask_support(s, out)

    @property
    def decreasing(self):
        return self.d >= max(self.kappa, 0.0)

    @property
    def strictly_decreasing(self):
        return self.d > 0 and self.d >= self.kappa

    def describe(self):
        return f"power_log:{self.d:g},{self.kappa:g},{self.R:g}"

    def log_parts(self):
        def rest(s):
            s = np.asarray(s, dtype=float)
            ell = 1.0 + math.log(self.R) - s
            with np.errstate(invalid="ignore", divide="ignore"):
                out = math.log(self.c) - self.kappa * np.log(ell)
            return self.mask_support(s, out)
        return -self.d, rest


@dataclass(frozen=True)
class ShiftedPowerProfile(RadialProfile):
    """(r + c)^(-d) with c > 0."""

    d: float
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidWeightError("shifted power needs c > 0")

    def log_value(self, s):
        s = np.asarray(s, dtype=float)
        return -self.d * np.logaddexp(math.log(self.c), s)

    @property
    def decreasing(self):
        return self.d >= 0

    @property
    def strictly_decreasing(self):
        return self.d > 0

    def describe(self):
        return f"shifted_power:{self.d:g},{self.c:g}"


@dataclass(frozen=True)
class ConstProfile(RadialProfile):
    c: float = 1.0

    def __post_init__(self):
        if not self.c >= 0:
            raise InvalidWeightError("constant weight must be nonnegative")

    def log_value(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return np.full(s.shape, math.log(self.c) if self.c > 0 else -math.inf)

    @property
    def decreasing(self):
        return True

    def describe(self):
        return f"const:{self.c:g}"


@dataclass(frozen=True)
class ExpProfile(RadialProfile):
    """c * exp(-rate * r)."""

    rate: float
    c: float = 1.0

    def log_value(self, s):
        s = np.asarray(s, dtype=float)
        if self.rate == 0:
            return np.full(s.shape, math.log(self.c))
        with np.errstate(over="ignore"):
            # overflow of exp(s) gives exactly -inf, which tail rules read as decay
            return math.log(self.c) - self.rate * np.exp(s)

    @property
    def decreasing(self):
        return self.rate >= 0

    @property
    def strictly_decreasing(self):
        return self.rate > 0

    def describe(self):
        return f"exp:{self.rate:g}"


@dataclass(frozen=True)
class IndicatorProfile(RadialProfile):
    """c on (r_lo, r_hi), zero elsewhere."""

    r_hi: float
    c: float = 1.0
    r_lo: float = 0.0

    def __post_init__(self):
        if not (0 <= self.r_lo < self.r_hi) or not self.c > 0:
            raise InvalidWeightError("indicator needs 0 <= r_lo < r_hi and a positive value")

    @property
    def support(self):
        return (self.r_lo, self.r_hi)

    @property
    def kinks(self):
        return tuple(x for x in (self.r_lo, self.r_hi) if 0 < x < math.inf)

    def log_value(self, s):
        s = np.asarray(s, dtype=float)
        out = np.full(s.shape, math.log(self.c))
        return self.mask_support(s, out)

    @property
    def decreasing(self):
        return self.r_lo == 0

    def describe(self):
        return f"indicator:{self.r_lo:g},{self.r_hi:g}"


@dataclass(frozen=True)
class BumpProfile(RadialProfile):
    """Smooth compactly supported bump c * (1 - ((r - center)/width)^2)^2 on |r - center| < width."""

    center: float
    width: float
    c: float = 1.0

    @property
    def support(self):
        return (max(self.center - self.width, 0.0), self.center + self.width)

    def log_value(self, s):
        s = np.asarray(s, dtype=float)
        r = np.exp(np.minimum(s, _BIG))
        x = (r - self.center) / self.width
        with np.errstate(divide="ignore", invalid="ignore"):
            out = math.log(self.c) + 2.0 * np.log(np.clip(1.0 - x * x, 0.0, None))
        return np.where(np.abs(x) < 1.0, out, -np.inf)

    @property
    def decreasing(self):
        return self.center <= 0

    def describe(self):
        return f"bump:{self.center:g},{self.width:g}"


@dataclass(frozen=True)
class TabulatedProfile(RadialProfile):
    """Piecewise-linear interpolation of (r_i, g_i); constant below r_0, zero beyond r_max."""

    r: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.size < 2 or r.size != v.size:
            raise InvalidTableError("table needs at least two rows of matching length")
        if not np.all(np.isfinite(r)) or not np.all(np.isfinite(v)):
            raise InvalidTableError("table contains non-finite entries")
        if np.any(np.diff(r) <= 0):
            raise InvalidTableError("radii must be strictly increasing")
        if r[0] < 0:
            raise InvalidTableError("radii must be nonnegative")
        if np.any(v < 0):
            raise InvalidTableError("weights must be nonnegative")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "values", v)

    @property
    def support(self):
        return (0.0, float(self.r[-1]))

    @property
    def kinks(self):
        return tuple(float(x) for x in self.r if x > 0)

    def log_value(self, s):
        s = np.asarray(s, dtype=float)
        rr = np.exp(np.minimum(s, _BIG))
        vals = np.interp(rr, self.r, self.values)
        with np.errstate(divide="ignore"):
            out = np.log(vals)
        return np.where(rr > self.r[-1], -np.inf, out)

    @property
    def decreasing(self):
        return bool(np.all(np.diff(self.values) <= 0))

    @property
    def strictly_decreasing(self):
        return bool(np.all(np.diff(self.values) < 0))

    def describe(self):
        return f"table[{self.r.size}]"


@dataclass(frozen=True)
class ProductProfile(RadialProfile):
    """Pointwise product a^t * b^(1-t); t = 1/2 with unit exponents is the plain product."""

    a: RadialProfile
    b: RadialProfile
    ea: float = 1.0
    eb: float = 1.0

    @property
    def support(self):
        return (max(self.a.support[0], self.b.support[0]), min(self.a.support[1], self.b.support[1]))

    @property
    def kinks(self):
        return tuple(sorted(set(self.a.kinks) | set(self.b.kinks)))

    def log_value(self, s):
        la = self.a.log_value(s)
        lb = self.b.log_value(s)
        with np.errstate(invalid="ignore"):
            out = (self.ea * la if self.ea else 0.0) + (self.eb * lb if self.eb else 0.0)
        return np.where(np.isnan(out), -np.inf, out)

    @property
    def decreasing(self):
        return self.a.decreasing and self.b.decreasing and self.ea >= 0 and self.eb >= 0

    @property
    def strictly_decreasing(self):
        return self.decreasing and (
            (self.a.strictly_decreasing and self.ea > 0) or (self.b.strictly_decreasing and self.eb > 0))

    def describe(self):
        return f"({self.a.describe()})^{self.ea:g}*({self.b.describe()})^{self.eb:g}"

    def log_parts(self):
        pa, ra = self.a.log_parts()
        pb, rb = self.b.log_parts()

        def rest(s):
            la, lb = ra(s), rb(s)
            with np.errstate(invalid="ignore"):
                out = (self.ea * la if self.ea else 0.0) + (self.eb * lb if self.eb else 0.0)
            return np.where(np.isnan(out), -np.inf, out)
        return self.ea * pa + self.eb * pb, rest


@dataclass(frozen=True)
class DilatedProfile(RadialProfile):
    """r -> c * base(lam * r)."""

    base: RadialProfile
    lam: float
    c: float = 1.0

    @property
    def support(self):
        lo, hi = self.base.support
        return (lo / self.lam, hi / self.lam)

    @property
    def kinks(self):
        return tuple(k / self.lam for k in self.base.kinks)

    def log_value(self, s):
        return math.log(self.c) + self.base.log_value(np.asarray(s, dtype=float) + math.log(self.lam))

    @property
    def decreasing(self):
        return self.base.decreasing

    @property
    def strictly_decreasing(self):
        return self.base.strictly_decreasing


class CallableProfile(RadialProfile):
    """Wrap an arbitrary vectorised function of r."""

    def __init__(self, fn, support=(0.0, math.inf), decreasing: bool = False, name: str = "callable"):
        self.fn = fn
        self.support = support
        self._decreasing = decreasing
        self.name = name

    def log_value(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(all="ignore"):
            v = np.asarray(self.fn(np.exp(np.clip(s, -_BIG, _BIG))), dtype=float)
            out = np.log(np.abs(v))
        return self.mask_support(s, np.where(np.isnan(out), -np.inf, out))

    @property
    def decreasing(self):
        return self._decreasing

    def describe(self):
        return self.name


def read_radial_table(path: str | Path) -> TabulatedProfile:
    """Load a ``r,value`` CSV with strictly increasing radii."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip().lower() for h in header] != ["r", "value"]:
                raise InvalidTableError(f"{path}: expected header 'r,value'")
            rows = [row for row in reader if row and any(x.strip() for x in row)]
    except OSError as exc:
        raise InvalidTableError(f"cannot read {path}: {exc}") from exc
    try:
        data = np.array([[float(a), float(b)] for a, b in rows])
    except ValueError as exc:
        raise InvalidTableError(f"{path}: non-numeric entry") from exc
    if data.ndim != 2 or data.shape[0] < 2:
        raise InvalidTableError(f"{path}: need at least two rows")
    return TabulatedProfile(data[:, 0], data[:, 1])


def sampled_monotonicity(profile: RadialProfile, lo: float, hi: float, n: int = 1000,
                         tol: float = 1e-14) -> bool:
    """Strict decrease of ``profile`` on ``n`` log-spaced points of ``(lo, hi)``.

    Consecutive samples must drop by more than ``tol`` in relative terms.
    Infinite endpoints are replaced by 1e-12 and 1e12.
    """
    a = lo if lo > 0 else 1e-12
    b = hi if math.isfinite(hi) else 1e12
    if not a < b:
        return False
    s = np.linspace(math.log(a), math.log(b), n + 2)[1:-1]
    lv = profile.log_value(s)
    if not np.all(np.isfinite(lv)):
        return False
    return bool(np.all(np.diff(lv) < -tol * 1.0))


def radial_majorant(f, radii, directions) -> TabulatedProfile:
    """Largest ``|f(r w)|`` over the sampled unit vectors ``directions`` at each radius.

    ``f`` maps an ``(n, N)`` array of points to ``n`` values.  The maximum over
    finitely many directions is a lower estimate of the true supremum; refine
    ``directions`` until the table stops changing.
    """
    r = np.asarray(radii, dtype=float)
    w = np.atleast_2d(np.asarray(directions, dtype=float))
    norms = np.linalg.norm(w, axis=1)
    if np.any(norms == 0):
        raise InvalidWeightError("directions must be nonzero")
    w = w / norms[:, None]
    pts = r[:, None, None] * w[None, :, :]
    vals = np.abs(np.asarray(f(pts.reshape(-1, w.shape[1])), dtype=float)).reshape(r.size, w.shape[0])
    return TabulatedProfile(r, vals.max(axis=1))
