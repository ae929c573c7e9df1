"""Classical sufficient (and one necessary) conditions for Hardy-type inequalities.

* One-dimensional weighted Hardy inequality

      ( int_0^b |int_s^b f|^q v(s) ds )^(1/q) <= C (int_0^b |f|^p w)^(1/p)

  through the Muckenhoupt-type constants ``A1`` (q < 1), ``A2`` (1 <= q < p)
  and ``A3`` (p <= q).
* A cube condition on a dyadic cube family for radial weights.
* Positivity of solutions of the radial ODE ``(B phi')' + H phi = 0``.
* A necessary condition for radial decreasing weights on balls.

Weights on (0, b) can be given either as objects with a vectorised
``log_value(u)`` (the log of the weight at ``t = e^u``) or as plain
vectorised callables of ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ExponentRangeError, NumericFailure, ValidationError
from .exponents import ball_volume, conjugate, lorentz_index, sphere_area
from .profiles import RadialProfile
from .quadrature import (
    gauss_nodes,
    log_cumulative,
    log_integrate,
    log_reverse_cumulative,
    log_sum,
    loglinear_integral,
)
from .rearrange import RadialFunction, decreasing_rearrangement
from .spaces import MaximalTable, log_sup, sup_grid

__all__ = [
    "MuckenhouptInput",
    "ConditionReport",
    "muckenhoupt_constant",
    "muckenhoupt_verify",
    "CubeFamily",
    "sawyer_wheeden_sup",
    "bessel_pair_check",
    "necessary_check_radial",
]


_U_EDGE = 30.0


def _log_of(fn, sign: float | None = None) -> Callable[[np.ndarray], np.ndarray]:
    """log |fn(e^u)| (or of the part of ``fn`` with the given sign).

    A plain callable is evaluated for ``|u| <= 30`` only and continued as a
    power law beyond, which keeps overflow out of the far grid.
    """
    if hasattr(fn, "log_value"):
        if sign is not None and sign < 0:
            return lambda u: np.full(np.shape(u), -np.inf)
        return fn.log_value

    def raw(u):
        with np.errstate(all="ignore"):
            val = np.asarray(fn(np.exp(u)), dtype=float)
            if sign is None:
                return np.log(np.abs(val))
            return np.log(np.where(sign * val > 0, sign * val, 0.0))

    edges = raw(np.array([-_U_EDGE - 1.0, -_U_EDGE, _U_EDGE, _U_EDGE + 1.0]))
    with np.errstate(all="ignore"):
        slopes = (edges[1] - edges[0], edges[3] - edges[2])

    def logf(u):
        u = np.asarray(u, dtype=float)
        out = raw(np.clip(u, -_U_EDGE, _U_EDGE))
        with np.errstate(all="ignore"):
            out = np.where(u < -_U_EDGE, edges[1] + slopes[0] * (u + _U_EDGE), out)
            out = np.where(u > _U_EDGE, edges[2] + slopes[1] * (u - _U_EDGE), out)
        return np.where(np.isnan(out), -np.inf, out)

    return logf


@dataclass
class MuckenhouptInput:
    v: object
    w: object
    b: float
    p: float
    q: float
    per_decade: int = 1024

    def __post_init__(self):
        if not 1.0 < self.p < math.inf:
            raise ExponentRangeError(f"p must lie in (1, inf), got {self.p}")
        if not 0.0 < self.q < math.inf:
            raise ExponentRangeError(f"q must lie in (0, inf), got {self.q}")
        if not self.b > 0.0:
            raise ValidationError(f"b must be positive, got {self.b}")

    @property
    def regime(self) -> str:
        if self.q < 1.0:
            return "A1"
        if self.q < self.p:
            return "A2"
        return "A3"


@dataclass(frozen=True)
class ConditionReport:
    constant: float
    regime: str
    implied_inequality_constant: float
    finite: bool
    details: dict = field(default_factory=dict, compare=False)


def _prefactor(p: float, q: float, regime: str) -> float:
    pc = conjugate(p)
    if regime == "A1":
        gamma = p * q / (p - q)
        return pc ** (1.0 / gamma) * q ** (1.0 / p)
    if regime == "A2":
        qc = conjugate(q) if q > 1.0 else math.inf
        return pc ** (0.0 if math.isinf(qc) else 1.0 / qc) * q ** (1.0 / q)
    return pc ** (1.0 / pc) * p ** (1.0 / q)


class _OuterRule:
    """Nodes for outer integrals over (0, b) in ``u = log t``.

    Gauss-Legendre (4 points per cell) on the dense part of the sup grid,
    log-linear interpolation across the sparse far parts and the tails.
    """

    _x, _w = np.polynomial.legendre.leggauss(4)

    def __init__(self, hi_u: float, center: float | None, per_decade: int):
        far_lo, dense, far_hi = sup_grid(hi_u, center, per_decade=per_decade)
        edges = dense if not math.isfinite(hi_u) else np.append(dense, hi_u)
        a, b = edges[:-1], edges[1:]
        half = 0.5 * (b - a)
        gl = ((a + half)[:, None] + half[:, None] * self._x[None, :]).ravel()
        self.gl_logw = (np.log(half)[:, None] + np.log(self._w)[None, :]).ravel()
        self.hi_u = hi_u
        self.n_lo, self.n_gl = far_lo.size + 1, gl.size
        tail = far_hi if far_hi.size else np.zeros(0)
        self.nodes = np.concatenate([far_lo, [edges[0]], gl, [edges[-1]] if tail.size else [], tail])

    def log_integral(self, y: np.ndarray) -> float:
        y = np.where(np.isnan(y), -np.inf, np.asarray(y, dtype=float))
        if np.any(y == np.inf):
            return math.inf
        x = self.nodes
        lo = loglinear_integral(x[: self.n_lo], y[: self.n_lo], lo_tail=True, hi_end=-math.inf)
        mid = float(log_sum(y[self.n_lo: self.n_lo + self.n_gl] + self.gl_logw))
        parts = [lo, mid]
        if math.isinf(self.hi_u):
            k = self.n_lo + self.n_gl
            parts.append(loglinear_integral(x[k:], y[k:], lo_tail=False, hi_end=math.inf))
        return float(log_sum(np.array(parts)))


class _Tables:
    """log V(u) = log int_0^{e^u} v and log W(u) = log int_{e^u}^b w^(1-p') on a shared grid."""

    def __init__(self, inp: MuckenhouptInput, center: float | None = None):
        self.hi_u = math.log(inp.b) if math.isfinite(inp.b) else math.inf
        far_lo, dense, far_hi = sup_grid(self.hi_u, center, per_decade=inp.per_decade)
        self.grid = np.concatenate([far_lo, dense, far_hi])
        self.rule = _OuterRule(self.hi_u, center, inp.per_decade)
        self.pc = conjugate(inp.p)
        logv, logw = _log_of(inp.v), _log_of(inp.w)
        expo = 1.0 - self.pc

        def v_density(x):
            with np.errstate(all="ignore"):
                return np.asarray(logv(x), dtype=float) + x

        def w_density(x):
            with np.errstate(all="ignore"):
                lw = np.asarray(logw(x), dtype=float)
                # w = 0 would make w^(1-p') infinite
                return np.where(lw == -np.inf, np.inf, expo * lw) + x

        self.v_density, self.w_density = v_density, w_density
        self.logV = log_cumulative(v_density, self.grid)
        self.logW = log_reverse_cumulative(w_density, self.grid, hi=self.hi_u)
        if inp.regime != "A3":
            x = self.rule.nodes
            self.rule_logV = log_cumulative(v_density, x)
            self.rule_logW = log_reverse_cumulative(w_density, x, hi=self.hi_u)


def _divergent_factor(t: _Tables) -> str | None:
    if np.any(t.logV == np.inf):
        return "v"
    if np.any(t.logW == np.inf) and np.any(t.logV[t.logW == np.inf] > -np.inf):
        return "w"
    return None


def muckenhoupt_constant(inp: MuckenhouptInput, center: float | None = None) -> ConditionReport:
    """Evaluate the constant of the regime selected by (p, q) and its implied prefactor."""
    regime = inp.regime
    pref = _prefactor(inp.p, inp.q, regime)
    t = _Tables(inp, center)
    bad = _divergent_factor(t)
    if bad is not None:
        return ConditionReport(math.inf, regime, math.inf, False, {"divergent": bad})
    with np.errstate(all="ignore"):
        if regime == "A3":
            prod = np.where(t.logV == -np.inf, -np.inf, t.logV / inp.q + t.logW / t.pc)
            sr = log_sup(None, t.hi_u, center, per_decade=inp.per_decade, values=prod)
            logA, finite = sr.log_value, sr.finite
            argmax = sr.u_argmax
        else:
            gamma = inp.p * inp.q / (inp.p - inp.q)
            x, lV, lW = t.rule.nodes, t.rule_logV, t.rule_logW
            if regime == "A1":
                inner = gamma / inp.p * lV + gamma / t.pc * lW + t.v_density(x)
            else:
                qc = conjugate(inp.q) if inp.q > 1.0 else math.inf
                wexp = 0.0 if math.isinf(qc) else gamma / qc
                inner = gamma / inp.q * lV + wexp * lW + t.w_density(x)
            inner = np.where(lV == -np.inf, -np.inf, inner)
            logI = t.rule.log_integral(inner)
            finite = math.isfinite(logI)
            logA = logI / gamma
            argmax = None
    value = math.exp(logA) if finite and logA > -math.inf else (0.0 if finite else math.inf)
    return ConditionReport(value, regime, pref * value if finite else math.inf, finite,
                           {"prefactor": pref, "argmax_u": argmax})


def muckenhoupt_verify(inp: MuckenhouptInput, f, slack: float = 1e-8,
                       center: float | None = None) -> dict:
    """Evaluate both sides of the one-dimensional inequality for a test function ``f``."""
    rep = muckenhoupt_constant(inp, center)
    if not rep.finite:
        raise ValidationError(f"the {rep.regime} constant is infinite ({rep.details.get('divergent')})")
    hi_u = math.log(inp.b) if math.isfinite(inp.b) else math.inf
    rule = _OuterRule(hi_u, center, inp.per_decade)
    grid = rule.nodes
    pos, neg = _log_of(f, 1.0), _log_of(f, -1.0)
    logw, logv = _log_of(inp.w), _log_of(inp.v)
    try:
        Fp = log_reverse_cumulative(lambda x: pos(x) + x, grid, hi=hi_u)
        Fn = log_reverse_cumulative(lambda x: neg(x) + x, grid, hi=hi_u)
    except (FloatingPointError, ArithmeticError) as exc:
        raise NumericFailure(f"inner integral failed on [{grid[0]:.3g}, {hi_u:.3g}]: {exc}") from exc
    with np.errstate(all="ignore"):
        if np.any(Fn > -np.inf):
            hi, lo = np.maximum(Fp, Fn), np.minimum(Fp, Fn)
            logF = hi + np.log1p(-np.exp(lo - hi))
            logF = np.where(np.isfinite(hi) | (hi == -np.inf), logF, np.inf)
        else:
            logF = Fp
        outer = inp.q * logF + np.asarray(logv(grid), dtype=float) + grid
        outer = np.where(np.isnan(outer), -np.inf, outer)
        lhs_log = rule.log_integral(outer) / inp.q
        fp = np.logaddexp(pos(grid), neg(grid))
        rhs_density = inp.p * fp + np.asarray(logw(grid), dtype=float) + grid
        rhs_density = np.where(np.isnan(rhs_density), -np.inf, rhs_density)
        rhs_log = rule.log_integral(rhs_density) / inp.p
    lhs = math.exp(lhs_log) if lhs_log > -math.inf else 0.0
    rhs = math.exp(rhs_log) if rhs_log > -math.inf else 0.0
    if lhs_log == math.inf:
        lhs = math.inf
    if rhs_log == math.inf:
        rhs = math.inf
    bound = rep.implied_inequality_constant * rhs
    holds = lhs <= bound * (1.0 + slack) or lhs == 0.0
    return {"lhs": lhs, "rhs": rhs, "bound": bound, "holds": bool(holds), "constant": rep.constant,
            "regime": rep.regime}


# ----------------------------------------------------------------------------
# cube condition


@dataclass(frozen=True)
class CubeFamily:
    """Cubes with dyadic sides ``2^-max_level .. 2^max_level`` centred on ``centers``
    equally spaced points of ``[0, half_width]`` along the first axis."""

    half_width: float = 64.0
    max_level: int = 6
    centers: int = 17

    def sides(self) -> np.ndarray:
        return 2.0 ** np.arange(-self.max_level, self.max_level + 1)

    def center_points(self) -> np.ndarray:
        return np.linspace(0.0, self.half_width, self.centers)


_CUBE_GL = 4
_CUBE_DEPTH = 40


def _cube_integral(G_log: Callable, N: int, c: float, h: float, inner_ball: Callable) -> float:
    """log int_Q G(|x|) dx for the cube of half side ``h`` centred at ``c e_1``.

    Boxes closer to the origin than their half diagonal are split; the box
    containing the origin at the deepest level is replaced by the ball of the
    same volume.  Symmetry in the transverse coordinates halves the work per axis.
    """
    nodes, weights = np.polynomial.legendre.leggauss(_CUBE_GL)
    grids = np.meshgrid(*([nodes] * N), indexing="ij")
    ref = np.stack([g.ravel() for g in grids], axis=1)
    logw = np.sum(np.log(np.stack(np.meshgrid(*([weights] * N), indexing="ij"), axis=0)).reshape(N, -1), axis=0)
    # boxes as (lower corner, side); transverse coordinates restricted to >= 0
    lo = np.zeros((1, N))
    lo[0, 0] = c - h
    side = np.array([h] + [h] * (N - 1))
    sides = np.array([[2 * h] + [h] * (N - 1)])
    pieces = []
    for depth in range(_CUBE_DEPTH + 1):
        mid = lo + 0.5 * sides
        nearest = np.clip(0.0, lo, lo + sides)
        dist = np.linalg.norm(nearest, axis=1)
        diag = 0.5 * np.linalg.norm(sides, axis=1)
        near = dist < diag
        far = ~near
        if np.any(far):
            x = mid[far][:, None, :] + 0.5 * sides[far][:, None, :] * ref[None, :, :]
            r = np.linalg.norm(x, axis=2)
            vals = G_log(np.log(r).ravel()).reshape(r.shape)
            vol = np.sum(np.log(0.5 * sides[far]), axis=1)
            pieces.append(log_sum(vals + logw[None, :] + vol[:, None], axis=1))
        if not np.any(near):
            break
        lo, sides = lo[near], sides[near]
        if depth == _CUBE_DEPTH:
            for corner, sd in zip(lo, sides):
                pieces.append(np.array([inner_ball(float(np.sum(np.log(sd))))]))
            break
        # split every remaining box into 2^N children
        half = 0.5 * sides
        shifts = np.stack(np.meshgrid(*([np.array([0.0, 1.0])] * N), indexing="ij"), axis=-1).reshape(-1, N)
        lo = (lo[:, None, :] + shifts[None, :, :] * half[:, None, :]).reshape(-1, N)
        sides = np.repeat(half, 2 ** N, axis=0)
    total = log_sum(np.concatenate(pieces)) if pieces else -math.inf
    # undo the transverse symmetry restriction
    return float(total + (N - 1) * math.log(2.0))


def sawyer_wheeden_sup(g: RadialProfile, s: float, N: int, p: float, q: float,
                       window: CubeFamily | None = None) -> ConditionReport:
    """Supremum of ``|Q|^(1/alpha - 1/s) (int_Q |g|^s)^(1/s)`` over a cube family.

    Only radial weights are supported, so centres run along one axis.  The
    family is finite, hence the result under-approximates the supremum over
    all cubes.
    """
    if not s > 1.0:
        raise ValidationError(f"s must exceed 1, got {s}")
    if q < p:
        raise ExponentRangeError("the cube condition applies for q >= p")
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise ValidationError(f"N must be a positive integer, got {N}")
    window = window or CubeFamily()
    alpha = lorentz_index(N, p, q)
    inv_alpha = 0.0 if math.isinf(alpha) else 1.0 / alpha
    logN_area = math.log(sphere_area(N))

    def G_log(x):
        with np.errstate(all="ignore"):
            return s * np.asarray(g.log_value(x), dtype=float)

    def ball_log(log_radius):
        return log_integrate(lambda x: G_log(x) + N * x + logN_area, -math.inf, log_radius).log_value

    # local integrability of |g|^s near the origin
    if ball_log(0.0) == math.inf:
        return ConditionReport(math.inf, "SW1", math.inf, False, {"reason": "not locally s-integrable"})

    def inner_ball(log_volume):
        rho = math.exp((log_volume - math.log(ball_volume(N))) / N)
        return ball_log(math.log(rho))

    best, arg = -math.inf, None
    for c in window.center_points():
        for side in window.sides():
            h = 0.5 * side
            li = _cube_integral(G_log, N, float(c), h, inner_ball)
            if li == math.inf:
                return ConditionReport(math.inf, "SW1", math.inf, False, {"cube": (float(c), float(side))})
            logvol = N * math.log(side)
            val = (inv_alpha - 1.0 / s) * logvol + li / s
            if val > best:
                best, arg = val, (float(c), float(side))
    value = math.exp(best) if best > -math.inf else 0.0
    return ConditionReport(value, "SW1", value, True, {"cube": arg, "s": s})


# ----------------------------------------------------------------------------
# radial ODE positivity


DEFAULT_BESSEL_EPS = (1e-8, 1e-16, 1e-32)


def _profile_log(fn) -> Callable[[float], float]:
    if hasattr(fn, "log_value"):
        return lambda s: float(fn.log_value(np.array([s]))[0])
    return lambda s: math.log(float(fn(math.exp(s))))


def bessel_pair_check(g: RadialProfile, h: RadialProfile, R: float, N: int,
                      eps: tuple[float, ...] = DEFAULT_BESSEL_EPS, phi0: float = 1.0,
                      slope0: float = 0.0, samples: int = 64) -> dict:
    """Whether ``(B phi')' + H phi = 0`` with ``B = r^(N-1) g``, ``H = r^(N-1) h`` has a
    positive solution on ``(eps, R - eps)`` for every starting radius in ``eps``.

    The equation is integrated in ``s = log r`` for the state
    ``(phi, P = r^(N-2) g phi_s)``, which keeps the singular end tame.
    ``phi0`` and ``slope0`` give ``phi(eps)`` and ``phi'(eps)``.
    """
    if not R > 0:
        raise ValidationError("R must be positive")
    lg, lh = _profile_log(g), _profile_log(h)
    verdicts = []
    sols = []
    for e in eps:
        s0 = math.log(e)
        s1 = math.log(R - e) if math.isfinite(R) else math.log(1.0 / e)

        def rhs(s, y):
            phi, P = y
            r_pow = math.exp((N - 2) * s + lg(s))
            return [P / r_pow, -math.exp(N * s + lh(s)) * phi]

        def hit_zero(s, y):
            return y[0]

        hit_zero.terminal = True
        hit_zero.direction = -1
        P0 = math.exp((N - 1) * s0 + lg(s0)) * slope0
        sol = solve_ivp(rhs, (s0, s1), [phi0, P0], method="DOP853", rtol=1e-11, atol=1e-14,
                        events=hit_zero, dense_output=True)
        if sol.status == -1:
            raise NumericFailure(f"ODE integration failed at r = {math.exp(sol.t[-1]):.6g}: {sol.message}")
        zero = sol.t_events[0]
        positive = zero.size == 0 and bool(np.all(sol.y[0] > 0))
        verdicts.append(positive)
        ss = np.linspace(s0, sol.t[-1], samples)
        sols.append({"eps": e, "positive": positive,
                     "first_zero": float(math.exp(zero[0])) if zero.size else None,
                     "r": np.exp(ss), "phi": sol.sol(ss)[0]})
    upper = math.log(R) if math.isfinite(R) else math.inf
    first = log_integrate(lambda s: -(N - 2) * s - np.vectorize(lg)(s), -math.inf, upper)
    second = log_integrate(lambda s: N * s + np.vectorize(lh)(s), -math.inf, upper)
    return {
        "is_bessel_pair": all(verdicts),
        "stable_in_eps": len(set(verdicts)) == 1,
        "solution_samples": sols,
        "side_conditions": {"integral_1_infinite": first.value == math.inf,
                            "integral_2_finite": second.finite},
    }


# ----------------------------------------------------------------------------
# necessary condition for radial decreasing weights on balls


def necessary_check_radial(g: RadialProfile, N: int, p: float, q: float, R: float = math.inf) -> dict:
    """Finiteness of ``t^(1/alpha) g**(t)`` (N > p) or ``t log(|B|/t)^(q/N') g**(t)`` (N = p)
    over ``0 < t < |B_R| (1 - 1e-6)``."""
    if N > p:
        pstar = N * p / (N - p)
        if not p <= q <= pstar * (1 + 1e-12):
            raise ExponentRangeError(f"need q in [p, p*] = [{p}, {pstar}]")
    elif N == p:
        if not q > p or not math.isfinite(R):
            raise ExponentRangeError("N = p needs q > p and a bounded ball")
    else:
        raise ExponentRangeError("the necessary condition is stated for N >= p")
    f = RadialFunction(g, N, 0.0, R)
    rearr = decreasing_rearrangement(f)
    measure = f.measure
    hi_u = math.log(measure * (1.0 - 1e-6)) if math.isfinite(measure) else math.inf
    table = MaximalTable(rearr)
    if not table.finite:
        return {"passes": False, "sup_value": math.inf, "argmax": None}
    if N > p:
        alpha = lorentz_index(N, p, q)
        e = 0.0 if math.isinf(alpha) else 1.0 / alpha

        def logh(u):
            return e * u + table.log_maximal(u)
    else:
        power = q / conjugate(N)
        log_m = math.log(measure)

        def logh(u):
            with np.errstate(all="ignore"):
                return u + power * np.log(log_m - u) + table.log_maximal(u)

    sr = log_sup(logh, hi_u)
    return {"passes": sr.finite, "sup_value": sr.value, "argmax": math.exp(sr.u_argmax)}
