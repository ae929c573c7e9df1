"""Quadrature in logarithmic coordinates.

Integrands are passed as *log-densities* ``phi(u)`` so that the integral
``int exp(phi(u)) du`` can be evaluated when the integrand itself under- or
overflows double precision.  The usual entry point for a function ``f`` on
``(a, b)`` is the substitution ``t = exp(u)``, which turns power-type
singularities at ``0`` and ``inf`` into exponentially decaying tails.

Infinite tails are further mapped by ``u = U + 1 - exp(v)`` (lower) and
``u = U - 1 + exp(v)`` (upper), so that polynomial decay in ``u`` (as produced
by logarithmic weights) becomes exponential decay in ``v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

LogDensity = Callable[[np.ndarray], np.ndarray]

HORIZON = 1e13
_PIECE = 16.0
_GL_ORDER = 8
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)
_GL_LOGW = np.log(_GL_WEIGHTS)
_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class LogIntegral:
    """Result of a log-space integration: ``log`` of the value and a relative error bound."""

    log_value: float
    rel_error: float

    @property
    def value(self) -> float:
        if self.log_value > 709.0:
            return math.inf
        return math.exp(self.log_value)

    @property
    def finite(self) -> bool:
        return self.log_value < math.inf


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    return float(np.logaddexp(a, b))


def log_sum(x: np.ndarray, log_weights: np.ndarray | None = None, axis: int = -1) -> np.ndarray:
    """Numerically stable ``log(sum(w * exp(x)))`` along ``axis``; all ``-inf`` gives ``-inf``."""
    x = np.asarray(x, dtype=float)
    if log_weights is not None:
        x = x + log_weights
    m = np.max(x, axis=axis, keepdims=True)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        s = np.sum(np.exp(x - safe), axis=axis, keepdims=True)
        out = np.where(np.isfinite(m), safe + np.log(s), m)
    return np.squeeze(out, axis=axis)


def adaptive_simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                     tol: float = 1e-10, max_depth: int = 60,
                     max_evals: int = 2_000_000) -> tuple[float, float]:
    """Adaptive Simpson rule for a vectorised ``f`` on ``[a, b]``.

    Intervals are refined level by level so every level costs one vectorised
    call.  Returns ``(value, error_estimate)``; ``tol`` is absolute.
    """
    if b == a:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    m0 = 0.5 * (a + b)
    fa, fm, fb = np.asarray(f(np.array([a, m0, b])), dtype=float)
    lo = np.array([a])
    hi = np.array([b])
    flo, fmid, fhi = np.array([fa]), np.array([fm]), np.array([fb])
    whole = (b - a) / 6.0 * (flo + 4 * fmid + fhi)
    eps = np.array([tol])
    total, err, evals, depth = 0.0, 0.0, 3, 0
    while lo.size:
        mid = 0.5 * (lo + hi)
        xl = 0.5 * (lo + mid)
        xr = 0.5 * (mid + hi)
        fx = np.asarray(f(np.concatenate([xl, xr])), dtype=float)
        evals += fx.size
        fl, fr = fx[: lo.size], fx[lo.size:]
        h = hi - lo
        left = h / 12.0 * (flo + 4 * fl + fmid)
        right = h / 12.0 * (fmid + 4 * fr + fhi)
        delta = left + right - whole
        depth += 1
        done = (np.abs(delta) <= 15.0 * eps) | (depth >= max_depth) | (h <= 1e-15 * (abs(a) + abs(b) + 1.0))
        if evals > max_evals:
            done[:] = True
        if np.any(done):
            total += float(np.sum(left[done] + right[done] + delta[done] / 15.0))
            err += float(np.sum(np.abs(delta[done]))) / 15.0
        keep = ~done
        if not np.any(keep):
            break
        lo_k, mid_k, hi_k = lo[keep], mid[keep], hi[keep]
        lo = np.concatenate([lo_k, mid_k])
        hi = np.concatenate([mid_k, hi_k])
        flo = np.concatenate([flo[keep], fmid[keep]])
        fhi = np.concatenate([fmid[keep], fhi[keep]])
        fmid = np.concatenate([fl[keep], fr[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        eps = np.concatenate([eps[keep], eps[keep]]) / 2.0
    return sign * total, err


def _scaled_piece(psi: LogDensity, a: float, b: float, tol: float) -> tuple[float, float]:
    """log of int_a^b exp(psi) with relative tolerance, scaling by a presampled maximum."""
    xs = np.linspace(a, b, 33)
    with np.errstate(all="ignore"):
        vals = np.asarray(psi(xs), dtype=float)
    if np.any(np.isnan(vals)):
        vals = np.where(np.isnan(vals), -np.inf, vals)
    if np.any(vals == np.inf):
        return math.inf, 0.0
    m = float(np.max(vals))
    if m == -math.inf:
        return -math.inf, 0.0
    coarse = float(_trapezoid(np.exp(vals - m), xs))
    # log-densities of size L carry an absolute rounding error ~ L * eps
    finite = vals[np.isfinite(vals)]
    noise = 1e-14 * max(float(np.max(np.abs(finite))), abs(a), abs(b), 1.0)
    abs_tol = max(tol, noise) * max(coarse, 1e-300)

    def g(x: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            v = np.asarray(psi(x), dtype=float)
        v = np.where(np.isnan(v), -np.inf, v)
        return np.exp(np.minimum(v - m, 700.0))

    val, err = adaptive_simpson(g, a, b, tol=abs_tol)
    if val <= 0:
        return -math.inf, 0.0
    return m + math.log(val), err / val


def _finite_log_integral(phi: LogDensity, lo: float, hi: float, tol: float) -> tuple[float, float]:
    if hi - lo > 4 * _PIECE:
        # u = hi + 1 - exp(v): unit chunks in v cover exponentially growing spans
        vmax = math.log(hi - lo + 1.0)

        def psi(v):
            return phi(hi + 1.0 - np.exp(v)) + v
        edges = np.append(np.arange(0.0, vmax, 1.0), vmax)
        return _sum_pieces(psi, edges, tol)
    n = max(1, int(math.ceil((hi - lo) / _PIECE)))
    return _sum_pieces(phi, np.linspace(lo, hi, n + 1), tol)


def _sum_pieces(phi: LogDensity, edges: np.ndarray, tol: float) -> tuple[float, float]:
    total, rel = -math.inf, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        lv, re = _scaled_piece(phi, float(a), float(b), tol)
        if lv == math.inf:
            return math.inf, 0.0
        if lv > -math.inf:
            new = _logaddexp(total, lv)
            rel = (rel * math.exp(total - new) if total > -math.inf else 0.0) + re * math.exp(lv - new)
            total = new
    return total, rel


def _tail_log_integral(phi: LogDensity, anchor: float, direction: int, tol: float) -> tuple[float, float]:
    """log of the integral of exp(phi) from ``anchor`` to ``direction * inf``."""
    if direction < 0:
        def psi(v):
            return phi(anchor + 1.0 - np.exp(v)) + v
    else:
        def psi(v):
            return phi(anchor - 1.0 + np.exp(v)) + v
    total, rel = -math.inf, 0.0
    history: list[float] = []
    zeros = 0
    log_tol = math.log(tol)
    # beyond |u| ~ 1e13 the log-density is dominated by rounding; past that
    # horizon the tail is extrapolated geometrically (polynomial decay in u is
    # geometric decay per unit chunk in v)
    horizon = max(math.log(HORIZON), math.log(abs(anchor) + 1.0) + 4.0)
    v = 0.0
    while True:
        lv, re = _scaled_piece(psi, v, v + 1.0, tol)
        v += 1.0
        if lv == math.inf:
            return math.inf, 0.0
        history.append(lv)
        if lv == -math.inf:
            zeros += 1
            if zeros >= 3:
                return total, rel
            continue
        zeros = 0
        new = _logaddexp(total, lv)
        rel = (rel * math.exp(total - new) if total > -math.inf else 0.0) + re * math.exp(lv - new)
        total = new
        if len(history) >= 2 and history[-2] > -math.inf:
            ratio = lv - history[-2]
            if ratio < -1e-9:
                tail = lv + ratio - math.log(-math.expm1(ratio))
                if tail < total + log_tol:
                    return total, rel + math.exp(tail - total)
                # near the horizon rounding noise can fake a small drop; only
                # extrapolate a decay that is clear and sustained
                recent = np.diff(history[-4:]) if len(history) >= 4 else np.array([0.0])
                if v >= horizon and np.all(recent < -1e-2):
                    new = _logaddexp(total, tail)
                    return new, rel + 0.1 * math.exp(tail - new)
        if v >= horizon:
            return math.inf, 0.0


def log_integrate(phi: LogDensity, lo: float, hi: float, tol: float = 1e-10,
                  center: float | None = None) -> LogIntegral:
    """Integrate ``exp(phi(u))`` over ``(lo, hi)``; infinite limits are allowed.

    Returns ``LogIntegral(+inf, ...)`` when the tail does not decay, which is how
    divergence is reported to callers.
    """
    if hi <= lo:
        return LogIntegral(-math.inf, 0.0)
    parts: list[tuple[float, float]] = []
    lo_inf, hi_inf = math.isinf(lo), math.isinf(hi)
    if lo_inf and hi_inf:
        c = 0.0 if center is None else center
        parts.append(_tail_log_integral(phi, c, -1, tol))
        parts.append(_tail_log_integral(phi, c, +1, tol))
    elif lo_inf:
        parts.append(_tail_log_integral(phi, hi, -1, tol))
    elif hi_inf:
        parts.append(_tail_log_integral(phi, lo, +1, tol))
    else:
        parts.append(_finite_log_integral(phi, lo, hi, tol))
    total, rel = -math.inf, 0.0
    for lv, re in parts:
        if lv == math.inf:
            return LogIntegral(math.inf, 0.0)
        if lv > -math.inf:
            new = _logaddexp(total, lv)
            rel = (rel * math.exp(total - new) if total > -math.inf else 0.0) + re * math.exp(lv - new)
            total = new
    return LogIntegral(total, rel)


def log_density(f: Callable[[np.ndarray], np.ndarray]) -> LogDensity:
    """Wrap a nonnegative function of t as a log-density in u = log t."""
    def phi(u: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            t = np.exp(u)
            v = np.asarray(f(t), dtype=float)
            return np.log(np.abs(v)) + u
    return phi


def integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              tol: float = 1e-10) -> tuple[float, float]:
    """Integral of a nonnegative vectorised ``f`` over ``(a, b)`` with ``0 <= a < b <= inf``.

    Returns ``(value, relative_error)``; the value is ``inf`` on divergence.
    """
    if a < 0:
        raise ValueError("integrate expects a >= 0; shift the integrand first")
    lo = -math.inf if a == 0 else math.log(a)
    hi = math.inf if math.isinf(b) else math.log(b)
    res = log_integrate(log_density(f), lo, hi, tol=tol)
    return res.value, res.rel_error


def gauss_nodes(lo: np.ndarray, hi: np.ndarray, max_width: float = 0.25) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes covering each gap ``[lo_i, hi_i]``.

    Returns ``(nodes, log_weights, owner)`` where ``owner[j]`` is the gap index
    of the j-th panel; ``nodes`` has shape ``(panels, order)``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = hi - lo
    counts = np.maximum(1, np.ceil(width / max_width).astype(int))
    owner = np.repeat(np.arange(lo.size), counts)
    offsets = np.arange(owner.size) - np.repeat(np.cumsum(counts) - counts, counts)
    step = width[owner] / counts[owner]
    a = lo[owner] + offsets * step
    half = 0.5 * step
    nodes = (a + half)[:, None] + half[:, None] * _GL_NODES[None, :]
    with np.errstate(divide="ignore"):
        logw = np.log(half)[:, None] + _GL_LOGW[None, :]
    return nodes, logw, owner


def log_gap_integrals(phi: LogDensity, lo: np.ndarray, hi: np.ndarray, max_width: float = 0.25) -> np.ndarray:
    """log of int_{lo_i}^{hi_i} exp(phi) for each gap, by composite Gauss-Legendre."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.size == 0:
        return np.zeros(0)
    wide = (hi - lo) > 16.0
    if np.any(wide):
        out = np.empty(lo.size)
        narrow = ~wide
        if np.any(narrow):
            out[narrow] = log_gap_integrals(phi, lo[narrow], hi[narrow], max_width)
        out[wide] = wide_gap_log_integrals(phi, lo[wide], hi[wide])
        return out
    nodes, logw, owner = gauss_nodes(lo, hi, max_width)
    with np.errstate(all="ignore"):
        vals = np.asarray(phi(nodes.ravel()), dtype=float).reshape(nodes.shape)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    starts = np.searchsorted(owner, np.arange(lo.size))
    per_panel = log_sum(vals + logw, axis=1)
    m = np.maximum.reduceat(per_panel, starts)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        s = np.add.reduceat(np.exp(per_panel - safe[owner]), starts)
        out = np.where(np.isfinite(m), safe + np.log(s), m)
    zero = np.asarray(hi) <= lo
    out[zero] = -np.inf
    return out


def wide_gap_log_integrals(phi: LogDensity, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """log int_{lo_i}^{hi_i} exp(phi) for long gaps, vectorised.

    Each gap is mapped by ``u = anchor -+ (exp(v) - 1)`` from whichever end
    carries the larger density, and covered by a fixed number of panels
    (fine for v < 4, equal width beyond).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    with np.errstate(all="ignore"):
        ends = np.asarray(phi(np.concatenate([lo, hi])), dtype=float)
    ends = np.where(np.isnan(ends), -np.inf, ends)
    at_hi = ends[lo.size:] >= ends[: lo.size]
    V = np.log(hi - lo + 1.0)
    v4 = np.minimum(V, 4.0)
    e1 = np.linspace(0.0, 1.0, 17)
    e2 = np.linspace(0.0, 1.0, 25)
    edges = np.concatenate([v4[:, None] * e1[None, :],
                            v4[:, None] + (V - v4)[:, None] * e2[None, 1:]], axis=1)
    a, b = edges[:, :-1], edges[:, 1:]
    half = 0.5 * (b - a)
    nodes = (a + half)[:, :, None] + half[:, :, None] * _GL_NODES[None, None, :]
    with np.errstate(divide="ignore"):
        logw = np.log(half)[:, :, None] + _GL_LOGW[None, None, :]
    ev = np.exp(nodes) - 1.0
    u = np.where(at_hi[:, None, None], hi[:, None, None] - ev, lo[:, None, None] + ev)
    with np.errstate(all="ignore"):
        vals = np.asarray(phi(u.ravel()), dtype=float).reshape(u.shape)
    vals = np.where(np.isnan(vals), -np.inf, vals) + nodes + logw
    return log_sum(vals.reshape(lo.size, -1), axis=1)


def log_cumulative(phi: LogDensity, grid: np.ndarray, lo: float = -math.inf,
                   tol: float = 1e-10, max_width: float = 0.25) -> np.ndarray:
    """log of int_lo^{grid_i} exp(phi) on an increasing grid (``grid[0] >= lo``)."""
    grid = np.asarray(grid, dtype=float)
    lead = log_integrate(phi, lo, float(grid[0]), tol=tol).log_value if grid[0] > lo else -math.inf
    if lead == math.inf:
        return np.full(grid.size, math.inf)
    gaps = log_gap_integrals(phi, grid[:-1], grid[1:], max_width)
    seq = np.concatenate([[lead], gaps])
    return np.logaddexp.accumulate(seq)


def log_reverse_cumulative(phi: LogDensity, grid: np.ndarray, hi: float = math.inf,
                           tol: float = 1e-10, max_width: float = 0.25) -> np.ndarray:
    """log of int_{grid_i}^hi exp(phi) on an increasing grid (``grid[-1] <= hi``)."""
    grid = np.asarray(grid, dtype=float)

    def flipped(x):
        return phi(-x)

    rev = log_cumulative(flipped, -grid[::-1], lo=-hi, tol=tol, max_width=max_width)
    return rev[::-1]


def _tail_rule(vmax: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, vmax] in the tail variable, fine near 0.

    Returns (nodes, log_weights, unit_chunk_index) flattened.
    """
    edges = np.concatenate([np.arange(0.0, 4.0, 0.125), np.arange(4.0, math.ceil(vmax) + 1e-9, 0.5)])
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    nodes = ((a + half)[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    logw = (np.log(half)[:, None] + _GL_LOGW[None, :]).ravel()
    return nodes, logw, np.floor(nodes).astype(int)


def tail_log_integrals(phi: LogDensity, anchors: np.ndarray, direction: int = -1) -> np.ndarray:
    """log of int exp(phi) from each anchor to ``direction * inf``, by a fixed vectorised rule.

    The beyond-horizon tail is extrapolated geometrically from the last two
    unit chunks; a non-decaying tail gives ``+inf``.
    """
    anchors = np.asarray(anchors, dtype=float)
    if anchors.size == 0:
        return np.zeros(0)
    vmax = max(math.log(HORIZON), math.log(float(np.max(np.abs(anchors))) + 1.0) + 4.0)
    nodes, logw, chunk = _tail_rule(vmax)
    ev = np.exp(nodes)
    if direction < 0:
        u = anchors[:, None] + 1.0 - ev[None, :]
    else:
        u = anchors[:, None] - 1.0 + ev[None, :]
    with np.errstate(all="ignore"):
        vals = np.asarray(phi(u.ravel()), dtype=float).reshape(u.shape)
    vals = np.where(np.isnan(vals), -np.inf, vals) + nodes[None, :] + logw[None, :]
    if np.any(vals == np.inf):
        bad = np.any(vals == np.inf, axis=1)
    else:
        bad = np.zeros(anchors.size, dtype=bool)
    nchunk = int(chunk.max()) + 1
    starts = np.searchsorted(chunk, np.arange(nchunk))
    m = np.maximum.reduceat(vals, starts, axis=1)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(all="ignore"):
        s = np.add.reduceat(np.exp(vals - np.repeat(safe, np.diff(np.append(starts, vals.shape[1])), axis=1)),
                            starts, axis=1)
        per_chunk = np.where(np.isfinite(m), safe + np.log(s), m)
    total = log_sum(per_chunk, axis=1)
    last, prev = per_chunk[:, -1], per_chunk[:, -2]
    with np.errstate(all="ignore"):
        ratio = last - prev
        tail = last + ratio - np.log(-np.expm1(np.minimum(ratio, -1e-300)))
    decaying = (ratio < -1e-9) | (last == -np.inf)
    with np.errstate(invalid="ignore"):
        out = np.where(decaying & np.isfinite(tail), np.logaddexp(total, tail), total)
    out = np.where(decaying, out, np.inf)
    out[bad] = np.inf
    return out


def loglinear_integral(grid: np.ndarray, logvals: np.ndarray, lo_tail: bool = True,
                       hi_end: float = math.inf) -> float:
    """log of the integral of the piecewise log-linear interpolant of tabulated values.

    Between grid points ``exp`` of the linear interpolant is integrated
    exactly.  Beyond the ends the last slope is extrapolated: to ``-inf``
    when ``lo_tail`` is set and up to ``hi_end``.  A non-decaying infinite
    tail gives ``+inf``.
    """
    u = np.asarray(grid, dtype=float)
    y = np.asarray(logvals, dtype=float)
    if np.any(y == np.inf):
        return math.inf
    pieces = [_loglinear_pieces(u[:-1], u[1:], y[:-1], y[1:])]

    def slope(i, j):
        if not (np.isfinite(y[i]) and np.isfinite(y[j])):
            return -math.inf if y[i] == -math.inf or y[j] == -math.inf else 0.0
        return (y[j] - y[i]) / (u[j] - u[i])

    if lo_tail and np.isfinite(y[0]):
        k = slope(0, 1)
        if k <= 0.0:
            return math.inf
        pieces.append(np.array([y[0] - math.log(k)]))
    if hi_end > u[-1] and np.isfinite(y[-1]):
        k = slope(-2, -1)
        if math.isinf(hi_end):
            if k >= 0.0:
                return math.inf
            pieces.append(np.array([y[-1] - math.log(-k)]))
        else:
            y_end = y[-1] + k * (hi_end - u[-1]) if np.isfinite(k) else -math.inf
            pieces.append(_loglinear_pieces(u[-1:], np.array([hi_end]), y[-1:], np.array([y_end])))
    return float(log_sum(np.concatenate(pieces)))


def _loglinear_pieces(a, b, ya, yb) -> np.ndarray:
    """log of int_a^b exp(linear from ya to yb), elementwise."""
    h = b - a
    top = np.maximum(ya, yb)
    d = np.abs(yb - ya)
    with np.errstate(all="ignore"):
        # (1 - exp(-d)) / d, stable near d = 0
        factor = np.where(d < 1e-8, 1.0 - 0.5 * d, -np.expm1(-d) / np.where(d > 0, d, 1.0))
        out = top + np.log(h) + np.log(factor)
    return np.where(top == -np.inf, -np.inf, out)
