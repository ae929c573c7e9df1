"""Exponent algebra for Sobolev-type embeddings.

All functions accept plain floats and return floats, with ``math.inf`` used
for the endpoint cases where a denominator vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ExponentRangeError

__all__ = [
    "ball_volume",
    "sphere_area",
    "conjugate",
    "sobolev_conjugate",
    "interpolated_sobolev",
    "lorentz_index",
    "lorentz_index_in_range",
    "ExponentContext",
    "DerivedExponents",
    "lebesgue_index",
    "gap_exponent",
    "is_conjugate_triple",
    "critical_lower",
]

_EPS = 1e-12


def _check_dim_p(N: float, p: float) -> None:
    if not (N >= 1):
        raise ExponentRangeError(f"dimension must be >= 1, got {N}")
    if not (1.0 < p < math.inf):
        raise ExponentRangeError(f"p must lie in (1, inf), got {p}")


def ball_volume(N: float) -> float:
    """Lebesgue measure of the unit ball in R^N."""
    if N <= 0:
        raise ExponentRangeError(f"dimension must be positive, got {N}")
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


def sphere_area(N: float) -> float:
    """Surface measure of the unit sphere S^{N-1}, i.e. N times the ball volume."""
    return N * ball_volume(N)


def conjugate(a: float) -> float:
    """Hoelder conjugate a/(a-1), with 1 <-> inf."""
    if a == 1:
        return math.inf
    if math.isinf(a):
        return 1.0
    if a < 1:
        raise ExponentRangeError(f"conjugate exponent needs a >= 1, got {a}")
    return a / (a - 1.0)


def sobolev_conjugate(N: float, p: float) -> float:
    """Np/(N-p) for p < N; infinite when p >= N."""
    _check_dim_p(N, p)
    if p >= N:
        return math.inf
    return N * p / (N - p)


def interpolated_sobolev(N: float, p: float, s: float) -> float:
    """Exponent p(N-s)/(N-p) joining the Sobolev conjugate (s=0) to p (s=p)."""
    _check_dim_p(N, p)
    if p >= N:
        raise ExponentRangeError("interpolated exponent requires p < N")
    if not (0.0 <= s <= N):
        raise ExponentRangeError(f"s must lie in [0, N], got {s}")
    return p * (N - s) / (N - p)


def lorentz_index(N: float, p: float, q: float) -> float:
    """First index Np/(N(p-q)+qp) of the Lorentz space that admits weights for (p, q).

    Equals N/p on the diagonal q = p and blows up at the Sobolev conjugate.
    Beyond the Sobolev conjugate the value is negative; it is returned as is
    and :func:`lorentz_index_in_range` tells the two situations apart.
    """
    _check_dim_p(N, p)
    if not (q > 0):
        raise ExponentRangeError(f"q must be positive, got {q}")
    denom = N * (p - q) + q * p
    if abs(denom) <= _EPS * max(1.0, N * p):
        return math.inf
    return N * p / denom


def lorentz_index_in_range(N: float, p: float, q: float) -> bool:
    """Whether q does not exceed the Sobolev conjugate, so that the Lorentz index is usable."""
    return lorentz_index(N, p, q) > 0


def lebesgue_index(N: float, p: float, q: float) -> float:
    """Exponent (p* - N'p)/(p* - N'q); infinite at q = p*/N' and negative beyond it."""
    _check_dim_p(N, p)
    if p >= N:
        raise ExponentRangeError("requires p < N")
    if N == 1:
        raise ExponentRangeError("requires N > 1")
    if not (q > 0):
        raise ExponentRangeError(f"q must be positive, got {q}")
    ps = sobolev_conjugate(N, p)
    nc = conjugate(N)
    denom = ps - nc * q
    if abs(denom) <= _EPS * ps:
        return math.inf
    return (ps - nc * p) / denom


def gap_exponent(p: float, q: float) -> float:
    """pq/(p-q) for q < p; the exponent appearing in the sub-diagonal Hardy conditions."""
    if not (0 < q < p):
        raise ExponentRangeError(f"need 0 < q < p, got p={p}, q={q}")
    return p * q / (p - q)


def critical_lower(N: float, p: float) -> float:
    """The value p(N-1)/(N-p), i.e. the interpolated exponent at s = 1."""
    return interpolated_sobolev(N, p, 1.0)


def is_conjugate_triple(a: float, b: float, c: float, tol: float = 1e-12) -> bool:
    """True when 1/a + 1/b + 1/c = 1 (inf contributes zero)."""
    total = sum(0.0 if math.isinf(x) else 1.0 / x for x in (a, b, c))
    return abs(total - 1.0) <= tol


@dataclass(frozen=True)
class DerivedExponents:
    alpha: float
    p_star: float
    p_prime: float
    N_prime: float
    beta: float | None
    alpha_in_range: bool


@dataclass(frozen=True)
class ExponentContext:
    """Dimension N, split dimension k (1 <= k <= N) and the exponents p > 1, q > 0."""

    N: int
    k: int
    p: float
    q: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ExponentRangeError(f"N must be a positive integer, got {self.N}")
        if int(self.k) != self.k or not 1 <= self.k <= self.N:
            raise ExponentRangeError(f"k must be an integer in [1, N], got {self.k}")
        _check_dim_p(self.N, self.p)
        if not (0 < self.q < math.inf):
            raise ExponentRangeError(f"q must lie in (0, inf), got {self.q}")

    @property
    def p_star(self) -> float:
        return sobolev_conjugate(self.N, self.p)

    def derived(self) -> DerivedExponents:
        N, p, q = self.N, self.p, self.q
        beta = lebesgue_index(N, p, q) if N > p and N > 1 else None
        return DerivedExponents(
            alpha=lorentz_index(N, p, q),
            p_star=self.p_star,
            p_prime=conjugate(p),
            N_prime=conjugate(N),
            beta=beta,
            alpha_in_range=lorentz_index_in_range(N, p, q),
        )
