"""Radial minimization of the Rayleigh quotient ``int |u'|^p / (int g |u|^q)^(p/q)``.

Functions are continuous and piecewise linear on a radial mesh; the gradient
energy is exact per cell and the weighted term uses Gauss-Legendre points per
cell.  The minimizer is found by projected gradient descent on the nonnegative
cone, preconditioned by the (linearized) weighted stiffness matrix, with
Armijo backtracking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_banded

from .admit import DomainSpec
from .errors import ConvergenceFailure, UnsupportedCaseError, ValidationError
from .exponents import ExponentContext, ball_volume
from .profiles import RadialProfile

__all__ = [
    "RadialMesh",
    "SolverOptions",
    "MinimizerResult",
    "ContinuationReport",
    "minimize_rayleigh",
    "weak_residual",
    "homogeneity_rescale",
    "richardson",
    "truncation_continuation",
]

_GL_POINTS = 6
_GX, _GW = np.polynomial.legendre.leggauss(_GL_POINTS)


@dataclass(frozen=True)
class RadialMesh:
    """Nodes ``0 <= r_0 < ... < r_M`` with Dirichlet flags at the two ends."""

    nodes: np.ndarray
    dirichlet_left: bool = False
    dirichlet_right: bool = True

    def __post_init__(self):
        r = np.asarray(self.nodes, dtype=float)
        if r.ndim != 1 or r.size < 101:
            raise ValidationError("a radial mesh needs at least 100 cells")
        if r[0] < 0 or np.any(np.diff(r) <= 0) or not np.isfinite(r[-1]):
            raise ValidationError("mesh nodes must be finite, nonnegative and strictly increasing")
        object.__setattr__(self, "nodes", r)

    @property
    def cells(self) -> int:
        return self.nodes.size - 1

    @property
    def grading(self) -> float:
        """Largest ratio between neighbouring cell sizes."""
        h = np.diff(self.nodes)
        ratio = h[1:] / h[:-1]
        return float(max(np.max(ratio), np.max(1.0 / ratio)))

    @property
    def radius(self) -> float:
        return float(self.nodes[-1])

    @classmethod
    def graded(cls, a: float, b: float, M: int, grading: float = 1.05, contrast: float = 100.0) -> "RadialMesh":
        """``M`` cells on ``[a, b]``; sizes shrink geometrically toward both ends.

        The smallest cell is ``contrast`` times smaller than the interior ones
        (or less when ``M`` is small) and neighbours differ by at most ``grading``.
        """
        if not (0 <= a < b < math.inf) or M < 100:
            raise ValidationError("need 0 <= a < b < inf and M >= 100")
        m = min(M // 4, int(math.ceil(math.log(contrast) / math.log(grading))))
        idx = np.arange(M)
        steps = np.minimum(np.minimum(idx, M - 1 - idx), m)
        h = grading ** (steps - m).astype(float)
        h *= (b - a) / h.sum()
        nodes = a + np.concatenate([[0.0], np.cumsum(h)])
        nodes[-1] = b
        return cls(nodes, dirichlet_left=a > 0, dirichlet_right=True)

    @classmethod
    def geometric(cls, b: float, r_min: float = 1e-3, grading: float = 1.05, a: float = 0.0) -> "RadialMesh":
        """Cells growing by ``grading`` from size ``r_min`` next to ``a`` up to ``b``.

        Suited to weights singular at the inner end: the mesh resolves the same
        number of cells per decade at every scale.
        """
        if not (0 <= a < b < math.inf) or not (0 < r_min < b - a):
            raise ValidationError("need 0 <= a < b < inf and 0 < r_min < b - a")
        n = int(math.ceil(math.log(1.0 + (b - a) * (grading - 1.0) / r_min) / math.log(grading)))
        h = r_min * grading ** np.arange(n)
        h *= (b - a) / h.sum()
        nodes = a + np.concatenate([[0.0], np.cumsum(h)])
        nodes[-1] = b
        return cls(nodes, dirichlet_left=a > 0, dirichlet_right=True)


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 50_000
    step: float = 1.0
    shrink: float = 0.5
    armijo: float = 1e-4
    tol: float = 1e-13
    starts: tuple[str, ...] = ("cone", "gaussian", "mode")
    disagreement: float = 1e-3


@dataclass
class MinimizerResult:
    """Discrete minimizer normalized by ``int g u^q = 1``.

    ``lam`` is the minimal quotient; ``multiplier`` is the constant in
    ``-Delta_p u = multiplier * g u^(q-1)`` (equal to ``lam`` for a minimizer,
    and to the target after :func:`homogeneity_rescale`).
    """

    lam: float
    u: np.ndarray
    mesh: RadialMesh
    p: float
    q: float
    dim: int
    sigma: float
    weight: RadialProfile
    residual: float = math.nan
    attained: bool = True
    multiplier: float = math.nan
    iterations: int = 0
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "attained": self.attained,
            "residual": self.residual,
            "mesh_size": self.mesh.cells,
            "R_trunc": self.mesh.radius,
            "iterations": self.iterations,
            "diagnostics": self.diagnostics,
        }

    def profile_rows(self) -> list[tuple[float, float]]:
        return list(zip(self.mesh.nodes.tolist(), self.u.tolist()))


class _Discretization:
    """Energy, constraint and their gradients for P1 functions on a radial mesh."""

    def __init__(self, mesh: RadialMesh, dim: int, sigma: float, weight: RadialProfile, p: float, q: float):
        r = mesh.nodes
        self.mesh, self.p, self.q = mesh, p, q
        self.h = np.diff(r)
        unit = sigma * ball_volume(dim)
        # int over a cell of the surface factor: |B_1| sigma (r_{i+1}^N - r_i^N)
        self.cell_measure = unit * (r[1:] ** dim - r[:-1] ** dim)
        mid = 0.5 * (r[1:] + r[:-1])
        x = mid[:, None] + 0.5 * self.h[:, None] * _GX[None, :]
        self.phi_right = (x - r[:-1, None]) / self.h[:, None]
        self.phi_left = 1.0 - self.phi_right
        with np.errstate(all="ignore"):
            lg = weight.log_value(np.log(x))
        gx = np.where(np.isfinite(lg), np.exp(np.minimum(lg, 700.0)), 0.0)
        self.gw = dim * unit * 0.5 * self.h[:, None] * _GW[None, :] * x ** (dim - 1) * gx
        if not np.all(np.isfinite(self.gw)):
            raise ValidationError("the weight is not integrable on the mesh cells")
        if not np.any(self.gw > 0):
            raise ValidationError("the weight vanishes on the mesh")
        self.free = np.ones(r.size, dtype=bool)
        if mesh.dirichlet_left:
            self.free[0] = False
        if mesh.dirichlet_right:
            self.free[-1] = False

    def slopes(self, u):
        return np.diff(u) / self.h

    def energy(self, u) -> float:
        return float(np.sum(self.cell_measure * np.abs(self.slopes(u)) ** self.p))

    def energy_grad(self, u) -> np.ndarray:
        s = self.slopes(u)
        flux = self.p * self.cell_measure * np.abs(s) ** (self.p - 2) * s / self.h
        flux = np.where(s == 0, 0.0, flux)
        g = np.zeros(u.size)
        g[1:] += flux
        g[:-1] -= flux
        return g

    def values(self, u):
        return u[:-1, None] * self.phi_left + u[1:, None] * self.phi_right

    def constraint(self, u) -> float:
        return float(np.sum(self.gw * np.abs(self.values(u)) ** self.q))

    def constraint_grad(self, u) -> np.ndarray:
        v = self.values(u)
        dens = self.q * self.gw * np.abs(v) ** (self.q - 1) * np.sign(v)
        g = np.zeros(u.size)
        g[:-1] += np.sum(dens * self.phi_left, axis=1)
        g[1:] += np.sum(dens * self.phi_right, axis=1)
        return g

    def quotient(self, u) -> float:
        G = self.constraint(u)
        if G <= 0:
            return math.inf
        return self.energy(u) / G ** (self.p / self.q)

    def quotient_grad(self, u) -> np.ndarray:
        J, G = self.energy(u), self.constraint(u)
        e = self.p / self.q
        return self.energy_grad(u) / G ** e - e * J * G ** (-e - 1.0) * self.constraint_grad(u)

    def preconditioner(self, u) -> np.ndarray:
        """Banded stiffness of the linearized p-energy, restricted to free nodes."""
        s = np.abs(self.slopes(u))
        top = float(np.max(s)) if s.size else 0.0
        floor = max(top * 1e-6, 1e-300)
        c = self.p * max(self.p - 1.0, 1e-3) * self.cell_measure * np.maximum(s, floor) ** (self.p - 2) / self.h ** 2
        n = u.size
        diag = np.zeros(n)
        diag[:-1] += c
        diag[1:] += c
        off = -c
        ab = np.zeros((3, n))
        ab[0, 1:] = off
        ab[1] = diag
        ab[2, :-1] = off
        keep = np.nonzero(self.free)[0]
        # restrict to free nodes: free nodes form a contiguous block
        lo, hi = keep[0], keep[-1] + 1
        return ab[:, lo:hi], lo, hi

    def project(self, u) -> np.ndarray:
        u = np.maximum(u, 0.0)
        u[~self.free] = 0.0
        return u

    def normalize(self, u) -> np.ndarray:
        G = self.constraint(u)
        return u / G ** (1.0 / self.q)


def _initial(kind: str, mesh: RadialMesh) -> np.ndarray:
    r = mesh.nodes
    a, b = r[0], r[-1]
    x = (r - a) / (b - a)
    if kind == "cone":
        u = 1.0 - x
    elif kind == "gaussian":
        u = np.exp(-((x / 0.35) ** 2)) - math.exp(-((1 / 0.35) ** 2))
    elif kind == "mode":
        u = np.sinc(x) if a == 0 else np.sin(math.pi * x)
    else:
        raise ValidationError(f"unknown starting profile {kind!r}")
    if mesh.dirichlet_left:
        u = u * x
    return np.maximum(u, 0.0)


def _descend(disc: _Discretization, u0: np.ndarray, opts: SolverOptions) -> tuple[np.ndarray, float, int, bool]:
    u = disc.normalize(disc.project(u0.copy()))
    R = disc.quotient(u)
    quiet = 0
    for it in range(1, opts.max_iter + 1):
        grad = disc.quotient_grad(u)
        ab, lo, hi = disc.preconditioner(u)
        d = np.zeros_like(u)
        d[lo:hi] = -solve_banded((1, 1), ab, grad[lo:hi])
        d[~disc.free] = 0.0
        slope = float(grad @ d)
        if not slope < 0:
            return u, R, it, True
        tau = opts.step
        while True:
            cand = disc.project(u + tau * d)
            if disc.constraint(cand) > 0:
                R_new = disc.quotient(cand)
                if R_new <= R + opts.armijo * float(grad @ (cand - u)):
                    break
            tau *= opts.shrink
            if tau < 1e-20:
                return u, R, it, True
        cand = disc.normalize(cand)
        drop = R - R_new
        u, R = cand, R_new
        if drop <= opts.tol * R:
            quiet += 1
            if quiet >= 3:
                return u, R, it, True
        else:
            quiet = 0
    return u, R, opts.max_iter, False


def _check_solver_case(ctx: ExponentContext, domain: DomainSpec) -> None:
    if ctx.q <= 1:
        raise ValidationError("the Euler-Lagrange form needs q > 1")
    if domain.kind == "product":
        raise UnsupportedCaseError("cylindrical domains are outside the radial solver")


def minimize_rayleigh(ctx: ExponentContext, domain: DomainSpec, weight: RadialProfile, mesh: RadialMesh,
                      opts: SolverOptions | None = None) -> MinimizerResult:
    """Minimize the quotient over nonnegative P1 functions on ``mesh``; best of several starts."""
    opts = opts or SolverOptions()
    _check_solver_case(ctx, domain)
    if mesh.nodes[0] < domain.a - 1e-15 or mesh.radius > domain.b:
        raise ValidationError("the mesh leaves the radial range of the domain")
    if domain.a > 0 and not mesh.dirichlet_left:
        raise ValidationError("an annular domain needs a Dirichlet condition at the inner radius")
    disc = _Discretization(mesh, ctx.N, domain.sigma, weight, ctx.p, ctx.q)
    runs = []
    for kind in opts.starts:
        u, R, its, ok = _descend(disc, _initial(kind, mesh), opts)
        runs.append((R, kind, u, its, ok))
    runs.sort(key=lambda t: t[0])
    R, kind, u, its, ok = runs[0]
    if not ok:
        raise ConvergenceFailure(f"no convergence after {its} iterations (start {kind}, quotient {R})")
    spread = (runs[-1][0] - R) / R
    diag = {
        "start": kind,
        "starts": {k: float(v) for v, k, *_ in runs},
        "nonconvex": bool(spread > opts.disagreement),
        "grading": mesh.grading,
    }
    res = MinimizerResult(R, u, mesh, ctx.p, ctx.q, ctx.N, domain.sigma, weight, multiplier=R, iterations=its,
                          diagnostics=diag)
    res.residual = weak_residual(res)
    res.diagnostics["outer_decade_fraction"] = _mass_fraction(disc, u, mesh.radius / 10.0, math.inf)
    return res


def _mass_fraction(disc: _Discretization, u: np.ndarray, lo: float, hi: float) -> float:
    """Share of ``int g u^q`` carried by cells inside ``[lo, hi)``."""
    cell = np.sum(disc.gw * np.abs(disc.values(u)) ** disc.q, axis=1)
    r = disc.mesh.nodes
    mid = 0.5 * (r[1:] + r[:-1])
    total = cell.sum()
    return float(cell[(mid >= lo) & (mid < hi)].sum() / total) if total > 0 else 0.0


def weak_residual(result: MinimizerResult, multiplier: float | None = None, detail: bool = False):
    """Largest defect of the weak equation over the nodal hat functions.

    For each free hat ``v`` the defect ``|a(u, v) - m b(u, v)|`` is divided by
    ``(int |v'|^p)^(1/p)``; ``a`` and ``b`` are the p-Laplacian and weighted
    forms and ``m`` the multiplier.  With ``detail`` the nodal (strong-form)
    defect, scaled by the hat's weighted volume, is returned as well.
    """
    if result.q == result.p and multiplier is None:
        multiplier = result.multiplier
    m = result.multiplier if multiplier is None else multiplier
    disc = _Discretization(result.mesh, result.dim, result.sigma, result.weight, result.p, result.q)
    u = result.u
    a = disc.energy_grad(u) / result.p
    b = disc.constraint_grad(u) / result.q
    defect = np.abs(a - m * b)[disc.free]
    cm = disc.cell_measure / disc.h ** result.p
    hat = np.zeros(u.size)
    hat[:-1] += cm
    hat[1:] += cm
    norm = hat[disc.free] ** (1.0 / result.p)
    weak = float(np.max(defect / norm)) if defect.size else 0.0
    if not detail:
        return weak
    vol = np.zeros(u.size)
    vol[:-1] += 0.5 * disc.cell_measure
    vol[1:] += 0.5 * disc.cell_measure
    strong = defect / vol[disc.free]
    return {"weak": weak, "nodal_max": float(np.max(strong)) if strong.size else 0.0}


def homogeneity_rescale(result: MinimizerResult, lam_target: float) -> MinimizerResult:
    """``v = (lam_target B)^(-1/(q-p)) u`` with ``B = 1/lam``: a solution with multiplier ``lam_target``."""
    if result.q == result.p:
        raise ValidationError("rescaling changes the multiplier only when q != p")
    if not lam_target > 0:
        raise ValidationError("the target multiplier must be positive")
    best = 1.0 / result.lam
    factor = (lam_target * best) ** (-1.0 / (result.q - result.p))
    out = replace(result, u=factor * result.u, multiplier=lam_target,
                  diagnostics={**result.diagnostics, "rescale_factor": factor})
    out.residual = weak_residual(out)
    return out


def richardson(coarse: float, fine: float, order: float = 2.0) -> float:
    """Extrapolate values at mesh sizes h and h/2 assuming an error ~ h^order."""
    k = 2.0 ** order
    return (k * fine - coarse) / (k - 1.0)


@dataclass
class ContinuationReport:
    stages: list
    attained: bool
    lambdas: list
    reference_fractions: list
    outer_fractions: list

    def to_dict(self) -> dict:
        return {
            "attained": self.attained,
            "lambdas": self.lambdas,
            "reference_fractions": self.reference_fractions,
            "outer_fractions": self.outer_fractions,
            "stages": [s.to_dict() for s in self.stages],
        }


def truncation_continuation(ctx: ExponentContext, weight: RadialProfile, radii=(10.0, 40.0, 160.0),
                            r_min: float = 1e-3, grading: float = 1.05, reference: float = 1.0,
                            a: float = 0.0, opts: SolverOptions | None = None) -> ContinuationReport:
    """Minimize on balls (or annuli when ``a > 0``) of growing radius and diagnose escape of mass.

    The cell size near the inner end stays fixed, so growing radii only add
    scales.  Mass escapes, and the constant is reported as not attained at
    every stage, when either the outer decade carries more than half of
    ``int g u^q`` at every stage, or the share inside ``B_reference``
    decreases strictly from stage to stage while the quotient decreases.
    """
    stages = []
    for R in radii:
        dom = DomainSpec.annulus(ctx.N, a, R) if a > 0 else DomainSpec.ball(ctx.N, R)
        mesh = RadialMesh.geometric(R, r_min=r_min, grading=grading, a=a)
        res = minimize_rayleigh(ctx, dom, weight, mesh, opts)
        disc = _Discretization(mesh, ctx.N, 1.0, weight, ctx.p, ctx.q)
        res.diagnostics["reference_fraction"] = _mass_fraction(disc, res.u, 0.0, reference)
        stages.append(res)
    lams = [s.lam for s in stages]
    ref = [s.diagnostics["reference_fraction"] for s in stages]
    outer = [s.diagnostics["outer_decade_fraction"] for s in stages]
    persistent_outer = all(f > 0.5 for f in outer)
    spreading = len(stages) > 1 and all(ref[i + 1] < ref[i] * (1 - 1e-3) for i in range(len(ref) - 1)) and all(
        lams[i + 1] < lams[i] for i in range(len(lams) - 1))
    attained = not (persistent_outer or spreading)
    for s in stages:
        s.attained = attained
        s.diagnostics["escape"] = {"outer_decade": persistent_outer, "spreading": spreading}
    return ContinuationReport(stages, attained, lams, ref, outer)
