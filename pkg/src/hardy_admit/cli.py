"""Command-line entry point: ``hardy-admit <subcommand> [flags]``.

Flags may also come from a ``key=value`` file given with ``--config``; flags
on the command line win.  Reports are JSON (stdout or ``--out``), sweeps and
profiles are CSV (``--csv``).  Exit status: 0 success, 2 invalid input,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import catalog
from .admit import DomainSpec, WeightSpec, classify
from .conditions import MuckenhouptInput, muckenhoupt_constant, necessary_check_radial
from .errors import HardyAdmitError, NumericFailure, UnsupportedCaseError, ValidationError
from .exponents import ExponentContext
from .profiles import (
    BumpProfile,
    ConstProfile,
    ExpProfile,
    IndicatorProfile,
    PowerLogProfile,
    PowerProfile,
    RadialProfile,
    ShiftedPowerProfile,
    read_radial_table,
)
from .rearrange import decreasing_rearrangement
from .solve import RadialMesh, SolverOptions, minimize_rayleigh, truncation_continuation
from .spaces import (
    lebesgue_norm,
    lorentz_norm,
    lorentz_quasinorm,
    lorentz_zygmund_norm,
    weak_triple_norm,
)
from .verify import empirical_best_constant, log_power_family, power_cutoff_family, sin_dilate_family

SUBCOMMANDS = ("classify", "norms", "conditions", "verify", "solve", "sweep")


@dataclass
class RunConfig:
    subcommand: str
    N: int = 3
    k: int | None = None
    p: float = 2.0
    q: float = 2.0
    domain: str = "full"
    weight: str = "const:1"
    space: str = "lorentz:2,inf"
    mesh: int = 1000
    rtrunc: str = "10,40,160"
    sweep: str | None = None
    family: str = "power_cutoff"
    seed: int = 42
    tol: float = 1e-13
    out: str | None = None
    csv: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ValidationError(f"unknown configuration keys: {', '.join(unknown)}")
        if data.get("subcommand") not in SUBCOMMANDS:
            raise ValidationError(f"subcommand must be one of {', '.join(SUBCOMMANDS)}")
        conv = {"N": int, "k": int, "p": float, "q": float, "mesh": int, "seed": int, "tol": float}
        clean = {}
        for key, val in data.items():
            if val is None or key not in conv:
                clean[key] = val
                continue
            try:
                clean[key] = conv[key](val)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{key}: cannot read {val!r}") from exc
        cfg = cls(**clean)
        cfg.context()
        return cfg

    def context(self) -> ExponentContext:
        return ExponentContext(self.N, self.k if self.k is not None else self.N, self.p, self.q)

    def to_dict(self) -> dict:
        return asdict(self)


def read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ValidationError(f"config: cannot read {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {n}: expected key=value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key.lstrip("-")] = val
    return out


def _num(x: str) -> float:
    x = x.strip().lower()
    if x in ("inf", "+inf", "infinity"):
        return math.inf
    return float(x)


def _args(desc: str, n: int | tuple[int, int], what: str) -> list[float]:
    vals = [_num(v) for v in desc.split(",")] if desc else []
    lo, hi = (n, n) if isinstance(n, int) else n
    if not lo <= len(vals) <= hi:
        raise ValidationError(f"{what}: expected {lo if lo == hi else f'{lo} to {hi}'} numbers, got {desc!r}")
    return vals


def parse_profile(desc: str) -> RadialProfile:
    """Profile from a descriptor such as ``power:-2`` (|x|^-2) or ``shifted_power:3,1``."""
    name, _, rest = desc.strip().partition(":")
    try:
        if name == "power":
            (e,) = _args(rest, 1, "power")
            return PowerProfile(-e)
        if name == "power_log":
            d, kappa, R = _args(rest, 3, "power_log")
            return PowerLogProfile(d, kappa, R)
        if name == "shifted_power":
            d, c = _args(rest, 2, "shifted_power")
            return ShiftedPowerProfile(d, c)
        if name == "const":
            (c,) = _args(rest, 1, "const")
            return ConstProfile(c)
        if name == "exp":
            (rate,) = _args(rest, 1, "exp")
            return ExpProfile(rate)
        if name == "indicator":
            (r,) = _args(rest, 1, "indicator")
            return IndicatorProfile(r)
        if name == "bump":
            center, width = _args(rest, 2, "bump")
            return BumpProfile(center, width)
        if name == "csv":
            return read_radial_table(rest)
        if name == "catalog":
            table = catalog.radial_decreasing_catalog()
            if rest not in table:
                raise ValidationError(f"weight: unknown catalog entry {rest!r}; known: {', '.join(table)}")
            return table[rest]
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"weight: cannot read {desc!r}: {exc}") from exc
    raise ValidationError(f"weight: unknown descriptor {desc!r}")


def parse_weight(desc: str) -> WeightSpec:
    if desc.startswith("product:"):
        parts = desc[len("product:"):].split("|")
        if len(parts) != 2:
            raise ValidationError("weight: product needs two descriptors separated by '|'")
        second = parse_profile(parts[1])
        if isinstance(second, ConstProfile) and second.c == 1.0:
            second = None
        return WeightSpec.cylindrical(parse_profile(parts[0]), second)
    return WeightSpec.radial(parse_profile(desc))


def parse_domain(desc: str, N: int, k: int | None = None) -> DomainSpec:
    name, _, rest = desc.strip().partition(":")
    if name == "full":
        return DomainSpec.full_space(N)
    if name == "ball":
        (R,) = _args(rest, 1, "domain ball")
        return DomainSpec.ball(N, R)
    if name == "annulus":
        a, b = _args(rest, 2, "domain annulus")
        return DomainSpec.annulus(N, a, b)
    if name == "exterior":
        (a,) = _args(rest, 1, "domain exterior")
        return DomainSpec.exterior(N, a)
    if name == "sector":
        a, b, sigma = _args(rest, 3, "domain sector")
        return DomainSpec.sectorial(N, a, b, sigma)
    if name == "product":
        vals = _args(rest, (0, 3), "domain product")
        kk = int(vals[0]) if vals else k
        if kk is None:
            raise ValidationError("domain product: give the split dimension as product:k or --k")
        a, b = (vals[1:] + [0.0, math.inf])[:2] if len(vals) > 1 else (0.0, math.inf)
        return DomainSpec.product(N, kk, a, b)
    raise ValidationError(f"domain: unknown descriptor {desc!r}")


def _space_norm(space: str, rf, seed: int):
    name, _, rest = space.partition(":")
    if name == "lorentz":
        p, q = _args(rest, 2, "space lorentz")
        return lorentz_norm(decreasing_rearrangement(rf), p, q)
    if name == "lorentz_quasi":
        p, q = _args(rest, 2, "space lorentz_quasi")
        return lorentz_quasinorm(decreasing_rearrangement(rf), p, q)
    if name == "lebesgue":
        (e,) = _args(rest, 1, "space lebesgue")
        return lebesgue_norm(decreasing_rearrangement(rf), e)
    if name == "lz":
        p, q, lam = _args(rest, 3, "space lz")
        return lorentz_zygmund_norm(decreasing_rearrangement(rf), p, q, lam)
    if name == "weak_triple":
        p, s = _args(rest, 2, "space weak_triple")
        return weak_triple_norm(rf, p, s, seed=seed)
    raise ValidationError(f"space: unknown descriptor {space!r}")


def _json(x):
    if isinstance(x, dict):
        return {k: _json(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HARDY_ADMIT_THREADS", "1")))
    except ValueError:
        return 1


def _sweep_values(desc: str | None, default: tuple[str, float, float, int]) -> tuple[str, np.ndarray]:
    if desc is None:
        name, lo, hi, n = default
    else:
        name, _, rest = desc.partition(":")
        vals = _args(rest, 3, "sweep")
        lo, hi, n = vals[0], vals[1], int(vals[2])
        if n < 1:
            raise ValidationError("sweep: need at least one point")
    if lo > 0 and hi > 0 and name in ("eps", "lam"):
        return name, np.geomspace(lo, hi, n)
    return name, np.linspace(lo, hi, n)


def _radial_profile(cfg: RunConfig) -> RadialProfile:
    w = parse_weight(cfg.weight)
    if w.form != "radial":
        raise ValidationError("weight: this subcommand needs a radial weight")
    return w.profile


def cmd_classify(cfg: RunConfig) -> tuple[dict, list | None]:
    ctx = cfg.context()
    verdict = classify(ctx, parse_domain(cfg.domain, cfg.N, cfg.k), parse_weight(cfg.weight))
    return verdict.to_dict(), None


def cmd_norms(cfg: RunConfig) -> tuple[dict, list | None]:
    dom = parse_domain(cfg.domain, cfg.N, cfg.k)
    rf = dom.radial_function(_radial_profile(cfg))
    res = _space_norm(cfg.space, rf, cfg.seed)
    return {"space": cfg.space, "value": res.value, "finite": res.finite,
            "quadrature_error_estimate": res.quadrature_error_estimate}, None


def cmd_conditions(cfg: RunConfig) -> tuple[dict, list | None]:
    ctx = cfg.context()
    dom = parse_domain(cfg.domain, cfg.N, cfg.k)
    g = _radial_profile(cfg)
    rearr = decreasing_rearrangement(dom.radial_function(g))
    inp = MuckenhouptInput(rearr, PowerProfile(-(ctx.p - ctx.p / ctx.N)), rearr.measure, ctx.p, ctx.q)
    rep = muckenhoupt_constant(inp)
    out = {"regime": rep.regime, "constant": rep.constant, "implied_inequality_constant":
           rep.implied_inequality_constant, "finite": rep.finite}
    if ctx.N >= ctx.p and dom.a == 0 and dom.kind in ("full", "ball"):
        try:
            out["necessary"] = necessary_check_radial(g, ctx.N, ctx.p, ctx.q, dom.b)
        except ValidationError as exc:
            out["necessary"] = {"skipped": str(exc)}
    return out, None


_FAMILIES = {
    "power_cutoff": ("eps", 0.01, 0.5, 24),
    "log_power": ("eps", 0.01, 0.25, 24),
    "sin": ("lam", 0.05, 1.0, 24),
}


def cmd_verify(cfg: RunConfig) -> tuple[dict, list | None]:
    ctx = cfg.context()
    dom = parse_domain(cfg.domain, cfg.N, cfg.k)
    weight = parse_weight(cfg.weight)
    if cfg.family not in _FAMILIES:
        raise ValidationError(f"family: expected one of {', '.join(_FAMILIES)}")
    _, params = _sweep_values(cfg.sweep, _FAMILIES[cfg.family])
    R = dom.b if math.isfinite(dom.b) else 1.0
    fam = {
        "power_cutoff": lambda: power_cutoff_family(ctx.N, ctx.p, r2=R / math.e ** 2 if math.isfinite(dom.b) else 1.0),
        "log_power": lambda: log_power_family(ctx.p, R),
        "sin": lambda: sin_dilate_family(R),
    }[cfg.family]()
    est = empirical_best_constant(ctx, dom, weight, fam, params)
    report = {"family": cfg.family, "sup_ratio": est.sup_ratio, "argmax": est.argmax_params,
              "monotone_toward_argmax": bool(np.all(np.diff(est.ratios[::-1]) >= 0))}
    return report, est.rows()


def _singular_at_origin(g: RadialProfile) -> bool:
    with np.errstate(all="ignore"):
        near, far = g.log_value(np.array([math.log(1e-8), math.log(1e-2)]))
    return bool(np.isfinite(near) and np.isfinite(far) and near - far > 1.0)


def cmd_solve(cfg: RunConfig) -> tuple[dict, list | None]:
    ctx = cfg.context()
    dom = parse_domain(cfg.domain, cfg.N, cfg.k)
    g = _radial_profile(cfg)
    opts = SolverOptions(tol=cfg.tol)
    if dom.kind == "product":
        raise UnsupportedCaseError("solve: cylindrical domains are outside the radial solver")
    if not dom.bounded:
        radii = [_num(x) for x in cfg.rtrunc.split(",")]
        rep = truncation_continuation(ctx, g, radii, a=dom.a, opts=opts)
        last = rep.stages[-1]
        out = {"lambda": last.lam, "attained": rep.attained, "residual": last.residual, "continuation": rep.to_dict()}
        return out, [{"r": r, "u": u} for r, u in last.profile_rows()]
    if _singular_at_origin(g) and dom.a == 0:
        mesh = RadialMesh.geometric(dom.b, r_min=dom.b * 1e-3)
    else:
        mesh = RadialMesh.graded(dom.a, dom.b, cfg.mesh)
    res = minimize_rayleigh(ctx, dom, g, mesh, opts)
    return res.to_dict(), [{"r": r, "u": u} for r, u in res.profile_rows()]


def cmd_sweep(cfg: RunConfig) -> tuple[dict, list | None]:
    name, values = _sweep_values(cfg.sweep, ("q", 1.0, 6.0, 11))
    if name not in ("q", "p"):
        raise ValidationError("sweep: classify sweeps run over q or p")
    dom = parse_domain(cfg.domain, cfg.N, cfg.k)
    weight = parse_weight(cfg.weight)

    def one(v):
        ctx = ExponentContext(cfg.N, cfg.k or cfg.N, v if name == "p" else cfg.p, v if name == "q" else cfg.q)
        try:
            verdict = classify(ctx, dom, weight)
        except ValidationError as exc:
            return {name: v, "status": "invalid", "branches": "", "reason": str(exc)}
        return {name: v, "status": verdict.status,
                "branches": ";".join(b.criterion for b in verdict.theorems_applied), "reason": ""}

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(one, values.tolist()))
    counts = {}
    for row in rows:
        counts[row["status"]] = counts.get(row["status"], 0) + 1
    return {"parameter": name, "points": len(rows), "status_counts": counts}, rows


_DISPATCH = {
    "classify": cmd_classify,
    "norms": cmd_norms,
    "conditions": cmd_conditions,
    "verify": cmd_verify,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
}


_FLAG_HELP = (
    ("N", int, "space dimension"),
    ("k", int, "split dimension of a product domain"),
    ("p", float, "gradient exponent"),
    ("q", float, "weighted exponent"),
    ("domain", str, "full | ball:R | annulus:a,b | exterior:a | sector:a,b,frac | product:k[,a,b]"),
    ("weight", str, "power:e | power_log:d,kappa,R | shifted_power:d,c | const:c | exp:rate | indicator:r | "
                    "bump:c,w | csv:path | catalog:name | product:A|B"),
    ("space", str, "norms: lorentz:p,q | lorentz_quasi:p,q | lebesgue:e | lz:p,q,a | weak_triple:p,s"),
    ("mesh", int, "solve: number of cells"),
    ("rtrunc", str, "solve: truncation radii for unbounded domains"),
    ("sweep", str, "name:lo,hi,n"),
    ("family", str, "verify: power_cutoff | log_power | sin"),
    ("seed", int, "seed for randomized estimates"),
    ("tol", float, "solver relative tolerance"),
    ("out", str, "write the JSON report here instead of stdout"),
    ("csv", str, "write per-point rows (profile or sweep) as CSV"),
)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardy-admit", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", help="key = value file; flags override it")
    for name, kind, text in _FLAG_HELP:
        ap.add_argument(f"--{name}", type=kind, default=None, help=text.replace("%", "%%"))
    return ap


def run(cfg: RunConfig) -> dict:
    report, rows = _DISPATCH[cfg.subcommand](cfg)
    report = {"subcommand": cfg.subcommand, "config": cfg.to_dict(), **report}
    if cfg.csv and rows is not None:
        with open(cfg.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    return _json(report)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    data = {}
    try:
        if args.config:
            data.update(read_config_file(args.config))
        data.update({k: v for k, v in vars(args).items() if v is not None and k != "config"})
        cfg = RunConfig.from_dict(data)
        report = run(cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericFailure, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except HardyAdmitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    text = json.dumps(report, indent=2)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0
