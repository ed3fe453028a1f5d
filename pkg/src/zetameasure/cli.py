"""Command-line front end.

Every subcommand runs one pipeline, prints its summary as JSON and, with
``--out DIR``, writes ``summary.json`` plus ``data.csv`` (and masks or fits
where relevant) into ``DIR``.  Parameters come from a flat ``key = value``
config file (``--config``) and flags; flags win.  Failures print
``{"error": <category>, "message": ...}`` to stderr and exit nonzero.

Function arguments such as ``--g`` are numpy expressions in ``z`` (``1``,
``z - 0.5``, ``exp(z)``, ``real(z)``); they are evaluated with a small
whitelist of names and are meant for trusted local input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .complexgrid import RegionMask, mask_from_text, mask_to_text
from .errors import CapabilityError, LabError, PreconditionError
from .lfun import (euler_product_gap, functional_equation_residual, lfun_eval, prime_mean_square,
                   spec_from_rule, strip_of)
from .planar import (DomainSpec, boundary_density, build_dirichlet_skeleton, domain_to_text, harmonic_measure_sequence,
                     lens_area, shell_construct, skeleton_density_check)
from .polyfree import zero_free_approx_in_measure
from .reduction import SampledFunction
from .universality import (ScanConfig, density_statistic, find_shift_sequence, measure_density_statistic,
                           profile_to_csv)
from .zeros import interval_census, rouche_compare


class UsageError(LabError):
    category = "usage"


# --------------------------------------------------------------------------
# parameter parsing


def parse_complex(text: str) -> complex:
    t = str(text).strip().replace(" ", "")
    if "j" not in t and "i" in t:
        t = t.replace("i", "j")
    return complex(t)


def parse_floats(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def parse_ints(text: str) -> list[int]:
    return [int(v) for v in str(text).split(",") if v.strip()]


_EXPR_NAMES = {name: getattr(np, name) for name in (
    "exp", "log", "sin", "cos", "tan", "sinh", "cosh", "sqrt", "abs", "real", "imag", "conj", "angle", "where", "pi")}
_EXPR_NAMES["i"] = 1j


def parse_expression(text: str):
    """Vectorised function of ``z`` from a numpy expression."""
    code = compile(str(text), "<expression>", "eval")
    unknown = set(code.co_names) - set(_EXPR_NAMES) - {"z"}
    if unknown:
        raise UsageError(f"unknown names in expression {text!r}: {sorted(unknown)}")

    def fn(z):
        return np.asarray(eval(code, {"__builtins__": {}}, {**_EXPR_NAMES, "z": np.asarray(z)}), dtype=complex)
    return fn


def parse_region(text: str, k: int) -> RegionMask:
    """``disk:cx,cy,r`` | ``rect:x0,x1,y0,y1`` | ``annulus:cx,cy,r_in,r_out`` | ``file:path``."""
    kind, _, body = str(text).partition(":")
    if kind == "file":
        path = Path(body)
        if not path.exists():
            raise PreconditionError(f"mask file {body!r} does not exist")
        return mask_from_text(path.read_text())
    vals = parse_floats(body)
    if kind == "disk" and len(vals) == 3:
        return RegionMask.disk(complex(vals[0], vals[1]), vals[2], k)
    if kind == "rect" and len(vals) == 4:
        return RegionMask.rect(*vals, k)
    if kind == "annulus" and len(vals) == 4:
        return RegionMask.annulus(complex(vals[0], vals[1]), vals[2], vals[3], k)
    raise UsageError(f"cannot parse region {text!r}")


def positive(conv):
    def check(text):
        v = conv(text)
        if not v > 0:
            raise ValueError("must be positive")
        return v
    return check


def nonneg(conv):
    def check(text):
        v = conv(text)
        if v < 0:
            raise ValueError("must be non-negative")
        return v
    return check


_REQUIRED = object()

SPEC = ("spec", str, "zeta", "L-function rule: zeta | dirichlet-chi4 | synthetic:r1,r2,...")
SCAN = [
    ("t_min", float, 0.0, "first shift"),
    ("t_max", positive(float), 2000.0, "last shift"),
    ("step", positive(float), 0.05, "lattice step"),
    ("refine_depth", nonneg(int), 0, "bisection depth at hit/miss edges"),
    ("threads", positive(int), None, "worker threads (default from ZETAMEASURE_THREADS)"),
]

COMMANDS: dict[str, tuple[str, list]] = {
    "zeta-eval": ("evaluate zeta (or another spec) at one point", [
        ("s", parse_complex, _REQUIRED, "evaluation point, e.g. 2 or 0.5+14.13j"),
        ("err", positive(float), 1e-12, "target absolute error"),
        SPEC,
    ]),
    "lfun-check": ("axiom checks: prime mean square, Euler product, functional equation", [
        SPEC,
        ("x", parse_floats, "100,1000,10000", "prime mean-square cut-offs"),
        ("sigma", float, 2.0, "real part for the Euler product comparison"),
        ("P", positive(float), 1e5, "Euler product prime cut-off"),
        ("points", positive(int), 10, "random strip points for the functional equation"),
    ]),
    "scan": ("density of shifts approximating g uniformly on K", [
        SPEC,
        ("region", str, "disk:0.75,0,0.03", "compact K"),
        ("k", nonneg(int), 7, "grid level"),
        ("g", str, "1", "target g(z)"),
        ("epsilon", positive(float), 0.8, "uniform tolerance"),
        ("mode", str, "faithful", "faithful | exploratory"),
        *SCAN,
    ]),
    "scan-measure": ("density of shifts approximating phi in measure on A", [
        SPEC,
        ("region", str, "rect:0.7,0.8,0.1,0.2", "measurable set A"),
        ("k", nonneg(int), 6, "grid level"),
        ("phi", str, "1", "target phi(z)"),
        ("epsilon", positive(float), 0.5, "pointwise tolerance"),
        ("measure_epsilon", positive(float), None, "area tolerance (default: epsilon)"),
        *SCAN,
    ]),
    "sequence": ("shift sequence t_n for a measurable target", [
        SPEC,
        ("region", str, "rect:0.7,0.8,0,0.1", "domain of f"),
        ("k", nonneg(int), 6, "grid level"),
        ("f", str, "1", "target f(z)"),
        ("n_max", positive(int), 2, "largest n"),
        ("T_max", positive(float), 2000.0, "largest shift"),
        ("step", positive(float), 0.05, "lattice step"),
        ("threads", positive(int), None, "worker threads"),
    ]),
    "self-approx": ("density of shifts with L(s+it) close to L(s) on K", [
        SPEC,
        ("region", str, "disk:0.75,0,0.03", "compact K"),
        ("k", nonneg(int), 7, "grid level"),
        ("epsilon", parse_floats, "0.1,0.2,0.4", "tolerances, thresholded on one scan"),
        ("t_min", float, 0.0, "first shift"),
        ("t_max", positive(float), 50.0, "last shift"),
        ("step", positive(float), 0.01, "lattice step"),
        ("threads", positive(int), None, "worker threads"),
    ]),
    "zeros-census": ("zero counts in sigma >= sigma_star over the intervals ((j-1)m, jm]", [
        SPEC,
        ("sigma_star", float, 0.6, "left edge of the counting boxes"),
        ("T", positive(float), 100.0, "height"),
        ("m", positive(float), 10.0, "interval length"),
        ("resolution", positive(float), 0.1, "initial contour sample spacing"),
    ]),
    "rouche": ("Rouche certificate on a circle", [
        ("g", str, "z - 0.75", "reference function g(z)"),
        ("f", str, "z - 0.75 + 0.05", "compared function f(z)"),
        ("center", parse_complex, 0.75, "circle centre"),
        ("radius", positive(float), 0.1, "circle radius"),
        ("nodes", positive(int), 512, "samples on the circle"),
    ]),
    "polyfree": ("zero-free polynomial approximation in measure", [
        ("region", str, "rect:0,1,0,1", "compact K"),
        ("k", nonneg(int), 5, "grid level"),
        ("g", str, "z", "target g(z)"),
        ("epsilon", positive(float), 0.1, "measure tolerance"),
        ("degree", nonneg(int), 4, "starting degree"),
        ("max_degree", nonneg(int), 60, "largest degree tried"),
    ]),
    "dirichlet-build": ("disks, shells and piecewise constant boundary data on a disk domain", [
        ("center", parse_complex, 0.0, "domain disk centre"),
        ("radius", positive(float), 1.0, "domain disk radius"),
        ("k", nonneg(int), 7, "domain grid level"),
        ("samples", positive(int), 64, "boundary samples"),
        ("phi", str, "real(z)", "boundary values phi(z)"),
        ("J", positive(int), 6, "number of disks"),
        ("radii", parse_floats, "", "radii for the density check (empty: skip)"),
    ]),
    "density": ("shell around a circle and its boundary density ratios", [
        ("center", parse_complex, 0.0, "domain disk centre"),
        ("radius", positive(float), 1.0, "domain disk radius"),
        ("k", nonneg(int), 7, "domain grid level"),
        ("samples", positive(int), 64, "boundary samples"),
        ("circle", parse_floats, "0,0,0.3", "shell circle cx,cy,r"),
        ("h", positive(float), 0.1, "lens radius h"),
        ("budget", positive(float), 0.01, "density budget"),
        ("radii", parse_floats, "1.5,1.0,0.8,0.5", "ball radii"),
        ("points", positive(int), 5, "boundary samples checked"),
    ]),
    "harmonic-demo": ("harmonic approximation in measure of a real target", [
        ("region", str, "rect:0,1,0,0.5", "domain E"),
        ("k", nonneg(int), 6, "grid level"),
        ("v", str, "where(real(z) < 0.5, 0, 1)", "real target v(z)"),
        ("n", parse_ints, "1,2,4", "values of n"),
        ("sources_per_piece", positive(int), 128, "fundamental-solution sources per piece"),
        ("degree", nonneg(int), 8, "harmonic polynomial degree"),
    ]),
}


def read_config(path: str) -> dict[str, str]:
    p = Path(path)
    if not p.exists():
        raise PreconditionError(f"config file {path!r} does not exist")
    out = {}
    for n, line in enumerate(p.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, sep, value = line.partition(":")
        if not sep:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def resolve(command: str, flags: dict[str, str], config: dict[str, str]) -> dict:
    """Defaults, then config file, then flags; every value converted and validated."""
    _, params = COMMANDS[command]
    known = {name for name, *_ in params} | {"seed", "out"}
    stray = set(config) - known
    if stray:
        raise UsageError(f"unknown config keys for {command}: {sorted(stray)}")
    out = {}
    for name, conv, default, _ in params:
        raw = flags.get(name, config.get(name, default))
        if raw is _REQUIRED:
            raise UsageError(f"{command} needs --{name.replace('_', '-')}")
        if raw is None:
            out[name] = None
            continue
        try:
            out[name] = conv(raw) if isinstance(raw, str) else raw
        except (ValueError, TypeError, SyntaxError) as exc:
            raise UsageError(f"bad value {raw!r} for {name}: {exc}") from exc
    out["seed"] = int(flags.get("seed", config.get("seed", 0)))
    return out


# --------------------------------------------------------------------------
# output helpers


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _csv(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def versions() -> dict:
    return {"zetameasure": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


class Run:
    """Collects outputs and files for one command."""

    def __init__(self, command: str, params: dict):
        self.command = command
        self.params = params
        self.outputs: dict = {}
        self.files: dict[str, str] = {}

    def summary(self) -> str:
        doc = {"command": self.command, "inputs": _jsonable(self.params), "outputs": _jsonable(self.outputs),
               "versions": versions(), "files": sorted(self.files)}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _spec(p):
    return spec_from_rule(p["spec"])


def _sampled(region: RegionMask, expr: str) -> SampledFunction:
    return SampledFunction.from_callable(region, parse_expression(expr))


def _scan_config(p, epsilon, target_error=None, mode="faithful"):
    return ScanConfig(p["t_min"], p["t_max"], p["step"], epsilon, p.get("refine_depth", 0) or 0, mode, target_error)


# --------------------------------------------------------------------------
# commands


def cmd_zeta_eval(run: Run):
    p = run.params
    res = lfun_eval(_spec(p), p["s"], p["err"])
    run.outputs.update(value=res.value, error_bound=res.error_bound, terms_used=res.terms_used)
    run.files["data.csv"] = _csv(["s_re", "s_im", "value_re", "value_im", "error_bound"],
                                 [[p["s"].real, p["s"].imag, res.value.real, res.value.imag, res.error_bound]])


def cmd_lfun_check(run: Run):
    p = run.params
    spec = _spec(p)
    rows = []
    pms = {}
    for x in p["x"]:
        v = prime_mean_square(spec, x)
        pms[repr(x)] = v
        rows.append(["prime_mean_square", x, 0.0, v])
    gap = euler_product_gap(spec, p["sigma"], p["P"])
    rows.append(["euler_product_gap", p["P"], p["sigma"], gap])
    if spec.functional_data is None:
        raise CapabilityError(f"{spec.name} carries no functional-equation data")
    rng = np.random.default_rng(p["seed"])
    sm = strip_of(spec).sigma_m
    pts = rng.uniform(sm, 1.0, p["points"]) + 1j * rng.uniform(1.0, 50.0, p["points"])
    res = [functional_equation_residual(spec, s) for s in pts]
    rows += [["fe_residual", s.real, s.imag, r] for s, r in zip(pts, res)]
    run.outputs.update(prime_mean_square=pms, euler_product_gap=gap, fe_max_residual=max(res))
    run.files["data.csv"] = _csv(["check", "a", "b", "value"], rows)


def _write_scan(run: Run, est, profile, region, config):
    run.outputs["estimate"] = asdict(est)
    run.outputs["config"] = asdict(config)
    run.files["data.csv"] = profile_to_csv(profile)
    run.files["region.mask"] = mask_to_text(region)


def cmd_scan(run: Run):
    p = run.params
    K = parse_region(p["region"], p["k"])
    g = _sampled(K, p["g"])
    cfg = _scan_config(p, p["epsilon"], mode=p["mode"])
    est, prof = density_statistic(_spec(p), K, g, cfg, p["threads"], return_profile=True)
    _write_scan(run, est, prof, K, cfg)


def cmd_scan_measure(run: Run):
    p = run.params
    A = parse_region(p["region"], p["k"])
    phi = _sampled(A, p["phi"])
    cfg = _scan_config(p, p["epsilon"])
    est, prof = measure_density_statistic(_spec(p), A, phi, p["epsilon"], cfg, p["measure_epsilon"],
                                          p["threads"], return_profile=True)
    _write_scan(run, est, prof, A, cfg)


def cmd_sequence(run: Run):
    p = run.params
    A = parse_region(p["region"], p["k"])
    res = find_shift_sequence(_spec(p), _sampled(A, p["f"]), p["n_max"], p["T_max"], p["step"], p["threads"])
    run.outputs["entries"] = [asdict(e) for e in res.entries]
    run.files["data.csv"] = _csv(
        ["n", "t_n", "sup_error", "measure_error", "found", "composite_ok", "support_area"],
        [[e.n, "" if e.t_n is None else e.t_n, e.sup_error, e.measure_error, int(e.found), int(e.composite_ok),
          e.support_area] for e in res.entries])
    run.files["region.mask"] = mask_to_text(A)


def cmd_self_approx(run: Run):
    from .lfun import shift_grid

    p = run.params
    spec = _spec(p)
    K = parse_region(p["region"], p["k"])
    eps = sorted(p["epsilon"])
    if not eps or eps[0] <= 0:
        raise UsageError("epsilon list must hold positive values")
    # one scan, thresholded at every epsilon
    cfg = _scan_config(p, eps[-1], target_error=eps[0] / 10)
    own, _ = shift_grid(spec, K.centers, [0.0], eps[0] / 100)
    est, prof = density_statistic(spec, K, SampledFunction(K, own[0]), cfg, p["threads"], return_profile=True)
    table = [{"epsilon": e, "hits": int(np.count_nonzero(prof.value < e)),
              "fraction": float(np.count_nonzero(prof.value < e) / prof.value.size)} for e in eps]
    run.outputs.update(table=table, best_t=est.best_t, best_value=est.best_value, samples=est.samples)
    run.files["data.csv"] = profile_to_csv(prof)
    run.files["region.mask"] = mask_to_text(K)


def cmd_zeros_census(run: Run):
    p = run.params
    n = p["T"] / p["m"]
    if abs(n - round(n)) > 1e-9 or round(n) < 1:
        raise UsageError("T must be a positive multiple of m")
    n = int(round(n))
    cen = interval_census(_spec(p), p["sigma_star"], p["m"], n, p["resolution"])
    rows, nu = [], 0
    for j, c in enumerate(cen.counts, 1):
        nu += c == 0
        rows.append([j, (j - 1) * p["m"], j * p["m"], c, nu / j])
    run.outputs.update(count=sum(cen.counts), nu=cen.nu, n=n, fraction=cen.fraction, counts=list(cen.counts))
    run.files["data.csv"] = _csv(["j", "t_lo", "t_hi", "count", "nu_over_j"], rows)


def cmd_rouche(run: Run):
    p = run.params
    theta = 2 * math.pi * np.arange(p["nodes"]) / p["nodes"]
    z = p["center"] + p["radius"] * np.exp(1j * theta)
    f, g = parse_expression(p["f"])(z), parse_expression(p["g"])(z)
    f, g = np.broadcast_to(f, z.shape), np.broadcast_to(g, z.shape)
    res = rouche_compare(f, g)
    run.outputs.update(certified=res.certified, winding_f=res.winding_f, winding_g=res.winding_g,
                       min_margin=float(np.min(np.abs(g) - np.abs(f - g))))
    run.files["data.csv"] = _csv(["theta", "abs_f_minus_g", "abs_g"],
                                 [[t, float(a), float(b)] for t, a, b in zip(theta, np.abs(f - g), np.abs(g))])


def cmd_polyfree(run: Run):
    p = run.params
    K = parse_region(p["region"], p["k"])
    poly, rep = zero_free_approx_in_measure(_sampled(K, p["g"]), p["epsilon"], p["degree"], p["max_degree"])
    out = asdict(rep)
    out.pop("K_eps")
    out["K_eps_area"] = rep.K_eps.area
    out["poly"] = json.loads(poly.to_json())
    run.outputs.update(out)
    run.files["data.csv"] = _csv(["power", "re", "im"], [[i, c.real, c.imag] for i, c in enumerate(poly.coefficients)])
    run.files["poly.json"] = poly.to_json() + "\n"
    run.files["K_eps.mask"] = mask_to_text(rep.K_eps)


def _disk_domain(p) -> DomainSpec:
    return DomainSpec.disk(p["center"], p["radius"], p["k"], p["samples"])


def cmd_dirichlet_build(run: Run):
    p = run.params
    U = _disk_domain(p)
    family, F, g = build_dirichlet_skeleton(U, parse_expression(p["phi"]), p["J"])
    run.outputs.update(
        disks=[[c, r] for c, r in family.disks], budgets=list(family.budgets), hs=list(family.hs),
        level=family.level, shell_areas=[s.area for s in family.shells], F_area=F.area, pieces=len(g.pieces))
    run.files["data.csv"] = _csv(["piece", "cells", "area", "value_re", "value_im"],
                                 [[i, len(m), m.area, v.real, v.imag] for i, (m, v) in enumerate(g.pieces)])
    run.files["domain.txt"] = domain_to_text(U)
    if p["radii"]:
        rows = skeleton_density_check(family, F, U, p["radii"])
        worst = min((r - b for _, _, r, b in rows if r is not None), default=float("nan"))
        run.outputs["density_min_margin"] = worst
        run.files["density.csv"] = _csv(["p_re", "p_im", "r", "ratio", "bound"],
                                        [[q.real, q.imag, r, "" if v is None else v, b] for q, r, v, b in rows])


def cmd_density(run: Run):
    p = run.params
    U = _disk_domain(p)
    cx, cy, r = p["circle"]
    shell = shell_construct((complex(cx, cy), r), U, p["budget"], p["h"])
    idx = np.linspace(0, U.boundary_samples.size - 1, min(p["points"], U.boundary_samples.size)).astype(int)
    rows = []
    for q in U.boundary_samples[idx]:
        for rad, ratio in boundary_density(shell, U, q, p["radii"]):
            rows.append([q.real, q.imag, rad, 0.0 if ratio is None else ratio])
    run.outputs.update(shell_level=shell.grid.k, shell_area=shell.area,
                       area_limit=p["budget"] * lens_area(p["h"], p["h"]),
                       max_ratio=max(row[3] for row in rows))
    run.files["data.csv"] = _csv(["p_re", "p_im", "r", "ratio"], rows)


def cmd_harmonic_demo(run: Run):
    p = run.params
    E = parse_region(p["region"], p["k"])
    v = _sampled(E, p["v"])
    if np.any(v.values.imag != 0):
        raise UsageError("harmonic targets must be real")
    res = harmonic_measure_sequence(v, ns=p["n"], sources_per_piece=p["sources_per_piece"], degree=p["degree"])
    rows = [[n, ex, 3.0 / n, fit.fit_error, len(fit.sources)] for n, (fit, ex) in zip(p["n"], res)]
    run.outputs["table"] = [dict(zip(("n", "exceedance", "bound", "fit_error", "sources"), r)) for r in rows]
    run.files["data.csv"] = _csv(["n", "exceedance", "bound", "fit_error", "sources"], rows)
    run.files["fits.json"] = json.dumps([json.loads(fit.to_json()) for fit, _ in res], sort_keys=True) + "\n"


HANDLERS = {
    "zeta-eval": cmd_zeta_eval, "lfun-check": cmd_lfun_check, "scan": cmd_scan, "scan-measure": cmd_scan_measure,
    "sequence": cmd_sequence, "self-approx": cmd_self_approx, "zeros-census": cmd_zeros_census,
    "rouche": cmd_rouche, "polyfree": cmd_polyfree, "dirichlet-build": cmd_dirichlet_build,
    "density": cmd_density, "harmonic-demo": cmd_harmonic_demo,
}


# --------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zetameasure", description="Universality-in-measure laboratory.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    for name, (help_text, params) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", default=argparse.SUPPRESS, help="key = value parameter file")
        sp.add_argument("--out", default=argparse.SUPPRESS, help="directory for summary.json and data files")
        sp.add_argument("--seed", default=argparse.SUPPRESS, help="random seed (default 0)")
        for pname, _, default, phelp in params:
            shown = "required" if default is _REQUIRED else f"default {default}"
            sp.add_argument("--" + pname.replace("_", "-"), dest=pname, default=argparse.SUPPRESS,
                            help=f"{phelp} ({shown})")
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    try:
        ns = vars(build_parser().parse_args(argv))
        command = ns.pop("command", None)
        if command is None:
            raise UsageError("no command given; see --help")
        config = read_config(ns.pop("config")) if "config" in ns else {}
        out_dir = ns.pop("out", config.pop("out", None))
        params = resolve(command, ns, config)
        job = Run(command, params)
        HANDLERS[command](job)
        text = job.summary()
        if out_dir is not None:
            d = Path(out_dir)
            d.mkdir(parents=True, exist_ok=True)
            (d / "summary.json").write_text(text)
            for fname, body in job.files.items():
                (d / fname).write_text(body)
        stdout.write(text)
        return 0
    except LabError as exc:
        err = {"error": exc.category, "message": str(exc)}
        for attr in ("required_k", "index", "best_error"):
            if getattr(exc, attr, None) is not None:
                err[attr] = _jsonable(getattr(exc, attr))
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 2 if isinstance(exc, UsageError) else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
