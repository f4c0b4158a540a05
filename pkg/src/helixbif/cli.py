"""Command line front end.

Settings come from, in increasing priority: built-in defaults, a JSON
config file (``--config``), command line flags.  Every command writes into
``--out``; failures map to exit codes 2 (config), 3 (divergence),
4 (domain), 5 (I/O).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, checks, continuation, evolve, export, kida, reconstruct, spectral
from .errors import ConfigError, DomainError, HelixBifError
from .fourier import FourierProfile
from .operator import Geometry, ProblemParams

log = logging.getLogger("helixbif")

COMMANDS = ("eigenvalues", "kernel", "bifurcate", "reconstruct", "check-steady",
            "kida-check", "verify")

DEFAULTS = {
    "geometry": "euclidean",
    "a": 0.0,
    "m": 1,
    "n": None,
    "branch": "minus",
    "eta_max": 0.05,
    "eta": None,
    "steps": 10,
    "direction": 1,
    "M": 64,
    "tol": 1e-11,
    "out": "out",
    "format": "csv",
    "nmax": 10,
    "R": None,
    "t": 0.0,
    "J": 256,
    "periods": 1,
    "t_final": 0.1,
    "dt": 1e-4,
    "grid": 201,
    "criteria": None,
    "figures": False,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with default settings")
    common.add_argument("--geometry", choices=("euclidean", "hyperbolic"))
    common.add_argument("--a", type=float, help="slip speed")
    common.add_argument("--M", type=int, help="Fourier truncation")
    common.add_argument("--tol", type=float, help="Newton tolerance")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--figures", action="store_true", help="also render PNG figures")
    common.add_argument("-v", "--verbose", action="count", default=0)

    solution = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    solution.add_argument("--m", type=int, help="fold / bifurcation mode")
    solution.add_argument("--branch", choices=("plus", "minus"))
    solution.add_argument("--R", type=float, help="radius of a trivial helix (no branch)")
    solution.add_argument("--eta", type=float, help="amplitude of the branch point")
    solution.add_argument("--steps", type=int, help="continuation steps up to eta")

    parser = argparse.ArgumentParser(prog="helixbif", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigenvalues", parents=[common], argument_default=argparse.SUPPRESS, help="table of eigen radii")
    p.add_argument("--nmax", type=int)

    p = sub.add_parser("kernel", parents=[common], argument_default=argparse.SUPPRESS, help="kernel direction at one eigenpair")
    p.add_argument("--n", type=int)
    p.add_argument("--branch", choices=("plus", "minus"))

    p = sub.add_parser("bifurcate", parents=[common], argument_default=argparse.SUPPRESS, help="trace a bifurcating branch")
    p.add_argument("--m", type=int)
    p.add_argument("--branch", choices=("plus", "minus"))
    p.add_argument("--eta-max", dest="eta_max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--direction", type=int, choices=(1, -1))

    p = sub.add_parser("reconstruct", parents=[common, solution], argument_default=argparse.SUPPRESS, help="tangent and filament")
    p.add_argument("--t", type=float, help="time of evaluation")
    p.add_argument("--J", type=int, help="nodes per 2 pi")
    p.add_argument("--periods", type=int)

    p = sub.add_parser("check-steady", parents=[common, solution], argument_default=argparse.SUPPRESS, help="time-stepping check")
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--dt", type=float)

    p = sub.add_parser("kida-check", parents=[common, solution], argument_default=argparse.SUPPRESS, help="compare with Kida's family")
    p.add_argument("--grid", type=int, help="points per axis of the (A, V) grid")

    p = sub.add_parser("verify", parents=[common], argument_default=argparse.SUPPRESS, help="run the acceptance suite")
    p.add_argument("--criteria", help="comma-separated subset, e.g. 1,3,5")
    return parser


def resolve(ns: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags; validate."""
    cfg = dict(DEFAULTS)
    flags = vars(ns)
    path = flags.get("config")
    if path:
        try:
            loaded = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config field {key!r}")
            cfg[key] = value
    for key, value in flags.items():
        if key in DEFAULTS:
            cfg[key] = value
    cfg["command"] = flags["command"]
    cfg["verbose"] = flags.get("verbose", 0)
    _validate(cfg)
    return cfg


def _number(cfg, key, kind, positive=False, allow_none=False):
    value = cfg[key]
    if value is None and allow_none:
        return
    try:
        if kind is int and (isinstance(value, bool) or float(value) != int(value)):
            raise ValueError
        cfg[key] = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"field {key!r} must be {kind.__name__}, got {value!r}") from None
    if not math.isfinite(cfg[key]):
        raise ConfigError(f"field {key!r} must be finite")
    if positive and cfg[key] <= 0:
        raise ConfigError(f"field {key!r} must be positive, got {cfg[key]!r}")


def _validate(cfg: dict) -> None:
    try:
        cfg["geometry"] = Geometry.parse(cfg["geometry"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    if cfg["branch"] not in ("plus", "minus"):
        raise ConfigError(f"field 'branch' must be plus or minus, got {cfg['branch']!r}")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"field 'format' must be csv or json, got {cfg['format']!r}")
    _number(cfg, "a", float)
    for key in ("m", "M", "steps", "nmax", "J", "periods", "grid"):
        _number(cfg, key, int, positive=True)
    _number(cfg, "n", int, positive=True, allow_none=True)
    for key in ("tol", "t_final", "dt", "eta_max"):
        _number(cfg, key, float, positive=True)
    _number(cfg, "eta", float, allow_none=True)
    _number(cfg, "R", float, positive=True, allow_none=True)
    _number(cfg, "t", float)
    _number(cfg, "direction", int)
    if cfg["direction"] not in (1, -1):
        raise ConfigError("field 'direction' must be 1 or -1")
    if cfg["M"] < cfg["m"]:
        raise ConfigError(f"truncation M={cfg['M']} is below the fold m={cfg['m']}")
    if cfg["eta"] is not None and cfg["eta"] == 0.0:
        raise ConfigError("field 'eta' must be nonzero; use --R for the trivial helix")
    crit = cfg["criteria"]
    if crit is not None:
        try:
            items = crit.split(",") if isinstance(crit, str) else list(crit)
            cfg["criteria"] = sorted({int(c) for c in items})
        except (TypeError, ValueError):
            raise ConfigError(f"field 'criteria' must list integers, got {crit!r}") from None
        if not set(cfg["criteria"]) <= set(checks.CRITERIA):
            raise ConfigError("criteria must lie in 1..11")
    if cfg["R"] is not None:
        # Hyperbolic with R >= 1 and similar combinations are domain errors
        ProblemParams(cfg["geometry"], cfg["a"], cfg["R"], m=1, M=cfg["M"])


def meta(cfg: dict) -> dict:
    return {"geometry": cfg["geometry"].value, "a": cfg["a"], "m": cfg["m"], "M": cfg["M"],
            "tol": cfg["tol"], "command": cfg["command"]}


def _outdir(cfg) -> Path:
    return Path(cfg["out"])


def _table(path_stem: Path, cfg, obj) -> Path:
    suffix = "." + cfg["format"]
    return export.export(obj, cfg["format"], path_stem.with_suffix(suffix), meta(cfg))


def _pair(cfg, n=None) -> spectral.EigenRadius:
    n = cfg["m"] if n is None else n
    pair = spectral.eigenpair(n, cfg["geometry"], cfg["a"], cfg["branch"])
    if not pair.admissible:
        raise DomainError(f"no admissible {cfg['branch']} eigenvalue at n={n} "
                          f"({cfg['geometry'].value}, a={cfg['a']})")
    return pair


# commands --------------------------------------------------------------------

def cmd_eigenvalues(cfg):
    rows = []
    for n in range(1, cfg["nmax"] + 1):
        for e in spectral.eigen_radii(n, cfg["geometry"], cfg["a"]):
            row = {"n": n, "branch": e.branch, "R": e.R, "admissible": e.admissible,
                   "transversal": None, "transversal_check": None}
            if e.admissible:
                row["transversal"] = spectral.transversality_ok(n, e.geometry, e.a, e.R).satisfied
                row["transversal_check"] = spectral.transversality_operator(n, e.geometry, e.a, e.R)[0]
            rows.append(row)
    path = _table(_outdir(cfg) / "eigenvalues", cfg, rows)
    print(f"{'n':>4} {'branch':>6} {'R':>22} {'admissible':>10} {'transversal':>11} {'check':>6}")
    for r in rows:
        print(f"{r['n']:>4} {r['branch']:>6} {export.fmt(r['R']):>22} {export.fmt(r['admissible']):>10} "
              f"{export.fmt(r['transversal']):>11} {export.fmt(r['transversal_check']):>6}")
    print(f"wrote {path}")


def cmd_kernel(cfg):
    n = cfg["n"] or cfg["m"]
    pair = _pair(cfg, n)
    beta, h = spectral.kernel_vector(n, pair.geometry, pair.a, pair.R, cfg["M"])
    p = ProblemParams(pair.geometry, pair.a, pair.R, M=cfg["M"])
    data = [{"n": n, "branch": pair.branch, "R": pair.R, "beta": beta,
             "kernel_residual": reconstruct_norm(p, h),
             "range_defect_of_kernel": spectral.range_defect(h, n, pair.geometry, pair.a, pair.R),
             "coefficients": {str(k): v for k, v in sorted(h.as_dict().items())}}]
    path = export.write_json(_outdir(cfg) / "kernel.json", meta(cfg), data)
    print(f"n={n} R={export.fmt(pair.R)} beta={export.fmt(beta)}")
    print(f"wrote {path}")


def reconstruct_norm(p, h):
    from .operator import apply_linearized
    return apply_linearized(p, h).norm()


def _trace(cfg, eta_target=None):
    pair = _pair(cfg)
    eta = cfg["eta_max"] if eta_target is None else abs(eta_target)
    direction = cfg["direction"] if eta_target is None else (1 if eta_target > 0 else -1)
    return continuation.trace_branch(pair, eta, cfg["steps"], tol=cfg["tol"], m=cfg["m"],
                                     M=cfg["M"], direction=direction)


def _solution(cfg):
    """Trivial helix (--R) or a converged branch point (--eta)."""
    if cfg["R"] is not None:
        p = ProblemParams(cfg["geometry"], cfg["a"], cfg["R"], m=cfg["m"], M=cfg["M"])
        return p, FourierProfile.zeros(cfg["M"], cfg["m"])
    if cfg["eta"] is None:
        raise ConfigError("give --R for a trivial helix or --eta for a branch point")
    point = _trace(cfg, cfg["eta"]).points[-1]
    return point.params, point.f


def cmd_bifurcate(cfg):
    out = _outdir(cfg)
    branch = _trace(cfg)
    m = meta(cfg)
    export.write_csv(out / "branch.csv", m, export.BRANCH_HEADER, export.branch_rows(branch))
    for k, point in enumerate(branch.points, start=1):
        sample = reconstruct.curve_from_tangent(point)
        export.write_csv(out / "profiles" / f"profile_{k:03d}.csv", m, export.PROFILE_HEADER,
                         export.profile_rows(sample))
    lam0, R0 = continuation.extrapolate_to_zero(branch)
    last = branch.points[-1]
    summary = [{
        "n": branch.eigenpair.n, "branch": branch.eigenpair.branch, "R_star": branch.eigenpair.R,
        "direction": branch.direction, "points": len(branch.points),
        "max_residual": max(p.residual_inf for p in branch.points),
        "max_independent_residual": max(continuation.independent_residual(p) for p in branch.points),
        "lambda_extrapolated": lam0, "R_extrapolated": R0,
        "warnings": sorted({w for p in branch.points for w in p.warnings}),
        "final_coefficients": {str(k): v for k, v in sorted(last.f.as_dict().items())},
    }]
    export.write_json(out / "summary.json", m, summary)
    if cfg["figures"]:
        from . import figures
        figures.plot_branch(branch, out / "branch.png")
        figures.plot_profile(reconstruct.curve_from_tangent(last), out / "profile_last.png",
                             f"eta = {last.eta:g}")
    print(f"traced {len(branch.points)} points, R* = {export.fmt(branch.eigenpair.R)}, "
          f"final R = {export.fmt(last.R)}, lambda = {export.fmt(last.lam)}")
    print(f"wrote {out / 'branch.csv'}")


def cmd_reconstruct(cfg):
    sol = _solution(cfg)
    sample = reconstruct.curve_from_tangent(sol, cfg["t"], cfg["J"], cfg["periods"])
    out = _outdir(cfg)
    path = export.write_csv(out / "profile.csv", meta(cfg), export.PROFILE_HEADER,
                            export.profile_rows(sample))
    if cfg["figures"]:
        from . import figures
        figures.plot_profile(sample, out / "profile.png")
    print(f"wrote {path}")


def cmd_check_steady(cfg):
    params, f = _solution(cfg)
    err = evolve.steadiness_error((params, f), params.omega, params.a, cfg["t_final"], cfg["dt"],
                                  params.geometry)
    data = [{"Omega": params.omega, "a": params.a, "R": params.R, "t_final": cfg["t_final"],
             "dt": cfg["dt"], "steadiness_error": err}]
    path = export.write_json(_outdir(cfg) / "steady.json", meta(cfg), data)
    print(f"steadiness error {err:.3e}")
    print(f"wrote {path}")


def cmd_kida_check(cfg):
    if cfg["geometry"] is not Geometry.EUCLIDEAN:
        raise DomainError("the Kida comparison is defined for the Euclidean case only")
    params, f = _solution(cfg)
    W, a = params.omega, params.a
    sample = reconstruct.curve_from_tangent((params, f), J=cfg["J"])
    helix = reconstruct.curve_from_tangent(
        (params, FourierProfile.zeros(params.M, params.m)), J=cfg["J"])
    fitted, helix_defect = kida.fit_helix_parameters(helix, W, a)
    # a helix is screw invariant: another slip may fit where this one cannot
    loose, loose_defect = kida.fit_helix_parameters(helix, W, a, free_slip=True)
    margin = kida.separation_margin(sample, W, a, (fitted.A, fitted.V), n=cfg["grid"])
    data = [{"Omega": W, "a": a, "modulus_variation": kida.modulus_variation(sample.z0),
             "helix_A": fitted.A, "helix_V": fitted.V, "helix_defect": helix_defect,
             "helix_free_slip": loose.a, "helix_free_slip_defect": loose_defect,
             "margin": margin.margin, "margin_A": margin.A, "margin_V": margin.V,
             "grid_step_A": margin.dA, "grid_step_V": margin.dV,
             "cubic": list(kida.beta_cubic(fitted.A, fitted.V, W, a))}]
    path = export.write_json(_outdir(cfg) / "kida.json", meta(cfg), data)
    print(f"modulus variation {data[0]['modulus_variation']:.3e}, "
          f"helix defect {helix_defect:.3e}, grid margin {margin.margin:.3e}")
    print(f"wrote {path}")


def cmd_verify(cfg):
    crit = cfg["criteria"] or sorted(checks.CRITERIA)
    results = checks.run(crit, include_verify=False)
    for c in results:
        print(c.line())
    rows = [(c.criterion, c.name, c.passed, c.value, c.relation, c.threshold) for c in results]
    path = export.write_csv(_outdir(cfg) / "verify.csv", meta(cfg),
                            ["criterion", "check", "passed", "value", "relation", "threshold"], rows)
    failed = sum(not c.passed for c in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    print(f"wrote {path}")
    return 0 if failed == 0 else 1


HANDLERS = {
    "eigenvalues": cmd_eigenvalues, "kernel": cmd_kernel, "bifurcate": cmd_bifurcate,
    "reconstruct": cmd_reconstruct, "check-steady": cmd_check_steady,
    "kida-check": cmd_kida_check, "verify": cmd_verify,
}


def dispatch(cfg: dict) -> int:
    return HANDLERS[cfg["command"]](cfg) or 0


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(getattr(ns, "verbose", 0), 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(ns)
        return dispatch(cfg)
    except HelixBifError as exc:
        category = type(exc).__name__
        print(f"error [{category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"error [DivergenceError]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
