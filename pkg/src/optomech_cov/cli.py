"""Command line entry point ``optomech-cov``.

Subcommands: ``derive``, ``point``, ``sweep``, ``grid`` and ``oracle``. Each
reads a JSON config (a file path or the name of a shipped config such as
``paper_iv``). Exit codes: 0 success, 1 error, 2 completed with unstable
points.
"""

import argparse
from dataclasses import asdict
import io
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .config import load_config, shipped_configs
from .errors import ConfigError, OptomechError
from .lyapunov import physicality_margin, residual, solve_lyapunov
from .measures import MEASURE_COLUMNS
from .model import derive_params, validity_check
from .oracle import (SdeConfig, compare_covariances, default_sde_config,
                     integral_formula_check, integrate_ensemble)
from .steadystate import BRANCH_POLICIES, mean_field_residuals, select_branch, solve_mean_fields
from .svg import heatmap, line_chart
from .sweep import evaluate_point, grid_sw, sweep_detuning

log = logging.getLogger("optomech_cov")

EXIT_OK, EXIT_ERROR, EXIT_UNSTABLE = 0, 1, 2

MEASURE_FIELDS = ("en_b1b2", "en_b1m", "en_b2m", "s_q1", "s_p1", "s_q2", "s_p2")
MEANFIELD_FIELDS = ("alpha_re", "alpha_im", "intensity", "delta_eff_over_kappa",
                    "stable", "n_branches")
SWEEP_COLUMNS = ("delta_c_over_kappa",) + MEASURE_FIELDS + MEANFIELD_FIELDS
GRID_COLUMNS = ("omega_sw1_over_wr", "omega_sw2_over_wr") + MEASURE_FIELDS + MEANFIELD_FIELDS
DEFAULT_SWEEP = {"start": 0.0, "stop": 100.0, "steps": 201}
DEFAULT_GRID = {"omega_sw_1": (0.0, 3.0, 101), "omega_sw_2": (0.0, 3.0, 101)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _params_dict(p):
    out = asdict(p)
    if p.geometry is None:
        out["geometry"] = None
    return out


def _write_text(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OptomechError(f"cannot write {path}: {exc.strerror}") from exc


def _provenance(path, command, cfg, args):
    record = {
        "tool": "optomech-cov",
        "version": __version__,
        "command": command,
        "config_source": cfg.source,
        "config": cfg.raw,
        "resolved_params_rad_per_s": _params_dict(cfg.params),
        "branch_policy": cfg.branch_policy,
        "tolerances": cfg.tolerances,
        "cli_overrides": {k: v for k, v in vars(args).items()
                          if k in ("branch_policy", "seed", "measure") and v is not None},
    }
    _write_text(str(path) + ".provenance.json",
                json.dumps(_jsonable(record), indent=2, sort_keys=True) + "\n")


def _emit_json(report, args, cfg, command):
    text = json.dumps(_jsonable(report), indent=2) + "\n"
    sys.stdout.write(text)
    output = args.output or cfg.output
    if output:
        _write_text(output, text)
        _provenance(output, command, cfg, args)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return ""
    return format(x, ".17g")


def _row_values(row, kappa):
    m = row.measures
    values = list(row.axis)
    if m is None:
        values += [None] * len(MEASURE_FIELDS)
    else:
        values += [getattr(m, MEASURE_COLUMNS[c]) for c in MEASURE_FIELDS]
    values += [row.alpha_re, row.alpha_im, row.intensity, row.delta_eff / kappa,
               bool(row.stable), int(row.n_branches)]
    return values


def _csv(columns, result, kappa):
    buf = io.StringIO(newline="")
    buf.write(",".join(columns) + "\n")
    for row in result.rows:
        buf.write(",".join(_fmt(v) for v in _row_values(row, kappa)) + "\n")
    return buf.getvalue()


def _policy(args, cfg):
    return args.branch_policy or cfg.branch_policy


def _measure_names(args, cfg, default):
    raw = args.measure or cfg.measure
    names = default if raw is None else tuple(s.strip() for s in raw.split(",") if s.strip())
    for name in names:
        if name not in MEASURE_COLUMNS:
            raise ConfigError(f"unknown measure column {name!r}; "
                              f"expected one of {tuple(MEASURE_COLUMNS)}")
    return names


def cmd_derive(args, cfg):
    p = cfg.params
    d = derive_params(p)
    branches = solve_mean_fields(p, d, cfg.tolerances["stability_rel"])
    mf = select_branch(branches, policy="lowest" if cfg.branch_policy == "continuation"
                       else cfg.branch_policy)
    validity = validity_check(p, d, mf.intensity)
    report = {
        "params": _params_dict(p),
        "derived": asdict(d),
        "derived_over_kappa": {k: v / p.kappa for k, v in asdict(d).items()
                               if k.startswith(("zeta", "omega", "u0"))},
        "intensity": mf.intensity,
        "validity": validity.as_dict(),
    }
    _emit_json(report, args, cfg, "derive")
    return EXIT_OK


def _point_report(p, res, tolerances):
    report = {
        "params": _params_dict(p),
        "derived": asdict(res.derived),
        "branches": [asdict(b) for b in res.branches],
        "selected_index": None,
        "stable": res.stable,
        "error": res.error,
    }
    if res.selected is not None:
        report["selected_index"] = res.branches.index(res.selected)
        report["mean_field_residuals"] = mean_field_residuals(p, res.derived, res.selected)
    if res.stable:
        report["measures"] = res.measures.as_dict()
        report["lyapunov_residual"] = res.residual
        report["lyapunov_residual_ok"] = res.residual <= tolerances["lyapunov_residual"]
        report["physicality_margin"] = physicality_margin(res.covariance)
        report["covariance"] = res.covariance
    return report


def cmd_point(args, cfg):
    p = cfg.params
    res = evaluate_point(p, policy=_policy(args, cfg),
                         stability_rel=cfg.tolerances["stability_rel"])
    _emit_json(_point_report(p, res, cfg.tolerances), args, cfg, "point")
    if res.error and not res.branches:
        return EXIT_ERROR
    return EXIT_OK if res.stable else EXIT_UNSTABLE


def _write_table(args, cfg, command, text):
    output = args.output or cfg.output
    if output:
        _write_text(output, text)
        _provenance(output, command, cfg, args)
    else:
        sys.stdout.write(text)


def cmd_sweep(args, cfg):
    p = cfg.params
    spec = {**DEFAULT_SWEEP, **cfg.sweep}
    result = sweep_detuning(p, spec["start"], spec["stop"], spec["steps"],
                            policy=_policy(args, cfg),
                            stability_rel=cfg.tolerances["stability_rel"])
    _write_table(args, cfg, "sweep", _csv(SWEEP_COLUMNS, result, p.kappa))
    svg_path = args.svg or cfg.svg
    if svg_path:
        names = _measure_names(args, cfg, ("en_b1b2", "en_b1m", "en_b2m"))
        series = {n: result.column(MEASURE_COLUMNS[n]) for n in names}
        _write_text(svg_path, line_chart(result.axis_values(), series,
                                         xlabel="delta_c / kappa", ylabel=", ".join(names),
                                         title="detuning sweep"))
        _provenance(svg_path, "sweep", cfg, args)
    return EXIT_OK if all(r.stable for r in result.rows) else EXIT_UNSTABLE


def cmd_grid(args, cfg):
    p = cfg.params
    spec = {**DEFAULT_GRID, **cfg.grid}
    policy = _policy(args, cfg)
    if policy == "continuation":
        policy = "lowest"
    result = grid_sw(p, spec["omega_sw_1"], spec["omega_sw_2"], policy=policy,
                     stability_rel=cfg.tolerances["stability_rel"])
    _write_table(args, cfg, "grid", _csv(GRID_COLUMNS, result, p.kappa))
    svg_path = args.svg or cfg.svg
    if svg_path:
        (name,) = _measure_names(args, cfg, ("en_b1b2",))[:1]
        n1, n2 = int(spec["omega_sw_1"][2]), int(spec["omega_sw_2"][2])
        z = result.column(MEASURE_COLUMNS[name]).reshape(n1, n2)
        xs = np.linspace(*spec["omega_sw_1"][:2], n1)
        ys = np.linspace(*spec["omega_sw_2"][:2], n2)
        _write_text(svg_path, heatmap(xs, ys, z, xlabel="omega_sw1 / omega_R",
                                      ylabel="omega_sw2 / omega_R", title=name))
        _provenance(svg_path, "grid", cfg, args)
    return EXIT_OK if all(r.stable for r in result.rows) else EXIT_UNSTABLE


def cmd_oracle(args, cfg):
    o = dict(cfg.oracle)
    if args.seed is not None:
        o["seed"] = args.seed
    tol = cfg.tolerances
    if o["synthetic"] == "minus_identity":
        a, d = -np.eye(8), 2.0 * np.eye(8)
        point = {"synthetic": "minus_identity"}
    else:
        res = evaluate_point(cfg.params, policy=_policy(args, cfg),
                             stability_rel=tol["stability_rel"])
        if not res.stable:
            _emit_json({"error": res.error or "selected branch is unstable", "passed": False},
                       args, cfg, "oracle")
            return EXIT_UNSTABLE
        a, d = res.drift, res.diffusion
        point = {"params": _params_dict(cfg.params), "measures": res.measures.as_dict()}
    v = solve_lyapunov(a, d)
    if o["corrupt"]:
        v = v * (1.0 + float(o["corrupt"]))
    defaults = default_sde_config(a, method=o["method"], n_trajectories=int(o["n_trajectories"]),
                                  seed=int(o["seed"]))
    sde = SdeConfig(
        dt=defaults.dt if o["dt"] is None else float(o["dt"]),
        burn_in=defaults.burn_in if o["burn_in"] is None else float(o["burn_in"]),
        horizon=defaults.horizon if o["horizon"] is None else float(o["horizon"]),
        n_trajectories=defaults.n_trajectories,
        seed=defaults.seed,
        method=defaults.method,
    )
    estimate = integrate_ensemble(a, d, sde)
    ensemble = compare_covariances(v, estimate, n_se=tol["oracle_n_se"],
                                   diag_rel=tol["oracle_diag_rel"])
    integral = integral_formula_check(a, d)
    integral_rel = float(np.linalg.norm(integral - v) / np.linalg.norm(integral))
    report = {
        **point,
        "lyapunov_residual": residual(a, d, v),
        "sde_config": asdict(sde),
        "ensemble": ensemble,
        "integral_rel_dev": integral_rel,
        "integral_ok": integral_rel <= tol["integral_rel"],
        "lyapunov": v,
        "ensemble_cov": estimate.cov,
        "ensemble_stderr": estimate.stderr,
    }
    report["passed"] = bool(ensemble["passed"] and report["integral_ok"])
    _emit_json(report, args, cfg, "oracle")
    return EXIT_OK if report["passed"] else EXIT_ERROR


COMMANDS = {
    "derive": cmd_derive,
    "point": cmd_point,
    "sweep": cmd_sweep,
    "grid": cmd_grid,
    "oracle": cmd_oracle,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="optomech-cov",
        description="Steady-state entanglement and squeezing of a membrane-in-the-middle "
                    "cavity with two condensates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("command", choices=tuple(COMMANDS))
    parser.add_argument("--config", required=True,
                        help="JSON config path or shipped name: " + ", ".join(shipped_configs()))
    parser.add_argument("--output", help="output file (CSV or JSON)")
    parser.add_argument("--svg", help="SVG plot path (sweep, grid)")
    parser.add_argument("--measure", help="measure column(s) to plot, comma separated")
    parser.add_argument("--branch-policy", choices=BRANCH_POLICIES)
    parser.add_argument("--seed", type=int, help="oracle seed override")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_ERROR
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except (OptomechError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
