"""Command-line entry point.

Exit codes: 0 success, 1 a check failed, 2 unparseable input,
3 invalid parameters, 4 numerical failure (convergence, truncation,
singularity). ``QXFORM_OUT`` redirects relative output paths (and default
outputs) into a directory.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import ermakov, scenarios
from .errors import NumericalError, QxformError, ValidationError
from .output import OutputError, emit_csv, emit_json, json_text, resolve_path, write_text
from .selftest import Check, run_selftest

log = logging.getLogger("qxform")

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3, 4


class ParseError(QxformError):
    pass


SCHEMA = {
    "schedule": {
        "constant": {"type": "constant", "nu0": "float > 0"},
        "quench": {"type": "quench", "nu1": "float > 0", "nu2": "float > 0", "t_switch": "float"},
        "tabulated": {"type": "tabulated", "times": "[float] increasing", "values": "[float >= 0]"},
    },
    "ion-single": {
        "nu0": "float", "Omega": "float", "eta0": "float", "n_fock": "int >= 4",
        "delta": "float (default 0)", "schedule": "schedule (default constant nu0)",
        "t": "float, linearize-check time", "t_final": "float, dynamics", "steps": "int",
        "samples": "int", "initial": {"internal": "e|g", "fock": "int"},
        "beta_convention": "printed|conjugate-rate", "pad": "int (default 16)",
    },
    "ion-many": {"nu": "float", "delta": "float", "Omegas": "[float]", "etas": "[float]", "n_fock": "int"},
    "ion-2d": {"nu_x": "float", "nu_y": "float", "delta": "float", "Omega": "float",
               "eta_x": "float", "eta_y": "float", "n_x": "int", "n_y": "int"},
    "slow-atom": {
        "grid": {"points": "int >= 8", "length": "float"},
        "mode": {"kind": "constant|sinusoidal|gaussian", "g0": "float", "k_mode": "float",
                 "x_center": "float", "width": "float"},
        "n_fock": "int", "omega": "float", "omega0": "float (= omega)", "kinetic": "spectral|central",
        "initial": {"internal": "e|g", "fock": "int",
                    "packet": {"type": "gaussian|plane", "x0": "float", "sigma": "float", "k0": "float", "m": "int"}},
    },
    "kerr": {
        "chi": "float", "gamma": "float >= 0", "n_fock": "int >= 2", "steps": "int (RK4 steps per interval)",
        "initial": {"type": "fock|coherent|matrix", "n": "int", "alpha": "float or [re, im]",
                    "matrix": {"dim": "int", "entries": "[[re, im], ...]"}},
    },
    "scenario": {
        "system": "ermakov|ion-single|ion-many|ion-2d|slow-atom|kerr",
        "params": "system config (see above); ermakov takes schedule/eta0/rho0/rho_dot0/nu0",
        "time": {"t0": "float", "t1": "float", "samples": "int >= 2"},
        "output": {"format": "csv|json", "path": "file path", "report": "report path (optional)"},
        "checks": {"<check name>": "threshold override"},
    },
}


# ---------------------------------------------------------------------------
# helpers


def load_json(arg: str, what: str = "config"):
    """Inline JSON (starting with ``{``) or a path to a JSON file."""
    text = arg
    if not arg.lstrip().startswith("{"):
        try:
            text = Path(arg).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {what} {arg}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what} is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError(f"{what} must be a JSON object")
    return obj


def _csv_out(args, header, rows, default_name):
    path = resolve_path(getattr(args, "out", None), default_name)
    written = emit_csv(header, rows, path, sys.stdout)
    if written:
        print(written, file=sys.stderr)


def _json_out(args, obj, default_name):
    path = resolve_path(getattr(args, "out", None), default_name)
    written = emit_json(obj, path, sys.stdout)
    if written:
        print(written, file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands
#
# Every flag may also come from the --config object (flags win). Keys use the
# flag names with dashes replaced by underscores.

_REQUIRED = object()


def _config(args):
    cfg = load_json(args.config) if getattr(args, "config", None) else {}
    if getattr(args, "out", None) is None and isinstance(cfg.get("out"), str):
        args.out = cfg["out"]
    return cfg


def _opt(args, cfg, name, default=_REQUIRED, kind=float):
    val = getattr(args, name, None)
    if val is None:
        val = cfg.get(name, default)
    if val is _REQUIRED:
        raise ValidationError(f"{name}: required (flag --{name.replace('_', '-')} or config key)")
    if val is None:
        return None
    try:
        return kind(val)
    except (TypeError, ValueError):
        raise ValidationError(f"{name}: invalid value {val!r}") from None


def cmd_ermakov_solve(args):
    cfg = _config(args)
    schedule = load_json(args.schedule, "schedule") if args.schedule else cfg.get("schedule")
    if not isinstance(schedule, dict):
        raise ValidationError("schedule: required (flag --schedule or config key)")
    header, rows, _ = scenarios.ermakov_solve(
        schedule, _opt(args, cfg, "t0", 0.0), _opt(args, cfg, "t1"), _opt(args, cfg, "samples", 101, int),
        eta0=_opt(args, cfg, "eta0", 0.1), rho0=_opt(args, cfg, "rho0", None),
        rho_dot0=_opt(args, cfg, "rho_dot0", 0.0), nu0=_opt(args, cfg, "nu0", None),
    )
    _csv_out(args, header, rows, "ermakov_solve.csv")
    return EXIT_OK


def cmd_ion_linearize(args):
    cfg = _config(args)
    system = _opt(args, cfg, "system", kind=str)
    if system not in ("single", "many", "2d"):
        raise ValidationError(f"system: expected single, many or 2d, got {system!r}")
    report = scenarios.ion_linearize_check(system, cfg)
    _json_out(args, report, f"ion_linearize_{system}.json")
    return EXIT_OK


def cmd_ion_dynamics(args):
    header, rows, _ = scenarios.ion_dynamics(_config(args))
    _csv_out(args, header, rows, "ion_dynamics.csv")
    return EXIT_OK


def cmd_slow_propagate(args):
    cfg = _config(args)
    report, rows = scenarios.slow_atom_propagate(cfg, _opt(args, cfg, "t"), _opt(args, cfg, "samples", None, int))
    _json_out(args, report, "slow_atom.json")
    if rows is not None:
        path = resolve_path(_opt(args, cfg, "csv", "slow_atom.csv", str))
        print(emit_csv(scenarios.SLOW_HEADER, rows, path), file=sys.stderr)
    return EXIT_OK


def cmd_kerr_evolve(args):
    cfg = _config(args)
    _json_out(args, scenarios.kerr_evolve(cfg, _opt(args, cfg, "t")), "kerr_evolve.json")
    return EXIT_OK


def cmd_kerr_compare(args):
    cfg = _config(args)
    header, rows, _ = scenarios.kerr_compare(
        cfg, _opt(args, cfg, "t0", 0.0), _opt(args, cfg, "t1"), _opt(args, cfg, "samples", 11, int))
    _csv_out(args, header, rows, "kerr_compare.csv")
    return EXIT_OK


def cmd_selftest(args):
    report = run_selftest(args.section or None)
    _json_out(args, report, "selftest.json")
    for c in report["checks"]:
        flag = "PASS" if c["passed"] else ("FAIL" if c["gating"] else "note")
        print(f"{flag:4s} {c['name']}: {c['value']:.3e} (< {c['threshold']:.0e})", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_CHECK


# ---------------------------------------------------------------------------
# scenario runner

SYSTEMS = ("ermakov", "ion-single", "ion-many", "ion-2d", "slow-atom", "kerr")


def validate_scenario(cfg: dict) -> dict:
    system = cfg.get("system")
    if system not in SYSTEMS:
        raise ValidationError(f"system: expected one of {SYSTEMS}, got {system!r}")
    if not isinstance(cfg.get("params", {}), dict):
        raise ValidationError("params: must be an object")
    tm = cfg.get("time", {})
    for key in ("t0", "t1", "samples"):
        if key not in tm:
            raise ValidationError(f"time.{key}: missing")
    try:
        t0, t1, samples = float(tm["t0"]), float(tm["t1"]), int(tm["samples"])
    except (TypeError, ValueError):
        raise ValidationError("time: t0, t1 must be numbers and samples an integer") from None
    if samples < 2:
        raise ValidationError("time.samples: must be >= 2")
    if t1 < t0:
        raise ValidationError("time.t1: must be >= time.t0")
    fmt = cfg.get("output", {}).get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ValidationError(f"output.format: expected csv or json, got {fmt!r}")
    # build the parameter objects now so bad params fail before any computation
    params = cfg.get("params", {})
    builders = {
        "ion-single": scenarios.ion_single_params,
        "ion-many": scenarios.many_params,
        "ion-2d": scenarios.two_d_params,
        "slow-atom": scenarios.slow_system,
        "kerr": scenarios.kerr_params,
        "ermakov": lambda p: ermakov.schedule_from_dict(p.get("schedule", {})),
    }
    builders[system](params)
    return cfg


def scenario_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def run_scenario(cfg: dict, default_path=None, stream=None) -> dict:
    """Validate, compute, write outputs and return the run report."""
    validate_scenario(cfg)
    start = time.perf_counter()
    system = cfg["system"]
    params = dict(cfg.get("params", {}))
    tm = cfg["time"]
    t0, t1, samples = float(tm["t0"]), float(tm["t1"]), int(tm["samples"])
    out = cfg.get("output", {})
    fmt = out.get("format", "csv")
    thresholds = cfg.get("checks", {})
    checks = []
    payload_rows = header = payload = None

    def check(name, value, default):
        checks.append(Check(name, float(value), float(thresholds.get(name, default))))

    if system == "ermakov":
        header, payload_rows, sol = scenarios.ermakov_solve(
            params.get("schedule", {}), t0, t1, samples, eta0=float(params.get("eta0", 0.1)),
            rho0=params.get("rho0"), rho_dot0=float(params.get("rho_dot0", 0.0)), nu0=params.get("nu0"),
        )
        if samples >= 5:
            check("ermakov.residual", ermakov.max_residual(sol), 1e-8)
        check("ermakov.min_rho_inverse", 1.0 / float(np.min(sol.rho)), 1e6)
    elif system == "ion-single":
        params.setdefault("t_final", t1)
        params.setdefault("samples", samples)
        header, payload_rows, res = scenarios.ion_dynamics(params)
        check("ion.infidelity", res.infidelity, 1e-6)
        check("ion.leakage", res.leakage, 1e-8)
    elif system in ("ion-many", "ion-2d"):
        payload = scenarios.ion_linearize_check("many" if system == "ion-many" else "2d", params)
        check(f"{system}.spectrum", payload["spectrum_distance"], 1e-6)
    elif system == "slow-atom":
        payload, payload_rows = scenarios.slow_atom_propagate(params, t1, samples)
        header = scenarios.SLOW_HEADER
        check("slow.deviation", max(r[4] for r in payload_rows), 1e-6)
        check("slow.norm", max(abs(r[3] - 1.0) for r in payload_rows), 1e-9)
    elif system == "kerr":
        header, payload_rows, rows = scenarios.kerr_compare(params, t0, t1, samples)
        check("kerr.max_abs_diff", max(r["max_abs_diff"] for r in rows), 1e-6)
        check("kerr.trace", max(abs(r["trace_analytic"] - 1.0) for r in rows), 1e-10)

    outputs = []
    path = resolve_path(out.get("path", default_path), f"{system}.{fmt}")
    if fmt == "csv" and payload_rows is not None:
        emit_csv(header, payload_rows, path, stream)
    else:
        obj = payload if payload is not None else {"columns": list(header), "rows": [list(r) for r in payload_rows]}
        emit_json(obj, path, stream)
    if path is not None:
        outputs.append(str(path))

    report = {
        "scenario_hash": scenario_hash(cfg),
        "system": system,
        "passed": all(c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
        "outputs": outputs,
        "wall_time_s": time.perf_counter() - start,
    }
    return report


def _run_one(item):
    idx, cfg, multi = item
    fmt = cfg.get("output", {}).get("format", "csv")
    default = f"{cfg.get('system')}_{idx}.{fmt}" if multi else None
    try:
        return run_scenario(cfg, default, None if multi else sys.stdout)
    except QxformError as exc:
        code = EXIT_VALIDATION if isinstance(exc, ValidationError) else EXIT_NUMERIC
        return {"scenario_hash": scenario_hash(cfg), "system": cfg.get("system"), "passed": False,
                "error": f"{type(exc).__name__}: {exc}", "exit_code": code, "checks": [], "outputs": []}


def cmd_run(args):
    """Single scenario object, or ``{"scenarios": [...]}`` run in order (or with --jobs)."""
    cfg = load_json(args.config, "scenario")
    multi = "scenarios" in cfg
    items = cfg["scenarios"] if multi else [cfg]
    if not isinstance(items, list) or not all(isinstance(c, dict) for c in items):
        raise ValidationError("scenarios: must be a list of objects")
    if not multi:
        validate_scenario(cfg)
    else:
        for k, c in enumerate(items):
            try:
                validate_scenario(c)
            except ValidationError as exc:
                raise ValidationError(f"scenarios[{k}].{exc}") from None
        paths = [c.get("output", {}).get("path") for c in items]
        named = [p for p in paths if p is not None]
        if len(set(named)) != len(named):
            raise ValidationError("scenarios: output paths must be distinct")
    work = [(k, c, multi) for k, c in enumerate(items)]
    if multi and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_one, work))
    else:
        reports = [_run_one(w) if multi else run_scenario(cfg, stream=sys.stdout) for w in work]
    for r in reports:
        status = "ok" if r["passed"] else r.get("error", "CHECK FAILED")
        print(f"{r['system']}: {status} in {r.get('wall_time_s', 0.0):.2f}s", file=sys.stderr)
    report = {"passed": all(r["passed"] for r in reports), "scenarios": reports} if multi else reports[0]
    rpath = resolve_path(args.report or cfg.get("output", {}).get("report") or cfg.get("report"))
    if rpath is not None:
        write_text(json_text(report), rpath)
    else:
        sys.stderr.write(json_text(report))
    codes = [r.get("exit_code", EXIT_OK if r["passed"] else EXIT_CHECK) for r in reports]
    return max(codes)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qxform", description=__doc__.splitlines()[0])
    p.add_argument("--describe", action="store_true", help="print the config schema and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="group")

    erm = sub.add_parser("ermakov").add_subparsers(dest="action", required=True)
    s = erm.add_parser("solve", help="integrate the Ermakov equation, CSV out")
    s.add_argument("--config", help="JSON object supplying any of the flags below")
    s.add_argument("--schedule", help="schedule JSON (inline or file)")
    s.add_argument("--t0", type=float, help="default 0")
    s.add_argument("--t1", type=float)
    s.add_argument("--samples", type=int, help="default 101")
    s.add_argument("--eta0", type=float, help="default 0.1")
    s.add_argument("--rho0", type=float)
    s.add_argument("--rho-dot0", dest="rho_dot0", type=float, help="default 0")
    s.add_argument("--nu0", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_ermakov_solve)

    ion = sub.add_parser("ion").add_subparsers(dest="action", required=True)
    s = ion.add_parser("linearize-check", help="printed vs computed linearized Hamiltonian, JSON out")
    s.add_argument("--system", choices=("single", "many", "2d"))
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_ion_linearize)
    s = ion.add_parser("dynamics", help="rotating vs linearized frame propagation, CSV out")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_ion_dynamics)

    slow = sub.add_parser("slow-atom").add_subparsers(dest="action", required=True)
    s = slow.add_parser("propagate", help="factorized propagator vs direct expm, JSON out")
    s.add_argument("--config", required=True)
    s.add_argument("--t", type=float)
    s.add_argument("--samples", type=int, help="also write a CSV time series")
    s.add_argument("--csv", default=None, help="path for the --samples CSV")
    s.add_argument("--out")
    s.set_defaults(func=cmd_slow_propagate)

    kr = sub.add_parser("kerr").add_subparsers(dest="action", required=True)
    s = kr.add_parser("evolve", help="closed-form density matrix at t, JSON out")
    s.add_argument("--config", required=True)
    s.add_argument("--t", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_kerr_evolve)
    s = kr.add_parser("compare", help="closed form vs RK4, CSV out")
    s.add_argument("--config", required=True)
    s.add_argument("--t0", type=float, help="default 0")
    s.add_argument("--t1", type=float)
    s.add_argument("--samples", type=int, help="default 11")
    s.add_argument("--out")
    s.set_defaults(func=cmd_kerr_compare)

    s = sub.add_parser("selftest", help="run the invariant suite, JSON report")
    s.add_argument("--section", action="append", choices=("fock", "ermakov", "ion", "slow", "kerr"))
    s.add_argument("--out")
    s.set_defaults(func=cmd_selftest)

    s = sub.add_parser("run", help="run a scenario config")
    s.add_argument("--config", required=True)
    s.add_argument("--report", default=None)
    s.add_argument("--jobs", type=int, default=1, help="parallel workers for a scenario list")
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.describe:
        sys.stdout.write(json_text(SCHEMA))
        return EXIT_OK
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
