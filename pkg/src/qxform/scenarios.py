"""Config dicts -> parameter objects -> result tables.

Shared by the CLI subcommands and by ``qxform run``. Every function here
takes plain JSON-like dicts and returns plain data (rows, dicts) so the
callers only deal with formatting.
"""

from __future__ import annotations

import math

import numpy as np

from . import ermakov, ion_laser, kerr, slow_atom
from .errors import ParameterError
from .fock import basis, kron, matrix_to_json

_REQUIRED = object()


def get(cfg: dict, key: str, default=_REQUIRED, kind=float):
    if key not in cfg:
        if default is _REQUIRED:
            raise ParameterError(f"missing required field '{key}'")
        return default
    try:
        return kind(cfg[key])
    except (TypeError, ValueError):
        raise ParameterError(f"field '{key}' has invalid value {cfg[key]!r}") from None


# ---------------------------------------------------------------------------
# ermakov

ERMAKOV_HEADER = ("t", "rho", "rho_dot", "omega_tilde", "eta", "beta_re", "beta_im")


def ermakov_solve(schedule: dict, t0: float, t1: float, samples: int, eta0=0.1, rho0=None,
                  rho_dot0=0.0, nu0=None):
    if samples < 2:
        raise ParameterError("samples must be >= 2")
    sched = ermakov.schedule_from_dict(schedule)
    sol = ermakov.solve_ermakov(sched, np.linspace(t0, t1, samples), rho0=rho0, rho_dot0=rho_dot0, nu0=nu0)
    return ERMAKOV_HEADER, list(ermakov.csv_rows(sol, eta0)), sol


# ---------------------------------------------------------------------------
# ion-laser


def ion_single_params(cfg: dict) -> ion_laser.IonLaserParams:
    return ion_laser.IonLaserParams(
        nu0=get(cfg, "nu0"),
        delta=get(cfg, "delta", 0.0),
        Omega=get(cfg, "Omega"),
        eta0=get(cfg, "eta0"),
        N_fock=get(cfg, "n_fock", kind=int),
        omega21=get(cfg, "omega21", None),
        omega_laser=get(cfg, "omega_laser", None),
        k_wave=get(cfg, "k_wave", None),
    )


def many_params(cfg: dict) -> ion_laser.ManyIonParams:
    return ion_laser.ManyIonParams(
        nu=get(cfg, "nu"),
        delta=get(cfg, "delta", 0.0),
        Omegas=get(cfg, "Omegas", kind=list),
        etas=get(cfg, "etas", kind=list),
        N_fock=get(cfg, "n_fock", kind=int),
    )


def two_d_params(cfg: dict) -> ion_laser.TwoDParams:
    return ion_laser.TwoDParams(
        nu_x=get(cfg, "nu_x"),
        nu_y=get(cfg, "nu_y"),
        delta=get(cfg, "delta", 0.0),
        Omega=get(cfg, "Omega"),
        eta_x=get(cfg, "eta_x"),
        eta_y=get(cfg, "eta_y"),
        N_x=get(cfg, "n_x", kind=int),
        N_y=get(cfg, "n_y", kind=int),
    )


def _ion_solution(cfg, params, t_end):
    sched = cfg.get("schedule", {"type": "constant", "nu0": params.nu0})
    n = get(cfg, "ermakov_samples", 2001, kind=int)
    rho0 = get(cfg, "rho0", None)
    return ermakov.solve_ermakov(
        ermakov.schedule_from_dict(sched), np.linspace(0.0, t_end, n),
        rho0=rho0, rho_dot0=get(cfg, "rho_dot0", 0.0), nu0=params.nu0,
    )


def _clean(report: dict) -> dict:
    return {k: (None if v is None else float(v)) for k, v in report.items()}


def ion_linearize_check(system: str, cfg: dict) -> dict:
    pad = get(cfg, "pad", ion_laser.DEFAULT_PAD, kind=int)
    if system == "single":
        params = ion_single_params(cfg)
        t = get(cfg, "t", 0.0)
        # solve past t so the rate at t is an interior value
        sol = _ion_solution(cfg, params, t + 1.0) if "schedule" in cfg else None
        check = ion_laser.linearize_single(params, sol, t, pad=pad,
                                           beta_convention=cfg.get("beta_convention", "printed"))
    elif system == "many":
        check = ion_laser.linearize_many(many_params(cfg), pad=pad)
    elif system == "2d":
        check = ion_laser.linearize_2d(two_d_params(cfg), pad=pad)
    else:
        raise ParameterError(f"unknown ion system {system!r}")
    return _clean(check.report())


DYNAMICS_HEADER = ("t", "infidelity", "leakage")


def ion_dynamics(cfg: dict):
    params = ion_single_params(cfg)
    t_final = get(cfg, "t_final")
    steps = get(cfg, "steps", 400, kind=int)
    samples = get(cfg, "samples", 11, kind=int)
    init = cfg.get("initial", {})
    internal = init.get("internal", "g")
    if internal not in ("e", "g"):
        raise ParameterError("initial.internal must be 'e' or 'g'")
    level = int(init.get("fock", 0))
    if not 0 <= level < params.N_fock:
        raise ParameterError("initial.fock outside truncation")
    psi0 = kron(basis(2, 0 if internal == "e" else 1), basis(params.N_fock, level))
    sol = _ion_solution(cfg, params, t_final)
    res = ion_laser.dynamics_equivalence(
        params, sol, psi0, t_final, steps, samples=samples,
        beta_convention=cfg.get("beta_convention", "printed"),
        check_convergence=bool(cfg.get("check_convergence", True)),
    )
    rows = [(float(t), float(f), float(lk)) for t, f, lk in zip(res.times, res.infidelities, res.leakages)]
    return DYNAMICS_HEADER, rows, res


# ---------------------------------------------------------------------------
# slow atom


def slow_system(cfg: dict) -> slow_atom.SlowAtomSystem:
    grid = cfg.get("grid", {})
    mode = cfg.get("mode", {})
    return slow_atom.SlowAtomSystem(
        grid=slow_atom.GridSpec(get(grid, "points", 32, kind=int), get(grid, "length", 2 * math.pi)),
        mode=slow_atom.ModeShape(
            kind=mode.get("kind", "sinusoidal"),
            g0=get(mode, "g0"),
            k_mode=get(mode, "k_mode", 1.0),
            x_center=get(mode, "x_center", 0.0),
            width=get(mode, "width", 1.0),
        ),
        N_fock=get(cfg, "n_fock", 4, kind=int),
        omega=get(cfg, "omega", 1.0),
        omega0=get(cfg, "omega0", 1.0),
        kinetic=cfg.get("kinetic", "spectral"),
    )


def slow_initial(cfg: dict, sys: slow_atom.SlowAtomSystem) -> np.ndarray:
    init = cfg.get("initial", {})
    packet = init.get("packet", {"type": "gaussian"})
    if packet.get("type") == "gaussian":
        spatial = slow_atom.gaussian_packet(sys.grid, get(packet, "x0", 0.0), get(packet, "sigma", 0.5),
                                            get(packet, "k0", 0.0))
    elif packet.get("type") == "plane":
        spatial = slow_atom.plane_wave(sys.grid, get(packet, "m", 1, kind=int))
    else:
        raise ParameterError(f"unknown packet type {packet.get('type')!r}")
    level = get(init, "fock", 0, kind=int)
    if not 0 <= level < sys.N_fock:
        raise ParameterError("initial.fock outside truncation")
    return slow_atom.product_state(spatial, init.get("internal", "e"), level, sys.N_fock)


SLOW_HEADER = ("t", "excited", "ground", "norm", "deviation")


def slow_atom_propagate(cfg: dict, t: float, samples=None):
    sys = slow_system(cfg)
    psi0 = slow_initial(cfg, sys)
    psi = slow_atom.propagate(sys, psi0, t)
    report = {
        "deviation": slow_atom.compare_oracle(sys, psi0, t),
        "norm": float(np.linalg.norm(psi)),
        "populations": slow_atom.populations(sys, psi),
    }
    rows = None
    if samples:
        rows = []
        for tk in np.linspace(0.0, t, int(samples)):
            pk = slow_atom.propagate(sys, psi0, tk)
            pops = slow_atom.populations(sys, pk)
            rows.append((float(tk), pops["excited"], pops["ground"], float(np.linalg.norm(pk)),
                         slow_atom.compare_oracle(sys, psi0, tk)))
    return report, rows


# ---------------------------------------------------------------------------
# kerr


def kerr_params(cfg: dict) -> kerr.KerrParams:
    return kerr.KerrParams(chi=get(cfg, "chi"), gamma=get(cfg, "gamma"), N_fock=get(cfg, "n_fock", kind=int))


def kerr_evolve(cfg: dict, t: float) -> dict:
    params = kerr_params(cfg)
    rho0 = kerr.initial_state(cfg.get("initial", {"type": "fock", "n": 0}), params.N_fock)
    rho = kerr.analytic_solution(params, rho0, t)
    return {"t": float(t), "rho": matrix_to_json(rho)}


KERR_HEADER = ("t", "max_abs_diff", "trace_analytic", "trace_rk4", "min_eig_analytic")


def kerr_compare(cfg: dict, t0: float, t1: float, samples: int):
    params = kerr_params(cfg)
    rho0 = kerr.initial_state(cfg.get("initial", {"type": "fock", "n": 0}), params.N_fock)
    if samples < 2:
        raise ParameterError("samples must be >= 2")
    rows = kerr.compare(params, rho0, np.linspace(t0, t1, samples), steps=get(cfg, "steps", 5000, kind=int))
    return KERR_HEADER, [tuple(r[k] for k in KERR_HEADER) for r in rows], rows
