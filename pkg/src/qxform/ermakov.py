"""Ermakov equation for a time-dependent trap.

Solves ``rho'' + nu(t)^2 rho = 1 / rho^3`` with fixed-step RK4 and derives
the quantities the ion-laser transformation needs: the characteristic
frequency ``1/rho^2``, the Lamb-Dicke parameter ``eta0 rho sqrt(nu0)`` and
``beta = eta omega/2 - i eta_dot/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import kernels
from .errors import ConvergenceError, ParameterError, SingularityError, ValidationError

RHO_FLOOR = 1e-6
MAX_PHASE_STEP = 2e-3
MAX_TOTAL_STEPS = 20_000_000

# ---------------------------------------------------------------------------
# trap-frequency schedules


@dataclass(frozen=True)
class Constant:
    nu0: float

    def __post_init__(self):
        if not self.nu0 > 0:
            raise ParameterError(f"constant frequency must be positive, got {self.nu0}")

    def value(self, t):
        return np.full(np.shape(t), float(self.nu0)) if np.ndim(t) else float(self.nu0)

    def breakpoints(self):
        return ()

    def linear_piece(self, t_a, t_b):
        return float(self.nu0), 0.0

    def domain(self):
        return (-math.inf, math.inf)

    def to_dict(self):
        return {"type": "constant", "nu0": self.nu0}


@dataclass(frozen=True)
class Quench:
    """``nu1`` before ``t_switch``, ``nu2`` from ``t_switch`` on."""

    nu1: float
    nu2: float
    t_switch: float

    def __post_init__(self):
        if not (self.nu1 > 0 and self.nu2 > 0):
            raise ParameterError("quench frequencies must be positive")

    def value(self, t):
        out = np.where(np.asarray(t) < self.t_switch, self.nu1, self.nu2).astype(float)
        return out if np.ndim(t) else float(out)

    def breakpoints(self):
        return (float(self.t_switch),)

    def linear_piece(self, t_a, t_b):
        # intervals never straddle the switch, so the midpoint picks the branch
        return float(self.value(0.5 * (t_a + t_b))), 0.0

    def domain(self):
        return (-math.inf, math.inf)

    def to_dict(self):
        return {"type": "quench", "nu1": self.nu1, "nu2": self.nu2, "t_switch": self.t_switch}


@dataclass(frozen=True)
class Tabulated:
    """Linear interpolation between ``(times[i], values[i])``; zero frequency allowed."""

    times: tuple
    values: tuple

    def __init__(self, times, values):
        times = tuple(float(x) for x in times)
        values = tuple(float(x) for x in values)
        if len(times) != len(values) or len(times) < 2:
            raise ParameterError("tabulated schedule needs >= 2 matching times and values")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ParameterError("tabulated times must be strictly increasing")
        if any(v < 0 for v in values):
            raise ParameterError("tabulated frequencies must be non-negative")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def value(self, t):
        out = np.interp(t, self.times, self.values)
        return out if np.ndim(t) else float(out)

    def breakpoints(self):
        return self.times[1:-1]

    def linear_piece(self, t_a, t_b):
        va, vb = np.interp([t_a, t_b], self.times, self.values)
        return float(va), float((vb - va) / (t_b - t_a))

    def domain(self):
        return (self.times[0], self.times[-1])

    def to_dict(self):
        return {"type": "tabulated", "times": list(self.times), "values": list(self.values)}


def schedule_from_dict(obj: dict):
    kind = obj.get("type")
    try:
        if kind == "constant":
            return Constant(float(obj["nu0"]))
        if kind == "quench":
            return Quench(float(obj["nu1"]), float(obj["nu2"]), float(obj["t_switch"]))
        if kind == "tabulated":
            return Tabulated(obj["times"], obj["values"])
    except KeyError as exc:
        raise ParameterError(f"schedule field missing: {exc.args[0]}") from None
    raise ParameterError(f"unknown schedule type {kind!r}")


# ---------------------------------------------------------------------------
# solution container


@dataclass(frozen=True)
class ErmakovSolution:
    times: np.ndarray
    rho: np.ndarray
    rho_dot: np.ndarray
    nu0: float
    schedule: object
    # integration nodes (sample times plus schedule breakpoints) for interpolation
    nodes: np.ndarray = field(repr=False)
    node_rho: np.ndarray = field(repr=False)
    node_rho_dot: np.ndarray = field(repr=False)

    @cached_property
    def _rho_spline(self):
        return CubicHermiteSpline(self.nodes, self.node_rho, self.node_rho_dot)

    @cached_property
    def _rho_dot_spline(self):
        nu = self.schedule.value(self.nodes)
        rho_ddot = self.node_rho ** -3 - nu ** 2 * self.node_rho
        return CubicHermiteSpline(self.nodes, self.node_rho_dot, rho_ddot)

    def _check_range(self, t):
        lo, hi = self.times[0], self.times[-1]
        slack = 1e-12 * max(1.0, abs(hi - lo))
        if np.any(np.asarray(t) < lo - slack) or np.any(np.asarray(t) > hi + slack):
            raise ParameterError(f"t={t} outside solved range [{lo}, {hi}]")

    def rho_at(self, t):
        self._check_range(t)
        return self._rho_spline(t)[()]

    def rho_dot_at(self, t):
        self._check_range(t)
        return self._rho_dot_spline(t)[()]


def _node_grid(times, schedule, substeps, rho0):
    t0, t1 = times[0], times[-1]
    inner = [b for b in schedule.breakpoints() if t0 < b < t1]
    nodes = np.union1d(times, np.asarray(inner, dtype=float))
    pieces = [schedule.linear_piece(a, b) for a, b in zip(nodes[:-1], nodes[1:])]
    v_start = np.array([p[0] for p in pieces], dtype=float)
    slopes = np.array([p[1] for p in pieces], dtype=float)
    lengths = np.diff(nodes)
    # absolute cap so coarse output grids still get an accurate solution
    scale = max(1.0, float(np.max(np.abs(v_start))), float(np.max(np.abs(v_start + slopes * lengths))),
                rho0 ** -2)
    h_max = min(np.min(np.diff(times)) / substeps, MAX_PHASE_STEP / scale)
    counts = np.maximum(1, np.ceil(lengths / h_max - 1e-9)).astype(np.int64)
    return nodes, v_start, slopes, counts


def solve_ermakov(schedule, times, rho0=None, rho_dot0=0.0, nu0=None, substeps=8) -> ErmakovSolution:
    """Integrate the Ermakov equation and sample it at ``times``.

    ``rho0`` defaults to ``nu(t0)^-1/2`` (the instantaneous ground-state
    match) and ``nu0`` to ``nu(t0)``. The RK4 step is at most
    ``min(diff(times)) / substeps`` and at most ``MAX_PHASE_STEP`` divided by
    the largest frequency on the schedule, and steps never straddle a schedule
    breakpoint.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ParameterError("need at least two sample times")
    if np.any(np.diff(times) <= 0):
        raise ParameterError("sample times must be strictly increasing")
    lo, hi = schedule.domain()
    if times[0] < lo or times[-1] > hi:
        raise ParameterError(f"schedule defined on [{lo}, {hi}] only")
    if int(substeps) < 1:
        raise ParameterError("substeps must be >= 1")
    nu_start = float(schedule.value(times[0]))
    if nu0 is None:
        nu0 = nu_start
    if rho0 is None:
        if not nu_start > 0:
            raise ParameterError("default rho0 needs nu(t0) > 0; pass rho0 explicitly")
        rho0 = nu_start ** -0.5
    if not rho0 > 0:
        raise ParameterError(f"rho0 must be positive, got {rho0}")

    nodes, v_start, slopes, counts = _node_grid(times, schedule, int(substeps), float(rho0))
    if counts.sum() > MAX_TOTAL_STEPS:
        raise ConvergenceError(
            f"{int(counts.sum())} RK4 steps needed (limit {MAX_TOTAL_STEPS}); rho0 is too small for this span"
        )
    rho, rho_dot, bad = kernels.ermakov_rk4(
        nodes, v_start, slopes, counts, float(rho0), float(rho_dot0), RHO_FLOOR
    )
    if bad >= 0:
        raise SingularityError(
            f"rho fell below {RHO_FLOOR} between t={nodes[bad]} and t={nodes[bad + 1]}"
        )
    idx = np.searchsorted(nodes, times)
    return ErmakovSolution(
        times=times,
        rho=rho[idx],
        rho_dot=rho_dot[idx],
        nu0=float(nu0),
        schedule=schedule,
        nodes=nodes,
        node_rho=rho,
        node_rho_dot=rho_dot,
    )


# ---------------------------------------------------------------------------
# derived quantities


def derived_frequency(sol: ErmakovSolution, t):
    return 1.0 / sol.rho_at(t) ** 2


def lamb_dicke(sol: ErmakovSolution, eta0, t):
    if eta0 < 0:
        raise ParameterError("eta0 must be non-negative")
    return eta0 * sol.rho_at(t) * math.sqrt(sol.nu0)


def lamb_dicke_rate(sol: ErmakovSolution, eta0, t):
    """Time derivative of the Lamb-Dicke parameter, from rho_dot (no differencing)."""
    return eta0 * sol.rho_dot_at(t) * math.sqrt(sol.nu0)


def beta(sol: ErmakovSolution, eta0, t):
    eta = lamb_dicke(sol, eta0, t)
    return eta * derived_frequency(sol, t) / 2 - 0.5j * lamb_dicke_rate(sol, eta0, t)


def phase_integral(sol: ErmakovSolution, t):
    """Trapezoid-rule integral of ``1/rho^2`` from the first sample to ``t``."""
    sol._check_range(t)
    w = 1.0 / sol.node_rho ** 2
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(sol.nodes))])
    return float(np.interp(t, sol.nodes, cum))


# ---------------------------------------------------------------------------
# checks


def residual(sol: ErmakovSolution):
    """Pointwise ``|rho'' + nu^2 rho - rho^-3|`` on interior samples.

    rho'' comes from the five-point central difference of the sampled rho, so
    the sample grid must be uniform. Samples whose stencil contains a
    schedule breakpoint are returned as NaN: nu is not smooth there.
    """
    t = sol.times
    h = np.diff(t)
    if t.size < 5:
        raise ValidationError("residual needs at least five samples")
    if np.max(np.abs(h - h[0])) > 1e-9 * max(1.0, abs(t[-1])):
        raise ValidationError("residual check needs a uniform sample grid")
    h = (t[-1] - t[0]) / (t.size - 1)
    r = sol.rho
    rdd = (-r[:-4] + 16 * r[1:-3] - 30 * r[2:-2] + 16 * r[3:-1] - r[4:]) / (12 * h * h)
    mid = r[2:-2]
    res = np.abs(rdd + sol.schedule.value(t[2:-2]) ** 2 * mid - mid ** -3)
    out = np.full(t.shape, np.nan)
    out[2:-2] = res
    for b in sol.schedule.breakpoints():
        out[(t - 2 * h < b - 1e-12) & (t + 2 * h > b + 1e-12)] = np.nan
    return out


def max_residual(sol: ErmakovSolution) -> float:
    return float(np.nanmax(residual(sol)))


def first_integral(sol: ErmakovSolution):
    """``rho_dot^2 + nu^2 rho^2 + rho^-2``; conserved when nu is constant."""
    nu = sol.schedule.value(sol.times)
    return sol.rho_dot ** 2 + nu ** 2 * sol.rho ** 2 + sol.rho ** -2


def csv_rows(sol: ErmakovSolution, eta0: float):
    """Rows ``t, rho, rho_dot, omega_tilde, eta, beta_re, beta_im`` at the samples."""
    sq = math.sqrt(sol.nu0)
    for t, r, rd in zip(sol.times, sol.rho, sol.rho_dot):
        eta = eta0 * r * sq
        omega = 1.0 / r ** 2
        b = eta * omega / 2 - 0.5j * eta0 * rd * sq
        yield (float(t), float(r), float(rd), float(omega), float(eta), float(b.real), float(b.imag))
