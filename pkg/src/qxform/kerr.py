"""Lossy Kerr oscillator at zero temperature.

    d rho/dt = -i chi [n^2, rho] + 2 gamma a rho a^dag - gamma (n rho + rho n)

solved two ways: the closed-form Fock-basis sum (the ``Y``, ``L``, ``J``
superoperator factorization written out in matrix elements) and a dense
fixed-step RK4 integration of the right-hand side.

The closed form is evaluated with output dyad ``|n><m|`` and the k-sum
cut at the truncation, which makes it the exact solution of the truncated
equation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConvergenceError, LayoutError, ParameterError, PositivityAlarm
from .fock import (
    annihilation,
    check_density_matrix,
    coherent_amplitudes,
    density_diagnostics,
    fock_density,
    matrix_from_json,
    number_operator,
    pure_density,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class KerrParams:
    chi: float
    gamma: float
    N_fock: int

    def __post_init__(self):
        if not math.isfinite(self.chi):
            raise ParameterError("chi must be finite")
        if not self.gamma >= 0:
            raise ParameterError(f"gamma must be >= 0, got {self.gamma}")
        if int(self.N_fock) != self.N_fock or self.N_fock < 2:
            raise ParameterError(f"N_fock must be an integer >= 2, got {self.N_fock}")


def _check_shape(params, rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (params.N_fock, params.N_fock):
        raise LayoutError(f"expected a {params.N_fock}x{params.N_fock} matrix, got {rho.shape}")
    return rho


# ---------------------------------------------------------------------------
# superoperators


def apply_superop(tag: str, params: KerrParams, rho) -> np.ndarray:
    """Apply ``J``, ``L``, ``Y`` or ``R`` to ``rho``.

    J rho = 2 gamma a rho a^dag
    L rho = -gamma (n rho + rho n)
    Y rho = -i chi (n^2 rho - rho n^2)
    R rho = 2 (n rho - rho n)
    """
    rho = _check_shape(params, rho)
    n = number_operator(params.N_fock)
    if tag == "J":
        a = annihilation(params.N_fock)
        return 2 * params.gamma * a @ rho @ a.conj().T
    if tag == "L":
        return -params.gamma * (n @ rho + rho @ n)
    if tag == "Y":
        n2 = n @ n
        return -1j * params.chi * (n2 @ rho - rho @ n2)
    if tag == "R":
        return 2 * (n @ rho - rho @ n)
    raise ParameterError(f"unknown superoperator {tag!r}")


def superop_commutator_check(params: KerrParams, rho_samples, coefficient=None):
    """Residuals of ``[Y, J] rho = c R J rho`` and ``[R, J] rho = 0``.

    ``coefficient`` defaults to ``2 i chi``. Returns the pair of largest
    entrywise residuals over all samples.
    """
    if len(rho_samples) == 0:
        raise ParameterError("need at least one sample matrix")
    c = 2j * params.chi if coefficient is None else coefficient

    def op(tag, x):
        return apply_superop(tag, params, x)

    yj = rj = 0.0
    for rho in rho_samples:
        lhs = op("Y", op("J", rho)) - op("J", op("Y", rho))
        rhs = c * op("R", op("J", rho))
        yj = max(yj, float(np.max(np.abs(lhs - rhs))))
        rj = max(rj, float(np.max(np.abs(op("R", op("J", rho)) - op("J", op("R", rho))))))
    return yj, rj


# ---------------------------------------------------------------------------
# solutions


def analytic_solution(params: KerrParams, rho0, t: float) -> np.ndarray:
    """Closed-form ``rho(t)`` from the Fock-basis sum."""
    if t < 0:
        raise ParameterError("t must be non-negative")
    rho0 = _check_shape(params, rho0)
    return kernels.kerr_fock_sum(np.ascontiguousarray(rho0), float(params.chi), float(params.gamma), float(t))


def generator_parts(params: KerrParams):
    """Hamiltonian ``chi n^2`` and jump operator ``sqrt(2 gamma) a``."""
    n = number_operator(params.N_fock)
    h = params.chi * n @ n
    jump = math.sqrt(2 * params.gamma) * annihilation(params.N_fock)
    return h, jump[None, :, :]


def max_rate(params: KerrParams) -> float:
    n = params.N_fock
    return max(abs(params.chi) * n * n, params.gamma * n)


def lindblad_integrate(params: KerrParams, rho0, t: float, steps: int) -> np.ndarray:
    """Fixed-step RK4 on the master equation from 0 to ``t``."""
    rho0 = _check_shape(params, rho0)
    if t < 0:
        raise ParameterError("t must be non-negative")
    if t == 0:
        return rho0.copy()
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    dt = t / steps
    if dt * max_rate(params) > 0.1:
        raise ConvergenceError(
            f"step {dt:.3e} too large: step * max(chi N^2, gamma N) = {dt * max_rate(params):.3f} > 0.1"
        )
    h, jumps = generator_parts(params)
    rho, drift = kernels.lindblad_rk4(np.ascontiguousarray(rho0), h, np.ascontiguousarray(jumps), dt, int(steps))
    log.debug("lindblad_integrate: hermiticity drift %.3e over %d steps", drift, steps)
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < -1e-8:
        raise PositivityAlarm(f"RK4 state has eigenvalue {min_eig:.3e}")
    return rho


def compare(params: KerrParams, rho0, times, steps: int = 5000):
    """Analytic vs RK4 at each of ``times``.

    The RK4 state is carried forward from one sample time to the next with
    ``steps`` steps per interval (and from 0 to the first time if positive).
    Returns one dict per time.
    """
    rho0 = _check_shape(params, rho0)
    times = [float(x) for x in times]
    if any(b < a for a, b in zip(times, times[1:])) or (times and times[0] < 0):
        raise ParameterError("times must be non-negative and non-decreasing")
    rows = []
    rk = rho0.copy()
    t_prev = 0.0
    for t in times:
        if t > t_prev:
            rk = lindblad_integrate(params, rk, t - t_prev, steps)
        t_prev = t
        an = analytic_solution(params, rho0, t)
        d_an = density_diagnostics(an)
        d_rk = density_diagnostics(rk)
        rows.append({
            "t": t,
            "max_abs_diff": float(np.max(np.abs(an - rk))),
            "trace_analytic": d_an["trace"].real,
            "trace_rk4": d_rk["trace"].real,
            "min_eig_analytic": d_an["min_eig"],
            "hermiticity_analytic": d_an["hermiticity"],
            "min_eig_rk4": d_rk["min_eig"],
        })
    return rows


# ---------------------------------------------------------------------------
# moments and initial states


def mean_amplitude(rho) -> complex:
    """``<a> = tr(a rho)``."""
    return complex(np.trace(annihilation(rho.shape[0]) @ rho))


def initial_state(desc: dict, n_fock: int) -> np.ndarray:
    """Build ``rho0`` from ``{"type": "fock"|"coherent"|"matrix", ...}``."""
    kind = desc.get("type")
    if kind == "fock":
        k = int(desc.get("n", 0))
        if not 0 <= k < n_fock:
            raise ParameterError(f"Fock level {k} outside truncation {n_fock}")
        return fock_density(n_fock, k)
    if kind == "coherent":
        alpha = desc.get("alpha", 1.0)
        if isinstance(alpha, (list, tuple)):
            alpha = complex(alpha[0], alpha[1])
        return pure_density(coherent_amplitudes(complex(alpha), n_fock))
    if kind == "matrix":
        rho = matrix_from_json(desc["matrix"])
        if rho.shape != (n_fock, n_fock):
            raise ParameterError("initial matrix dim does not match n_fock")
        return check_density_matrix(rho)
    raise ParameterError(f"unknown initial state type {kind!r}")
