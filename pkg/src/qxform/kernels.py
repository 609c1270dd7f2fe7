"""Inner loops that dominate runtime.

Each kernel has a numba-compiled form and a numpy form. The module-level
names without suffix pick the compiled form when numba is active (see
:mod:`qxform._accel`) and the numpy form otherwise; the suffixed names are
always available so the two can be compared directly (the ``_jit`` names
are ``None`` when numba is off).

Kernels are self-contained (no calls to other helpers) so that the same
source runs unchanged under the interpreter.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import HAVE_NUMBA, njit

_RK4_NODES = (0.0, 0.5, 0.5, 1.0)
_RK4_WEIGHTS = (1.0, 2.0, 2.0, 1.0)

# ---------------------------------------------------------------------------
# Ermakov equation  rho'' + nu(t)^2 rho = rho^-3


def _ermakov_rk4(nodes, v_start, slopes, substeps, rho0, rhodot0, floor):
    """Integrate across ``nodes``; ``nu`` is linear on each node interval.

    Returns ``(rho, rho_dot, bad)`` where ``bad`` is the index of the first
    interval in which rho fell to ``floor`` (``-1`` if none).
    """
    n = nodes.shape[0]
    rho = np.empty(n)
    rhodot = np.empty(n)
    rho[0] = rho0
    rhodot[0] = rhodot0
    r = rho0
    rd = rhodot0
    for i in range(n - 1):
        t_a = nodes[i]
        m = substeps[i]
        h = (nodes[i + 1] - t_a) / m
        v_a = v_start[i]
        sl = slopes[i]
        for j in range(m):
            t = j * h
            kr = 0.0
            kv = 0.0
            acc_r = 0.0
            acc_v = 0.0
            for s in range(4):
                c = _RK4_NODES[s] * h
                rs = r + c * kr
                vs = rd + c * kv
                nu = v_a + sl * (t + c)
                kr = vs
                kv = 1.0 / (rs * rs * rs) - nu * nu * rs
                acc_r += _RK4_WEIGHTS[s] * kr
                acc_v += _RK4_WEIGHTS[s] * kv
            r = r + h / 6.0 * acc_r
            rd = rd + h / 6.0 * acc_v
            if not r > floor:
                rho[i + 1:] = np.nan
                rhodot[i + 1:] = np.nan
                return rho, rhodot, i
        rho[i + 1] = r
        rhodot[i + 1] = rd
    return rho, rhodot, -1


# ---------------------------------------------------------------------------
# lossy Kerr oscillator: closed-form Fock sum
#
#   rho_nm(t) = e^{-i chi t (n^2 - m^2) - gamma t (n + m)}
#               sum_k rho_{n+k, m+k}(0) sqrt(prod_j (n+j)(m+j)) q^k / k!
#   q = 2 gamma (1 - e^{-c t}) / c,   c = 2 i chi (n - m) + 2 gamma


def _kerr_fock_sum_loops(rho0, chi, gamma, t):
    dim = rho0.shape[0]
    out = np.zeros((dim, dim), dtype=np.complex128)
    for n in range(dim):
        for m in range(dim):
            phase = np.exp(complex(-gamma * t * (n + m), -chi * t * (n * n - m * m)))
            c_re = 2.0 * gamma
            c_im = 2.0 * chi * (n - m)
            if math.hypot(c_re, c_im) < 1e-12:
                q = complex(2.0 * gamma * t, 0.0)
            else:
                # exp(-c t) - 1 without cancellation
                x = -c_re * t
                y = -c_im * t
                em1 = math.expm1(x)
                sh = math.sin(0.5 * y)
                cexpm1 = complex(em1 * math.cos(y) - 2.0 * sh * sh, (em1 + 1.0) * math.sin(y))
                q = -2.0 * gamma * cexpm1 / complex(c_re, c_im)
            kmax = dim - 1 - max(n, m)
            acc = rho0[n, m]
            w = 1.0 + 0.0j
            for k in range(1, kmax + 1):
                w = w * math.sqrt((n + k) * (m + k)) * q / k
                acc += rho0[n + k, m + k] * w
            out[n, m] = phase * acc
    return out


def kerr_fock_sum_numpy(rho0, chi, gamma, t):
    """Vectorized over ``(n, m)``; the k-sum runs in the same order as the loop form."""
    rho0 = np.asarray(rho0, dtype=complex)
    dim = rho0.shape[0]
    n = np.arange(dim)[:, None]
    m = np.arange(dim)[None, :]
    c = 2.0 * gamma + 2j * chi * (n - m)
    small = np.abs(c) < 1e-12
    safe_c = np.where(small, 1.0, c)
    x = -c.real * t
    y = -c.imag * t
    em1 = np.expm1(x)
    cexpm1 = (em1 * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2) + 1j * (em1 + 1.0) * np.sin(y)
    q = np.where(small, 2.0 * gamma * t + 0j, -2.0 * gamma * cexpm1 / safe_c)
    phase = np.exp(-gamma * t * (n + m) - 1j * chi * t * (n * n - m * m))
    acc = rho0.copy()
    w = np.ones((dim, dim), dtype=complex)
    nm = np.maximum(n, m)
    for k in range(1, dim):
        live = nm + k <= dim - 1
        w = np.where(live, w * np.sqrt((n + k) * (m + k)) * q / k, 0.0)
        shifted = np.zeros_like(acc)
        shifted[: dim - k, : dim - k] = rho0[k:, k:]
        acc = acc + shifted * w
    return phase * acc


# ---------------------------------------------------------------------------
# dense Lindblad master equation, fixed-step RK4
#
#   d rho/dt = -i [h, rho] + sum_k (L_k rho L_k^dag - {L_k^dag L_k, rho} / 2)


def _lindblad_rk4(rho0, h, jumps, dt, steps):
    """Returns the final state and the largest hermiticity defect removed."""
    nj = jumps.shape[0]
    jumps_dag = np.empty_like(jumps)
    jdj = np.empty_like(jumps)
    for k in range(nj):
        jumps_dag[k] = np.ascontiguousarray(jumps[k].conj().T)
        jdj[k] = np.dot(jumps_dag[k], jumps[k])
    rho = rho0.copy()
    drift = 0.0
    for _ in range(steps):
        slope = np.zeros_like(rho)
        acc = np.zeros_like(rho)
        for s in range(4):
            arg = rho + (_RK4_NODES[s] * dt) * slope
            slope = -1j * (np.dot(h, arg) - np.dot(arg, h))
            for k in range(nj):
                slope += np.dot(np.dot(jumps[k], arg), jumps_dag[k])
                slope -= 0.5 * (np.dot(jdj[k], arg) + np.dot(arg, jdj[k]))
            acc += _RK4_WEIGHTS[s] * slope
        rho = rho + (dt / 6.0) * acc
        herm = np.ascontiguousarray(rho.conj().T)
        d = np.max(np.abs(rho - herm))
        if d > drift:
            drift = d
        rho = 0.5 * (rho + herm)
    return rho, drift


# ---------------------------------------------------------------------------
# backend selection

if HAVE_NUMBA:
    ermakov_rk4_jit = njit(cache=True)(_ermakov_rk4)
    kerr_fock_sum_jit = njit(cache=True)(_kerr_fock_sum_loops)
    lindblad_rk4_jit = njit(cache=True)(_lindblad_rk4)
else:
    ermakov_rk4_jit = kerr_fock_sum_jit = lindblad_rk4_jit = None

# the Ermakov and RK4 loops have no useful vectorization, so their numpy
# form is the same source run by the interpreter
ermakov_rk4_numpy = _ermakov_rk4
kerr_fock_sum_loops = _kerr_fock_sum_loops
lindblad_rk4_numpy = _lindblad_rk4

ermakov_rk4 = ermakov_rk4_jit if HAVE_NUMBA else ermakov_rk4_numpy
kerr_fock_sum = kerr_fock_sum_jit if HAVE_NUMBA else kerr_fock_sum_numpy
lindblad_rk4 = lindblad_rk4_jit if HAVE_NUMBA else lindblad_rk4_numpy
