"""Ion-laser Hamiltonians and their exact linearizing transformations.

Atomic operators follow the convention ``A12 = |g><e|`` (lowering),
``A21 = |e><g|`` and ``A22 - A11 = sigma_z`` in the ``(|e>, |g>)`` basis.
The linearizing unitaries are products of a pi/4 qubit rotation
``P = exp(pi/4 (sigma_+ - sigma_-))`` and a spin-dependent displacement
``exp(-i eta/2 (a + a^dag) sigma_z)``, both built by ``expm`` of their exact
generators.

Identity checks are done on a padded Fock space and then truncated back,
because displacements do not close in a truncated space; the top
``GUARD`` levels are additionally excluded from entrywise comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import ermakov
from .errors import (
    ConvergenceError,
    LayoutError,
    ParameterError,
    TruncationError,
    UnsupportedCaseError,
)
from .fock import (
    FockMode,
    HilbertLayout,
    Qubit,
    annihilation,
    check_state,
    embed,
    expm,
    expm_hermitian,
    kron,
    number_operator,
    pauli,
)

GUARD = 2
MAX_DIM = 4096
DEFAULT_PAD = 16

# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class IonLaserParams:
    nu0: float
    delta: float
    Omega: float
    eta0: float
    N_fock: int
    omega21: Optional[float] = None
    omega_laser: Optional[float] = None
    k_wave: Optional[float] = None

    def __post_init__(self):
        if not self.nu0 > 0:
            raise ParameterError(f"nu0 must be positive, got {self.nu0}")
        if self.eta0 < 0:
            raise ParameterError(f"eta0 must be non-negative, got {self.eta0}")
        if self.N_fock < 4:
            raise ParameterError(f"N_fock must be >= 4, got {self.N_fock}")
        if 2 * self.N_fock > MAX_DIM:
            raise ParameterError(f"dimension {2 * self.N_fock} exceeds {MAX_DIM}")
        if self.omega21 is not None and self.omega_laser is not None:
            if not math.isclose(self.delta, self.omega21 - self.omega_laser, rel_tol=0, abs_tol=1e-12):
                raise ParameterError("delta must equal omega21 - omega_laser")
        if self.k_wave is not None:
            expected = self.k_wave * math.sqrt(1.0 / (2.0 * self.nu0))
            if not math.isclose(self.eta0, expected, rel_tol=1e-12, abs_tol=1e-15):
                raise ParameterError(f"eta0={self.eta0} inconsistent with k_wave (expected {expected})")


@dataclass(frozen=True)
class ManyIonParams:
    nu: float
    delta: float
    Omegas: tuple
    etas: tuple
    N_fock: int

    def __init__(self, nu, delta, Omegas, etas, N_fock):
        object.__setattr__(self, "nu", float(nu))
        object.__setattr__(self, "delta", float(delta))
        object.__setattr__(self, "Omegas", tuple(float(x) for x in Omegas))
        object.__setattr__(self, "etas", tuple(float(x) for x in etas))
        object.__setattr__(self, "N_fock", int(N_fock))
        if len(self.Omegas) != len(self.etas) or not self.Omegas:
            raise ParameterError("Omegas and etas must be non-empty and of equal length")
        if self.N_fock < 4:
            raise ParameterError("N_fock must be >= 4")
        if self.dim > MAX_DIM:
            raise ParameterError(f"dimension {self.dim} exceeds {MAX_DIM}")

    @property
    def n_ions(self):
        return len(self.Omegas)

    @property
    def dim(self):
        return 2 ** self.n_ions * self.N_fock


@dataclass(frozen=True)
class TwoDParams:
    nu_x: float
    nu_y: float
    delta: float
    Omega: float
    eta_x: float
    eta_y: float
    N_x: int
    N_y: int

    def __post_init__(self):
        if self.N_x < 4 or self.N_y < 4:
            raise ParameterError("N_x and N_y must be >= 4")
        if 2 * self.N_x * self.N_y > MAX_DIM:
            raise ParameterError(f"dimension {2 * self.N_x * self.N_y} exceeds {MAX_DIM}")


# ---------------------------------------------------------------------------
# shared pieces


def rotation_pi4() -> np.ndarray:
    """``exp(pi/4 (sigma_+ - sigma_-))``; maps sigma_z to -sigma_x."""
    return expm(np.pi / 4 * (pauli("plus") - pauli("minus")))


def frame_rotation(omega: float, t: float, n_fock: int) -> np.ndarray:
    """``T_omega = exp(-i omega t A22)`` on qubit x Fock."""
    return kron(expm(-1j * omega * t * pauli("ee")), np.eye(n_fock))


def to_frame(h: np.ndarray, u: np.ndarray) -> np.ndarray:
    return u @ h @ u.conj().T


def from_frame(h: np.ndarray, u: np.ndarray) -> np.ndarray:
    return u.conj().T @ h @ u


def _fock_block(op, dims_big, dims_small):
    """Restrict an operator to the low-lying levels of each factor."""
    t = op.reshape(tuple(dims_big) * 2)
    sl = tuple(slice(0, d) for d in dims_small) * 2
    d = int(np.prod(dims_small))
    return t[sl].reshape(d, d)


def guard_mask(dims, fock_axes, guard=GUARD):
    """Boolean mask over the basis: True where every Fock factor is below ``dim - guard``."""
    grids = np.meshgrid(*[np.arange(d) for d in dims], indexing="ij")
    ok = np.ones(dims, dtype=bool)
    for ax in fock_axes:
        ok &= grids[ax] < dims[ax] - guard
    return ok.ravel()


def _masked_max(diff, mask):
    return float(np.max(np.abs(diff[np.ix_(mask, mask)]), initial=0.0))


def _offset(diff, mask):
    return float(np.mean(np.diag(diff)[mask].real))


def spectrum_distance(a, b) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(a) - np.linalg.eigvalsh(b))))


@dataclass
class LinearizationCheck:
    """Outcome of comparing a printed linearized Hamiltonian with the conjugation."""

    claimed: np.ndarray
    computed: np.ndarray
    offset: float
    max_residual: float
    spectrum_distance: float
    fitted_dipole_coefficient: Optional[float] = None
    extras: dict = field(default_factory=dict)

    def __iter__(self):
        yield self.claimed
        yield self.computed

    def report(self) -> dict:
        out = {
            "max_residual": self.max_residual,
            "spectrum_distance": self.spectrum_distance,
            "fitted_dipole_coefficient": self.fitted_dipole_coefficient,
            "offset": self.offset,
        }
        out.update(self.extras)
        return out


# ---------------------------------------------------------------------------
# single ion


def _single_ops(n):
    a = kron(np.eye(2), annihilation(n))
    x = a + a.conj().T
    sz = kron(pauli("z"), np.eye(n))
    return a, x, sz


def h_single_rotating(params: IonLaserParams, eta_t: float, omega_tilde: float, n_fock=None) -> np.ndarray:
    """``omega (n + 1/2) + delta A22 + Omega [exp(-i eta (a + a^dag)) A12 + h.c.]``."""
    if eta_t < 0 or not omega_tilde > 0:
        raise ParameterError("need eta_t >= 0 and omega_tilde > 0")
    n = params.N_fock if n_fock is None else n_fock
    a1 = annihilation(n)
    disp = expm(-1j * eta_t * (a1 + a1.conj().T))
    coupling = kron(pauli("minus"), disp)
    h = omega_tilde * kron(np.eye(2), number_operator(n) + 0.5 * np.eye(n))
    h = h + params.delta * kron(pauli("ee"), np.eye(n))
    h = h + params.Omega * (coupling + coupling.conj().T)
    return h


def h_single_interaction(params: IonLaserParams, sol, t: float) -> np.ndarray:
    """Resonant interaction-picture Hamiltonian with ``a -> a exp(-i int omega)``."""
    if params.delta != 0:
        raise UnsupportedCaseError("interaction-picture form is only defined for delta = 0")
    n = params.N_fock
    theta = ermakov.phase_integral(sol, t)
    eta = ermakov.lamb_dicke(sol, params.eta0, t)
    a1 = annihilation(n)
    gen = a1 * np.exp(-1j * theta) + a1.conj().T * np.exp(1j * theta)
    coupling = kron(pauli("minus"), expm(-1j * eta * gen))
    return params.Omega * (coupling + coupling.conj().T)


def linearizer(eta: float, n: int) -> np.ndarray:
    """``R = P exp(-i eta/2 (a + a^dag) sigma_z)`` on qubit x Fock(n)."""
    _, x, sz = _single_ops(n)
    return kron(rotation_pi4(), np.eye(n)) @ expm(-0.5j * eta * x @ sz)


def linearizer_rate(eta: float, eta_dot: float, n: int) -> np.ndarray:
    """Analytic time derivative of :func:`linearizer`."""
    _, x, sz = _single_ops(n)
    disp = expm(-0.5j * eta * x @ sz)
    return kron(rotation_pi4(), np.eye(n)) @ (-0.5j * eta_dot * x @ sz) @ disp


def h_single_linear(omega_tilde, Omega, delta, beta, n, beta_convention="printed") -> np.ndarray:
    """``omega n + Omega sigma_z + (delta/2 + i[a beta - a^dag beta*]) sigma_x``.

    ``beta_convention="conjugate-rate"`` flips the sign of the ``eta_dot``
    part of ``beta`` (imaginary part), which is what the frame bookkeeping
    ``i R_dot R^dag`` produces.
    """
    if beta_convention == "conjugate-rate":
        beta = complex(beta).conjugate()
    elif beta_convention != "printed":
        raise ParameterError(f"unknown beta convention {beta_convention!r}")
    a, _, sz = _single_ops(n)
    sx = kron(pauli("x"), np.eye(n))
    num = kron(np.eye(2), number_operator(n))
    lin = 1j * (a * beta - a.conj().T * np.conj(beta))
    return omega_tilde * num + Omega * sz + (0.5 * delta * np.eye(2 * n) + lin) @ sx


def _frozen_quantities(params, sol, t):
    if sol is None:
        return params.eta0, params.nu0, 0.0
    eta = ermakov.lamb_dicke(sol, params.eta0, t)
    omega = ermakov.derived_frequency(sol, t)
    eta_dot = ermakov.lamb_dicke_rate(sol, params.eta0, t)
    return eta, omega, eta_dot


def linearize_single(params: IonLaserParams, sol=None, t: float = 0.0, pad=DEFAULT_PAD,
                     beta_convention="printed") -> LinearizationCheck:
    """Compare the printed linearized Hamiltonian with ``R H R^dag + i R_dot R^dag``.

    With ``sol=None`` the trap is constant at ``nu0`` (so ``eta = eta0`` and
    ``eta_dot = 0``). The constant ``omega/2`` the printed form drops, plus
    the ``omega eta^2 / 4`` shift, shows up as ``offset``.
    """
    n = params.N_fock
    nb = n + pad
    eta, omega, eta_dot = _frozen_quantities(params, sol, t)
    beta = eta * omega / 2 - 0.5j * eta_dot

    h_big = h_single_rotating(params, eta, omega, n_fock=nb)
    r_big = linearizer(eta, nb)
    rdot_big = linearizer_rate(eta, eta_dot, nb)
    computed_big = r_big @ h_big @ r_big.conj().T + 1j * rdot_big @ r_big.conj().T
    computed = _fock_block(computed_big, (2, nb), (2, n))
    claimed = h_single_linear(omega, params.Omega, params.delta, beta, n, beta_convention)

    mask = guard_mask((2, n), fock_axes=(1,))
    diff = computed - claimed
    off = _offset(diff, mask)
    resid = _masked_max(diff - off * np.eye(2 * n), mask)

    h = h_single_rotating(params, eta, omega)
    r = linearizer(eta, n)
    spec = spectrum_distance(r @ h @ r.conj().T, h)
    return LinearizationCheck(
        claimed, computed, off, resid, spec,
        extras={"expected_offset": omega / 2 + omega * eta ** 2 / 4 + params.delta / 2},
    )


def linearizer_rate_fd_error(params: IonLaserParams, sol, t: float, h: float = 1e-5) -> float:
    """Largest entry of analytic R_dot minus its central difference."""
    n = params.N_fock
    eta_p = ermakov.lamb_dicke(sol, params.eta0, t + h)
    eta_m = ermakov.lamb_dicke(sol, params.eta0, t - h)
    fd = (linearizer(eta_p, n) - linearizer(eta_m, n)) / (2 * h)
    eta, _, eta_dot = _frozen_quantities(params, sol, t)
    return float(np.max(np.abs(fd - linearizer_rate(eta, eta_dot, n))))


# ---------------------------------------------------------------------------
# dynamics


@dataclass
class DynamicsResult:
    infidelity: float
    leakage: float
    times: np.ndarray
    infidelities: np.ndarray
    leakages: np.ndarray
    step_halving_gap: Optional[float] = None


class _Stepper:
    """Midpoint piecewise-constant propagator with a one-entry cache."""

    def __init__(self, build):
        self.build = build
        self._key = None
        self._u = None

    def step(self, key, h, psi):
        if key != self._key:
            self._u = expm_hermitian(self.build(*key), h)
            self._key = key
        return self._u @ psi


def _run_dynamics(params, sol, psi0, times, steps_per_interval, beta_convention):
    n = params.N_fock
    top = np.zeros((2, n), dtype=bool)
    top[:, n - 1] = True
    top = top.ravel()

    def frozen(t):
        return tuple(float(x) for x in _frozen_quantities(params, sol, t))

    phi_step = _Stepper(lambda eta, omega, eta_dot, h: h_single_rotating(params, eta, omega))
    psi_step = _Stepper(
        lambda eta, omega, eta_dot, h: h_single_linear(
            omega, params.Omega, params.delta, eta * omega / 2 - 0.5j * eta_dot, n, beta_convention
        )
    )
    phi = psi0.copy()
    psi = linearizer(frozen(times[0])[0], n) @ psi0
    infid = [0.0]
    leak = [max(np.sum(np.abs(phi[top]) ** 2), np.sum(np.abs(psi[top]) ** 2))]
    for t_a, t_b in zip(times[:-1], times[1:]):
        h = (t_b - t_a) / steps_per_interval
        for k in range(steps_per_interval):
            key = frozen(t_a + (k + 0.5) * h) + (h,)
            phi = phi_step.step(key, h, phi)
            psi = psi_step.step(key, h, psi)
        r = linearizer(frozen(t_b)[0], n)
        overlap = np.vdot(psi, r @ phi)
        infid.append(max(0.0, 1.0 - abs(overlap) ** 2))
        leak.append(max(np.sum(np.abs(phi[top]) ** 2), np.sum(np.abs(psi[top]) ** 2)))
    return np.array(infid), np.array(leak)


def dynamics_equivalence(params: IonLaserParams, sol, psi0, t_final: float, steps: int,
                         samples: int = 2, beta_convention="printed", leakage_tol=1e-8,
                         halving_tol=1e-6, check_convergence=True) -> DynamicsResult:
    """Propagate in the rotating frame and in the linearized frame and compare.

    ``psi0`` is the rotating-frame initial state; the linearized-frame state
    starts at ``R(0) psi0``. Returns ``1 - |<psi(t)|R(t) phi(t)>|^2`` at
    ``samples`` equally spaced times ending at ``t_final``. The step count is
    split evenly over the sample intervals.
    """
    n = params.N_fock
    psi0 = check_state(np.asarray(psi0, dtype=complex))
    if psi0.shape != (2 * n,):
        raise LayoutError(f"initial state must have dim {2 * n}")
    upper = np.abs(psi0.reshape(2, n)[:, n // 2:]) ** 2
    if upper.sum() > 1e-12:
        raise TruncationError("initial state must be supported below N_fock/2")
    t0 = 0.0 if sol is None else float(sol.times[0])
    if samples < 2 or steps < samples - 1:
        raise ParameterError("need samples >= 2 and at least one step per interval")
    times = np.linspace(t0, t_final, samples)
    per = max(1, int(math.ceil(steps / (samples - 1))))

    infid, leak = _run_dynamics(params, sol, psi0, times, per, beta_convention)
    if leak.max() > leakage_tol:
        raise TruncationError(f"population at the Fock cutoff reached {leak.max():.3e}")
    gap = None
    if check_convergence:
        infid2, _ = _run_dynamics(params, sol, psi0, times, 2 * per, beta_convention)
        gap = float(np.max(np.abs(infid2 - infid)))
        if gap > halving_tol:
            raise ConvergenceError(f"step halving changed the infidelity by {gap:.3e}")
    return DynamicsResult(float(infid[-1]), float(leak.max()), times, infid, leak, gap)


# ---------------------------------------------------------------------------
# many ions: layout Qubit^J x Fock


def _many_ops(n_ions, n):
    layout = HilbertLayout([Qubit()] * n_ions + [FockMode(n)])
    a = embed(layout, n_ions, annihilation(n))
    sig = {w: [embed(layout, j, pauli(w)) for j in range(n_ions)] for w in ("x", "z", "plus", "minus")}
    return layout, a, sig


def h_many(params: ManyIonParams, n_fock=None) -> np.ndarray:
    """``nu a^dag a + delta/2 sum sz_j + sum Omega_j (s+_j exp(i eta_j X) + h.c.)``."""
    n = params.N_fock if n_fock is None else n_fock
    _, a, sig = _many_ops(params.n_ions, n)
    x = a + a.conj().T
    h = params.nu * a.conj().T @ a
    for j, (om, eta) in enumerate(zip(params.Omegas, params.etas)):
        h = h + 0.5 * params.delta * sig["z"][j]
        c = om * sig["plus"][j] @ expm(1j * eta * x)
        h = h + c + c.conj().T
    return h


def transform_many(params: ManyIonParams, n_fock=None) -> np.ndarray:
    """``T_M = prod_j P_j exp(-i eta_j sz_j (a^dag + a) / 2)``."""
    n = params.N_fock if n_fock is None else n_fock
    layout, a, sig = _many_ops(params.n_ions, n)
    x = a + a.conj().T
    t = layout.identity()
    rot = rotation_pi4()
    for j, eta in enumerate(params.etas):
        t = t @ embed(layout, j, rot) @ expm(-0.5j * eta * sig["z"][j] @ x)
    return t


def dipole_operator(params: ManyIonParams, n_fock=None, include_diagonal=True) -> np.ndarray:
    """``sum_{j,k} eta_j eta_k / 4 sx_j sx_k``."""
    n = params.N_fock if n_fock is None else n_fock
    layout, _, sig = _many_ops(params.n_ions, n)
    out = np.zeros((layout.dim, layout.dim), dtype=complex)
    for j, ej in enumerate(params.etas):
        for k, ek in enumerate(params.etas):
            if j == k and not include_diagonal:
                continue
            out += ej * ek / 4 * sig["x"][j] @ sig["x"][k]
    return out


def claimed_many(params: ManyIonParams, dipole_coefficient=1.0) -> np.ndarray:
    n = params.N_fock
    _, a, sig = _many_ops(params.n_ions, n)
    h = params.nu * a.conj().T @ a
    for j, (om, eta) in enumerate(zip(params.Omegas, params.etas)):
        h = h - 0.5 * params.delta * sig["x"][j] + om * sig["z"][j]
        h = h + 0.5j * eta * params.nu * (a - a.conj().T) @ sig["x"][j]
    return h + dipole_coefficient * dipole_operator(params)


def linearize_many(params: ManyIonParams, pad=DEFAULT_PAD) -> LinearizationCheck:
    """Conjugate ``H_M`` by ``T_M`` and measure it against the printed form.

    ``fitted_dipole_coefficient`` is the least-squares multiplier of the
    off-diagonal ``j != k`` dipole coupling in ``computed - claimed``
    (the printed form corresponds to 1); it is ``None`` for a single ion.
    """
    n = params.N_fock
    nb = n + pad
    dims = (2,) * params.n_ions + (n,)
    dims_big = (2,) * params.n_ions + (nb,)
    t_big = transform_many(params, nb)
    computed = _fock_block(t_big @ h_many(params, nb) @ t_big.conj().T, dims_big, dims)
    claimed = claimed_many(params)
    mask = guard_mask(dims, fock_axes=(params.n_ions,))
    eye = np.eye(params.dim)

    diff = computed - claimed
    off = _offset(diff, mask)
    resid = _masked_max(diff - off * eye, mask)

    fitted = None
    resid_fit = resid
    if params.n_ions > 1:
        base = computed - claimed_many(params, dipole_coefficient=0.0)
        coupling = dipole_operator(params, include_diagonal=False)
        sub = np.ix_(mask, mask)
        # fit base ~ c * coupling + b * identity on the guarded block
        cols = np.stack([coupling[sub].ravel(), eye[sub].ravel()], axis=1)
        coef, *_ = np.linalg.lstsq(cols, base[sub].ravel(), rcond=None)
        fitted = float(coef[0].real)
        diag_const = sum(e * e for e in params.etas) / 4
        resid_fit = _masked_max(base - fitted * coupling - coef[1].real * eye, mask)
        extras_offset = float(coef[1].real) - fitted * diag_const
    else:
        extras_offset = off

    t_m = transform_many(params)
    h = h_many(params)
    spec = spectrum_distance(t_m @ h @ t_m.conj().T, h)
    return LinearizationCheck(
        claimed, computed, off, resid, spec, fitted,
        extras={"max_residual_fitted": resid_fit, "fitted_constant": extras_offset},
    )


# ---------------------------------------------------------------------------
# two-dimensional vibration: layout Qubit x Fock(N_x) x Fock(N_y)


def _two_d_ops(nx, ny):
    layout = HilbertLayout([Qubit(), FockMode(nx), FockMode(ny)])
    ax = embed(layout, 1, annihilation(nx))
    ay = embed(layout, 2, annihilation(ny))
    sig = {w: embed(layout, 0, pauli(w)) for w in ("x", "z", "plus", "minus")}
    return layout, ax, ay, sig


def h_2d(params: TwoDParams, nx=None, ny=None) -> np.ndarray:
    nx = params.N_x if nx is None else nx
    ny = params.N_y if ny is None else ny
    _, ax, ay, sig = _two_d_ops(nx, ny)
    h = params.nu_x * ax.conj().T @ ax + params.nu_y * ay.conj().T @ ay
    h = h + 0.5 * params.delta * sig["z"]
    disp = expm(1j * params.eta_x * (ax + ax.conj().T)) @ expm(1j * params.eta_y * (ay + ay.conj().T))
    c = params.Omega * sig["plus"] @ disp
    return h + c + c.conj().T


def transform_2d(params: TwoDParams, nx=None, ny=None) -> np.ndarray:
    nx = params.N_x if nx is None else nx
    ny = params.N_y if ny is None else ny
    layout, ax, ay, sig = _two_d_ops(nx, ny)
    gen = params.eta_x * (ax + ax.conj().T) + params.eta_y * (ay + ay.conj().T)
    return embed(layout, 0, rotation_pi4()) @ expm(-0.5j * gen @ sig["z"])


def claimed_2d(params: TwoDParams, corrected=False) -> np.ndarray:
    """The printed linearized 2D Hamiltonian.

    The printed form has a single ``nu`` in the linear coupling and an
    ``Omega sigma_x`` term; it is built with ``nu = nu_x``. ``corrected=True``
    uses per-mode frequencies and ``Omega sigma_z`` instead.
    """
    _, ax, ay, sig = _two_d_ops(params.N_x, params.N_y)
    h = params.nu_x * ax.conj().T @ ax + params.nu_y * ay.conj().T @ ay
    h = h - 0.5 * params.delta * sig["x"]
    if corrected:
        h = h + params.Omega * sig["z"]
        lin = params.nu_x * params.eta_x * (ax - ax.conj().T) + params.nu_y * params.eta_y * (ay - ay.conj().T)
    else:
        h = h + params.Omega * sig["x"]
        lin = params.nu_x * (params.eta_x * (ax - ax.conj().T) + params.eta_y * (ay - ay.conj().T))
    return h + 0.5j * sig["x"] @ lin


def _computed_2d(params, pad):
    nxb, nyb = params.N_x + pad, params.N_y + pad
    t_big = transform_2d(params, nxb, nyb)
    big = t_big @ h_2d(params, nxb, nyb) @ t_big.conj().T
    return _fock_block(big, (2, nxb, nyb), (2, params.N_x, params.N_y))


def linearize_2d(params: TwoDParams, pad=DEFAULT_PAD) -> LinearizationCheck:
    dims = (2, params.N_x, params.N_y)
    computed = _computed_2d(params, pad)
    claimed = claimed_2d(params)
    mask = guard_mask(dims, fock_axes=(1, 2))
    eye = np.eye(int(np.prod(dims)))
    diff = computed - claimed
    off = _offset(diff, mask)
    resid = _masked_max(diff - off * eye, mask)

    diff_c = computed - claimed_2d(params, corrected=True)
    resid_c = _masked_max(diff_c - _offset(diff_c, mask) * eye, mask)

    t = transform_2d(params)
    h = h_2d(params)
    spec = spectrum_distance(t @ h @ t.conj().T, h)
    return LinearizationCheck(claimed, computed, off, resid, spec, extras={"max_residual_corrected": resid_c})


def consistency_2d_vs_single(params: TwoDParams, pad=DEFAULT_PAD) -> float:
    """Max entry of (2D conjugation with eta_y = 0) minus (single-ion conjugation on x).

    The two starting Hamiltonians differ by the constant ``(nu_x + delta)/2``
    (the ``n + 1/2`` and ``A22`` forms), which is removed exactly.
    """
    if params.eta_y != 0:
        raise UnsupportedCaseError("consistency check needs eta_y = 0")
    single = IonLaserParams(nu0=params.nu_x, delta=params.delta, Omega=params.Omega,
                            eta0=params.eta_x, N_fock=params.N_x)
    nb = params.N_x + pad
    r = linearizer(params.eta_x, nb)
    h1 = r @ h_single_rotating(single, params.eta_x, params.nu_x, n_fock=nb) @ r.conj().T
    h1 = _fock_block(h1, (2, nb), (2, params.N_x))
    expected = np.kron(h1, np.eye(params.N_y))
    expected = expected + params.nu_y * kron(np.eye(2 * params.N_x), number_operator(params.N_y))
    expected = expected - 0.5 * (params.nu_x + params.delta) * np.eye(expected.shape[0])
    computed = _computed_2d(params, pad)
    mask = guard_mask((2, params.N_x, params.N_y), fock_axes=(1, 2))
    return _masked_max(computed - expected, mask)
