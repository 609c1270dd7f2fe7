"""Slow two-level atom crossing a cavity mode.

Layout is ``Grid(M) x Qubit x Fock(N)``. The interaction-picture
Hamiltonian ``p^2/2 + g(x)(a s+ + a^dag s-)`` is rewritten with the
non-unitary ``T = diag(1, V)`` (``V`` the one-sided lowering shift acting on
the ground-state component), giving the factorized propagator

    U(t) = [T^dag exp(-i(p^2/2 + g(x) sx sqrt(n+1)) t) T + P_g0] exp(-i p^2/2 P_g0 t)

with ``P_g0`` the projector on ``|g>|0>``. A dense ``expm`` of the full
Hamiltonian serves as the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, ParameterError, TruncationError, ValidationError
from .fock import (
    FockMode,
    Grid,
    HilbertLayout,
    Qubit,
    annihilation,
    check_state,
    embed,
    expm_hermitian,
    kron,
    number_operator,
    pauli,
)


@dataclass(frozen=True)
class GridSpec:
    points: int
    length: float
    boundary: str = "periodic"

    def __post_init__(self):
        if self.points < 8:
            raise InvalidDimensionError(f"grid needs at least 8 points, got {self.points}")
        if not self.length > 0:
            raise ParameterError("grid length must be positive")
        if self.boundary != "periodic":
            raise ParameterError("only periodic boundaries are supported")

    @property
    def spacing(self):
        return self.length / self.points

    def positions(self):
        return -self.length / 2 + self.spacing * np.arange(self.points)

    def wavenumbers(self):
        return 2 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)


@dataclass(frozen=True)
class ModeShape:
    """``constant``: g0; ``sinusoidal``: g0 cos(k x); ``gaussian``: g0 exp(-(x-xc)^2 / 2w^2)."""

    kind: str
    g0: float
    k_mode: float = 1.0
    x_center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "sinusoidal", "gaussian"):
            raise ParameterError(f"unknown mode shape {self.kind!r}")
        if self.kind == "gaussian" and not self.width > 0:
            raise ParameterError("gaussian width must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full_like(x, self.g0)
        if self.kind == "sinusoidal":
            return self.g0 * np.cos(self.k_mode * x)
        return self.g0 * np.exp(-((x - self.x_center) ** 2) / (2 * self.width ** 2))


@dataclass(frozen=True)
class SlowAtomSystem:
    grid: GridSpec
    mode: ModeShape
    N_fock: int
    omega: float = 1.0
    omega0: float = 1.0
    kinetic: str = "spectral"

    def __post_init__(self):
        if self.N_fock < 2:
            raise InvalidDimensionError("N_fock must be >= 2")
        if self.omega != self.omega0:
            raise ParameterError("interaction picture requires resonance omega == omega0")
        if self.kinetic not in ("spectral", "central"):
            raise ParameterError("kinetic must be 'spectral' or 'central'")
        if self.dim > 4096:
            raise ParameterError(f"dimension {self.dim} exceeds 4096")

    @property
    def layout(self):
        return HilbertLayout([Grid(self.grid.points, self.grid.length), Qubit(), FockMode(self.N_fock)])

    @property
    def dim(self):
        return self.grid.points * 2 * self.N_fock


# ---------------------------------------------------------------------------
# operators


def lowering_shift(n: int) -> np.ndarray:
    """``V = sum_k |k><k+1|``; ``a = sqrt(n+1) V`` holds exactly when truncated."""
    if n < 2:
        raise InvalidDimensionError(f"N must be >= 2, got {n}")
    return np.eye(n, k=1, dtype=complex)


def kinetic_matrix(grid: GridSpec, method="spectral") -> np.ndarray:
    """``p^2`` on the periodic grid."""
    m = grid.points
    if method == "spectral":
        k2 = grid.wavenumbers() ** 2
        f = np.fft.fft(np.eye(m), axis=0)
        p2 = np.fft.ifft(k2[:, None] * f, axis=0)
        return 0.5 * (p2 + p2.conj().T)
    if method == "central":
        h = grid.spacing
        lap = -2 * np.eye(m) + np.eye(m, k=1) + np.eye(m, k=-1)
        lap[0, -1] = lap[-1, 0] = 1
        return (-lap / h ** 2).astype(complex)
    raise ParameterError(f"unknown kinetic method {method!r}")


def _parts(sys: SlowAtomSystem):
    lay = sys.layout
    kin = embed(lay, 0, 0.5 * kinetic_matrix(sys.grid, sys.kinetic))
    g = embed(lay, 0, np.diag(sys.mode(sys.grid.positions())).astype(complex))
    return lay, kin, g


def transform(sys: SlowAtomSystem) -> np.ndarray:
    """``T = |e><e| x 1 + |g><g| x V`` (identity on the grid)."""
    n = sys.N_fock
    t_int = kron(pauli("ee"), np.eye(n)) + kron(pauli("gg"), lowering_shift(n))
    return kron(np.eye(sys.grid.points), t_int)


def ground_vacuum_projector(sys: SlowAtomSystem) -> np.ndarray:
    n = sys.N_fock
    p = np.zeros((n, n), dtype=complex)
    p[0, 0] = 1
    return kron(np.eye(sys.grid.points), pauli("gg"), p)


def h_interaction(sys: SlowAtomSystem) -> np.ndarray:
    """``p^2/2 + g(x)(a s+ + a^dag s-)``."""
    lay, kin, g = _parts(sys)
    a = annihilation(sys.N_fock)
    jc = kron(pauli("plus"), a) + kron(pauli("minus"), a.conj().T)
    return kin + g @ kron(np.eye(sys.grid.points), jc)


def h_effective(sys: SlowAtomSystem) -> np.ndarray:
    """``p^2/2 + g(x) sx sqrt(n+1)``, the operator sandwiched by T^dag ... T."""
    lay, kin, g = _parts(sys)
    n = sys.N_fock
    root = np.sqrt(number_operator(n) + np.eye(n))
    return kin + g @ kron(np.eye(sys.grid.points), pauli("x"), root)


def kinetic_projected(sys: SlowAtomSystem) -> np.ndarray:
    """``p^2/2 P_g0``."""
    _, kin, _ = _parts(sys)
    return kin @ ground_vacuum_projector(sys)


def factorized_propagator(sys: SlowAtomSystem, t: float) -> np.ndarray:
    if t < 0:
        raise ParameterError("t must be non-negative")
    tt = transform(sys)
    proj = ground_vacuum_projector(sys)
    inner = tt.conj().T @ expm_hermitian(h_effective(sys), t) @ tt + proj
    return inner @ expm_hermitian(kinetic_projected(sys), t)


def direct_propagator(sys: SlowAtomSystem, t: float) -> np.ndarray:
    return expm_hermitian(h_interaction(sys), t)


# ---------------------------------------------------------------------------
# states and propagation


def gaussian_packet(grid: GridSpec, x0=0.0, sigma=0.5, k0=0.0) -> np.ndarray:
    x = grid.positions()
    psi = np.exp(-((x - x0) ** 2) / (4 * sigma ** 2) + 1j * k0 * x)
    return psi / np.linalg.norm(psi)


def plane_wave(grid: GridSpec, m: int = 1) -> np.ndarray:
    x = grid.positions()
    psi = np.exp(2j * np.pi * m * x / grid.length)
    return psi / np.linalg.norm(psi)


def product_state(spatial, internal: str, fock_level: int, n_fock: int) -> np.ndarray:
    """``spatial x |e or g> x |fock_level>``."""
    if internal not in ("e", "g"):
        raise ValidationError("internal state must be 'e' or 'g'")
    q = np.array([1, 0] if internal == "e" else [0, 1], dtype=complex)
    f = np.zeros(n_fock, dtype=complex)
    f[fock_level] = 1
    return kron(np.asarray(spatial, dtype=complex), q, f)


def top_level_population(sys: SlowAtomSystem, psi) -> float:
    amps = np.asarray(psi).reshape(sys.grid.points, 2, sys.N_fock)
    return float(np.sum(np.abs(amps[:, :, -1]) ** 2))


def _check_initial(sys, psi0):
    psi0 = check_state(psi0, tol=1e-10)
    if psi0.shape != (sys.dim,):
        raise ValidationError(f"state must have dim {sys.dim}")
    leak = top_level_population(sys, psi0)
    if leak >= 1e-10:
        raise TruncationError(f"initial population {leak:.3e} at the top Fock level")
    return psi0


def propagate(sys: SlowAtomSystem, psi0, t: float) -> np.ndarray:
    psi0 = _check_initial(sys, psi0)
    return factorized_propagator(sys, t) @ psi0


def compare_oracle(sys: SlowAtomSystem, psi0, t: float) -> float:
    """``||(U_factorized - U_direct) psi0||``."""
    psi0 = _check_initial(sys, psi0)
    return float(np.linalg.norm(factorized_propagator(sys, t) @ psi0 - direct_propagator(sys, t) @ psi0))


def populations(sys: SlowAtomSystem, psi) -> dict:
    amps = np.asarray(psi).reshape(sys.grid.points, 2, sys.N_fock)
    p = np.sum(np.abs(amps) ** 2, axis=(0, 2))
    return {"excited": float(p[0]), "ground": float(p[1])}


# ---------------------------------------------------------------------------
# algebraic claims


def fock_guard_mask(sys: SlowAtomSystem, guard: int = 2) -> np.ndarray:
    levels = np.broadcast_to(np.arange(sys.N_fock), (sys.grid.points, 2, sys.N_fock))
    return (levels < sys.N_fock - guard).ravel()


def commutation_residual(sys: SlowAtomSystem, guard: int = 2) -> float:
    """Largest entry of ``[T^dag A T, p^2/2 P_g0]`` below the guard band."""
    tt = transform(sys)
    lhs = tt.conj().T @ h_effective(sys) @ tt
    rhs = kinetic_projected(sys)
    c = lhs @ rhs - rhs @ lhs
    m = fock_guard_mask(sys, guard)
    return float(np.max(np.abs(c[np.ix_(m, m)]), initial=0.0))


def power_residual(sys: SlowAtomSystem, a: np.ndarray, k: int, guard: int = 2) -> float:
    """``(T^dag A T)^k - T^dag A^k T`` below the guard band."""
    tt = transform(sys)
    lhs = np.linalg.matrix_power(tt.conj().T @ a @ tt, k)
    rhs = tt.conj().T @ np.linalg.matrix_power(a, k) @ tt
    m = fock_guard_mask(sys, guard)
    return float(np.max(np.abs((lhs - rhs)[np.ix_(m, m)]), initial=0.0))
