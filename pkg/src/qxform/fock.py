"""Truncated Fock-space operator algebra.

Operators are plain ``numpy`` complex arrays of shape ``(dim, dim)``; states
are 1-D complex arrays. Conventions used throughout the package:

* hbar = 1 and unit mass.
* Qubit basis order is ``(|e>, |g>)``, so ``sigma_plus = |e><g|`` is the
  upper-right element and ``sigma_z = diag(1, -1)``.
* In a tensor product the leftmost factor is the slowest-varying index,
  which is what ``np.kron(A, B)`` produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from .errors import (
    InvalidDimensionError,
    LayoutError,
    NonFiniteError,
    ParameterError,
    ValidationError,
)

# ---------------------------------------------------------------------------
# layouts


@dataclass(frozen=True)
class Qubit:
    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class FockMode:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidDimensionError(f"Fock mode needs at least one level, got {self.n}")

    @property
    def dim(self) -> int:
        return self.n


@dataclass(frozen=True)
class Grid:
    points: int
    length: float

    def __post_init__(self):
        if self.points < 1:
            raise InvalidDimensionError(f"grid needs at least one point, got {self.points}")
        if not self.length > 0:
            raise ParameterError(f"grid length must be positive, got {self.length}")

    @property
    def dim(self) -> int:
        return self.points


Factor = Union[Qubit, FockMode, Grid]


@dataclass(frozen=True)
class HilbertLayout:
    """Ordered list of tensor factors; factor 0 varies slowest."""

    factors: tuple

    def __init__(self, factors: Sequence[Factor]):
        object.__setattr__(self, "factors", tuple(factors))
        if not self.factors:
            raise LayoutError("layout needs at least one factor")

    @property
    def dims(self) -> tuple:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)


# ---------------------------------------------------------------------------
# constructors


def _check_fock_dim(n):
    if int(n) != n or n < 2:
        raise InvalidDimensionError(f"Fock dimension must be an integer >= 2, got {n}")
    return int(n)


def annihilation(n: int) -> np.ndarray:
    """Lowering operator with ``<k-1|a|k> = sqrt(k)``."""
    n = _check_fock_dim(n)
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def creation(n: int) -> np.ndarray:
    return annihilation(n).conj().T


def number_operator(n: int) -> np.ndarray:
    n = _check_fock_dim(n)
    return np.diag(np.arange(n, dtype=float)).astype(complex)


def position_quadrature(n: int, nu0: float) -> np.ndarray:
    """``x = (a + a^dag) / sqrt(2 nu0)``."""
    if not nu0 > 0:
        raise ParameterError(f"nu0 must be positive, got {nu0}")
    a = annihilation(n)
    return (a + a.conj().T) / np.sqrt(2.0 * nu0)


def momentum_quadrature(n: int, nu0: float) -> np.ndarray:
    """``p = i sqrt(nu0/2) (a^dag - a)``."""
    if not nu0 > 0:
        raise ParameterError(f"nu0 must be positive, got {nu0}")
    a = annihilation(n)
    return 1j * np.sqrt(nu0 / 2.0) * (a.conj().T - a)


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
    "ee": np.array([[1, 0], [0, 0]], dtype=complex),
    "gg": np.array([[0, 0], [0, 1]], dtype=complex),
}


def pauli(which: str) -> np.ndarray:
    """Qubit operator by name: x, y, z, plus, minus (also ee, gg projectors)."""
    try:
        return _PAULI[which].copy()
    except KeyError:
        raise ParameterError(f"unknown qubit operator {which!r}") from None


def kron(*ops) -> np.ndarray:
    return reduce(np.kron, ops)


def embed(layout: HilbertLayout, factor_index: int, op: np.ndarray) -> np.ndarray:
    """Place ``op`` on one factor of ``layout``, identity on the others."""
    dims = layout.dims
    if not 0 <= factor_index < len(dims):
        raise LayoutError(f"factor index {factor_index} out of range for {len(dims)} factors")
    op = np.asarray(op)
    if op.shape != (dims[factor_index],) * 2:
        raise LayoutError(
            f"operator shape {op.shape} does not match factor {factor_index} of dim {dims[factor_index]}"
        )
    left = int(np.prod(dims[:factor_index]))
    right = int(np.prod(dims[factor_index + 1:]))
    out = np.kron(np.eye(left), op)
    return np.kron(out, np.eye(right)).astype(complex)


# ---------------------------------------------------------------------------
# algebra


def expm(a: np.ndarray) -> np.ndarray:
    """Dense matrix exponential (scaling and squaring, Pade 13)."""
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("expm called on a matrix with non-finite entries")
    return scipy.linalg.expm(a)


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` by eigendecomposition."""
    if not np.all(np.isfinite(h)):
        raise NonFiniteError("non-finite Hamiltonian")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def _same_shape(a, b):
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LayoutError(f"shape mismatch: {a.shape} vs {b.shape}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _same_shape(a, b)
    return a @ b - b @ a


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def is_unitary(a: np.ndarray, tol: float = 1e-10) -> bool:
    eye = np.eye(a.shape[0])
    return bool(np.max(np.abs(a.conj().T @ a - eye), initial=0.0) <= tol)


# ---------------------------------------------------------------------------
# states


def basis(dim: int, k: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if nrm == 0 or not np.isfinite(nrm):
        raise ValidationError("cannot normalize a zero or non-finite vector")
    return psi / nrm


def check_state(psi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValidationError("state vector must be 1-D")
    if abs(np.linalg.norm(psi) - 1.0) > tol:
        raise ValidationError(f"state norm {np.linalg.norm(psi)!r} differs from 1")
    return psi


def coherent_amplitudes(alpha: complex, n: int) -> np.ndarray:
    """Truncated coherent state, renormalized after truncation."""
    n = _check_fock_dim(n)
    amps = np.empty(n, dtype=complex)
    amps[0] = 1.0
    for k in range(1, n):
        amps[k] = amps[k - 1] * alpha / np.sqrt(k)
    return normalize(amps * np.exp(-abs(alpha) ** 2 / 2))


def fock_density(n: int, k: int) -> np.ndarray:
    v = basis(n, k)
    return np.outer(v, v.conj())


def pure_density(psi: np.ndarray) -> np.ndarray:
    psi = normalize(psi)
    return np.outer(psi, psi.conj())


def density_diagnostics(rho: np.ndarray) -> dict:
    """Trace, hermiticity defect and smallest eigenvalue of ``rho``."""
    herm = float(np.max(np.abs(rho - rho.conj().T), initial=0.0))
    evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    return {
        "trace": complex(np.trace(rho)),
        "hermiticity": herm,
        "min_eig": float(evals[0]),
    }


def check_density_matrix(rho: np.ndarray, herm_tol=1e-12, trace_tol=1e-10, eig_floor=-1e-10):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got {rho.shape}")
    diag = density_diagnostics(rho)
    if diag["hermiticity"] > herm_tol:
        raise ValidationError(f"density matrix not Hermitian (defect {diag['hermiticity']:.3e})")
    if abs(diag["trace"] - 1.0) > trace_tol:
        raise ValidationError(f"density matrix trace {diag['trace']} differs from 1")
    if diag["min_eig"] < eig_floor:
        raise ValidationError(f"density matrix has eigenvalue {diag['min_eig']:.3e}")
    return rho


# ---------------------------------------------------------------------------
# serialization


def matrix_to_json(a: np.ndarray) -> dict:
    """``{"dim": N, "entries": [[re, im], ...]}`` in row-major order."""
    a = np.asarray(a, dtype=complex)
    return {
        "dim": int(a.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    dim = int(obj["dim"])
    entries = obj["entries"]
    if len(entries) != dim * dim:
        raise ValidationError(f"expected {dim * dim} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(dim, dim)
