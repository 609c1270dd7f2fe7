"""Exact unitary and superoperator transformations for trapped-ion, cavity and Kerr models.

hbar = 1 and unit mass throughout. Qubit basis order is ``(|e>, |g>)``.
"""

from . import ermakov, fock, ion_laser, kerr, slow_atom
from ._accel import HAVE_NUMBA, backend_name
from .errors import NumericalError, QxformError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "ermakov", "fock", "ion_laser", "kerr", "slow_atom",
    "HAVE_NUMBA", "backend_name", "NumericalError", "QxformError", "ValidationError",
]
