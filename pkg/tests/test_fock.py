import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qxform import fock
from qxform.errors import InvalidDimensionError, LayoutError, NonFiniteError, ParameterError


def test_ladder_matrix_elements():
    a = fock.annihilation(5)
    for k in range(1, 5):
        assert a[k - 1, k] == pytest.approx(math.sqrt(k))
    assert np.count_nonzero(a) == 4


def test_canonical_commutator_breaks_only_at_cutoff():
    n = 10
    a = fock.annihilation(n)
    c = fock.commutator(a, fock.creation(n))
    expected = np.eye(n)
    expected[-1, -1] = 1 - n
    assert np.max(np.abs(c - expected)) < 1e-13


@pytest.mark.parametrize("n", [0, 1, 2.5])
def test_bad_fock_dimension(n):
    with pytest.raises(InvalidDimensionError):
        fock.annihilation(n)


def test_quadratures_hermitian_and_scaled():
    x = fock.position_quadrature(8, 2.0)
    p = fock.momentum_quadrature(8, 2.0)
    assert fock.is_hermitian(x) and fock.is_hermitian(p)
    # <0|x^2|0> = 1/(2 nu0), <0|p^2|0> = nu0/2
    assert (x @ x)[0, 0].real == pytest.approx(0.25)
    assert (p @ p)[0, 0].real == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        fock.position_quadrature(4, 0.0)


def test_pauli_conventions():
    # basis order (|e>, |g>): sigma_z |e> = |e>, sigma_+ |g> = |e>
    e, g = fock.basis(2, 0), fock.basis(2, 1)
    assert np.allclose(fock.pauli("z") @ e, e)
    assert np.allclose(fock.pauli("plus") @ g, e)
    assert np.allclose(fock.pauli("minus") @ e, g)
    with pytest.raises(ParameterError):
        fock.pauli("w")


def test_embed_matches_kron():
    layout = fock.HilbertLayout([fock.Qubit(), fock.FockMode(3), fock.FockMode(2)])
    a = fock.annihilation(3)
    assert np.array_equal(fock.embed(layout, 1, a), np.kron(np.kron(np.eye(2), a), np.eye(2)))
    assert layout.dim == 12
    with pytest.raises(LayoutError):
        fock.embed(layout, 1, np.eye(2))
    with pytest.raises(LayoutError):
        fock.embed(layout, 3, np.eye(2))


def test_expm_against_series():
    a = np.array([[0.1, 0.2j], [0.3, -0.05]])
    series = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for k in range(1, 30):
        term = term @ a / k
        series = series + term
    assert np.max(np.abs(fock.expm(a) - series)) < 1e-14


def test_expm_pauli_closed_form():
    # exp(-i theta sigma_x) = cos(theta) - i sin(theta) sigma_x
    th = 0.7
    u = fock.expm(-1j * th * fock.pauli("x"))
    assert np.allclose(u, np.cos(th) * np.eye(2) - 1j * np.sin(th) * fock.pauli("x"), atol=1e-15)


def test_expm_rejects_nonfinite():
    with pytest.raises(NonFiniteError):
        fock.expm(np.array([[np.nan, 0], [0, 1]]))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.floats(-3, 3), st.integers(0, 2 ** 32 - 1))
def test_expm_hermitian_agrees_with_expm(n, t, seed):
    r = np.random.default_rng(seed)
    h = r.normal(size=(n, n)) + 1j * r.normal(size=(n, n))
    h = h + h.conj().T
    u = fock.expm_hermitian(h, t)
    assert fock.is_unitary(u)
    assert np.max(np.abs(u - fock.expm(-1j * t * h))) < 1e-10


def test_coherent_state_poisson_weights():
    alpha = 0.8 + 0.3j
    psi = fock.coherent_amplitudes(alpha, 30)
    p = np.abs(psi) ** 2
    lam = abs(alpha) ** 2
    expected = np.array([math.exp(-lam) * lam ** k / math.factorial(k) for k in range(30)])
    assert np.max(np.abs(p - expected)) < 1e-14
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_density_checks():
    rho = fock.pure_density(fock.coherent_amplitudes(1.0, 6))
    d = fock.density_diagnostics(rho)
    assert abs(d["trace"] - 1) < 1e-12
    assert d["hermiticity"] < 1e-15
    fock.check_density_matrix(rho)
    with pytest.raises(Exception):
        fock.check_density_matrix(np.diag([1.2, -0.2]))


def test_matrix_json_roundtrip(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    obj = fock.matrix_to_json(a)
    assert obj["dim"] == 4
    assert np.array_equal(fock.matrix_from_json(obj), a)
