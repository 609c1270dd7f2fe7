import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qxform import ermakov
from qxform.errors import ConvergenceError, ParameterError, ValidationError

T = np.linspace(0.0, 5.0, 501)


def quench_oracle(t, nu1, nu2, ts):
    """Before the switch rho = nu1^-1/2; after it, with rho_dot = 0 at the switch,
    rho^2 = cos^2(nu2 s)/nu1 + nu1 sin^2(nu2 s)/nu2^2, s = t - ts."""
    s = np.clip(t - ts, 0.0, None)
    return np.sqrt(np.cos(nu2 * s) ** 2 / nu1 + nu1 * np.sin(nu2 * s) ** 2 / nu2 ** 2)


@pytest.mark.parametrize("nu0", [0.5, 1.0, 3.0])
def test_constant_is_stationary(nu0):
    sol = ermakov.solve_ermakov(ermakov.Constant(nu0), T)
    assert np.max(np.abs(sol.rho - nu0 ** -0.5)) < 1e-12
    assert np.max(np.abs(sol.rho_dot)) < 1e-12


def test_free_particle():
    sol = ermakov.solve_ermakov(ermakov.Tabulated([0, 5], [0, 0]), T, rho0=1.0)
    assert np.max(np.abs(sol.rho - np.sqrt(1 + T ** 2))) < 1e-10
    assert np.max(np.abs(sol.rho_dot - T / np.sqrt(1 + T ** 2))) < 1e-10


@pytest.mark.parametrize("nu1,nu2,ts", [(1.0, 2.0, 1.0), (2.0, 0.7, 0.35)])
def test_quench_closed_form(nu1, nu2, ts):
    sol = ermakov.solve_ermakov(ermakov.Quench(nu1, nu2, ts), T)
    assert np.max(np.abs(sol.rho - quench_oracle(T, nu1, nu2, ts))) < 1e-9


def test_coarse_output_grid_is_still_accurate():
    t = np.array([0.0, 2.0, 5.0])
    sol = ermakov.solve_ermakov(ermakov.Quench(1.0, 2.0, 1.0), t)
    assert np.max(np.abs(sol.rho - quench_oracle(t, 1.0, 2.0, 1.0))) < 1e-9


def test_residual_excludes_breakpoint_stencils():
    t = np.linspace(0, 5, 4001)
    sol = ermakov.solve_ermakov(ermakov.Quench(1.0, 2.0, 1.0), t)
    r = ermakov.residual(sol)
    assert np.isnan(r[800]) and np.isnan(r[0])
    assert np.nanmax(r) < 1e-8


def test_residual_needs_uniform_grid():
    sol = ermakov.solve_ermakov(ermakov.Constant(1.0), np.array([0, 0.1, 0.3, 0.4, 0.9, 1.0]))
    with pytest.raises(ValidationError):
        ermakov.residual(sol)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 2.0), st.floats(-1.0, 1.0))
def test_first_integral_conserved(nu, rho0, rd0):
    sol = ermakov.solve_ermakov(ermakov.Constant(nu), np.linspace(0, 3, 301), rho0=rho0, rho_dot0=rd0)
    e = ermakov.first_integral(sol)
    assert (e.max() - e.min()) / e[0] < 1e-9


def test_derived_quantities_constant():
    sol = ermakov.solve_ermakov(ermakov.Constant(2.0), T)
    assert ermakov.derived_frequency(sol, 1.7) == pytest.approx(2.0)
    assert ermakov.lamb_dicke(sol, 0.1, 3.0) == pytest.approx(0.1)
    assert ermakov.beta(sol, 0.1, 2.0) == pytest.approx(0.1 + 0j)
    assert ermakov.phase_integral(sol, 4.0) == pytest.approx(8.0)


def test_interpolation_and_range():
    sol = ermakov.solve_ermakov(ermakov.Tabulated([0, 5], [0, 0]), T, rho0=1.0)
    assert sol.rho_at(1.234) == pytest.approx(np.sqrt(1 + 1.234 ** 2), abs=1e-8)
    with pytest.raises(ParameterError):
        sol.rho_at(6.0)


def test_csv_rows_shape():
    sol = ermakov.solve_ermakov(ermakov.Constant(1.0), np.linspace(0, 1, 3))
    rows = list(ermakov.csv_rows(sol, 0.1))
    assert len(rows) == 3 and all(len(r) == 7 for r in rows)
    assert rows[0][5] == pytest.approx(0.05) and rows[0][6] == 0.0


def test_bad_inputs():
    with pytest.raises(ParameterError):
        ermakov.solve_ermakov(ermakov.Constant(1.0), [0.0, 0.0, 1.0])
    with pytest.raises(ParameterError):
        ermakov.solve_ermakov(ermakov.Constant(1.0), [0.0, 1.0], rho0=-1.0)
    with pytest.raises(ParameterError):
        ermakov.schedule_from_dict({"type": "ramp"})
    with pytest.raises(ParameterError):
        ermakov.schedule_from_dict({"type": "quench", "nu1": 1})
    with pytest.raises(ParameterError):
        ermakov.Constant(-1.0)


def test_schedule_roundtrip():
    for s in (ermakov.Constant(1.5), ermakov.Quench(1, 2, 0.5), ermakov.Tabulated([0, 1, 2], [1, 2, 1])):
        again = ermakov.schedule_from_dict(s.to_dict())
        assert np.allclose(again.value(np.linspace(0, 2, 9)), s.value(np.linspace(0, 2, 9)))


def test_tiny_rho0_refused():
    # 1/rho^2 sets the time scale; rho0 = 1e-5 would need ~1e11 steps
    with pytest.raises(ConvergenceError):
        ermakov.solve_ermakov(ermakov.Constant(1.0), np.linspace(0, 1, 11), rho0=1e-5)
