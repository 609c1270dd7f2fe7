"""Invariant suite behind ``qxform selftest``.

Every check records its numeric value and threshold. Checks marked
``gating=False`` record a property of the printed formulas that is known
not to hold (the report keeps them visible; they do not set the exit code).
The report has no timestamps, so repeated runs give identical bytes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import ermakov, fock, ion_laser, kerr, slow_atom
from .lcg import hermitian_samples


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    gating: bool = True
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.value < self.threshold)

    def as_dict(self):
        d = asdict(self)
        d["value"] = float(self.value)
        d["passed"] = self.passed
        return d


def _fock_checks():
    n = 16
    a = fock.annihilation(n)
    v = slow_atom.lowering_shift(n)
    root = np.sqrt(fock.number_operator(n) + np.eye(n))
    p = np.pi / 4 * (fock.pauli("plus") - fock.pauli("minus"))
    rot = fock.expm(p) @ fock.pauli("z") @ fock.expm(-p)
    gen = hermitian_samples(1, 6, seed=7)[0]
    return [
        Check("fock.number_identity", np.max(np.abs(a.conj().T @ a - fock.number_operator(n))), 1e-12),
        Check("fock.sqrt_shift_identity", np.max(np.abs(root @ v - a)), 1e-15),
        Check("fock.pi4_rotation", np.max(np.abs(rot + fock.pauli("x"))), 1e-12),
        Check("fock.expm_inverse", np.max(np.abs(fock.expm(gen) @ fock.expm(-gen) - np.eye(6))), 1e-10),
    ]


def _ermakov_checks():
    t = np.linspace(0.0, 5.0, 4001)
    out = []
    schedules = {
        "constant": (ermakov.Constant(1.0), None),
        "quench": (ermakov.Quench(1.0, 2.0, 1.0), 1.0),
        "tabulated": (ermakov.Tabulated([0, 1, 2, 5], [1.0, 1.5, 1.2, 1.0]), None),
    }
    for name, (sched, rho0) in schedules.items():
        sol = ermakov.solve_ermakov(sched, t, rho0=rho0)
        out.append(Check(f"ermakov.residual.{name}", ermakov.max_residual(sol), 1e-8))
    const = ermakov.solve_ermakov(ermakov.Constant(2.0), t)
    out.append(Check("ermakov.constant_closed_form", np.max(np.abs(const.rho - 2.0 ** -0.5)), 1e-8))
    free = ermakov.solve_ermakov(ermakov.Tabulated([0, 5], [0, 0]), t, rho0=1.0)
    out.append(Check("ermakov.free_closed_form", np.max(np.abs(free.rho - np.sqrt(1 + t ** 2))), 1e-8))
    gen = ermakov.solve_ermakov(ermakov.Constant(1.0), t, rho0=1.3)
    e = ermakov.first_integral(gen)
    out.append(Check("ermakov.first_integral", float(e.max() - e.min()), 1e-8))
    return out


def _ion_checks():
    single = ion_laser.IonLaserParams(nu0=1.0, delta=0.0, Omega=1.0, eta0=0.1, N_fock=32)
    lin = ion_laser.linearize_single(single)
    psi0 = fock.kron(fock.basis(2, 1), fock.basis(32, 0))
    dyn = ion_laser.dynamics_equivalence(single, None, psi0, 2.0, 200)
    many = ion_laser.linearize_many(ion_laser.ManyIonParams(1.0, 0.0, (1.0, 1.0), (0.1, 0.1), 24))
    two = ion_laser.linearize_2d(ion_laser.TwoDParams(1.0, 1.3, 0.0, 1.0, 0.1, 0.05, 12, 12))
    cons = ion_laser.consistency_2d_vs_single(ion_laser.TwoDParams(1.0, 1.3, 0.0, 1.0, 0.1, 0.0, 12, 12))
    return [
        Check("ion.single.claimed_vs_computed", lin.max_residual, 1e-8),
        Check("ion.single.dynamics_infidelity", dyn.infidelity, 1e-6),
        Check("ion.many.spectrum", many.spectrum_distance, 1e-6),
        Check("ion.many.printed_form_residual", many.max_residual, 1e-8, gating=False,
              note="printed dipole term; exact only when nu = 1"),
        Check("ion.2d.spectrum", two.spectrum_distance, 1e-6),
        Check("ion.2d.printed_form_residual", two.max_residual, 1e-8, gating=False,
              note="printed Omega sigma_x term; sigma_z is what the conjugation gives"),
        Check("ion.2d.single_consistency", cons, 1e-8),
    ]


def _slow_checks():
    grid = slow_atom.GridSpec(32, 2 * np.pi)
    sys = slow_atom.SlowAtomSystem(grid, slow_atom.ModeShape("sinusoidal", 0.5), 4)
    psi0 = slow_atom.product_state(slow_atom.gaussian_packet(grid), "e", 0, 4)
    tt = slow_atom.transform(sys)
    defect = tt.conj().T @ tt - (np.eye(sys.dim) - slow_atom.ground_vacuum_projector(sys))
    return [
        Check("slow.factorized_vs_direct", slow_atom.compare_oracle(sys, psi0, 1.0), 1e-6),
        Check("slow.commutation", slow_atom.commutation_residual(sys), 1e-10),
        Check("slow.TdagT", float(np.max(np.abs(defect))), 1e-15),
    ]


def _kerr_checks():
    p8 = kerr.KerrParams(0.5, 0.1, 8)
    samples = hermitian_samples(20, 8)
    yj_printed, rj = kerr.superop_commutator_check(p8, samples)
    yj_ichi, _ = kerr.superop_commutator_check(p8, samples, coefficient=1j * p8.chi)
    p = kerr.KerrParams(0.5, 0.1, 16)
    rho0 = fock.pure_density(fock.coherent_amplitudes(1.0, 16))
    rows = kerr.compare(p, rho0, np.linspace(0.0, 5.0, 11), steps=5000)
    semi = max(
        np.max(np.abs(kerr.analytic_solution(p, kerr.analytic_solution(p, rho0, t1), t2)
                      - kerr.analytic_solution(p, rho0, t1 + t2)))
        for t1, t2 in ((0.3, 0.7), (1.0, 1.0), (2.0, 0.5))
    )
    return [
        Check("kerr.differential", max(r["max_abs_diff"] for r in rows), 1e-6),
        Check("kerr.trace", max(abs(r["trace_analytic"] - 1) for r in rows), 1e-10),
        Check("kerr.semigroup", float(semi), 1e-9),
        Check("kerr.commutator_RJ", rj, 1e-12),
        Check("kerr.commutator_YJ_ichi", yj_ichi, 1e-12),
        Check("kerr.commutator_YJ_printed_2ichi", yj_printed, 1e-12, gating=False,
              note="printed coefficient 2 i chi; the identity holds with i chi"),
    ]


SECTIONS = {
    "fock": _fock_checks,
    "ermakov": _ermakov_checks,
    "ion": _ion_checks,
    "slow": _slow_checks,
    "kerr": _kerr_checks,
}


def run_selftest(sections=None) -> dict:
    checks = []
    for name in sections or SECTIONS:
        checks.extend(SECTIONS[name]())
    passed = all(c.passed for c in checks if c.gating)
    return {"passed": passed, "checks": [c.as_dict() for c in checks]}
