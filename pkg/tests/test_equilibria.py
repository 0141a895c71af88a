"""Equilibrium solver: normalization, thermodynamic closed forms, deltas."""

import math

import numpy as np
import pytest

from boltzkit import equilibria, functionals
from boltzkit.equilibria import (
    MaxwellianSpec,
    NoSolutionError,
    NonContractionError,
)


def c0(rho, T, V, n):
    return rho / ((2.0 * math.pi * T) ** (n / 2.0) * V)


def test_classical_limit_exact():
    # eps = 0 must NOT go through the iteration; amplitude is the closed form
    for (rho, T, V, n) in [(1.0, 0.15915494309189535, 1.0, 2), (0.7, 0.3, 2.0, 3)]:
        eq = equilibria.equilibrium_state(rho, T, V, n, 0.0)
        assert eq.C == c0(rho, T, V, n)  # bitwise


# frozen from a 30-digit solve of (2 pi T)^(n/2) V C L_{n/2}(C eps) = rho
QUANTUM_CASES = [
    # (n, rho, T, V, eps, C, E)
    (3, 1.0, 0.5, 1.0, 0.4, 0.1750790168779377, 0.74046315175988448),
    (2, 0.7, 0.3, 2.0, -0.8, 0.20018069348726788, 0.21792727925004053),
]


@pytest.mark.parametrize("n,rho,T,V,eps,C,E", QUANTUM_CASES)
def test_quantum_amplitude_frozen(n, rho, T, V, eps, C, E):
    eq = equilibria.equilibrium_state(rho, T, V, n, eps)
    assert eq.C == pytest.approx(C, rel=1e-12)
    assert equilibria.quantum_energy(eq) == pytest.approx(E, rel=1e-12)


def test_solver_residual_contract():
    # the report's residual must honor the advertised tolerance across both
    # signs of eps, including deep fermion and near-threshold boson regimes
    for n in (1, 2, 3):
        rho, T, V = 1.3, 0.42, 1.7
        base = c0(rho, T, V, n)
        s = n / 2.0
        eta_s = equilibria.specfun.polylog_L(s, -1.0).value
        for frac in (0.05, 0.5, 0.999):
            eps = -frac * eta_s / base  # C0 |eps| in (0, eta_s]
            rep = equilibria.solve_normalization(rho, T, V, n, eps)
            assert abs(rep.residual) <= 1e-12 * rho
        if n == 3:
            zeta_s = equilibria.specfun.zeta(s)
            for frac in (0.3, 0.9, 0.99):
                eps = frac * zeta_s / base
                rep = equilibria.solve_normalization(rho, T, V, n, eps)
                assert abs(rep.residual) <= 1e-12 * rho


def test_boson_threshold_sharp():
    n, rho, T, V = 3, 1.0, 0.5, 1.0
    thresh = (2.0 * math.pi * T) ** 1.5 * V * equilibria.specfun.zeta(1.5) / rho
    equilibria.solve_normalization(rho, T, V, n, 0.999 * thresh)  # solvable
    with pytest.raises(NoSolutionError):
        equilibria.solve_normalization(rho, T, V, n, 1.001 * thresh)


def test_fermion_extremal_endpoint():
    # the most degenerate admissible fermion state pins C eps = -1
    for n in (1, 2, 3):
        rho, T, V = 0.9, 0.25, 1.4
        base = c0(rho, T, V, n)
        eta_s = equilibria.specfun.polylog_L(n / 2.0, -1.0).value
        eq = equilibria.equilibrium_state(rho, T, V, n, -eta_s / base)
        assert eq.C * eq.epsilon == pytest.approx(-1.0, abs=1e-9)


# frozen fixed points of z L_{n/2}(z) = c0_eps
ITERATE_CASES = [
    (2, -0.5, -0.64872127070012815),  # closed form 1 - sqrt(e)
    (3, -0.5, -0.59595522955242396),
    (3, 0.6, 0.48443485099906093),
]


@pytest.mark.parametrize("n,c0e,z", ITERATE_CASES)
def test_iterate_z_frozen(n, c0e, z):
    assert equilibria.iterate_z(c0e, n, tol=1e-13) == pytest.approx(z, abs=1e-12)


def test_iterate_z_rejects_noncontractive_input():
    with pytest.raises(NonContractionError):
        equilibria.iterate_z(2.0, 3)
    with pytest.raises(NonContractionError):
        equilibria.iterate_z(-30.0, 3)


def test_classical_reference_closed_forms():
    rho, T, V, n = 1.2, 0.6, 1.5, 3
    E, S, F = equilibria.classical_reference(rho, T, V, n)
    base = c0(rho, T, V, n)
    assert E == pytest.approx(n * rho * T / 2.0, rel=1e-14)
    assert S == pytest.approx(E / T - rho * math.log(base), rel=1e-14)
    assert F == pytest.approx(-rho * math.log(base), rel=1e-14)


def test_entropy_closed_form_matches_grid_quadrature():
    # dual route: analytic entropy of the quantum equilibrium vs the cell-sum
    # entropy of its sampled field
    for eps in (0.4, -0.6):
        eq = equilibria.equilibrium_state(1.0, 0.5, 1.0, 2, eps)
        S_closed = equilibria.quantum_entropy_closed(eq)
        fld = functionals.field_from_quantum(eq, points=192)
        S_grid = functionals.entropy_quantum(fld, eps)
        assert S_grid == pytest.approx(S_closed, abs=5e-6)


def test_quantum_free_energy_convention():
    eq = equilibria.equilibrium_state(1.0, 0.5, 1.0, 3, 0.4)
    E = equilibria.quantum_energy(eq)
    S = equilibria.quantum_entropy_closed(eq)
    assert equilibria.quantum_free_energy(eq) == pytest.approx(-E / eq.T + S, rel=1e-14)
    assert equilibria.quantum_free_energy(eq, 0.7) == pytest.approx(-E / 0.7 + S, rel=1e-14)


def test_energy_ordering_signs():
    rho, T, V = 1.0, 0.4, 1.0
    for n in (1, 2, 3):
        E_c = n * rho * T / 2.0
        base = c0(rho, T, V, n)
        eps = 0.2 / base
        E_minus = equilibria.quantum_energy(equilibria.equilibrium_state(rho, T, V, n, -eps))
        E_plus = equilibria.quantum_energy(equilibria.equilibrium_state(rho, T, V, n, eps))
        assert E_plus < E_c < E_minus


def test_deltas_match_first_order_predictions():
    for n in (1, 2, 3):
        d = equilibria.quantum_deltas(1.0, 0.5, 1.0, n, 1e-4)
        assert d.dE == pytest.approx(d.predicted_dE, rel=2e-3)
        assert d.dF == pytest.approx(d.predicted_dF, rel=2e-3)
        if n != 2:  # the n = 2 entropy shift is second order, skip the ratio
            assert d.dS == pytest.approx(d.predicted_dS, rel=2e-3)


def test_eval_classical_mass_quadrature():
    spec = MaxwellianSpec(n=2, rho=1.3, u=np.array([0.2, -0.1]), T=0.3, V_omega=2.0)
    fld = functionals.field_from_maxwellian(spec, points=160)
    # default reach is 6 sigma, leaving ~1e-9 of tail mass outside the box
    assert fld.mass() == pytest.approx(1.3, rel=1e-8)


def test_extremal_from_moments_reference_case():
    T1, spec = equilibria.extremal_from_moments(1.0, 2.0, np.array([1.0, 0.0]), 1.0, 1.0, 2)
    assert T1 == pytest.approx(1.5, rel=1e-14)
    assert spec.rho == pytest.approx(1.0)
    assert spec.u[0] == pytest.approx(1.0)
    # and the returned Maxwellian's analytic moments close the loop
    E_spec = spec.rho * (spec.n * spec.T + float(spec.u @ spec.u)) / 2.0
    assert E_spec == pytest.approx(2.0, rel=1e-14)


def test_extremal_from_moments_rejects_subkinetic_energy():
    with pytest.raises(ValueError):
        # total energy below the bulk kinetic floor leaves no thermal share
        equilibria.extremal_from_moments(1.0, 0.4, np.array([1.0, 0.0]), 1.0, 1.0, 2)


def test_m_hat_mass():
    T, V, n = 0.5, 2.0, 3
    spec = equilibria.m_hat(T, V, n)
    want = (2.0 * math.pi * T) ** 1.5 * V / math.e
    assert spec.rho == pytest.approx(want, rel=1e-14)
    assert np.all(spec.u == 0.0)
