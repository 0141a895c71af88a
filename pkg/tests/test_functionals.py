"""Grid fields, moments, entropy functionals, and the distance."""

import math

import numpy as np
import pytest

from boltzkit import equilibria, functionals
from boltzkit.equilibria import MaxwellianSpec


def bimodal_field(points=64, rho=1.0, u0=0.35, T=1.0 / (2 * math.pi)):
    a = MaxwellianSpec(n=2, rho=rho / 2, u=np.array([u0, 0.0]), T=T, V_omega=1.0)
    b = MaxwellianSpec(n=2, rho=rho / 2, u=np.array([-u0, 0.0]), T=T, V_omega=1.0)
    reach = 6.0 * math.sqrt(T + 0.5 * u0 * u0)
    return functionals.field_from_callable(
        lambda z: equilibria.eval_classical(a, z) + equilibria.eval_classical(b, z),
        n=2, zeta_max=reach, points=points)


def test_velocity_axis_is_mirror_symmetric():
    axis, h = functionals.velocity_axis(3.0, 64)
    assert np.array_equal(axis, -axis[::-1])
    assert h == pytest.approx(axis[1] - axis[0])
    assert axis.max() < 3.0


def test_velocity_axis_excludes_zero_for_even_counts():
    axis, _ = functionals.velocity_axis(2.0, 32)
    assert not np.any(axis == 0.0)  # cell centers straddle the origin


def test_moments_of_sampled_maxwellian():
    spec = MaxwellianSpec(n=2, rho=1.4, u=np.array([0.3, -0.2]), T=0.25, V_omega=1.0)
    fld = functionals.field_from_maxwellian(spec, points=128)
    ms = functionals.moments(fld)
    assert ms.rho_total == pytest.approx(1.4, rel=1e-8)
    assert ms.U[0] == pytest.approx(1.4 * 0.3, rel=1e-7)
    assert ms.U[1] == pytest.approx(1.4 * -0.2, rel=1e-7)
    E_want = 1.4 * (2 * 0.25 + 0.3**2 + 0.2**2) / 2.0
    assert ms.E_total == pytest.approx(E_want, rel=1e-7)


def test_entropy_of_maxwellian_closed_form():
    rho, T = 1.0, 0.3
    spec = MaxwellianSpec(n=2, rho=rho, u=np.zeros(2), T=T, V_omega=1.0)
    fld = functionals.field_from_maxwellian(spec, points=128)
    amp = rho / (2.0 * math.pi * T)
    S_want = rho - rho * math.log(amp)
    # the 6 sigma box cuts ~8e-8 of -f log f tail; quadrature itself is finer
    assert functionals.entropy_classical(fld) == pytest.approx(S_want, abs=2e-7)


def test_free_functional_agrees_with_closed_form():
    spec = MaxwellianSpec(n=2, rho=1.0, u=np.array([0.1, 0.0]), T=0.2, V_omega=1.0)
    fld = functionals.field_from_maxwellian(spec, points=128)
    rep = functionals.free_functional(fld, 0.35)
    assert rep.F == pytest.approx(functionals.f_closed_maxwellian(spec, 0.35), abs=2e-6)
    assert rep.F == pytest.approx(-rep.E / 0.35 + rep.S, rel=1e-14)


def test_doubled_temperature_distance():
    # T1 = 2T, rho = 1, n = 2 has distance exactly 1 - log 2
    T = 0.5
    ref = MaxwellianSpec(n=2, rho=1.0, u=np.zeros(2), T=T, V_omega=1.0)
    other = MaxwellianSpec(n=2, rho=1.0, u=np.zeros(2), T=2 * T, V_omega=1.0)
    want = 1.0 - math.log(2.0)
    d_closed = functionals.distance(ref, functionals.field_from_maxwellian(other, points=96), T)
    assert d_closed == pytest.approx(want, abs=1e-6)


def test_moment_matched_distance_closed_form():
    # rho = 1, E1 = 2, U = (1,0), T = 1: the matched Maxwellian has T1 = 3/2
    want = 0.5 - math.log(1.5) + 0.5
    T1, spec = equilibria.extremal_from_moments(1.0, 2.0, np.array([1.0, 0.0]), 1.0, 1.0, 2)
    ref = MaxwellianSpec(n=2, rho=1.0, u=np.zeros(2), T=1.0, V_omega=1.0)
    fld = functionals.field_from_maxwellian(spec, zeta_max=1.0 + 6.0 * math.sqrt(T1), points=96)
    assert functionals.distance(ref, fld, 1.0) == pytest.approx(want, abs=1e-6)


def test_distance_nonnegative_and_zero_at_reference():
    T = 0.3
    ref = MaxwellianSpec(n=2, rho=1.0, u=np.zeros(2), T=T, V_omega=1.0)
    fld = functionals.field_from_maxwellian(ref, points=96)
    assert abs(functionals.distance(ref, fld, T)) < 1e-8
    bim = bimodal_field(points=96)
    assert functionals.distance(ref, bim, T) > 0.0


def test_moment_matched_maxwellian_roundtrip():
    bim = bimodal_field(points=96)
    spec = functionals.moment_matched_maxwellian(bim)
    ms = functionals.moments(bim)
    assert spec.rho == pytest.approx(ms.rho_total, rel=1e-12)
    E_spec = spec.rho * (2 * spec.T + float(spec.u @ spec.u)) / 2.0
    assert E_spec == pytest.approx(ms.E_total, rel=1e-12)


def test_lyapunov_zero_at_its_own_maximizer():
    # G measures the gap to the mass-optimal Maxwellian, so it vanishes there
    T = 1.0 / (2 * math.pi)
    hat = equilibria.m_hat(T, 1.0, 2)
    fld = functionals.field_from_maxwellian(hat, points=128)
    assert abs(functionals.lyapunov(fld, T)) < 1e-6
    # and is positive for anything else
    other = MaxwellianSpec(n=2, rho=hat.rho * 1.5, u=np.zeros(2), T=T, V_omega=1.0)
    fld2 = functionals.field_from_maxwellian(other, points=128)
    assert functionals.lyapunov(fld2, T) > 0.0


def test_renormalized_fixes_mass():
    bim = bimodal_field(points=48)
    out = bim.renormalized(2.5)
    assert out.mass() == pytest.approx(2.5, rel=1e-12)


def test_velocity_reversed_flips_momentum_only():
    spec = MaxwellianSpec(n=2, rho=1.0, u=np.array([0.4, -0.1]), T=0.2, V_omega=1.0)
    fld = functionals.field_from_maxwellian(spec, points=64)
    rev = fld.velocity_reversed()
    m0, m1 = functionals.moments(fld), functionals.moments(rev)
    assert m1.rho_total == pytest.approx(m0.rho_total, rel=1e-14)
    assert m1.E_total == pytest.approx(m0.E_total, rel=1e-14)
    np.testing.assert_allclose(m1.U, -m0.U, rtol=0, atol=1e-14)


def test_entropy_quantum_reduces_to_classical():
    bim = bimodal_field(points=48)
    S0 = functionals.entropy_classical(bim)
    gaps = [abs(functionals.entropy_quantum(bim, eps) - S0) for eps in (0.2, 0.1, 0.05)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[1] / gaps[2] == pytest.approx(2.0, rel=0.05)  # linear in eps


def test_field_shape_and_measure():
    fld = bimodal_field(points=32)
    assert fld.values.shape == (1, 32, 32)
    assert fld.nx == 1
    assert fld.cell_measure == pytest.approx(fld.h ** 2)
    assert fld.mass() == pytest.approx(functionals.moments(fld).rho_total, rel=1e-14)


def test_field_from_quantum_mass():
    eq = equilibria.equilibrium_state(1.0, 0.5, 1.0, 2, -0.6)
    fld = functionals.field_from_quantum(eq, points=128)
    assert fld.mass() == pytest.approx(1.0, rel=1e-6)
