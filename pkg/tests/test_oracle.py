"""Extremal-problem oracles and the limit-equation root finder."""

import math

import numpy as np
import pytest

from boltzkit import equilibria, functionals, oracle
from boltzkit.equilibria import MaxwellianSpec
from boltzkit.oracle import ConvergenceError


# frozen from 30-digit root solves of x - 1 - log x = c
ROOT_CASES = [
    (0.1, 0.61681683179170516, 1.5162211614250222),
    (0.5, 0.30170956268433601, 2.3576766739458991),
    (2.0, 0.052469097457714872, 4.5052414957928834),
]


def test_limit_roots_zero_is_unique():
    pair = oracle.limit_roots(0.0)
    assert pair.lower == 1.0 and pair.upper == 1.0
    assert pair.unique


@pytest.mark.parametrize("c,lo,hi", ROOT_CASES)
def test_limit_roots_frozen(c, lo, hi):
    pair = oracle.limit_roots(c)
    assert not pair.unique
    assert pair.lower == pytest.approx(lo, abs=2e-14)
    assert pair.upper == pytest.approx(hi, abs=2e-14)
    assert pair.lower < 1.0 < pair.upper


def test_limit_roots_rejects_negative():
    with pytest.raises(ValueError):
        oracle.limit_roots(-0.1)


def test_limit_roots_residuals():
    for c in (1e-6, 0.01, 1.0, 10.0):
        pair = oracle.limit_roots(c)
        for x in (pair.lower, pair.upper):
            assert abs(x - 1.0 - math.log(x) - c) < 1e-10


def lumpy(points=48):
    # two off-axis bumps plus a rough floor; nothing Gaussian about it
    rng = np.random.default_rng(7)
    g1 = MaxwellianSpec(n=2, rho=0.55, u=np.array([0.4, 0.2]), T=0.12, V_omega=1.0)
    g2 = MaxwellianSpec(n=2, rho=0.45, u=np.array([-0.3, -0.1]), T=0.2, V_omega=1.0)
    fld = functionals.field_from_callable(
        lambda z: equilibria.eval_classical(g1, z) + equilibria.eval_classical(g2, z) + 0.05,
        n=2, zeta_max=3.0, points=points)
    noise = rng.lognormal(0.0, 0.2, size=fld.values.shape)
    return fld.with_values(fld.values * noise)


def test_project_to_moments_hits_targets():
    fld = lumpy()
    out = oracle.project_to_moments(fld, 1.0, 0.3, np.array([0.05, -0.02]))
    ms = functionals.moments(out)
    assert ms.rho_total == pytest.approx(1.0, abs=1e-11)
    assert ms.E_total == pytest.approx(0.3, abs=1e-11)
    np.testing.assert_allclose(ms.U, [0.05, -0.02], rtol=0, atol=1e-11)


def test_project_to_moments_fixes_maxwellian():
    spec = MaxwellianSpec(n=2, rho=1.0, u=np.zeros(2), T=0.2, V_omega=1.0)
    fld = functionals.field_from_maxwellian(spec, points=48)
    ms = functionals.moments(fld)
    out = oracle.project_to_moments(fld, ms.rho_total, ms.E_total, ms.U)
    assert np.abs(out.values - fld.values).max() < 1e-12


def test_maximize_f_recovers_maxwellian():
    t_ref = 0.18
    fld, diag = oracle.maximize_F_fixed_rho(lumpy(), 1.0, t_ref)
    # the maximizer at fixed mass is the Maxwellian at the reference
    # temperature with zero drift
    want = MaxwellianSpec(n=2, rho=1.0, u=np.zeros(2), T=t_ref, V_omega=1.0)
    grid_want = functionals.field_from_maxwellian(want, zeta_max=fld.zeta_max,
                                                  points=fld.points)
    assert np.abs(fld.values - grid_want.values).max() < 1e-4
    assert diag.iterations > 0


def test_minimize_dist_recovers_matched_maxwellian():
    t_ref = 0.18
    rho, E1, U = 1.0, 0.25, np.array([0.1, 0.0])
    fld, _ = oracle.minimize_dist_constrained(lumpy(), rho, E1, U, t_ref)
    T1, spec = equilibria.extremal_from_moments(rho, E1, U, t_ref, 1.0, 2)
    grid_want = functionals.field_from_maxwellian(spec, zeta_max=fld.zeta_max,
                                                  points=fld.points)
    assert np.abs(fld.values - grid_want.values).max() < 1e-4
    ref = MaxwellianSpec(n=2, rho=rho, u=np.zeros(2), T=t_ref, V_omega=1.0)
    d_opt = functionals.distance(ref, fld, t_ref)
    d_closed = (0.5 * 2 * (T1 / t_ref - 1.0 - math.log(T1 / t_ref))
                + float(U @ U) / (2.0 * rho * t_ref))
    assert d_opt == pytest.approx(d_closed, abs=1e-6)


def test_perturbations_never_beat_optimum():
    t_ref = 0.18
    rho, E1, U = 1.0, 0.25, np.array([0.1, 0.0])
    fld, _ = oracle.minimize_dist_constrained(lumpy(), rho, E1, U, t_ref)
    ref = MaxwellianSpec(n=2, rho=rho, u=np.zeros(2), T=t_ref, V_omega=1.0)
    d_opt = functionals.distance(ref, fld, t_ref)
    rng = np.random.default_rng(12)
    for _ in range(8):
        bump = rng.lognormal(0.0, 0.05, size=fld.values.shape)
        trial = oracle.project_to_moments(fld.with_values(fld.values * bump), rho, E1, U)
        assert functionals.distance(ref, trial, t_ref) >= d_opt - 1e-12


def test_ascent_reports_nonconvergence():
    with pytest.raises(ConvergenceError):
        oracle.maximize_F_fixed_rho(lumpy(), 1.0, 0.18, tol=1e-12, max_iter=2)


def test_infeasible_moments_rejected():
    # bulk kinetic energy above the total leaves no thermal share
    with pytest.raises(ValueError):
        oracle.minimize_dist_constrained(lumpy(), 1.0, 0.004, np.array([0.1, 0.0]), 0.18)
