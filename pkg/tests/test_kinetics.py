"""Collision operator, conservative projection, time stepping, boundaries.

Grids here are deliberately small (24-48 points) to keep the suite fast;
the acceptance suite runs the production-resolution versions.
"""

import math

import numpy as np
import pytest

from boltzkit import equilibria, functionals, kinetics
from boltzkit.equilibria import MaxwellianSpec
from boltzkit.kinetics import BoundarySpec, CollisionKernelSpec

T_REF = 1.0 / (2.0 * math.pi)
KERNEL = CollisionKernelSpec("maxwell_pseudo", b0=1.0 / (2.0 * math.pi),
                             sigma_quadrature_points=8)


def bimodal(points=32, rho=1.0, u0=0.35, T=T_REF):
    a = MaxwellianSpec(n=2, rho=rho / 2, u=np.array([u0, 0.0]), T=T, V_omega=1.0)
    b = MaxwellianSpec(n=2, rho=rho / 2, u=np.array([-u0, 0.0]), T=T, V_omega=1.0)
    reach = 6.0 * math.sqrt(T + 0.5 * u0 * u0)
    return functionals.field_from_callable(
        lambda z: equilibria.eval_classical(a, z) + equilibria.eval_classical(b, z),
        n=2, zeta_max=reach, points=points)


def test_default_dt_scaling():
    assert kinetics.default_dt(KERNEL, 1.0) == pytest.approx(0.1 / (KERNEL.b0 * 1.0))
    assert kinetics.default_dt(KERNEL, 4.0) == pytest.approx(kinetics.default_dt(KERNEL, 1.0) / 4.0)


def test_collision_vanishes_on_maxwellian():
    # the discrete operator's fixed point is O(h^2) from the sampled
    # Maxwellian; the residual must shrink under refinement
    spec = MaxwellianSpec(n=2, rho=1.0, u=np.zeros(2), T=T_REF, V_omega=1.0)
    resid = {}
    for pts in (32, 48):
        fld = functionals.field_from_maxwellian(spec, points=pts)
        Q = kinetics.classical_collision(fld, KERNEL)
        resid[pts] = np.abs(Q).max()
    assert resid[32] < 2e-3
    assert resid[48] < 0.5 * resid[32]


def test_quantum_collision_classical_limit_bitwise():
    fld = bimodal()
    Qc = kinetics.classical_collision(fld, KERNEL)
    Qq = kinetics.quantum_collision(fld, KERNEL, 0.0)
    assert np.array_equal(Qc, Qq)


def test_projection_zeroes_invariants():
    fld = bimodal()
    Q_raw = kinetics.classical_collision(fld, KERNEL, project=False)
    before = kinetics.collision_invariant_residuals(fld, Q_raw)
    assert np.abs(before).max() > 1e-6  # truncation leaves real residuals
    Q = kinetics.conservative_projection(fld, Q_raw)
    after = kinetics.collision_invariant_residuals(fld, Q)
    scale = np.abs(Q_raw).max() * fld.cell_measure * fld.points ** 2
    assert np.abs(after).max() <= 1e-13 * max(scale, 1.0)


def test_projection_is_idempotent():
    fld = bimodal()
    Q1 = kinetics.classical_collision(fld, KERNEL)
    Q2 = kinetics.conservative_projection(fld, Q1)
    assert np.abs(Q2 - Q1).max() <= 1e-14 * np.abs(Q1).max()


def test_step_conserves_moments():
    # the projected collision term conserves exactly; the only leak is the
    # reported negativity clamp, so drift is bounded by it
    fld = bimodal()
    dt = kinetics.default_dt(KERNEL, 1.0)
    m0 = functionals.moments(fld)
    out, rep = kinetics.step(fld, dt, KERNEL)
    m1 = functionals.moments(out)
    assert rep.clamped_mass < 1e-6 * m0.rho_total
    leak = 2.0 * rep.clamped_mass + 1e-12
    assert abs(m1.rho_total - m0.rho_total) <= leak
    assert abs(m1.E_total - m0.E_total) <= leak * fld.zeta_max ** 2
    np.testing.assert_allclose(m1.U, m0.U, rtol=0, atol=leak * fld.zeta_max)


def test_fine_grid_step_conserves_tightly():
    fld = bimodal(points=48)
    dt = kinetics.default_dt(KERNEL, 1.0)
    m0 = functionals.moments(fld)
    out, rep = kinetics.step(fld, dt, KERNEL)
    m1 = functionals.moments(out)
    leak = 2.0 * rep.clamped_mass + 1e-13
    assert abs(m1.rho_total - m0.rho_total) <= leak
    assert rep.clamped_mass < 1e-7


def test_step_rejects_destabilizing_dt():
    fld = bimodal()
    with pytest.raises(RuntimeError):
        # 100x the stable step wipes out whole regions of the positive part
        kinetics.step(fld, 100.0 * kinetics.default_dt(KERNEL, 1.0), KERNEL)


def test_homogeneous_run_relaxes_to_maxwellian():
    init = bimodal()
    dt = kinetics.default_dt(KERNEL, 1.0)
    recs, final = kinetics.run_monitored(init, 60, dt, KERNEL, t_ref=T_REF)
    assert recs[-1].S > recs[0].S
    # coarse-grid entropy may dip at the 1e-6 level; it must not do worse
    dips = [b.S - a.S for a, b in zip(recs, recs[1:])]
    assert min(dips) > -1e-5
    matched = functionals.moment_matched_maxwellian(final)
    gap = np.abs(final.values - functionals.field_from_maxwellian(
        matched, zeta_max=final.zeta_max, points=final.points).values).max()
    assert gap < 5e-3  # 32^2 resolution floor
    assert kinetics.classify(recs[1:]) == "conservative"


def test_monitor_records_time_axis():
    init = bimodal(points=24)
    dt = 0.05
    recs, _ = kinetics.run_monitored(init, 5, dt, KERNEL, t_ref=T_REF)
    assert len(recs) == 6  # initial state plus one per step
    times = [r.t for r in recs]
    np.testing.assert_allclose(times, dt * np.arange(6), atol=1e-14)


def test_run_is_deterministic():
    r1, f1 = kinetics.run_monitored(bimodal(points=24), 5, 0.05, KERNEL, t_ref=T_REF)
    r2, f2 = kinetics.run_monitored(bimodal(points=24), 5, 0.05, KERNEL, t_ref=T_REF)
    assert np.array_equal(f1.values, f2.values)
    assert all(a.S == b.S and a.A == b.A for a, b in zip(r1, r2))


def slab(points=24, nx=4, rho=0.3, amp=0.2):
    T = T_REF
    spec = MaxwellianSpec(n=2, rho=1.0, u=np.zeros(2), T=T, V_omega=1.0)

    def profile(z):
        return equilibria.eval_classical(spec, z)

    base = functionals.field_from_callable(profile, n=2,
                                           zeta_max=6.0 * math.sqrt(T) * 1.05,
                                           points=points, x_widths=np.full(nx, 1.0 / nx))
    cells = np.cos(2.0 * math.pi * (np.arange(nx) + 0.5) / nx) * amp + 1.0
    vals = base.values * (rho * cells / cells.mean())[:, None, None]
    return base.with_values(vals)


def test_bounce_back_is_conservative():
    fld = slab()
    bc = BoundarySpec("bounce_back", None, 0.0, 0.0)
    dt = 0.8 * (1.0 / 4) / fld.zeta_max
    recs, _ = kinetics.run_monitored(fld, 8, dt, KERNEL, boundary=bc, t_ref=T_REF)
    for r in recs[1:]:
        assert abs(r.A) <= 1e-10
    assert kinetics.classify(recs[1:]) == "conservative"


def test_cold_wall_diffusion_is_dissipative():
    T = T_REF
    wall = MaxwellianSpec(n=2, rho=1.0, u=np.zeros(2), T=0.5 * T, V_omega=1.0)
    bc = BoundarySpec("maxwellian_diffusion", wall, 1.0, 0.0)
    fld = slab(rho=0.05, amp=0.3)
    dt = 0.8 * (1.0 / 4) / fld.zeta_max
    recs, _ = kinetics.run_monitored(fld, 8, dt, KERNEL, boundary=bc, t_ref=T_REF)
    assert all(r.A >= 0.0 for r in recs[1:])
    energies = [r.E for r in recs]
    assert all(b <= a + 1e-14 for a, b in zip(energies, energies[1:]))
    assert kinetics.classify(recs[1:]) == "dissipative"


def test_classify_labels():
    mk = lambda a: kinetics.FluxReport(A=a, B_flux=0.0, classification_hint="", clamped_mass=0.0)
    assert kinetics.classify([mk(0.0), mk(1e-12)]) == "conservative"
    assert kinetics.classify([mk(0.0), mk(1e-3)]) == "dissipative"
    assert kinetics.classify([mk(-1e-3), mk(1e-3)]) == "neither"
    with pytest.raises(ValueError):
        kinetics.classify([])
