"""Discrete-velocity collision operator and kinetic time stepping (n = 2).

The collision integral is evaluated by direct quadrature: the companion
velocity runs over the same midpoint grid as the distribution, the unit
collision direction over uniformly spaced angles, and post-collision
velocities

    zeta'  = (zeta + zeta*)/2 + sigma |zeta - zeta*| / 2,
    zeta*' = (zeta + zeta*)/2 - sigma |zeta - zeta*| / 2,

are read off the grid by bilinear interpolation (zero outside).  The
integrand is invariant under sigma -> -sigma, so only half the angle
nodes are visited with doubled weight.  The quadrature loop is organized
by the integer offset d between grid indices of zeta* and zeta: for fixed
(d, sigma) the interpolation stencil is shared by every base point, which
turns the inner work into shifted dense array sweeps over a zero-padded
copy of f.

Raw quadrature conserves mass, momentum, and energy only to interpolation
accuracy; a weighted least-squares projection (fixed Gaussian weight, so
the correction lives where the distribution does and cannot push empty
tail cells negative) zeroes the five collision-invariant moments after
every evaluation.

Time stepping is Heun's second-order rule for homogeneous states and for
1-D slab transport coupled to per-cell collisions with first-order upwind
fluxes.  Wall interaction (periodic, bounce-back, or diffuse-Maxwellian
re-emission) enters through ghost cells, and the reported wall fluxes are
exactly the upwind face fluxes the scheme transports, so the discrete
energy balance E(t+dt) - E(t) = -dt * A holds to rounding.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field as dc_field

import numba
import numpy as np
from numba import njit, prange

from .functionals import DistributionField, moments

__all__ = [
    "CollisionKernelSpec",
    "BoundarySpec",
    "FluxReport",
    "MonitorRecord",
    "classical_collision",
    "quantum_collision",
    "collision_invariant_residuals",
    "conservative_projection",
    "default_dt",
    "step",
    "run_monitored",
    "classify",
]

# KM_THREADS caps the quadrature thread pool (default: all cores).
_cap = os.environ.get("KM_THREADS")
if _cap:
    try:
        numba.set_num_threads(max(1, min(int(_cap), numba.config.NUMBA_NUM_THREADS)))
    except ValueError:
        pass

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CollisionKernelSpec:
    """Collision kernel B(zeta - zeta*, sigma).

    kind "maxwell_pseudo" gives B = b0; "hard_sphere" gives
    B = b0 |zeta - zeta*|.  sigma_quadrature_points must be even (the
    angle set is used in antipodal pairs).
    """

    kind: str
    b0: float
    sigma_quadrature_points: int = 8

    def __post_init__(self) -> None:
        if self.kind not in ("maxwell_pseudo", "hard_sphere"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.b0 < 0:
            raise ValueError("kernel strength b0 must be nonnegative")
        if self.sigma_quadrature_points < 2 or self.sigma_quadrature_points % 2:
            raise ValueError("sigma_quadrature_points must be even and >= 2")


@dataclass
class BoundarySpec:
    """Wall model for slab runs.

    kind "periodic" wraps the slab; "bounce_back" reflects the full
    velocity, f(t, x, zeta) = f(t, x, -zeta) at the wall; and
    "maxwellian_diffusion" re-emits a zero-bulk-velocity wall Maxwellian.
    The emitted profile is normalized to unit mass flux over the outgoing
    half-space, and its amplitude rho_minus is set each step so the wall
    returns the fraction kappa of the incoming mass flux (kappa = 1
    conserves mass through the wall).  rho_minus records the latest
    (left, right) amplitudes.
    """

    kind: str
    wall_maxwellian: object | None = None
    kappa: float = 1.0
    rho_minus: np.ndarray | None = dc_field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in ("periodic", "bounce_back", "maxwellian_diffusion"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "maxwellian_diffusion":
            if self.wall_maxwellian is None:
                raise ValueError("diffusive walls need a wall_maxwellian")
            if np.any(self.wall_maxwellian.u != 0.0):
                raise ValueError("the wall Maxwellian must have zero bulk velocity")
            if not 0.0 <= self.kappa <= 1.0:
                raise ValueError("kappa must lie in [0, 1]")


@dataclass(frozen=True)
class FluxReport:
    """Per-step boundary fluxes.

    A is the outward energy flux, B_flux the outward mass flux (both
    integrated over the walls); classification_hint summarizes the step as
    conservative (|A| below flux_tol), dissipative (A > 0), or injecting.
    clamped_mass is the mass restored by the negativity clamp.
    """

    A: float
    B_flux: float
    classification_hint: str
    clamped_mass: float = 0.0


@dataclass(frozen=True)
class MonitorRecord:
    t: float
    S: float
    E: float
    F: float
    G: float
    A: float
    B_flux: float


def default_dt(kernel: CollisionKernelSpec, rho: float) -> float:
    """Default homogeneous step 0.1 / (b0 rho)."""
    if kernel.b0 <= 0 or rho <= 0:
        raise ValueError("default step needs b0 > 0 and rho > 0")
    return 0.1 / (kernel.b0 * rho)


# --------------------------------------------------------------------------
# collision quadrature
# --------------------------------------------------------------------------


@njit(cache=True, parallel=True, fastmath=True)
def _collision_classical(f, h, b0, hard, cosv, sinv, wsig):
    # The companion velocity runs over the grid, so contributions exist
    # only for index pairs (i, i+d) with both members on the grid, and the
    # (d, sigma) term is symmetric under swapping the pair: each unordered
    # pair is visited once (dx > 0, or dx = 0 and dy > 0) and its value
    # scattered to both output cells.  Interpolation reads go through a
    # zero-padded copy; a window whose floor offset leaves [-N, N-1] reads
    # only zeros and is skipped.
    N = f.shape[0]
    P = np.zeros((3 * N, 3 * N))
    P[N : 2 * N, N : 2 * N] = f
    Qbuf = np.zeros((N, N, N))
    nsig = cosv.size
    for dx in prange(N):
        Qb = Qbuf[dx]
        dylo = 1 if dx == 0 else -(N - 1)
        for dy in range(dylo, N):
            dl = math.hypot(dx, dy)
            kern = b0 * (dl * h) if hard else b0
            lo2 = -dy if dy < 0 else 0
            hi2 = N - dy if dy > 0 else N
            # loss: sigma-independent, total angular weight 2 pi
            wl = _TWO_PI * kern
            for i1 in range(N - dx):
                rf = f[i1]
                rfd = f[i1 + dx]
                rQ = Qb[i1]
                rQd = Qb[i1 + dx]
                for i2 in range(lo2, hi2):
                    p = wl * rf[i2] * rfd[i2 + dy]
                    rQ[i2] -= p
                    rQd[i2 + dy] -= p
            for k in range(nsig):
                t1x = 0.5 * (dx + dl * cosv[k])
                t1y = 0.5 * (dy + dl * sinv[k])
                t2x = 0.5 * (dx - dl * cosv[k])
                t2y = 0.5 * (dy - dl * sinv[k])
                o1x = int(math.floor(t1x))
                o1y = int(math.floor(t1y))
                o2x = int(math.floor(t2x))
                o2y = int(math.floor(t2y))
                if o1x < -N or o1x > N - 1 or o1y < -N or o1y > N - 1:
                    continue
                if o2x < -N or o2x > N - 1 or o2y < -N or o2y > N - 1:
                    continue
                a1x = t1x - o1x
                a1y = t1y - o1y
                a2x = t2x - o2x
                a2y = t2y - o2y
                w00 = (1.0 - a1x) * (1.0 - a1y)
                w01 = (1.0 - a1x) * a1y
                w10 = a1x * (1.0 - a1y)
                w11 = a1x * a1y
                v00 = (1.0 - a2x) * (1.0 - a2y)
                v01 = (1.0 - a2x) * a2y
                v10 = a2x * (1.0 - a2y)
                v11 = a2x * a2y
                wg = wsig * kern
                for i1 in range(N - dx):
                    A0 = P[N + i1 + o1x]
                    A1 = P[N + i1 + o1x + 1]
                    B0 = P[N + i1 + o2x]
                    B1 = P[N + i1 + o2x + 1]
                    rQ = Qb[i1]
                    rQd = Qb[i1 + dx]
                    for i2 in range(lo2, hi2):
                        c1 = N + i2 + o1y
                        c2 = N + i2 + o2y
                        g1 = w00 * A0[c1] + w01 * A0[c1 + 1] + w10 * A1[c1] + w11 * A1[c1 + 1]
                        g2 = v00 * B0[c2] + v01 * B0[c2 + 1] + v10 * B1[c2] + v11 * B1[c2 + 1]
                        p = wg * g1 * g2
                        rQ[i2] += p
                        rQd[i2 + dy] += p
    Q = np.zeros((N, N))
    for s in range(N):
        Q += Qbuf[s]
    return Q * (h * h)


@njit(cache=True, parallel=True, fastmath=True)
def _collision_quantum(f, h, b0, hard, cosv, sinv, wsig, eps):
    # Same pair organization as the classical kernel; the integrand with
    # occupancy factors is still symmetric under swapping the pair, so the
    # mirror write carries the identical value.  Dead interpolation windows
    # zero the gain but keep the loss (its occupancy factors become 1).
    N = f.shape[0]
    P = np.zeros((3 * N, 3 * N))
    P[N : 2 * N, N : 2 * N] = f
    Qbuf = np.zeros((N, N, N))
    nsig = cosv.size
    for dx in prange(N):
        Qb = Qbuf[dx]
        dylo = 1 if dx == 0 else -(N - 1)
        for dy in range(dylo, N):
            dl = math.hypot(dx, dy)
            kern = b0 * (dl * h) if hard else b0
            lo2 = -dy if dy < 0 else 0
            hi2 = N - dy if dy > 0 else N
            for k in range(nsig):
                t1x = 0.5 * (dx + dl * cosv[k])
                t1y = 0.5 * (dy + dl * sinv[k])
                t2x = 0.5 * (dx - dl * cosv[k])
                t2y = 0.5 * (dy - dl * sinv[k])
                o1x = int(math.floor(t1x))
                o1y = int(math.floor(t1y))
                o2x = int(math.floor(t2x))
                o2y = int(math.floor(t2y))
                dead_gain = (
                    o1x < -N or o1x > N - 1 or o1y < -N or o1y > N - 1
                    or o2x < -N or o2x > N - 1 or o2y < -N or o2y > N - 1
                )
                if dead_gain:
                    o1x = o1y = o2x = o2y = 0
                a1x = t1x - o1x
                a1y = t1y - o1y
                a2x = t2x - o2x
                a2y = t2y - o2y
                w00 = (1.0 - a1x) * (1.0 - a1y)
                w01 = (1.0 - a1x) * a1y
                w10 = a1x * (1.0 - a1y)
                w11 = a1x * a1y
                v00 = (1.0 - a2x) * (1.0 - a2y)
                v01 = (1.0 - a2x) * a2y
                v10 = a2x * (1.0 - a2y)
                v11 = a2x * a2y
                wg = wsig * kern
                for i1 in range(N - dx):
                    A0 = P[N + i1 + o1x]
                    A1 = P[N + i1 + o1x + 1]
                    B0 = P[N + i1 + o2x]
                    B1 = P[N + i1 + o2x + 1]
                    rf = f[i1]
                    rfd = f[i1 + dx]
                    rQ = Qb[i1]
                    rQd = Qb[i1 + dx]
                    for i2 in range(lo2, hi2):
                        c1 = N + i2 + o1y
                        c2 = N + i2 + o2y
                        if dead_gain:
                            g1 = 0.0
                            g2 = 0.0
                        else:
                            g1 = w00 * A0[c1] + w01 * A0[c1 + 1] + w10 * A1[c1] + w11 * A1[c1 + 1]
                            g2 = v00 * B0[c2] + v01 * B0[c2 + 1] + v10 * B1[c2] + v11 * B1[c2 + 1]
                        fi = rf[i2]
                        fd = rfd[i2 + dy]
                        p = wg * (g1 * g2 * (1.0 + eps * fi) * (1.0 + eps * fd)
                                  - fi * fd * (1.0 + eps * g1) * (1.0 + eps * g2))
                        rQ[i2] += p
                        rQd[i2 + dy] += p
    Q = np.zeros((N, N))
    for s in range(N):
        Q += Qbuf[s]
    return Q * (h * h)


def _sigma_half_nodes(nsig: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Half the uniform angle set, with doubled weight.

    The full set {2 pi k / nsig} is closed under sigma -> -sigma, under
    which the collision integrand is invariant, so k < nsig/2 suffices.
    """
    k = np.arange(nsig // 2)
    ang = 2.0 * math.pi * k / nsig
    return np.cos(ang), np.sin(ang), 2.0 * (2.0 * math.pi / nsig)


class _GridOps:
    """Per-grid collision-invariant data: moment rows, projection weight."""

    def __init__(self, axis: np.ndarray, h: float):
        N = axis.size
        z1, z2 = np.meshgrid(axis, axis, indexing="ij")
        s2 = z1 * z1 + z2 * z2
        self.phi = np.stack([np.ones((N, N)), z1, z2, s2])
        zmax = axis[-1] + 0.5 * h
        t_w = (zmax / 6.0) ** 2
        self.weight = np.exp(-s2 / (2.0 * t_w))
        dv = h * h
        flat_phi = self.phi.reshape(4, -1)
        self.gram = (flat_phi * self.weight.ravel()) @ flat_phi.T * dv
        self.dv = dv
        self.z1 = z1
        self.s2 = s2

    def project(self, Q: np.ndarray) -> np.ndarray:
        m = self.phi.reshape(4, -1) @ Q.ravel() * self.dv
        coef = np.linalg.solve(self.gram, m)
        return Q - self.weight * np.tensordot(coef, self.phi, axes=1)

    def residuals(self, Q: np.ndarray) -> np.ndarray:
        return self.phi.reshape(4, -1) @ Q.ravel() * self.dv


_grid_ops_cache: dict[tuple, _GridOps] = {}


def _grid_ops(field: DistributionField) -> _GridOps:
    key = (field.points, float(field.axis[0]), field.h)
    ops = _grid_ops_cache.get(key)
    if ops is None:
        ops = _GridOps(field.axis, field.h)
        _grid_ops_cache[key] = ops
    return ops


def _require_2d(field: DistributionField) -> None:
    if field.n != 2:
        raise NotImplementedError(
            f"collision quadrature is implemented for n = 2 only, got n = {field.n}"
        )


def classical_collision(
    field: DistributionField,
    kernel: CollisionKernelSpec,
    x_cell: int = 0,
    project: bool = True,
) -> np.ndarray:
    """Collision operator Q(f, f) on one spatial cell of a 2-D field.

    Returns the (N, N) rate array.  With project=True (the default) the
    five collision-invariant moments are removed exactly; project=False
    exposes the raw quadrature.
    """
    _require_2d(field)
    cosv, sinv, wsig = _sigma_half_nodes(kernel.sigma_quadrature_points)
    f = np.ascontiguousarray(field.values[x_cell])
    Q = _collision_classical(
        f, field.h, kernel.b0, kernel.kind == "hard_sphere",
        cosv, sinv, wsig,
    )
    if project:
        Q = _grid_ops(field).project(Q)
    return Q


def quantum_collision(
    field: DistributionField,
    kernel: CollisionKernelSpec,
    epsilon: float,
    x_cell: int = 0,
    project: bool = True,
) -> np.ndarray:
    """Quantum collision operator with occupancy factors (1 + eps f).

    At eps = 0 this delegates to classical_collision and is bit-identical
    to it.
    """
    if epsilon == 0.0:
        return classical_collision(field, kernel, x_cell=x_cell, project=project)
    _require_2d(field)
    f = field.values[x_cell]
    occ = 1.0 + epsilon * f
    if np.any(occ <= 0.0):
        raise ValueError("1 + eps*f must stay positive for quantum collisions")
    cosv, sinv, wsig = _sigma_half_nodes(kernel.sigma_quadrature_points)
    Q = _collision_quantum(
        np.ascontiguousarray(f), field.h, kernel.b0, kernel.kind == "hard_sphere",
        cosv, sinv, wsig, epsilon,
    )
    if project:
        Q = _grid_ops(field).project(Q)
    return Q


def collision_invariant_residuals(field: DistributionField, Q: np.ndarray) -> np.ndarray:
    """Moments of Q against {1, zeta_1, zeta_2, |zeta|^2} (cell sums)."""
    _require_2d(field)
    return _grid_ops(field).residuals(Q)


def conservative_projection(field: DistributionField, Q: np.ndarray) -> np.ndarray:
    """Remove the collision-invariant moments from a raw quadrature."""
    _require_2d(field)
    return _grid_ops(field).project(Q)


# --------------------------------------------------------------------------
# time stepping
# --------------------------------------------------------------------------


_diffusion_cache: dict[tuple, tuple] = {}


def _wall_profiles(boundary: BoundarySpec, field: DistributionField):
    """Flux-normalized emission profiles (left wall, right wall)."""
    spec = boundary.wall_maxwellian
    key = (id(spec), field.points, field.h, float(field.axis[0]))
    hit = _diffusion_cache.get(key)
    if hit is not None:
        return hit
    from .equilibria import eval_classical

    pts = np.stack(np.meshgrid(field.axis, field.axis, indexing="ij"), axis=-1)
    mb = eval_classical(spec, pts)
    z1 = field.axis[:, None]
    dv = field.cell_measure
    pos = field.axis > 0
    flux_pos = float(np.sum((z1 * mb)[pos, :])) * dv
    flux_neg = -float(np.sum((z1 * mb)[~pos, :])) * dv
    left = np.where(pos[:, None], mb / flux_pos, 0.0)
    right = np.where(~pos[:, None], mb / flux_neg, 0.0)
    _diffusion_cache[key] = (left, right)
    return left, right


def _ghosts(values: np.ndarray, boundary: BoundarySpec, field: DistributionField):
    fL = values[0]
    fR = values[-1]
    if boundary.kind == "periodic":
        return fR, fL
    if boundary.kind == "bounce_back":
        return fL[::-1, ::-1], fR[::-1, ::-1]
    left_prof, right_prof = _wall_profiles(boundary, field)
    z1 = field.axis[:, None]
    dv = field.cell_measure
    neg = field.axis < 0
    pos = field.axis > 0
    phi_in_left = -float(np.sum((z1 * fL)[neg, :])) * dv
    phi_in_right = float(np.sum((z1 * fR)[pos, :])) * dv
    amp_l = boundary.kappa * phi_in_left
    amp_r = boundary.kappa * phi_in_right
    boundary.rho_minus = np.array([amp_l, amp_r])
    ghost_l = np.where(pos[:, None], amp_l * left_prof, fL)
    ghost_r = np.where(neg[:, None], amp_r * right_prof, fR)
    return ghost_l, ghost_r


def _slab_rhs(values, field, kernel, epsilon, boundary, ops):
    """(df/dt, A, B) for the slab: upwind transport + per-cell collisions."""
    ghost_l, ghost_r = _ghosts(values, boundary, field)
    z1 = field.axis[None, :, None]
    pos = (field.axis > 0)[None, :, None]
    dxcol = field.x_widths[:, None, None]
    fm = np.concatenate([ghost_l[None], values[:-1]], axis=0)
    fp = np.concatenate([values[1:], ghost_r[None]], axis=0)
    up = np.where(pos, values - fm, fp - values)
    rhs = -(z1 * up) / dxcol

    dv = field.cell_measure
    zc = field.axis[:, None]
    e_half = 0.5 * (field.axis[:, None] ** 2 + field.axis[None, :] ** 2)
    donor0 = np.where(pos[0], ghost_l, values[0])
    donorL = np.where(pos[0], values[-1], ghost_r)
    f0_mass = float(np.sum(zc * donor0)) * dv
    fl_mass = float(np.sum(zc * donorL)) * dv
    f0_energy = float(np.sum(zc * e_half * donor0)) * dv
    fl_energy = float(np.sum(zc * e_half * donorL)) * dv
    A = fl_energy - f0_energy
    B = fl_mass - f0_mass

    if kernel.b0 > 0:
        cosv, sinv, wsig = _sigma_half_nodes(kernel.sigma_quadrature_points)
        hard = kernel.kind == "hard_sphere"
        for j in range(values.shape[0]):
            fj = np.ascontiguousarray(values[j])
            if epsilon == 0.0:
                Q = _collision_classical(fj, field.h, kernel.b0, hard, cosv, sinv, wsig)
            else:
                Q = _collision_quantum(fj, field.h, kernel.b0, hard, cosv, sinv, wsig, epsilon)
            rhs[j] += ops.project(Q)
    return rhs, A, B


def _homogeneous_rhs(values, field, kernel, epsilon, ops):
    if kernel.b0 == 0:
        return np.zeros_like(values)
    cosv, sinv, wsig = _sigma_half_nodes(kernel.sigma_quadrature_points)
    hard = kernel.kind == "hard_sphere"
    f = np.ascontiguousarray(values[0])
    if epsilon == 0.0:
        Q = _collision_classical(f, field.h, kernel.b0, hard, cosv, sinv, wsig)
    else:
        Q = _collision_quantum(f, field.h, kernel.b0, hard, cosv, sinv, wsig, epsilon)
    return ops.project(Q)[None]


def step(
    state: DistributionField,
    dt: float,
    kernel: CollisionKernelSpec,
    epsilon: float = 0.0,
    boundary: BoundarySpec | None = None,
    flux_tol: float = 1e-10,
) -> tuple[DistributionField, FluxReport]:
    """Advance one Heun (two-stage second order) step.

    Homogeneous states (one spatial cell) evolve by collisions alone and
    report zero fluxes.  Slab states additionally transport along the
    first velocity component; the advective CFL number dt*zeta_max/dx must
    not exceed 0.9 (ValueError otherwise).  Negative values produced by
    the update are clamped to zero with the clamped mass reported; if it
    exceeds 1e-6 of the total mass the step aborts.
    """
    _require_2d(state)
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    ops = _grid_ops(state)
    values = state.values
    if state.nx == 1:
        k1 = _homogeneous_rhs(values, state, kernel, epsilon, ops)
        k2 = _homogeneous_rhs(values + dt * k1, state, kernel, epsilon, ops)
        new = values + 0.5 * dt * (k1 + k2)
        A = B = 0.0
    else:
        if boundary is None:
            raise ValueError("slab stepping needs a BoundarySpec")
        cfl = dt * state.zeta_max / float(np.min(state.x_widths))
        if cfl > 0.9:
            raise ValueError(f"step rejected: CFL number {cfl:.3f} exceeds 0.9")
        k1, A1, B1 = _slab_rhs(values, state, kernel, epsilon, boundary, ops)
        k2, A2, B2 = _slab_rhs(values + dt * k1, state, kernel, epsilon, boundary, ops)
        new = values + 0.5 * dt * (k1 + k2)
        A = 0.5 * (A1 + A2)
        B = 0.5 * (B1 + B2)

    neg = new < 0.0
    clamped = 0.0
    if np.any(neg):
        cell_w = state.x_widths[:, None, None] * state.cell_measure
        clamped = float(np.sum(np.where(neg, -new, 0.0) * cell_w))
        new = np.where(neg, 0.0, new)
        total = state.mass()
        if clamped > 1e-6 * total:
            raise RuntimeError(
                f"negativity clamp removed {clamped} mass (> 1e-6 of {total}); "
                "reduce dt or refine the grid"
            )
    if abs(A) <= flux_tol:
        hint = "conservative_step"
    elif A > 0:
        hint = "dissipative_step"
    else:
        hint = "injecting_step"
    return state.with_values(new), FluxReport(A=A, B_flux=B, classification_hint=hint,
                                              clamped_mass=clamped)


def classify(a_series, flux_tol: float = 1e-10) -> str:
    """Classify a run from its outward energy flux history.

    conservative: A = 0 (within flux_tol) at every step; dissipative:
    A >= -flux_tol at every step; otherwise neither.
    """
    A = np.asarray([r.A if isinstance(r, (FluxReport, MonitorRecord)) else r for r in a_series],
                   dtype=float)
    if A.size == 0:
        raise ValueError("empty flux history")
    if np.all(np.abs(A) <= flux_tol):
        return "conservative"
    if np.all(A >= -flux_tol):
        return "dissipative"
    return "neither"


def run_monitored(
    init: DistributionField,
    steps: int,
    dt: float,
    kernel: CollisionKernelSpec,
    epsilon: float = 0.0,
    boundary: BoundarySpec | None = None,
    t_ref: float = 1.0,
    flux_tol: float = 1e-10,
) -> tuple[list[MonitorRecord], DistributionField]:
    """Step the state and record (t, S, E, F, G, A, B_flux) each step.

    The Lyapunov column G is measured against the free-energy-maximal
    Maxwellian at t_ref (classical) or the equal-mass quantum equilibrium
    (eps != 0); it should be non-increasing on dissipative runs.
    """
    from .functionals import free_functional, lyapunov

    records = []
    state = init

    def emit(t, A, B):
        rep = free_functional(state, t_ref, epsilon)
        G = lyapunov(state, t_ref, epsilon=epsilon)
        records.append(MonitorRecord(t=t, S=rep.S, E=rep.E, F=rep.F, G=G, A=A, B_flux=B))

    emit(0.0, 0.0, 0.0)
    for k in range(steps):
        state, rep = step(state, dt, kernel, epsilon, boundary, flux_tol)
        emit((k + 1) * dt, rep.A, rep.B_flux)
    return records, state
