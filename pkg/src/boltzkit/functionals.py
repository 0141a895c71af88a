"""Gridded distribution fields and the entropy/free-energy functionals.

Velocity space is a uniform midpoint-rule tensor grid, symmetric under
zeta -> -zeta (even point count, no node at the origin).  Space is either
a single cell of volume V (spatially homogeneous states) or a 1-D slab
split into cells; every functional below is a plain cell sum weighted by
dx * h^n.

Sign conventions: S = -int f log f (with 0 log 0 = 0), its quantum
extension subtracts the occupancy correction (1/eps)(1+eps f)log(1+eps f)
and adds back f, and the free functional is F = -E/T_ref + S, which global
Maxwellians maximize at fixed mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import special

from . import equilibria
from .equilibria import MaxwellianSpec, QuantumEquilibrium

__all__ = [
    "DistributionField",
    "MomentSummary",
    "FunctionalReport",
    "velocity_axis",
    "field_from_callable",
    "field_from_maxwellian",
    "field_from_quantum",
    "moment_matched_maxwellian",
    "moments",
    "entropy_classical",
    "entropy_quantum",
    "free_functional",
    "f_closed_maxwellian",
    "distance",
    "lyapunov",
]


def velocity_axis(zeta_max: float, points: int) -> tuple[np.ndarray, float]:
    """Midpoint-rule cell centers on [-zeta_max, zeta_max].

    An even point count keeps the grid symmetric under negation and free
    of a node at zero.
    """
    if zeta_max <= 0 or points < 2 or points % 2:
        raise ValueError("need zeta_max > 0 and an even points >= 2")
    h = 2.0 * zeta_max / points
    # mirror the positive half so that axis[::-1] == -axis exactly
    half = (np.arange(points // 2) + 0.5) * h
    axis = np.concatenate([-half[::-1], half])
    return axis, h


@dataclass
class DistributionField:
    """Distribution values on a (space x velocity) cell grid.

    Attributes
    ----------
    n : int
        Velocity dimension.
    axis : ndarray, shape (N,)
        Velocity cell centers, shared by all axes.
    h : float
        Velocity cell width.
    x_widths : ndarray, shape (nx,)
        Spatial cell widths; a single entry of size V for homogeneous
        states.  Total volume is their sum.
    values : ndarray, shape (nx, N, ..., N)
        Nonnegative cell values of f.
    """

    n: int
    axis: np.ndarray
    h: float
    x_widths: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.axis = np.asarray(self.axis, dtype=float)
        self.x_widths = np.atleast_1d(np.asarray(self.x_widths, dtype=float))
        self.values = np.asarray(self.values, dtype=float)
        N = self.axis.size
        if self.values.shape != (self.x_widths.size,) + (N,) * self.n:
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"(nx={self.x_widths.size}) + ({N},)*{self.n}"
            )
        if not np.allclose(self.axis, -self.axis[::-1], rtol=0, atol=1e-12 * max(1.0, self.axis[-1])):
            raise ValueError("velocity axis must be symmetric under negation")
        steps = np.diff(self.axis)
        if not np.allclose(steps, self.h, rtol=1e-12, atol=1e-12 * self.h):
            raise ValueError("velocity axis must be uniform with spacing h")
        if np.any(self.x_widths <= 0):
            raise ValueError("spatial cell widths must be positive")
        if np.any(self.values < 0):
            raise ValueError("distribution values must be nonnegative")

    # -- geometry ---------------------------------------------------------

    @property
    def points(self) -> int:
        return self.axis.size

    @property
    def nx(self) -> int:
        return self.x_widths.size

    @property
    def zeta_max(self) -> float:
        return float(self.axis[-1] + 0.5 * self.h)

    @property
    def V_omega(self) -> float:
        return float(np.sum(self.x_widths))

    @property
    def cell_measure(self) -> float:
        """Velocity-space volume of one cell."""
        return self.h**self.n

    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.axis] * self.n), indexing="ij"))

    def speed2(self) -> np.ndarray:
        """|zeta|^2 on the velocity grid, shape (N,)*n."""
        out = np.zeros((self.points,) * self.n)
        for k, zk in enumerate(self.mesh()):
            out += zk * zk
        return out

    # -- basic operations --------------------------------------------------

    def mass(self) -> float:
        per_cell = self.values.reshape(self.nx, -1).sum(axis=1) * self.cell_measure
        return float(np.dot(per_cell, self.x_widths))

    def with_values(self, values: np.ndarray) -> "DistributionField":
        return DistributionField(self.n, self.axis, self.h, self.x_widths, values)

    def renormalized(self, rho: float) -> "DistributionField":
        """Rescale so the total mass equals rho (explicit, never implicit)."""
        m = self.mass()
        if m <= 0:
            raise ValueError("cannot renormalize a field with zero mass")
        return self.with_values(self.values * (rho / m))

    def velocity_reversed(self) -> "DistributionField":
        """f(x, -zeta); the grid is closed under velocity negation."""
        rev = self.values
        for ax in range(1, self.n + 1):
            rev = np.flip(rev, axis=ax)
        return self.with_values(rev.copy())


@dataclass(frozen=True)
class MomentSummary:
    """Mass, momentum, and kinetic energy of a field.

    rho_x and u_x are per-spatial-cell density and bulk velocity; the
    totals integrate over the domain.
    """

    rho_total: float
    U: np.ndarray
    E_total: float
    rho_x: np.ndarray
    u_x: np.ndarray


@dataclass(frozen=True)
class FunctionalReport:
    S: float
    E: float
    F: float
    quadrature_tail: float


def field_from_callable(
    fn,
    n: int,
    zeta_max: float,
    points: int,
    x_widths: np.ndarray | float = 1.0,
) -> DistributionField:
    """Sample fn(zeta_points) on a fresh grid; fn maps (..., n) -> (...).

    x_widths may be a scalar volume (homogeneous) or a width array (slab);
    in the slab case the same velocity profile fills every cell.
    """
    axis, h = velocity_axis(zeta_max, points)
    meshes = np.meshgrid(*([axis] * n), indexing="ij")
    pts = np.stack(meshes, axis=-1)
    vals = np.asarray(fn(pts), dtype=float)
    widths = np.atleast_1d(np.asarray(x_widths, dtype=float))
    values = np.broadcast_to(vals, (widths.size,) + vals.shape).copy()
    return DistributionField(n=n, axis=axis, h=h, x_widths=widths, values=values)


def field_from_maxwellian(
    spec: MaxwellianSpec,
    zeta_max: float | None = None,
    points: int = 64,
    x_widths: np.ndarray | float | None = None,
) -> DistributionField:
    """Sample a Maxwellian; default grid reach is |u|_max + 6 sqrt(T)."""
    if zeta_max is None:
        zeta_max = float(np.max(np.abs(spec.u))) + 6.0 * math.sqrt(spec.T)
    widths = spec.V_omega if x_widths is None else x_widths
    return field_from_callable(
        lambda pts: equilibria.eval_classical(spec, pts), spec.n, zeta_max, points, widths
    )


def field_from_quantum(
    eq: QuantumEquilibrium,
    zeta_max: float | None = None,
    points: int = 64,
) -> DistributionField:
    if zeta_max is None:
        zeta_max = 6.0 * math.sqrt(eq.T)
    return field_from_callable(
        lambda pts: equilibria.eval_quantum(eq, pts), eq.n, zeta_max, points, eq.V_omega
    )


def moments(field: DistributionField) -> MomentSummary:
    """Cell-sum moments: density, momentum, kinetic energy."""
    dv = field.cell_measure
    flat = field.values.reshape(field.nx, -1)
    rho_x = flat.sum(axis=1) * dv
    meshes = field.mesh()
    mom_x = np.empty((field.nx, field.n))
    for k, zk in enumerate(meshes):
        mom_x[:, k] = flat @ zk.ravel() * dv
    E_x = flat @ field.speed2().ravel() * (0.5 * dv)
    rho_total = float(np.dot(rho_x, field.x_widths))
    U = field.x_widths @ mom_x
    E_total = float(np.dot(E_x, field.x_widths))
    with np.errstate(invalid="ignore", divide="ignore"):
        u_x = np.where(rho_x[:, None] > 0, mom_x / rho_x[:, None], 0.0)
    return MomentSummary(rho_total=rho_total, U=U, E_total=E_total, rho_x=rho_x, u_x=u_x)


def entropy_classical(field: DistributionField) -> float:
    """S = -sum f log f dx dzeta, with 0 log 0 = 0."""
    per_cell = -special.xlogy(field.values, field.values).reshape(field.nx, -1).sum(axis=1)
    return float(np.dot(per_cell, field.x_widths)) * field.cell_measure


def entropy_quantum(field: DistributionField, epsilon: float) -> float:
    """Quantum entropy with occupancy correction.

    S = -sum [ f log f - (1/eps)(1+eps f) log(1+eps f) + f ].

    Requires 1 + eps f > 0 everywhere (fermion exclusion bound); eps = 0
    falls back to the classical entropy.
    """
    if epsilon == 0.0:
        return entropy_classical(field)
    f = field.values
    occ = 1.0 + epsilon * f
    if np.any(occ <= 0.0):
        raise ValueError(
            f"1 + eps*f reaches {occ.min()}; field violates the exclusion bound"
        )
    integrand = special.xlogy(f, f) - special.xlog1py(occ, epsilon * f) / epsilon + f
    per_cell = -integrand.reshape(field.nx, -1).sum(axis=1)
    return float(np.dot(per_cell, field.x_widths)) * field.cell_measure


def free_functional(
    field: DistributionField, t_ref: float, epsilon: float = 0.0
) -> FunctionalReport:
    """F = -E/t_ref + S, with a conservative out-of-grid tail estimate.

    The tail is the analytic Gaussian mass beyond the grid edge for the
    Maxwellian matching the field's moments; it bounds what the cell sums
    cannot see.
    """
    if t_ref <= 0:
        raise ValueError(f"reference temperature must be positive, got {t_ref}")
    ms = moments(field)
    S = entropy_quantum(field, epsilon) if epsilon != 0.0 else entropy_classical(field)
    F = -ms.E_total / t_ref + S
    tail = 0.0
    if ms.rho_total > 0:
        u = ms.U / ms.rho_total
        T_fit = (2.0 * ms.E_total / ms.rho_total - float(np.dot(u, u))) / field.n
        if T_fit > 0:
            edge = field.zeta_max
            sig = math.sqrt(2.0 * T_fit)
            for k in range(field.n):
                tail += 0.5 * (
                    special.erfc((edge - u[k]) / sig) + special.erfc((edge + u[k]) / sig)
                )
            tail *= ms.rho_total
    return FunctionalReport(S=S, E=ms.E_total, F=F, quadrature_tail=tail)


def f_closed_maxwellian(spec: MaxwellianSpec, t_ref: float) -> float:
    """Closed-form F of a Maxwellian against reference temperature t_ref.

    F = -rho [ log(rho / (V (2 pi T)^{n/2})) - n(1 - T/t_ref)/2 ]
        - rho |u|^2 / (2 t_ref).

    Reduces to -rho log C0 when T = t_ref and u = 0.
    """
    if t_ref <= 0:
        raise ValueError(f"reference temperature must be positive, got {t_ref}")
    bulk = float(np.dot(spec.u, spec.u))
    return -spec.rho * (
        math.log(spec.amplitude) - 0.5 * spec.n * (1.0 - spec.T / t_ref)
    ) - spec.rho * bulk / (2.0 * t_ref)


def _closed_free_energy(ref, t_ref: float) -> float:
    if isinstance(ref, MaxwellianSpec):
        return f_closed_maxwellian(ref, t_ref)
    if isinstance(ref, QuantumEquilibrium):
        return equilibria.quantum_free_energy(ref, t_ref)
    raise TypeError(f"unsupported reference state {type(ref).__name__}")


def distance(
    ref,
    field: DistributionField,
    t_ref: float | None = None,
    epsilon: float = 0.0,
) -> float:
    """Entropy-controlled distance F(ref) - F(field), nonnegative at equal mass.

    ref is a MaxwellianSpec (classical, eps = 0) or QuantumEquilibrium.
    The field's mass must match ref's within 1e-6 relative; renormalize
    explicitly first if needed.  On the classical path the same number is
    recomputed from the relative-entropy integrand

        M (1 - f/M + (f/M) log(f/M))

    and the two routes must agree within quadrature tolerance.
    """
    if t_ref is None:
        t_ref = ref.T
    rho_ref = ref.rho
    m = field.mass()
    if abs(m - rho_ref) > 1e-6 * rho_ref:
        raise ValueError(
            f"mass mismatch: field carries {m}, reference {rho_ref}; "
            "renormalize the field explicitly before taking distances"
        )
    rep = free_functional(field, t_ref, epsilon)
    value = _closed_free_energy(ref, t_ref) - rep.F

    if isinstance(ref, MaxwellianSpec) and epsilon == 0.0:
        # independent route through the relative-entropy integrand
        pts = np.stack(field.mesh(), axis=-1)
        M = equilibria.eval_classical(ref, pts)
        log_m = math.log(ref.amplitude) - np.sum((pts - ref.u) ** 2, axis=-1) / (2.0 * ref.T)
        f = field.values
        integrand = M[None, ...] - f + special.xlogy(f, f) - f * log_m[None, ...]
        per_cell = integrand.reshape(field.nx, -1).sum(axis=1) * field.cell_measure
        alt = float(np.dot(per_cell, field.x_widths))
        ref_tail_spec = MaxwellianSpec(ref.n, ref.rho, ref.u, ref.T, ref.V_omega)
        ref_field_tail = _gaussian_tail_mass(ref_tail_spec, field.zeta_max)
        tol = max(1e-8, 5.0 * (rep.quadrature_tail + ref_field_tail),
                  abs(m - rho_ref) * (2.0 + abs(math.log(ref.amplitude)) + field.n))
        if abs(alt - value) > tol:
            raise RuntimeError(
                f"distance routes disagree: free-energy difference {value} vs "
                f"relative-entropy sum {alt} (tolerance {tol})"
            )
    return value


def _gaussian_tail_mass(spec: MaxwellianSpec, edge: float) -> float:
    sig = math.sqrt(2.0 * spec.T)
    tail = 0.0
    for k in range(spec.n):
        tail += 0.5 * (
            special.erfc((edge - spec.u[k]) / sig) + special.erfc((edge + spec.u[k]) / sig)
        )
    return tail * spec.rho


def lyapunov(
    field: DistributionField,
    t_ref: float,
    V_omega: float | None = None,
    epsilon: float = 0.0,
) -> float:
    """Distance-from-equilibrium Lyapunov quantity.

    Classical: G = F(M_hat) - F(field) with M_hat the free-energy-maximal
    Maxwellian over all masses, F(M_hat) = (2 pi t_ref)^{n/2} V / e; this
    is nonnegative for every nonnegative field.  Quantum: G = F(M_eps) -
    F(field) with M_eps normalized to the field's own mass.
    """
    V = field.V_omega if V_omega is None else V_omega
    rep = free_functional(field, t_ref, epsilon)
    if epsilon == 0.0:
        rho_hat = (2.0 * math.pi * t_ref) ** (field.n / 2.0) * V / math.e
        return rho_hat - rep.F
    eq = equilibria.equilibrium_state(field.mass(), t_ref, V, field.n, epsilon)
    return equilibria.quantum_free_energy(eq, t_ref) - rep.F


def moment_matched_maxwellian(field: DistributionField) -> MaxwellianSpec:
    """Maxwellian sharing the field's total mass, momentum, and energy."""
    ms = moments(field)
    _, spec = equilibria.extremal_from_moments(
        ms.rho_total, ms.E_total, ms.U, 1.0, field.V_omega, field.n
    )
    return spec
