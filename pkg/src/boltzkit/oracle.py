"""Brute-force verifiers for the variational characterizations.

Two constrained optimizers act directly on gridded fields, with no
knowledge of the closed-form answers they are meant to reproduce:

* maximize_F_fixed_rho climbs the free functional over nonnegative
  fields of fixed mass; the maximizer must come out as the (classical or
  quantum) equilibrium produced by the normalization solver.
* minimize_dist_constrained minimizes the divergence from a reference
  Maxwellian under fixed mass, momentum, and energy; the minimizer must
  come out as the moment-matched Maxwellian.

Both use multiplicative updates f <- f * exp(eta * direction), which keep
f positive without clamping, with the direction projected onto the
constraint tangent under the f-weighted inner product and the step size
backtracked on the objective.  Constraints are restored exactly after
every step (mass by scaling; full moment sets by an exponential-tilt
Newton solve, which is the natural closure for log-space updates).

limit_roots solves x - 1 - log x = c, the scalar equation that classifies
possible long-time limits of monitored runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functionals import DistributionField, free_functional, moments

__all__ = [
    "RootPair",
    "AscentDiagnostics",
    "maximize_F_fixed_rho",
    "minimize_dist_constrained",
    "project_to_moments",
    "limit_roots",
]


class ConvergenceError(RuntimeError):
    """Ascent failed to reach tolerance; carries the last gradient norm."""

    def __init__(self, message: str, grad_norm: float):
        super().__init__(f"{message} (last projected-gradient max-norm {grad_norm:.3e})")
        self.grad_norm = grad_norm


@dataclass(frozen=True)
class RootPair:
    """Roots of y(x) = x - 1 - log x = c on (0, 1] and [1, inf)."""

    c: float
    lower: float
    upper: float
    unique: bool


@dataclass(frozen=True)
class AscentDiagnostics:
    iterations: int
    grad_norm: float
    objective: float


def _objective(field: DistributionField, t_ref: float, epsilon: float) -> float:
    try:
        return free_functional(field, t_ref, epsilon).F
    except ValueError:
        # fermion over-occupancy in a trial iterate: treat as off-domain
        return -math.inf


def _gradient(values: np.ndarray, speed2: np.ndarray, t_ref: float, epsilon: float) -> np.ndarray:
    # dF/df pointwise; the mass-measure factor is common and drops out of
    # the projected direction.
    f = np.maximum(values, 1e-300)
    if epsilon == 0.0:
        ent = -np.log(f)
    else:
        ent = -np.log(f / (1.0 + epsilon * f))
    return -speed2 / (2.0 * t_ref) + ent - 1.0


def maximize_F_fixed_rho(
    grid: DistributionField,
    rho: float,
    t_ref: float,
    epsilon: float = 0.0,
    tol: float = 1e-7,
    max_iter: int = 5000,
) -> tuple[DistributionField, AscentDiagnostics]:
    """Maximize the free functional over {f >= 0, total mass = rho}.

    `grid` supplies the velocity grid and the starting values (any
    strictly positive field works; it is renormalized to the requested
    mass before the first step).  Convergence is declared when the
    projected gradient max-norm drops below tol.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    field = grid.renormalized(rho)
    speed2 = field.speed2()
    cell_w = field.x_widths[(...,) + (None,) * field.n] * field.cell_measure

    eta = 0.25
    F = _objective(field, t_ref, epsilon)
    gnorm = math.inf
    for it in range(max_iter):
        f = field.values
        grad = _gradient(f, speed2, t_ref, epsilon)
        mass = float(np.sum(f * cell_w))
        mu = float(np.sum(f * grad * cell_w)) / mass
        direction = grad - mu
        gnorm = float(np.abs(direction).max())
        if gnorm < tol:
            return field, AscentDiagnostics(it, gnorm, F)
        while True:
            trial = field.with_values(f * np.exp(eta * direction)).renormalized(rho)
            F_trial = _objective(trial, t_ref, epsilon)
            if F_trial >= F or eta < 1e-12:
                break
            eta *= 0.5
        field, F = trial, F_trial
        eta = min(eta * 1.2, 1.0)
    raise ConvergenceError("free-functional ascent did not converge", gnorm)


def _constraint_stats(field: DistributionField) -> np.ndarray:
    """Rows phi_k on the velocity grid: 1, each zeta component, |zeta|^2/2."""
    mesh = field.mesh()
    rows = [np.ones((field.points,) * field.n)]
    rows.extend(mesh)
    rows.append(0.5 * field.speed2())
    return np.stack(rows)


def _tilt_restore(field: DistributionField, PHI: np.ndarray, targets: np.ndarray,
                  dv: float, tol: float = 1e-13) -> DistributionField:
    """Restore moments exactly via f -> f * exp(theta . phi), Newton in theta.

    PHI is the flattened (n_constraints, cells) statistic matrix on the
    single-cell velocity grid.
    """
    nc = PHI.shape[0]
    theta = np.zeros(nc)
    f0 = field.values.ravel()
    scale = np.maximum(np.abs(targets), 1.0)
    for _ in range(60):
        f = f0 * np.exp(theta @ PHI)
        w = f * dv
        res = PHI @ w - targets
        if np.all(np.abs(res) <= tol * scale):
            return field.with_values(f.reshape(field.values.shape))
        J = (PHI * w) @ PHI.T
        try:
            delta = np.linalg.solve(J, res)
        except np.linalg.LinAlgError:
            raise ConvergenceError("constraint restoration Jacobian is singular",
                                   float(np.abs(res).max()))
        # damp large tilts; exp overflow would destroy the iterate
        theta += np.clip(-delta, -2.0, 2.0)
    raise ConvergenceError("constraint restoration did not converge",
                           float(np.abs(res).max()))


def minimize_dist_constrained(
    grid: DistributionField,
    rho: float,
    E1: float,
    U: np.ndarray,
    t_ref: float,
    tol: float = 1e-7,
    max_iter: int = 5000,
) -> tuple[DistributionField, AscentDiagnostics]:
    """Minimize the divergence from the mass-rho Maxwellian at t_ref
    subject to fixed (mass, momentum, energy) = (rho, U, E1).

    Equivalent to maximizing F under the full moment constraints, since
    the reference term is a constant.  Returns the converged field; its
    distance is available through functionals.distance.
    """
    U = np.asarray(U, dtype=float)
    if rho <= 0:
        raise ValueError("rho must be positive")
    if E1 <= float(U @ U) / (2.0 * rho):
        raise ValueError("moments infeasible: energy at or below the bulk-motion floor")
    if grid.nx != 1:
        raise ValueError("constrained minimization runs on a single-cell velocity grid")
    epsilon = 0.0
    field = grid.renormalized(rho)
    speed2 = field.speed2()
    dv = field.cell_measure * float(field.x_widths[0])
    PHI = _constraint_stats(field).reshape(2 + field.n, -1)
    targets = np.concatenate([[rho], U, [E1]])
    field = _tilt_restore(field, PHI, targets, dv)

    eta = 0.25
    F = _objective(field, t_ref, epsilon)
    gnorm = math.inf
    shape = field.values.shape
    for it in range(max_iter):
        f = field.values.ravel()
        grad = _gradient(f, speed2.ravel(), t_ref, epsilon)
        w = f * dv
        # project the gradient onto the constraint tangent in the
        # f-weighted metric: grad - lambda . phi
        G = (PHI * w) @ PHI.T
        lam = np.linalg.solve(G, PHI @ (grad * w))
        direction = grad - lam @ PHI
        gnorm = float(np.abs(direction).max())
        if gnorm < tol:
            return field, AscentDiagnostics(it, gnorm, F)
        while True:
            trial = field.with_values((f * np.exp(eta * direction)).reshape(shape))
            trial = _tilt_restore(trial, PHI, targets, dv)
            F_trial = _objective(trial, t_ref, epsilon)
            if F_trial >= F or eta < 1e-12:
                break
            eta *= 0.5
        field, F = trial, F_trial
        eta = min(eta * 1.2, 1.0)
    raise ConvergenceError("constrained ascent did not converge", gnorm)


def project_to_moments(field: DistributionField, rho: float, E1: float,
                       U: np.ndarray) -> DistributionField:
    """Exponential-tilt a positive field onto exact (mass, momentum, energy).

    Lets callers build feasible competitors for the constrained problem;
    any such field scores at most the minimizer's objective.
    """
    if field.nx != 1:
        raise ValueError("moment projection runs on a single-cell velocity grid")
    U = np.asarray(U, dtype=float)
    dv = field.cell_measure * float(field.x_widths[0])
    PHI = _constraint_stats(field).reshape(2 + field.n, -1)
    targets = np.concatenate([[rho], U, [E1]])
    return _tilt_restore(field, PHI, targets, dv)


def _y(x: float) -> float:
    return x - 1.0 - math.log(x)


def limit_roots(c: float, tol: float = 1e-12) -> RootPair:
    """Solve x - 1 - log x = c.

    y is strictly convex with minimum y(1) = 0, so c = 0 has the unique
    root 1 and every c > 0 has one root on each side of 1.
    """
    if c < 0:
        raise ValueError(f"y(x) = x - 1 - log x is nonnegative; no roots for c = {c}")
    if c == 0:
        return RootPair(c=0.0, lower=1.0, upper=1.0, unique=True)

    # lower root in (0, 1): y - c is positive near 0 and negative at 1
    lower = _newton_bracketed(c, 1e-300, 1.0)

    # upper root in (1, inf): grow the bracket until y exceeds c
    b = 2.0
    while _y(b) < c:
        b *= 2.0
        if b > 1e300:
            raise RuntimeError("upper bracket growth failed")
    upper = _newton_bracketed(c, 1.0, b)
    return RootPair(c=c, lower=lower, upper=upper, unique=False)


def _newton_bracketed(c: float, lo: float, hi: float, tol: float = 1e-14) -> float:
    """Newton iteration for y(x) = c with a maintained sign-change bracket."""
    flo = _y(lo) - c if lo > 0 else math.inf
    x = 0.5 * (lo + hi)
    for _ in range(300):
        fx = _y(x) - c
        if fx == 0.0:
            return x
        if flo * fx < 0:
            hi = x
        else:
            lo, flo = x, fx
        dfx = 1.0 - 1.0 / x
        x_new = x - fx / dfx if dfx != 0.0 else 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x
