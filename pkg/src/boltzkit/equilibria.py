"""Classical and quantum equilibrium states over a bounded spatial domain.

A classical equilibrium is a global Maxwellian

    M(zeta) = rho / (V (2 pi T)^{n/2}) * exp(-|zeta - u|^2 / (2T)),

normalized so its total mass over the domain (volume V) is rho.  Its
quantum counterpart at inverse-statistics parameter eps is

    M_eps(zeta) = C e^{-|zeta|^2/2T} / (1 - C eps e^{-|zeta|^2/2T}),

with eps < 0 the fermion branch, eps > 0 the boson branch, and eps = 0
classical.  The amplitude C is fixed by mass through

    (2 pi T)^{n/2} V C L_{n/2}(C eps) = rho,

solved here with a bracketed Newton iteration (bisection fallback).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from . import specfun
from .specfun import polylog_L, zeta

__all__ = [
    "MaxwellianSpec",
    "QuantumEquilibrium",
    "SolveReport",
    "QuantumDeltas",
    "NoSolutionError",
    "NonContractionError",
    "eval_classical",
    "m_hat",
    "extremal_from_moments",
    "solve_normalization",
    "equilibrium_state",
    "iterate_z",
    "eval_quantum",
    "quantum_energy",
    "quantum_entropy_closed",
    "quantum_free_energy",
    "classical_reference",
    "quantum_deltas",
]


class NoSolutionError(ValueError):
    """Mass constraint unattainable on the boson branch (n > 2)."""


class NonContractionError(RuntimeError):
    """Fixed-point iteration stopped contracting; use solve_normalization."""


@dataclass(frozen=True)
class MaxwellianSpec:
    """Global Maxwellian parameters: dimension, mass, bulk velocity,
    temperature, and domain volume."""

    n: int
    rho: float
    u: np.ndarray
    T: float
    V_omega: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", np.atleast_1d(np.asarray(self.u, dtype=float)))
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if self.u.shape != (self.n,):
            raise ValueError(f"bulk velocity must have shape ({self.n},), got {self.u.shape}")
        if not (self.rho > 0 and self.T > 0 and self.V_omega > 0):
            raise ValueError("rho, T and V_omega must all be positive")

    @property
    def amplitude(self) -> float:
        """Peak height rho / (V (2 pi T)^{n/2})."""
        return self.rho / (self.V_omega * (2.0 * math.pi * self.T) ** (self.n / 2.0))


@dataclass(frozen=True)
class QuantumEquilibrium:
    """Radially symmetric quantum equilibrium with amplitude C.

    Requires C > 0 and C*eps <= 1; rho must equal the realized mass
    (2 pi T)^{n/2} V C L_{n/2}(C eps).
    """

    n: int
    T: float
    V_omega: float
    epsilon: float
    C: float
    rho: float

    def __post_init__(self) -> None:
        if self.n < 1 or self.T <= 0 or self.V_omega <= 0:
            raise ValueError("need n >= 1, T > 0, V_omega > 0")
        if not self.C > 0:
            raise ValueError(f"amplitude must be positive, got {self.C}")
        if self.C * self.epsilon > 1.0 + 1e-12:
            raise ValueError(f"C*eps = {self.C * self.epsilon} exceeds 1; state undefined")
        realized = _mass_of(self.C, self.T, self.V_omega, self.n, self.epsilon)
        if not math.isclose(realized, self.rho, rel_tol=1e-8):
            raise ValueError(
                f"inconsistent mass: stated {self.rho}, realized {realized}"
            )


@dataclass(frozen=True)
class SolveReport:
    """Result of the mass-normalization solve."""

    C: float
    iterations: int
    residual: float
    regime: str  # fermion | classical | boson | boson_threshold


def eval_classical(spec: MaxwellianSpec, zeta_pts: np.ndarray) -> np.ndarray:
    """Evaluate the Maxwellian at velocity points of shape (..., n)."""
    z = np.asarray(zeta_pts, dtype=float)
    if z.shape[-1] != spec.n:
        raise ValueError(f"points must have last axis {spec.n}, got {z.shape}")
    d2 = np.sum((z - spec.u) ** 2, axis=-1)
    return spec.amplitude * np.exp(-d2 / (2.0 * spec.T))


def m_hat(T: float, V_omega: float, n: int) -> MaxwellianSpec:
    """The zero-velocity Maxwellian whose mass makes its amplitude 1/e.

    Its mass rho_hat = (2 pi T)^{n/2} V / e maximizes the free functional
    over all masses at fixed (T, V); see functionals.lyapunov.
    """
    rho_hat = (2.0 * math.pi * T) ** (n / 2.0) * V_omega / math.e
    return MaxwellianSpec(n=n, rho=rho_hat, u=np.zeros(n), T=T, V_omega=V_omega)


def extremal_from_moments(
    rho: float,
    E1: float,
    U: np.ndarray,
    T_ref: float,
    V_omega: float,
    n: int,
) -> tuple[float, MaxwellianSpec]:
    """Maxwellian matching prescribed mass, energy, and momentum.

    Bulk velocity is U/rho and the temperature comes from the excess of
    E1 over the bulk kinetic energy:

        T1 = (2/(n rho)) E1 - |U|^2 / (n rho^2).

    Raises ValueError when E1 <= |U|^2/(2 rho) (no positive temperature).
    T_ref is accepted alongside the moments (it fixes the reference
    temperature in distance computations) but does not affect T1.
    """
    U = np.atleast_1d(np.asarray(U, dtype=float))
    if U.shape != (n,):
        raise ValueError(f"momentum must have shape ({n},), got {U.shape}")
    if rho <= 0 or V_omega <= 0 or T_ref <= 0:
        raise ValueError("rho, V_omega and T_ref must be positive")
    bulk = float(np.dot(U, U)) / (2.0 * rho)
    if E1 <= bulk:
        raise ValueError(
            f"moments infeasible: energy {E1} does not exceed bulk kinetic part {bulk}"
        )
    T1 = (2.0 * E1 - float(np.dot(U, U)) / rho) / (n * rho)
    spec = MaxwellianSpec(n=n, rho=rho, u=U / rho, T=T1, V_omega=V_omega)
    return T1, spec


def _mass_of(C: float, T: float, V_omega: float, n: int, eps: float) -> float:
    """Realized mass (2 pi T)^{n/2} V C L_{n/2}(C eps)."""
    pref = (2.0 * math.pi * T) ** (n / 2.0) * V_omega
    return pref * C * polylog_L(n / 2.0, C * eps, tol=1e-15).value


def _l_value(s: float, z: float) -> float:
    return polylog_L(s, z, tol=1e-15).value


def _l_prime(s: float, z: float) -> float:
    """d/dz L_s(z) = sum_{m>=2} (m-1) z^{m-2} / m^s, any z < 1."""
    if z == 0.0:
        return 1.0 / 2.0**s
    if z > 0.0 and -math.log(z) < specfun._UNIT_U:
        # d/dz (z L_s) = L_{s-1}, so L_s' = (L_{s-1} - L_s) / z; both factors
        # come from the unit-neighborhood expansion, which tolerates s <= 0
        lower = specfun._near_unit(s - 1.0, z).value
        return (lower - specfun._near_unit(s, z).value) / z
    if -1.0 <= z < -0.5:
        # same identity through the z = -1 neighborhood, where the direct
        # series needs ~ 1/(1+z) terms
        lower = specfun._near_neg_unit(s - 1.0, z).value
        return (lower - specfun._near_neg_unit(s, z).value) / z
    if abs(z) < 1.0:
        q = abs(z)
        total = 0.0
        term_bound = np.inf
        m = 2
        block = 256
        while term_bound > 1e-14 * (1.0 - q):
            ms = np.arange(m, m + block, dtype=np.float64)
            total += float(np.sum((ms - 1.0) * z ** (ms - 2.0) / ms**s))
            m += block
            # decreasing once m > ~1/log(1/q); conservative geometric bound
            term_bound = m * q ** (m - 2)
            if m > 10_000_000:
                break
        return total
    # z <= -1: differentiate the integral form under the integral sign
    g = special.gamma(s)

    def f(u: float) -> float:
        e = math.exp(-u)
        return u ** (s - 1.0) * e * e / (1.0 - z * e) ** 2

    panels = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, math.inf]
    total = 0.0
    for a, b in zip(panels[:-1], panels[1:]):
        v, _ = integrate.quad(f, a, b, epsabs=1e-15, epsrel=1e-13, limit=200)
        total += v
    return total / g


def solve_normalization(
    rho: float,
    T: float,
    V_omega: float,
    n: int,
    epsilon: float,
    tol: float = 1e-12,
) -> SolveReport:
    """Solve (2 pi T)^{n/2} V C L_{n/2}(C eps) = rho for the amplitude C.

    The map C -> C L_{n/2}(C eps) is strictly increasing on its domain, so
    a sign-changing bracket always pins the root; Newton steps are taken
    inside the bracket with bisection as fallback.  Reported residual is
    the absolute mass defect; it satisfies residual <= tol * rho.

    Regimes: eps < 0 fermion (C > C0, any mass solvable); eps = 0
    classical (C = C0 exactly); eps > 0 boson, where for n > 2 the mass
    constraint is solvable only while eps*rho <= (2 pi T)^{n/2} V zeta(n/2)
    (NoSolutionError beyond, boson_threshold with C = 1/eps at equality).
    """
    if rho <= 0 or T <= 0 or V_omega <= 0 or n < 1:
        raise ValueError("need rho > 0, T > 0, V_omega > 0, n >= 1")
    pref = (2.0 * math.pi * T) ** (n / 2.0) * V_omega
    C0 = rho / pref
    if epsilon == 0.0:
        return SolveReport(C=C0, iterations=0, residual=0.0, regime="classical")

    s = n / 2.0
    ftol = 0.1 * tol * C0

    def fun(C: float) -> float:
        return C * _l_value(s, C * epsilon) - C0

    def dfun(C: float) -> float:
        z = C * epsilon
        return _l_value(s, z) + z * _l_prime(s, z)

    if epsilon < 0.0:
        regime = "fermion"
        lo, hi = C0, 2.0 * C0
        flo = fun(lo)
        fhi = fun(hi)
        grow = 0
        while fhi <= 0.0:
            lo, flo = hi, fhi
            hi *= 2.0
            fhi = fun(hi)
            grow += 1
            if grow > 500:
                raise RuntimeError("bracket growth failed on fermion branch")
    else:
        cap = 1.0 / epsilon
        if n > 2:
            gap = cap * zeta(s) - C0
            if gap < -1e-12 * C0:
                raise NoSolutionError(
                    f"boson mass constraint unattainable: eps*rho = {epsilon * rho} "
                    f"exceeds {pref * zeta(s)}"
                )
            if abs(gap) <= 1e-12 * C0:
                return SolveReport(C=cap, iterations=0, residual=pref * abs(gap),
                                   regime="boson_threshold")
            hi, fhi = cap, gap
        else:
            # L_{n/2} blows up at z = 1 for n <= 2: walk the bracket up to the cap
            if C0 * epsilon < 0.5:
                hi = C0
            else:
                hi = 0.5 * cap
            fhi = fun(hi)
            grow = 0
            while fhi <= 0.0:
                hi = 0.5 * (hi + cap)
                fhi = fun(hi)
                grow += 1
                if grow > 200:
                    raise RuntimeError("bracket growth failed on boson branch")
        regime = "boson"
        lo = 0.5 * hi
        flo = fun(lo)
        shrink = 0
        while flo >= 0.0:
            hi, fhi = lo, flo
            lo *= 0.5
            flo = fun(lo)
            shrink += 1
            if shrink > 500:
                raise RuntimeError("bracket shrink failed on boson branch")

    C, iterations, resid = _bracketed_newton(fun, dfun, lo, hi, flo, fhi, ftol)
    return SolveReport(C=C, iterations=iterations, residual=pref * abs(resid), regime=regime)


def _bracketed_newton(fun, dfun, lo, hi, flo, fhi, ftol, max_iter=200):
    """Safeguarded Newton on an increasing function with flo < 0 < fhi."""
    x = 0.5 * (lo + hi)
    fx = fun(x)
    it = 1
    while abs(fx) > ftol and it < max_iter:
        if fx > 0.0:
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
        step_ok = False
        d = dfun(x)
        if d > 0.0 and math.isfinite(d):
            x_new = x - fx / d
            if lo < x_new < hi:
                x, step_ok = x_new, True
        if not step_ok:
            x = 0.5 * (lo + hi)
        if hi - lo <= 1e-16 * max(1.0, abs(x)):
            fx = fun(x)
            break
        fx = fun(x)
        it += 1
    return x, it, fx


def equilibrium_state(
    rho: float,
    T: float,
    V_omega: float,
    n: int,
    epsilon: float,
    tol: float = 1e-12,
) -> QuantumEquilibrium:
    """Solve the normalization and package the resulting equilibrium."""
    rep = solve_normalization(rho, T, V_omega, n, epsilon, tol=tol)
    return QuantumEquilibrium(n=n, T=T, V_omega=V_omega, epsilon=epsilon, C=rep.C, rho=rho)


def iterate_z(c0_eps: float, n: int, tol: float = 1e-10) -> float:
    """Fixed-point iteration z <- c0_eps / L_{n/2}(z) for z = C eps.

    c0_eps is the product C0 * eps.  Contraction is monitored at runtime:
    if successive updates stop shrinking, or a boson iterate reaches the
    z = 1 singularity, NonContractionError is raised and the caller should
    fall back to solve_normalization.
    """
    s = n / 2.0
    z = 0.0
    prev_step = math.inf
    bad = 0
    for _ in range(10_000):
        if z >= 1.0 - 1e-12:
            raise NonContractionError(f"iterate reached the z = 1 singularity (z = {z})")
        z_next = c0_eps / _l_value(s, z)
        step = abs(z_next - z)
        if step <= tol:
            return z_next
        if step >= prev_step:
            bad += 1
            if bad >= 2:
                raise NonContractionError(
                    f"updates stopped contracting at |dz| = {step}"
                )
        else:
            bad = 0
        prev_step = step
        z = z_next
    raise NonContractionError("no convergence within 10000 iterations")


def eval_quantum(eq: QuantumEquilibrium, zeta_pts: np.ndarray) -> np.ndarray:
    """Evaluate M_eps at velocity points of shape (..., n).

    At the boson threshold (C eps = 1) the value diverges at zeta = 0;
    grids used here are midpoint grids and never contain the origin.
    """
    z = np.asarray(zeta_pts, dtype=float)
    if z.shape[-1] != eq.n:
        raise ValueError(f"points must have last axis {eq.n}, got {z.shape}")
    g = eq.C * np.exp(-np.sum(z * z, axis=-1) / (2.0 * eq.T))
    return g / (1.0 - eq.epsilon * g)


def quantum_energy(eq: QuantumEquilibrium) -> float:
    """Kinetic energy of M_eps: (n rho T / 2) L_{n/2+1}(C eps) / L_{n/2}(C eps)."""
    s = eq.n / 2.0
    z = eq.C * eq.epsilon
    if z == 0.0:
        return 0.5 * eq.n * eq.rho * eq.T
    ratio = _l_value(s + 1.0, z) / _l_value(s, z)
    return 0.5 * eq.n * eq.rho * eq.T * ratio


def quantum_entropy_closed(eq: QuantumEquilibrium) -> float:
    """Closed-form entropy of M_eps.

    S = E/T - (1 + log C) rho + 2E/(nT), with E the quantum energy.  The
    last term integrates the occupancy-correction summand by parts; at
    eps = 0 it equals rho and the classical E/T - rho log C0 is recovered.
    """
    E = quantum_energy(eq)
    return E / eq.T - (1.0 + math.log(eq.C)) * eq.rho + 2.0 * E / (eq.n * eq.T)


def quantum_free_energy(eq: QuantumEquilibrium, T_ref: float | None = None) -> float:
    """F = -E/T_ref + S for the equilibrium; T_ref defaults to eq.T."""
    t = eq.T if T_ref is None else T_ref
    return -quantum_energy(eq) / t + quantum_entropy_closed(eq)


def classical_reference(rho: float, T: float, V_omega: float, n: int) -> tuple[float, float, float]:
    """(E, S, F) of the classical Maxwellian with the same (rho, T, V)."""
    C0 = rho / (V_omega * (2.0 * math.pi * T) ** (n / 2.0))
    E = 0.5 * n * rho * T
    S = E / T - rho * math.log(C0)
    F = -rho * math.log(C0)
    return E, S, F


@dataclass(frozen=True)
class QuantumDeltas:
    """Quantum-minus-classical shifts with their first-order predictions.

    The predictions are the leading eps-slopes

        dE ~ -n rho T C0 eps / (4 * 2^{n/2}),
        dS ~ -(n-2) rho C0 eps / (4 * 2^{n/2}),
        dF ~  rho C0 eps / (2 * 2^{n/2}),

    valid to O(eps^2); dC/C0 ~ -C0 eps / 2^{n/2}.
    """

    dE: float
    dS: float
    dF: float
    predicted_dE: float
    predicted_dS: float
    predicted_dF: float
    C: float
    C0: float
    regime: str


def quantum_deltas(
    rho: float, T: float, V_omega: float, n: int, epsilon: float, tol: float = 1e-13
) -> QuantumDeltas:
    """Solve the equilibrium at eps and report shifts against eps = 0."""
    rep = solve_normalization(rho, T, V_omega, n, epsilon, tol=tol)
    eq = QuantumEquilibrium(n=n, T=T, V_omega=V_omega, epsilon=epsilon, C=rep.C, rho=rho)
    E_c, S_c, F_c = classical_reference(rho, T, V_omega, n)
    C0 = rho / (V_omega * (2.0 * math.pi * T) ** (n / 2.0))
    E = quantum_energy(eq)
    S = quantum_entropy_closed(eq)
    F = -E / T + S
    scale = C0 * epsilon / 2.0 ** (n / 2.0)
    return QuantumDeltas(
        dE=E - E_c,
        dS=S - S_c,
        dF=F - F_c,
        predicted_dE=-0.25 * n * rho * T * scale,
        predicted_dS=-0.25 * (n - 2.0) * rho * scale,
        predicted_dF=0.5 * rho * scale,
        C=rep.C,
        C0=C0,
        regime=rep.regime,
    )
