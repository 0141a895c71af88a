"""Batch command-line front end.

One verb per capability: equilibrium and quantum-deltas wrap the
normalization solver, dist and extremal wrap the closed-form distance
layer, simulate wraps the monitored kinetic runs, roots wraps the scalar
limit classifier, and selftest runs the acceptance suite.

Every subcommand accepts --config FILE with key=value lines supplying
defaults; explicit flags override the file, and unknown keys are
rejected.  Artifacts go through emit_report, which writes either CSV
(RFC-4180 quoting, CRLF) or JSON lines with keys matching the CSV
header; floats are rendered with 17 significant digits either way.
Runs are deterministic for a fixed configuration: the only random init
is seeded, and worker threads never change reduction order.

Exit codes: 0 success, 2 usage error (bad flags, unknown config keys,
missing required parameters), 1 domain or solver error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import equilibria, functionals, kinetics
from .equilibria import MaxwellianSpec
from .oracle import ConvergenceError, limit_roots

__all__ = ["RunConfig", "emit_report", "dispatch", "main"]


# --------------------------------------------------------------------------
# configuration plumbing
# --------------------------------------------------------------------------


class UsageError(Exception):
    """Bad invocation (unknown key, missing parameter); maps to exit 2."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved parameters for one subcommand invocation."""

    command: str
    params: Mapping[str, Any]

    def __getattr__(self, name: str) -> Any:
        try:
            return self.params[name]
        except KeyError:
            raise AttributeError(name) from None


def _parse_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def resolve_config(
    command: str,
    defaults: Mapping[str, Any],
    converters: Mapping[str, Callable[[str], Any]],
    required: Sequence[str],
    flag_values: Mapping[str, Any],
    config_path: str | None,
) -> RunConfig:
    """Merge hard defaults <- config file <- explicit flags."""
    params = dict(defaults)
    if config_path is not None:
        for key, text in _parse_config_file(config_path).items():
            if key not in converters:
                raise UsageError(f"unknown config key {key!r} for {command}")
            try:
                params[key] = converters[key](text)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"config key {key}: {exc}") from exc
    params.update(flag_values)
    missing = [k for k in required if params.get(k) is None]
    if missing:
        raise UsageError(f"{command} requires " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return RunConfig(command, params)


def _floats_csv(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _bool_flag(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


class _Command:
    """One subcommand: its parser plus the key registry for config merging."""

    def __init__(self, subparsers, name: str, help_text: str):
        self.name = name
        self.parser = subparsers.add_parser(name, help=help_text)
        self.parser.add_argument("--config", default=None, help="key=value defaults file")
        self.converters: dict[str, Callable[[str], Any]] = {}
        self.defaults: dict[str, Any] = {}
        self.required: list[str] = []

    def add(self, flag: str, conv: Callable[[str], Any], default: Any = None,
            required: bool = False, help: str = "", choices: Sequence[str] | None = None):
        dest = flag.lstrip("-").replace("-", "_")
        self.parser.add_argument(flag, dest=dest, type=conv, default=argparse.SUPPRESS,
                                 choices=choices, help=help)
        self.converters[dest] = conv
        self.defaults[dest] = default
        if required:
            self.required.append(dest)

    def resolve(self, ns: argparse.Namespace) -> RunConfig:
        flags = {k: v for k, v in vars(ns).items() if k in self.converters}
        return resolve_config(self.name, self.defaults, self.converters,
                              self.required, flags, ns.config)


# --------------------------------------------------------------------------
# report emission
# --------------------------------------------------------------------------


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return str(value)


def _json_value(value: Any) -> str:
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return json.dumps(str(value))


_MONITOR_COLUMNS = ("t", "S", "E", "F", "G", "A", "B")


def _as_rows(records) -> tuple[list[str], list[list[Any]]]:
    records = list(records)
    if records and isinstance(records[0], kinetics.MonitorRecord):
        header = list(_MONITOR_COLUMNS)
        rows = [[r.t, r.S, r.E, r.F, r.G, r.A, r.B_flux] for r in records]
        return header, rows
    header = list(records[0].keys()) if records else []
    return header, [[r[k] for k in header] for r in records]


def emit_report(records, path: str, format: str = "csv", header: Sequence[str] | None = None) -> None:
    """Write records to path as CSV or JSON lines.

    Column order is the monitored-run order (t,S,E,F,G,A,B) for
    MonitorRecord series and dict insertion order otherwise; floats carry
    17 significant digits in both formats.  An empty series yields a
    header-only CSV (pass header=) or an empty JSON-lines file.
    """
    if format not in ("csv", "json"):
        raise ValueError(f"unknown report format {format!r}")
    cols, rows = _as_rows(records)
    if not cols and header is not None:
        cols = list(header)
    if format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(cols)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
    else:
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                body = ", ".join(f"{json.dumps(c)}: {_json_value(v)}" for c, v in zip(cols, row))
                fh.write("{" + body + "}\n")


def _fmt(x: float) -> str:
    # console rendering: short, with the magnitude kept honest
    x = float(x)  # numpy scalars repr as np.float64(...) otherwise
    if x == 0.0:
        return "0.0"
    if 1e-4 <= abs(x) < 1e7:
        return repr(round(x, 6))
    return f"{x:.6e}"


# --------------------------------------------------------------------------
# subcommand bodies
# --------------------------------------------------------------------------


def _maybe_emit(cfg: RunConfig, record_or_series) -> None:
    if cfg.params.get("out"):
        emit_report(record_or_series, cfg.out, cfg.format)
        n = len(record_or_series)
        print(f"wrote {cfg.out} ({n} record{'s' if n != 1 else ''})")


def _cmd_equilibrium(cfg: RunConfig) -> int:
    rep = equilibria.solve_normalization(cfg.rho, cfg.T, cfg.vol, cfg.n, cfg.eps, tol=cfg.tol)
    eq = equilibria.QuantumEquilibrium(n=cfg.n, T=cfg.T, V_omega=cfg.vol,
                                       epsilon=cfg.eps, C=rep.C, rho=cfg.rho)
    E = equilibria.quantum_energy(eq)
    S = equilibria.quantum_entropy_closed(eq)
    F = -E / cfg.T + S
    print(f"C={_fmt(rep.C)} regime={rep.regime}")
    print(f"E={_fmt(E)} S={_fmt(S)} F={_fmt(F)}")
    record = {
        "n": cfg.n, "rho": cfg.rho, "T": cfg.T, "V_omega": cfg.vol, "epsilon": cfg.eps,
        "C": rep.C, "regime": rep.regime, "E": E, "S": S, "F": F,
        "residual": rep.residual, "iterations": rep.iterations,
    }
    _maybe_emit(cfg, [record])
    return 0


def _cmd_quantum_deltas(cfg: RunConfig) -> int:
    d = equilibria.quantum_deltas(cfg.rho, cfg.T, cfg.vol, cfg.n, cfg.eps)
    print(f"C={_fmt(d.C)} C0={_fmt(d.C0)} regime={d.regime}")
    print(f"dE={_fmt(d.dE)} (predicted {_fmt(d.predicted_dE)})")
    print(f"dS={_fmt(d.dS)} (predicted {_fmt(d.predicted_dS)})")
    print(f"dF={_fmt(d.dF)} (predicted {_fmt(d.predicted_dF)})")
    record = {
        "n": cfg.n, "rho": cfg.rho, "T": cfg.T, "V_omega": cfg.vol, "epsilon": cfg.eps,
        "C": d.C, "C0": d.C0, "regime": d.regime,
        "dE": d.dE, "dS": d.dS, "dF": d.dF,
        "predicted_dE": d.predicted_dE, "predicted_dS": d.predicted_dS,
        "predicted_dF": d.predicted_dF,
    }
    _maybe_emit(cfg, [record])
    return 0


def _unit_vector(u: tuple[float, ...] | None, n: int) -> np.ndarray:
    if u is None:
        return np.zeros(n)
    if len(u) != n:
        raise UsageError(f"--u needs {n} comma-separated components")
    return np.asarray(u, dtype=float)


def _cmd_dist(cfg: RunConfig) -> int:
    u = _unit_vector(cfg.u, cfg.n)
    ref = MaxwellianSpec(n=cfg.n, rho=cfg.rho, u=np.zeros(cfg.n), T=cfg.ref_T, V_omega=cfg.vol)
    fld = MaxwellianSpec(n=cfg.n, rho=cfg.rho, u=u, T=cfg.field_T, V_omega=cfg.vol)
    d = functionals.f_closed_maxwellian(ref, cfg.ref_T) - functionals.f_closed_maxwellian(fld, cfg.ref_T)
    print(_fmt(d))
    record = {"n": cfg.n, "rho": cfg.rho, "V_omega": cfg.vol,
              "ref_T": cfg.ref_T, "field_T": cfg.field_T}
    for k in range(cfg.n):
        record[f"u{k + 1}"] = float(u[k])
    record["dist"] = d
    _maybe_emit(cfg, [record])
    return 0


def _cmd_extremal(cfg: RunConfig) -> int:
    U = _unit_vector(cfg.U, cfg.n)
    T1, spec = equilibria.extremal_from_moments(cfg.rho, cfg.E1, U, cfg.T, cfg.vol, cfg.n)
    ref = MaxwellianSpec(n=cfg.n, rho=cfg.rho, u=np.zeros(cfg.n), T=cfg.T, V_omega=cfg.vol)
    d = functionals.f_closed_maxwellian(ref, cfg.T) - functionals.f_closed_maxwellian(spec, cfg.T)
    u1 = ", ".join(_fmt(v) for v in spec.u)
    print(f"T1={_fmt(T1)} u1=({u1}) dist={_fmt(d)}")
    record = {"n": cfg.n, "rho": cfg.rho, "E1": cfg.E1, "T_ref": cfg.T, "V_omega": cfg.vol}
    for k in range(cfg.n):
        record[f"U{k + 1}"] = float(U[k])
    record["T1"] = T1
    record["dist"] = d
    _maybe_emit(cfg, [record])
    return 0


def _cmd_roots(cfg: RunConfig) -> int:
    pair = limit_roots(cfg.c)
    tail = " unique" if pair.unique else ""
    print(f"lower={_fmt(pair.lower)} upper={_fmt(pair.upper)}{tail}")
    record = {"c": pair.c, "lower": pair.lower, "upper": pair.upper, "unique": pair.unique}
    _maybe_emit(cfg, [record])
    return 0


def _build_init(cfg: RunConfig) -> functionals.DistributionField:
    n = 2
    T = cfg.T
    if cfg.init == "bimodal":
        reach = cfg.u0 + 6.0 * math.sqrt(T)
    else:
        u = _unit_vector(cfg.u, n)
        reach = float(np.max(np.abs(u))) + 6.0 * math.sqrt(T)
    zeta_max = cfg.zeta_max if cfg.zeta_max is not None else reach
    if cfg.nx > 1:
        widths = np.full(cfg.nx, cfg.length / cfg.nx)
    else:
        widths = cfg.vol

    if cfg.init == "maxwellian":
        u = _unit_vector(cfg.u, n)
        spec = MaxwellianSpec(n=n, rho=cfg.rho, u=u, T=T, V_omega=1.0)
        fld = functionals.field_from_maxwellian(spec, zeta_max=zeta_max, points=cfg.grid,
                                                x_widths=widths)
    elif cfg.init == "bimodal":
        # equal-mass counterstreaming pair along the transport axis
        u0 = cfg.u0
        a = MaxwellianSpec(n=n, rho=0.5 * cfg.rho, u=np.array([u0, 0.0]), T=T, V_omega=1.0)
        b = MaxwellianSpec(n=n, rho=0.5 * cfg.rho, u=np.array([-u0, 0.0]), T=T, V_omega=1.0)
        fld = functionals.field_from_callable(
            lambda z: equilibria.eval_classical(a, z) + equilibria.eval_classical(b, z),
            n=n, zeta_max=zeta_max, points=cfg.grid, x_widths=widths)
    elif cfg.init == "random":
        spec = MaxwellianSpec(n=n, rho=cfg.rho, u=np.zeros(n), T=T, V_omega=1.0)
        fld = functionals.field_from_maxwellian(spec, zeta_max=zeta_max, points=cfg.grid,
                                                x_widths=widths)
        rng = np.random.default_rng(cfg.seed)
        fld = fld.with_values(fld.values * np.exp(0.2 * rng.standard_normal(fld.values.shape)))
    else:
        raise UsageError(f"unknown init {cfg.init!r}")

    if cfg.nx > 1 and cfg.x_amp != 0.0:
        centers = (np.arange(cfg.nx) + 0.5) * (cfg.length / cfg.nx)
        profile = 1.0 + cfg.x_amp * np.cos(2.0 * math.pi * centers / cfg.length)
        fld = fld.with_values(fld.values * profile[(...,) + (None,) * n])
    return fld.renormalized(cfg.rho)


def _cmd_simulate(cfg: RunConfig) -> int:
    kernel = kinetics.CollisionKernelSpec(kind=cfg.kernel, b0=cfg.b0,
                                          sigma_quadrature_points=cfg.sigma_nodes)
    init = _build_init(cfg)
    boundary = None
    if cfg.nx > 1:
        if cfg.boundary == "maxwellian_diffusion":
            wall = MaxwellianSpec(n=2, rho=1.0, u=np.zeros(2),
                                  T=cfg.wall_T if cfg.wall_T is not None else cfg.T,
                                  V_omega=1.0)
            boundary = kinetics.BoundarySpec(kind=cfg.boundary, wall_maxwellian=wall,
                                             kappa=cfg.kappa)
        else:
            boundary = kinetics.BoundarySpec(kind=cfg.boundary)
    dt = cfg.dt if cfg.dt is not None else kinetics.default_dt(kernel, cfg.rho)
    if cfg.t_ref is not None:
        t_ref = cfg.t_ref
    else:
        ms = functionals.moments(init)
        t_ref, _ = equilibria.extremal_from_moments(ms.rho_total, ms.E_total, ms.U,
                                                    1.0, init.V_omega, init.n)
    records, final = kinetics.run_monitored(init, cfg.steps, dt, kernel,
                                            epsilon=cfg.eps, boundary=boundary, t_ref=t_ref)
    label = kinetics.classify(records[1:]) if len(records) > 1 else "conservative"
    dS = np.diff([r.S for r in records])
    last = records[-1]
    print(f"steps={cfg.steps} dt={_fmt(dt)} t_ref={_fmt(t_ref)} classification={label}")
    print(f"final: t={_fmt(last.t)} S={_fmt(last.S)} E={_fmt(last.E)} "
          f"F={_fmt(last.F)} G={_fmt(last.G)}")
    if dS.size:
        print(f"entropy steps: min={_fmt(float(dS.min()))} total={_fmt(float(dS.sum()))}")
    _maybe_emit(cfg, records)
    return 0


def _cmd_selftest(cfg: RunConfig) -> int:
    from . import acceptance

    only = set(cfg.only) if cfg.only else None
    ok = acceptance.run_all(only=only, stream=sys.stdout)
    return 0 if ok else 1


# --------------------------------------------------------------------------
# parser assembly / dispatch
# --------------------------------------------------------------------------


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, tuple[_Command, Callable[[RunConfig], int]]]]:
    parser = argparse.ArgumentParser(
        prog="boltzkit",
        description="kinetic equilibria, entropy functionals, and monitored relaxation runs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    table: dict[str, tuple[_Command, Callable[[RunConfig], int]]] = {}

    def _out_flags(c: _Command) -> None:
        c.add("--out", str, default=None, help="artifact path")
        c.add("--format", str, default="csv", choices=("csv", "json"), help="artifact format")

    c = _Command(sub, "equilibrium", "solve the equilibrium normalization at one parameter point")
    c.add("--n", int, required=True, help="velocity dimension")
    c.add("--rho", float, required=True, help="total mass")
    c.add("--T", float, required=True, help="temperature")
    c.add("--vol", float, default=1.0, help="spatial volume")
    c.add("--eps", float, default=0.0, help="quantum parameter (fermion < 0 < boson)")
    c.add("--tol", float, default=1e-12, help="mass-residual tolerance")
    _out_flags(c)
    table[c.name] = (c, _cmd_equilibrium)

    c = _Command(sub, "quantum-deltas", "quantum-minus-classical shifts with first-order predictions")
    c.add("--n", int, required=True)
    c.add("--rho", float, required=True)
    c.add("--T", float, required=True)
    c.add("--vol", float, default=1.0)
    c.add("--eps", float, required=True)
    _out_flags(c)
    table[c.name] = (c, _cmd_quantum_deltas)

    c = _Command(sub, "dist", "closed-form distance between two Maxwellian states")
    c.add("--ref-T", float, required=True, help="reference temperature (also the distance scale)")
    c.add("--field-T", float, required=True, help="temperature of the compared state")
    c.add("--rho", float, required=True, help="shared mass")
    c.add("--n", int, required=True)
    c.add("--vol", float, default=1.0)
    c.add("--u", _floats_csv, default=None, help="bulk velocity of the compared state, comma-separated")
    _out_flags(c)
    table[c.name] = (c, _cmd_dist)

    c = _Command(sub, "extremal", "moment-matched Maxwellian and its distance from the reference")
    c.add("--n", int, required=True)
    c.add("--rho", float, required=True)
    c.add("--E1", float, required=True, help="prescribed energy")
    c.add("--U", _floats_csv, required=True, help="prescribed momentum, comma-separated")
    c.add("--T", float, required=True, help="reference temperature")
    c.add("--vol", float, default=1.0)
    _out_flags(c)
    table[c.name] = (c, _cmd_extremal)

    c = _Command(sub, "simulate", "monitored homogeneous or slab relaxation run (n = 2)")
    c.add("--grid", int, default=64, help="velocity points per axis")
    c.add("--zeta-max", float, default=None, help="velocity grid reach (default fits the init)")
    c.add("--steps", int, default=200)
    c.add("--dt", float, default=None, help="time step (default 0.1/(b0 rho))")
    c.add("--kernel", str, default="maxwell_pseudo", choices=("maxwell_pseudo", "hard_sphere"))
    c.add("--b0", float, default=1.0 / (2.0 * math.pi), help="kernel strength")
    c.add("--sigma-nodes", int, default=8, help="angle nodes (even)")
    c.add("--eps", float, default=0.0, help="quantum parameter")
    c.add("--rho", float, default=1.0)
    c.add("--T", float, default=1.0 / (2.0 * math.pi))
    c.add("--init", str, default="maxwellian", choices=("maxwellian", "bimodal", "random"))
    c.add("--u", _floats_csv, default=None, help="bulk velocity for the maxwellian init")
    c.add("--u0", float, default=0.35, help="stream speed for the bimodal init")
    c.add("--seed", int, default=0, help="seed for the random init")
    c.add("--nx", int, default=1, help="slab cells (1 = homogeneous)")
    c.add("--length", float, default=1.0, help="slab length")
    c.add("--x-amp", float, default=0.0, help="cosine amplitude of the slab density profile")
    c.add("--boundary", str, default="periodic",
          choices=("periodic", "bounce_back", "maxwellian_diffusion"))
    c.add("--wall-T", float, default=None, help="diffusive wall temperature (default: --T)")
    c.add("--kappa", float, default=1.0, help="diffusive wall return fraction")
    c.add("--t-ref", float, default=None, help="Lyapunov reference temperature (default: moment fit)")
    c.add("--vol", float, default=1.0, help="volume of the homogeneous cell")
    _out_flags(c)
    table[c.name] = (c, _cmd_simulate)

    c = _Command(sub, "roots", "roots of x - 1 - log x = c")
    c.add("--c", float, required=True)
    _out_flags(c)
    table[c.name] = (c, _cmd_roots)

    c = _Command(sub, "selftest", "run the acceptance suite")
    c.add("--only", lambda s: tuple(int(p) for p in s.split(",")), default=None,
          help="comma-separated criterion numbers")
    table[c.name] = (c, _cmd_selftest)

    return parser, table


def dispatch(argv: Sequence[str] | None = None) -> int:
    parser, table = _build_parser()
    ns = parser.parse_args(argv)
    command, body = table[ns.command]
    try:
        cfg = command.resolve(ns)
        return body(cfg)
    except UsageError as exc:
        command.parser.print_usage(sys.stderr)
        print(f"boltzkit {ns.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ConvergenceError, equilibria.NonContractionError) as exc:
        print(f"boltzkit {ns.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"boltzkit {ns.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
