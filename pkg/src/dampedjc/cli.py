"""Command-line front end: simulate, optimize-tau, distance, breakdown-times.

Times and frequencies are given in units of omega_c. Scenarios come from a
flat key=value file (--config) with command-line flags taking precedence.
"""

import argparse
import sys
import warnings
from dataclasses import dataclass, fields, replace

import numpy as np

from . import exact, markov, metrics, tauopt, tcl
from .model import DensityKind, ModelError, ModelParams, SpectralDensity

SCHEMA_VERSION = "dampedjc-csv/1"
ALL_METHODS = ("exact", "cgle", "rwale", "tcl2", "tcl4")
UNSUITABLE = "unsuitable"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    density: str = "ohmic"
    coupling: float = 1.0
    omega0: float = 1.0
    tmax: float = 20.0
    points: int = 4000
    methods: tuple = ALL_METHODS
    tau: object = "auto"
    horizon: float = 100.0
    ohmic_form: str = "corrected"
    n_max: int = 5

    def validate(self):
        if self.density not in {k.value for k in DensityKind}:
            raise ConfigError(f"unknown density {self.density!r}")
        if not (self.coupling > 0 and self.omega0 > 0 and self.tmax > 0 and self.horizon > 0):
            raise ConfigError("physical parameters must be positive")
        if self.points < 2:
            raise ConfigError("points must be at least 2")
        bad = [m for m in self.methods if m not in ALL_METHODS]
        if bad or not self.methods:
            raise ConfigError(f"unknown methods {bad}")
        if self.tau != "auto" and not (isinstance(self.tau, float) and self.tau > 0):
            raise ConfigError("tau must be 'auto' or a positive number")
        if self.ohmic_form not in ("corrected", "printed"):
            raise ConfigError("ohmic_form must be 'corrected' or 'printed'")
        if self.n_max < 0:
            raise ConfigError("n_max must be non-negative")
        return self

    def params(self):
        dens = SpectralDensity(DensityKind(self.density), self.coupling, 1.0)
        return ModelParams(self.omega0, dens)

    def to_text(self):
        lines = [f"# {SCHEMA_VERSION} scenario"]
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "methods":
                v = ",".join(v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"


_FLOAT_KEYS = {"coupling", "omega0", "tmax", "horizon"}
_INT_KEYS = {"points", "n_max"}
_ALIASES = {"eta": "coupling", "g2": "coupling", "omega_0": "omega0"}


def _coerce(key, raw):
    raw = raw.strip()
    try:
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_KEYS:
            return int(raw)
        if key == "methods":
            return tuple(m.strip() for m in raw.split(",") if m.strip())
        if key == "tau":
            return "auto" if raw == "auto" else float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def parse_config(text):
    """Parse flat key=value lines into Scenario field overrides."""
    names = {f.name for f in fields(Scenario)}
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in names:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        out[key] = _coerce(key, raw)
    return out


def load_scenario(text):
    return replace(Scenario(), **parse_config(text)).validate()


def _fmt(x):
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path, header, columns, kind):
    rows = len(columns[0])
    fh = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        fh.write(f"# schema={SCHEMA_VERSION} table={kind}\n")
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(c[i]) if not isinstance(c, str) else c for c in columns) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


class SolverFailure(RuntimeError):
    def __init__(self, module, exc):
        super().__init__(f"{module}: {exc}")
        self.module = module


def _guard(module, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (ArithmeticError, ModelError, FloatingPointError) as exc:
        raise SolverFailure(module, exc) from exc


def _resolve_tau(sc, params, exact_long=None):
    if sc.tau != "auto":
        return sc.tau, None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        scan = _guard("tauopt", tauopt.optimize_tau, params, T=sc.horizon, ohmic_form=sc.ohmic_form,
                      exact=exact_long)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return scan.tau_star, scan


def run_methods(sc):
    """Trajectories for the requested methods on the scenario grid."""
    params = sc.params()
    t = np.linspace(0.0, sc.tmax, sc.points)
    rho0 = exact.reduced_state(params.c0, params.c1_0)
    out = {"exact": _guard("exact", exact.exact_trajectory, params, t)}
    for m in sc.methods:
        if m == "cgle":
            tau, _ = _resolve_tau(sc, params)
            out[m] = _guard("markov", markov.cg_trajectory, params.density, params.omega_0, tau, rho0, t,
                            ohmic_form=sc.ohmic_form)
        elif m == "rwale":
            r = _guard("markov", markov.rwa_rates, params.density, params.omega_0)
            out[m] = r if isinstance(r, markov.Unsuitable) else markov.markov_trajectory(r, rho0, t, "rwale")
        elif m in ("tcl2", "tcl4"):
            out[m] = _guard("tcl", tcl.tcl_trajectory, int(m[-1]), params, t)
    return t, out


def _method_columns(name, traj, n):
    cols = ["rho11", "re_rho01", "im_rho01", "gamma", "S"]
    header = [f"{name}_{c}" for c in cols]
    if isinstance(traj, markov.Unsuitable):
        return header, [UNSUITABLE] * len(cols)
    return header, [traj.rho11, traj.rho01.real, traj.rho01.imag, traj.gamma, traj.S]


def cmd_simulate(sc, out):
    t, trajs = run_methods(sc)
    header, cols = ["t"], [t]
    for name in ["exact"] + [m for m in sc.methods if m != "exact"]:
        h, c = _method_columns(name, trajs[name], len(t))
        header += h
        cols += c
    write_csv(out, header, cols, "trajectory")
    if "cgle" in trajs:
        print(f"cgle tau = {trajs['cgle'].meta['tau']:.6f}", file=sys.stderr)
    return EXIT_OK


def cmd_distance(sc, out):
    # the exact reference consumes one "exact" entry; a second one is compared with itself
    approx = list(sc.methods)
    if "exact" in approx:
        approx.remove("exact")
    if not approx:
        raise ConfigError("distance needs at least one approximation in methods")
    t, trajs = run_methods(sc)
    header, cols = ["t"], [t]
    for m in approx:
        header.append(f"d_{m}")
        tr = trajs[m]
        if isinstance(tr, markov.Unsuitable):
            cols.append(UNSUITABLE)
            print(f"{m}: {UNSUITABLE} ({tr.reason})", file=sys.stderr)
            continue
        rep = metrics.integrated_distance(trajs["exact"], tr)
        cols.append(rep.pointwise)
        print(f"{m}: D[0,{sc.tmax:g}] = {rep.integrated:.8f}", file=sys.stderr)
    write_csv(out, header, cols, "distance")
    return EXIT_OK


def cmd_optimize_tau(sc, out):
    params = sc.params()
    tau, scan = _resolve_tau(replace(sc, tau="auto"), params)
    print(f"tau* = {scan.tau_star:.6f}")
    print(f"D(tau*) = {scan.d_star:.8f}")
    print(f"D_RWA = {UNSUITABLE if np.isnan(scan.d_rwa) else format(scan.d_rwa, '.8f')}")
    if scan.boundary:
        print("note: minimum sits on the scan boundary")
    if out:
        write_csv(out, ["tau", "distance"], [scan.tau_grid, scan.distance], "tau_scan")
    return EXIT_OK


def cmd_breakdown_times(sc, out):
    params = sc.params()
    if params.kind is not DensityKind.IMPULSE:
        raise ConfigError("breakdown-times requires --density impulse")
    times = tcl.breakdown_times_j1(params, sc.n_max)
    write_csv(out, ["n", "t_n"], [np.arange(len(times)), np.array(times)], "breakdown_times")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "optimize-tau": cmd_optimize_tau,
    "distance": cmd_distance,
    "breakdown-times": cmd_breakdown_times,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value scenario file")
    common.add_argument("--density", choices=[k.value for k in DensityKind])
    common.add_argument("--eta", type=float, help="coupling eta (ohmic, triangular)")
    common.add_argument("--g2", type=float, help="coupling |g|^2 / omega_c^2 (impulse)")
    common.add_argument("--omega0", type=float, help="Omega_0 / omega_c")
    common.add_argument("--tmax", type=float, help="end of the time grid, omega_c t")
    common.add_argument("--points", type=int, help="number of grid points")
    common.add_argument("--methods", help="comma list from " + ",".join(ALL_METHODS))
    common.add_argument("--tau", help="coarse-graining time omega_c tau, or 'auto'")
    common.add_argument("--horizon", type=float, help="T for the integrated distance (default 100)")
    common.add_argument("--ohmic-form", choices=["corrected", "printed"], dest="ohmic_form")
    common.add_argument("--n-max", type=int, dest="n_max", help="last breakdown index")
    common.add_argument("--out", help="output CSV path (stdout when omitted)")
    common.add_argument("--save-config", help="write the resolved scenario to this path")
    p = argparse.ArgumentParser(prog="dampedjc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def scenario_from_args(args):
    base = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = parse_config(fh.read())
        except OSError as exc:
            raise ConfigError(str(exc)) from exc
    for key in ("density", "omega0", "tmax", "points", "horizon", "ohmic_form", "n_max"):
        v = getattr(args, key)
        if v is not None:
            base[key] = v
    if args.eta is not None and args.g2 is not None:
        raise ConfigError("give either --eta or --g2")
    for v in (args.eta, args.g2):
        if v is not None:
            base["coupling"] = v
    if args.methods is not None:
        base["methods"] = _coerce("methods", args.methods)
    if args.tau is not None:
        base["tau"] = _coerce("tau", args.tau)
    return replace(Scenario(), **base).validate()


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        sc = scenario_from_args(args)
        if args.save_config:
            with open(args.save_config, "w") as fh:
                fh.write(sc.to_text())
        return COMMANDS[args.command](sc, args.out)
    except (ConfigError, ModelError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverFailure as exc:
        print(f"numerical failure in {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
