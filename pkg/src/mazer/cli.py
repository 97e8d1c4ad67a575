"""Command-line front end: ``mazer {eigen,scatter,scan,verify,init-config}``.

CSV goes to ``--out`` (default stdout); human-readable reports and the
effective configuration go to stderr. Exit codes: 0 success, 1 usage or
parse error, 2 solver failure, 3 ``verify`` found a claim that fails.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field, fields
import io
import itertools
import math
import os
import sys

import numpy as np

from .claimcheck import ClaimReport, Verdict, run_all_claims
from .dressed import ManifoldParams, eigenvalues, mixing_angle, splitting, theta_derivatives
from .errors import MazerError, ParseError, SingularMatching
from .modefn import eval012, parse
from .scatter import ScatterConfig, Variant, mesa_scatter, numeric_scatter_bare, numeric_scatter_dressed

SOLVERS = ("analytic", "bare", "dressed-derived", "dressed-literal")
SCAN_VARS = ("k", "delta", "L")
SCATTER_COLUMNS = ("k", "delta", "g", "n", "mass", "L", "mode", "solver", "P_refl_e", "P_refl_g",
                   "P_trans_e", "P_trans_g", "P_emission", "flux_error")
EIGEN_COLUMNS = ("z", "u", "du", "d2u", "lambda", "theta", "dtheta", "d2theta", "E_plus", "E_minus")


EXIT_CLAIM_FAILED = 3


class UsageError(Exception):
    pass


@dataclass
class ScanRange:
    var: str
    lo: float
    hi: float
    count: int

    @classmethod
    def parse(cls, text):
        parts = text.split(":")
        if len(parts) != 4:
            raise UsageError(f"--scan expects VAR:MIN:MAX:COUNT, got {text!r}")
        var = parts[0].strip()
        if var not in SCAN_VARS:
            raise UsageError(f"cannot scan {var!r}; choose from {', '.join(SCAN_VARS)}")
        try:
            lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise UsageError(f"malformed scan range {text!r}") from None
        if not (lo < hi) or count < 2:
            raise UsageError(f"scan range {text!r} needs MIN < MAX and COUNT >= 2")
        return cls(var, lo, hi, count)

    def values(self):
        return np.linspace(self.lo, self.hi, self.count)

    def __str__(self):
        return f"{self.var}:{self.lo!r}:{self.hi!r}:{self.count}"


@dataclass
class RunConfig:
    g: float = 1.0
    delta: float = 0.0
    n: int = 0
    mass: float = 0.5
    omega: float = 0.0
    L: float = 10.0
    k: float = 0.5
    mode: str = "mesa"
    solver: str = "bare"
    slices: int = 256
    grid_step: float = None
    scan: list = field(default_factory=list)
    out: str = None
    seed: int = 0
    jobs: int = 1

    def params(self):
        return ManifoldParams(g=self.g, delta=self.delta, n=self.n, mass=self.mass, omega=self.omega)

    def echo(self):
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "scan":
                lines += [f"scan = {s}" for s in value]
            elif value is not None:
                lines.append(f"{f.name} = {value}")
        return "\n".join(lines)


_TYPES = {"g": float, "delta": float, "n": int, "mass": float, "omega": float, "L": float,
          "k": float, "mode": str, "solver": str, "slices": int, "grid_step": float,
          "out": str, "seed": int, "jobs": int}
_FILE_ALIASES = {"grid-step": "grid_step"}


def _convert(key, raw):
    try:
        value = _TYPES[key](raw)
    except ValueError:
        raise UsageError(f"invalid value for {key}: {raw!r}") from None
    if isinstance(value, float) and not math.isfinite(value):
        raise UsageError(f"{key} must be finite")
    return value


def read_config_file(path):
    """``key = value`` lines with ``#`` comments; ``scan`` may repeat."""
    values, scans = {}, []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = _FILE_ALIASES.get(key, key)
        if key == "scan":
            scans.append(ScanRange.parse(raw))
        elif key in _TYPES:
            values[key] = _convert(key, raw)
        else:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
    return values, scans


CONFIG_TEMPLATE = """\
# mazer run configuration: one `key = value` per line, '#' starts a comment.
# Units: hbar = 1. Energies (g, delta, omega) share one unit; lengths (L,
# grid_step) and wavenumbers (k) follow from mass. With mass = 1/2 the kinetic
# energy of wavenumber k is k^2.
# delta = omega_atom - omega_cavity. Command-line flags override these values.
g = 1.0
delta = 0.0
n = 0
mass = 0.5
omega = 0.0
L = 10.0
k = 0.5
# built-in: mesa, sine, sine2, gauss, sech2; or an expression in z, L, pi
mode = mesa
# analytic (mesa only), bare, dressed-derived, dressed-literal
solver = bare
slices = 256
# grid_step = 0.0048828125
seed = 0
jobs = 1
# scan = L:1:30:300
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--mode", metavar="EXPR")
    for name, typ in (("g", float), ("delta", float), ("n", int), ("mass", float),
                      ("omega", float), ("L", float), ("k", float)):
        common.add_argument(f"--{name}", type=typ, dest=name)
    common.add_argument("--solver", choices=SOLVERS)
    common.add_argument("--slices", type=int)
    common.add_argument("--grid-step", type=float, dest="grid_step")
    common.add_argument("--scan", action="append", metavar="VAR:MIN:MAX:COUNT")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int)

    parser = _Parser(prog="mazer", description="Detuned one-photon mazer scattering.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("eigen", parents=[common], help="dressed energies and angles on a z grid")
    sub.add_parser("scatter", parents=[common], help="one scattering calculation")
    sub.add_parser("scan", parents=[common], help="sweep up to two of k, delta, L")
    sub.add_parser("verify", parents=[common], help="run all claim checks")
    sub.add_parser("init-config", parents=[common], help="write a commented config template")
    return parser


def resolve_config(args):
    config = RunConfig()
    if args.config:
        values, scans = read_config_file(args.config)
        for key, value in values.items():
            setattr(config, key, value)
        config.scan = scans
    for key in _TYPES:
        value = getattr(args, key, None)
        if value is not None:
            setattr(config, key, value)
    if args.scan:
        config.scan = [ScanRange.parse(s) for s in args.scan]
        for s in config.scan:
            if getattr(args, s.var, None) is not None:
                raise UsageError(f"{s.var} given both as a single value and as a scan range")
    if config.solver not in SOLVERS:
        raise UsageError(f"unknown solver {config.solver!r}")
    names = [s.var for s in config.scan]
    if len(names) > 2 or len(set(names)) != len(names):
        raise UsageError("scan at most two distinct variables")
    if config.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    return config


# ---------------------------------------------------------------- computations


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def run_point(config, k, delta, L):
    """One scattering calculation; returns the CSV row and the result.

    A point sitting exactly on a channel threshold is retried once with ``k``
    raised by one part in 1e12; the CSV row still reports the requested ``k``.
    """
    try:
        result = _solve(config, k, delta, L)
    except SingularMatching:
        result = _solve(config, k * (1 + 1e-12), delta, L)
    p = result.probs
    row = [k, delta, config.g, config.n, config.mass, L, config.mode, config.solver,
           p["P_refl_e"], p["P_refl_g"], p["P_trans_e"], p["P_trans_g"],
           result.p_emission, result.flux_error]
    return [_fmt(v) for v in row], result


def _solve(config, k, delta, L):
    params = ManifoldParams(g=config.g, delta=delta, n=config.n, mass=config.mass, omega=config.omega)
    mode = parse(config.mode, L)
    if config.solver == "analytic":
        if mode.name != "mesa":
            raise UsageError("the analytic solver needs --mode mesa")
        result = mesa_scatter(params, L, k)
    else:
        sc = ScatterConfig(params, mode, k, slices=config.slices, grid_step=config.grid_step)
        if config.solver == "bare":
            result = numeric_scatter_bare(sc)
        else:
            variant = Variant.DERIVED if config.solver == "dressed-derived" else Variant.COMMENT_LITERAL
            result = numeric_scatter_dressed(ScatterConfig(
                params, mode, k, grid_step=sc.grid_step, variant=variant))
    return result


def _scan_point(job):
    config, point = job
    return run_point(config, **point)[0]


def scan_points(config):
    """Grid points in lexicographic sweep order (first ``--scan`` outermost)."""
    base = {"k": config.k, "delta": config.delta, "L": config.L}
    axes = [[(s.var, float(v)) for v in s.values()] for s in config.scan]
    for combo in itertools.product(*axes):
        point = dict(base)
        point.update(combo)
        yield point


def eigen_rows(config):
    params = config.params()
    mode = parse(config.mode, config.L)
    L = config.L
    z = np.linspace(-0.1 * L, 1.1 * L, config.slices + 1)
    u, du, d2u = eval012(mode, z)
    rows = []
    for zi, ui, dui, d2ui in zip(z, u, du, d2u):
        lam = splitting(params, ui)
        e_plus, e_minus = eigenvalues(params, ui)
        if lam > 0:
            theta = mixing_angle(params, ui)
            dtheta, d2theta = theta_derivatives(params, ui, dui, d2ui)
        else:
            theta = dtheta = d2theta = float("nan")
        rows.append([_fmt(float(v)) for v in (zi, ui, dui, d2ui, lam, theta, dtheta, d2theta,
                                                e_plus, e_minus)])
    return rows


def _write_csv(config, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _use_color():
    return not os.environ.get("MAZER_NO_COLOR") and sys.stderr.isatty()


def cmd_eigen(config):
    _write_csv(config, EIGEN_COLUMNS, eigen_rows(config))
    return 0


def cmd_scatter(config):
    if config.scan:
        raise UsageError("scatter takes single values; use the scan subcommand for ranges")
    row, result = run_point(config, config.k, config.delta, config.L)
    print(
        f"solver={config.solver} mode={config.mode} k={config.k!r} delta={config.delta!r}\n"
        f"  r_e={result.r_e!r} r_g={result.r_g!r}\n"
        f"  t_e={result.t_e!r} t_g={result.t_g!r}\n"
        f"  k_g={result.k_g!r}\n"
        + "".join(f"  {key}={value!r}\n" for key, value in result.probs.items())
        + f"  P_emission={result.p_emission!r} flux_error={result.flux_error!r}",
        file=sys.stderr,
    )
    _write_csv(config, SCATTER_COLUMNS, [row])
    return 0


def cmd_scan(config):
    if not config.scan:
        raise UsageError("scan needs at least one --scan VAR:MIN:MAX:COUNT")
    parse(config.mode, config.L)
    jobs = [(config, point) for point in scan_points(config)]
    if config.jobs == 1:
        rows = [_scan_point(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_scan_point, jobs, chunksize=max(1, len(jobs) // (4 * config.jobs))))
    _write_csv(config, SCATTER_COLUMNS, rows)
    return 0


def cmd_verify(config):
    params = config.params()
    mode = parse(config.mode, config.L)
    reports = run_all_claims(params, mode, k=config.k, seed=config.seed,
                             grid_step=config.grid_step)
    color = _use_color()
    for report in reports:
        print(report.to_text(color=color), file=sys.stderr)
    _write_csv(config, ClaimReport.CSV_HEADER, [r.csv_row() for r in reports])
    return EXIT_CLAIM_FAILED if any(r.verdict is Verdict.FAILS for r in reports) else 0


def cmd_init_config(config):
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(CONFIG_TEMPLATE)
    else:
        sys.stdout.write(CONFIG_TEMPLATE)
    return 0


COMMANDS = {
    "eigen": cmd_eigen,
    "scatter": cmd_scatter,
    "scan": cmd_scan,
    "verify": cmd_verify,
    "init-config": cmd_init_config,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        config = resolve_config(args)
        print("# effective config\n" + config.echo(), file=sys.stderr)
        return COMMANDS[args.command](config)
    except ParseError as exc:
        print(f"mazer: error: {exc}", file=sys.stderr)
        return 1
    except MazerError as exc:
        print(f"mazer: solver failure: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError) as exc:
        print(f"mazer: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
