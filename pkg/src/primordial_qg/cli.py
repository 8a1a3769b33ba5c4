"""
Command-line front end.

Each subcommand wraps one pipeline and writes CSV (or SVG where a plot makes
sense) to ``--out`` or stdout.  Options may also come from a TOML file given
with ``--config``; keys are the long option names (dashes or underscores),
either at top level or in a table named after the subcommand.  Explicit
flags override the file.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure,
4 I/O failure.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import math
import os
import sys

import numpy as np

from . import decoherence, gravatom, lensing, qstate, svgplot, units, wavepacket
from .environment import CouplingKernel, ThermalEnvironment
from .errors import NumericalError, PrimordialQGError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
THREADS_ENV = "PRIMORDIAL_QG_THREADS"


class UsageError(Exception):
    pass


def positive(text):
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return value


def non_negative(text):
    value = float(text)
    if not value >= 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be a non-negative number, got {text}")
    return value


def positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def fraction(text):
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def correlation(text):
    value = float(text)
    if not -1 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie in (-1, 1), got {text}")
    return value


def _common(p, formats=("csv",)):
    p.add_argument("--config", metavar="PATH", help="TOML file with option defaults")
    p.add_argument("--out", metavar="PATH", default="-", help="output file (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0], help="output format")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="primordial-qg",
        description="Gravitational decoherence of primordial massive particles.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("gamma", help="purity-decay bound and decoherence time")
    p.add_argument("--mass-kg", type=positive, required=True, help="system mass M [kg]")
    p.add_argument("--temp-k", type=positive, required=True, help="bath temperature T [K]")
    p.add_argument("--species", choices=("photon", "fermion"), default="photon", help="bath species")
    p.add_argument("--method", choices=("closed", "quadrature"), default="closed",
                   help="photon bound from the closed form or by quadrature")
    p.add_argument("--fermion-mass-kg", type=positive, help="bath fermion mass m [kg] (fermion only)")
    p.add_argument("--spread-m2", type=positive,
                   help="D = <x^2> tr(rho^2) of the system state [m^2] (fermion only)")
    p.add_argument("--purity-drop", type=fraction, default=0.01,
                   help="fractional purity loss defining the decoherence time [1]")
    p.add_argument("--rel-tol", type=positive, default=1e-10, help="quadrature relative tolerance [1]")
    _common(p)

    p = sub.add_parser("sweep", help="decoherence time across a temperature range")
    p.add_argument("--mass-kg", type=positive, required=True, help="system mass M [kg]")
    p.add_argument("--t-min-k", type=positive, default=2.7, help="lowest temperature [K]")
    p.add_argument("--t-max-k", type=positive, default=3000.0, help="highest temperature [K]")
    p.add_argument("--points", type=positive_int, default=50, help="number of log-spaced temperatures")
    p.add_argument("--workers", type=positive_int, default=None,
                   help=f"worker threads (capped by ${THREADS_ENV})")
    _common(p, ("csv", "svg"))

    p = sub.add_parser("evolve", help="evolve a density matrix and measure its purity decay")
    p.add_argument("--grid-points", type=positive_int, default=64, help="momentum grid size N")
    p.add_argument("--sigma-k", type=positive, default=1.0, help="Gaussian momentum width [Planck momenta]")
    p.add_argument("--k0", type=float, default=0.0, help="Gaussian centre [Planck momenta]")
    p.add_argument("--state", choices=("gaussian", "random"), default="gaussian", help="initial state")
    p.add_argument("--rank", type=positive_int, default=None, help="rank of a random initial state")
    p.add_argument("--mass", type=positive, default=1.0, help="system mass M [Planck masses]")
    p.add_argument("--beta", type=positive, default=1.0, help="photon bath 1/(k_B T) [inverse Planck energies]")
    p.add_argument("--dt-fraction", type=fraction, default=0.05,
                   help="time step as a fraction of 1/Gamma0_d [1]")
    p.add_argument("--steps", type=positive_int, default=500, help="number of time steps")
    p.add_argument("--seed", type=int, default=0, help="seed for random initial states")
    p.add_argument("--dump", metavar="PATH", help="write the final rho as CSV plus a JSON sidecar")
    _common(p, ("csv", "svg"))

    p = sub.add_parser("spread", help="free wavepacket spread and its minimum")
    mass = p.add_mutually_exclusive_group()
    mass.add_argument("--mass-kg", type=positive, help="particle mass [kg]")
    mass.add_argument("--mass-gev", type=positive, help="particle mass [GeV/c^2]")
    time = p.add_mutually_exclusive_group()
    time.add_argument("--time-s", type=positive, help="elapsed time [s]")
    time.add_argument("--time-gyr", type=positive, help="elapsed time [Gyr, Julian]")
    p.add_argument("--initial-spread-m", type=positive, help="initial width s0 [m]")
    _common(p)

    p = sub.add_parser("spectrum", help="levels and lines of a gravitational atom")
    p.add_argument("--mass-gev", type=positive, required=True, help="particle mass [GeV/c^2]")
    p.add_argument("--nmax", type=positive_int, default=5, help="highest principal quantum number")
    p.add_argument("--cycles", action="store_true",
                   help="divide line frequencies by 2 pi (cycles per second)")
    p.add_argument("--config", metavar="PATH", help="TOML file with option defaults")
    p.add_argument("--out", metavar="PATH", default="-",
                   help="levels CSV; lines go to <stem>_lines.csv (default: stdout, both tables)")

    p = sub.add_parser("lensing", help="classical vs coherent lensing intensity")
    p.add_argument("--lens-mass", type=positive, default=lensing.DEFAULT_MASS,
                   help="lens mass [reference masses]")
    p.add_argument("--omega", type=positive, default=lensing.DEFAULT_OMEGA,
                   help="wave parameter w = 4 G M_ref omega [1]")
    p.add_argument("--separation", type=positive, default=lensing.DEFAULT_SEPARATION,
                   help="distance between the two branches [Einstein radii]")
    p.add_argument("--branches", type=int, choices=(1, 2), default=2, help="number of branches")
    p.add_argument("--width", type=non_negative, default=0.0,
                   help="Gaussian width of each branch, 0 for a point [Einstein radii]")
    p.add_argument("--theta-max", type=positive, default=0.385, help="half-width of the angle grid [Einstein angles]")
    p.add_argument("--points", type=positive_int, default=771, help="number of angles")
    _common(p, ("csv", "svg"))

    p = sub.add_parser("witness", help="purity of one particle of a two-particle state")
    p.add_argument("--grid-points", type=positive_int, default=32, help="momentum grid size N")
    p.add_argument("--sigma-k", type=positive, default=1.0, help="marginal momentum width [Planck momenta]")
    p.add_argument("--state", choices=("product", "schmidt", "correlated", "random"),
                   default="correlated", help="two-particle state")
    p.add_argument("--correlation", type=correlation, default=0.8,
                   help="k1-k2 correlation coefficient of the correlated Gaussian [1]")
    p.add_argument("--seed", type=int, default=0, help="seed for random states")
    _common(p)
    return parser


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _apply_config(parser, argv):
    """Load --config (if any) and install its values as subcommand defaults."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if not a.startswith("-")), None)
    if known.config is None or command is None:
        return
    with open(known.config, "rb") as fh:
        data = tomllib.load(fh)
    table = {k: v for k, v in data.items() if not isinstance(v, dict)}
    table.update(data.get(command, {}))
    sub = _subparser(parser, command)
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in table.items():
        dest = key.replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("help", "config"):
            raise UsageError(f"unknown option {key!r} in {known.config}")
        if action.type is not None and not isinstance(value, bool):
            try:
                value = action.type(str(value))
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"bad value for {key!r} in {known.config}: {exc}")
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"{key!r} must be one of {list(action.choices)}")
        defaults[dest] = value
        action.required = False
    sub.set_defaults(**defaults)


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    with open(path, "w", newline="") as fh:
        yield fh


def _f(x):
    return repr(float(x))


def cmd_gamma(args, out):
    if args.species == "photon":
        if args.fermion_mass_kg is not None or args.spread_m2 is not None:
            raise UsageError("--fermion-mass-kg and --spread-m2 only apply to --species fermion")
        if args.method == "closed":
            s = decoherence.gamma0_photon_closed(args.mass_kg, args.temp_k, args.purity_drop)
        else:
            s = decoherence.gamma0_photon_quadrature(args.mass_kg, args.temp_k, args.rel_tol,
                                                     args.purity_drop)
    else:
        if args.fermion_mass_kg is None or args.spread_m2 is None:
            raise UsageError("--species fermion needs --fermion-mass-kg and --spread-m2")
        bound = decoherence.SpreadBound(args.spread_m2 / units.PLANCK_LENGTH**2)
        s = decoherence.gamma0_fermion(args.mass_kg, args.fermion_mass_kg, args.temp_k, bound,
                                       args.rel_tol, args.purity_drop)
    out.write("mass_kg,temperature_K,gamma0_per_s,t001_s,method\n")
    out.write(f"{_f(args.mass_kg)},{_f(args.temp_k)},{_f(s.gamma0_si)},{_f(s.t_fraction)},{s.method.value}\n")


def thread_cap(requested):
    env = os.environ.get(THREADS_ENV)
    cap = None
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise UsageError(f"${THREADS_ENV} must be an integer, got {env!r}")
    if requested is None:
        return cap or 1
    return min(requested, cap) if cap else requested


def cmd_sweep(args, out):
    if not args.t_min_k < args.t_max_k:
        raise UsageError("--t-min-k must be below --t-max-k")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    rows = decoherence.temperature_sweep(args.mass_kg, args.t_min_k, args.t_max_k, args.points,
                                     workers=thread_cap(args.workers))
    if args.format == "svg":
        t = [r.temperature_K for r in rows]
        age = units.AGE_OF_UNIVERSE_S
        out.write(svgplot.line_plot(
            [("t_0.01", t, [r.t001_s for r in rows]), ("age of universe", t, [age] * len(t))],
            "temperature [K]", "time [s]", f"1% decoherence, M = {args.mass_kg:g} kg",
            logx=True, logy=True))
    else:
        decoherence.write_sweep_csv(rows, out)


def cmd_evolve(args, out):
    k = qstate.default_grid(args.sigma_k, args.grid_points, args.k0)
    if args.state == "gaussian":
        state = qstate.gaussian_state(k, args.k0, args.sigma_k)
    else:
        rng = np.random.default_rng(args.seed)
        state = qstate.random_density_matrix(k, rng, args.rank)
    eq = qstate.MasterEquation(k, ThermalEnvironment.photon(args.beta), CouplingKernel(args.mass))
    dt = args.dt_fraction / eq.gamma0 if eq.gamma0 > 0 else 1.0
    times, purities, final = eq.evolve(state, dt, args.steps)
    rate = qstate.measured_decay_rate(times, purities)
    sys.stderr.write(f"gamma0_d={eq.gamma0!r} measured_rate={rate!r}\n")
    if args.dump:
        qstate.write_snapshot(final, args.dump)
    if args.format == "svg":
        out.write(svgplot.line_plot(
            [("purity", times.tolist(), purities.tolist()),
             ("exp(-Gamma0_d t)", times.tolist(), (purities[0] * np.exp(-eq.gamma0 * times)).tolist())],
            "time [Planck times]", "tr rho^2", "purity decay"))
        return
    out.write("t,purity\n")
    for t, p in zip(times, purities):
        out.write(f"{_f(t)},{_f(p)}\n")


def cmd_spread(args, out):
    if (args.mass_kg is None) == (args.mass_gev is None):
        raise UsageError("give exactly one of --mass-kg and --mass-gev")
    if (args.time_s is None) == (args.time_gyr is None):
        raise UsageError("give exactly one of --time-s and --time-gyr")
    mass = args.mass_kg if args.mass_kg is not None else units.gev_to_kg(args.mass_gev)
    elapsed = args.time_s if args.time_s is not None else args.time_gyr * units.GYR_S
    s_min = wavepacket.minimal_spread(mass, elapsed)
    header = ["mass_kg", "elapsed_s", "s_min_m"]
    row = [mass, elapsed, s_min]
    if args.initial_spread_m is not None:
        header.append("s_m")
        row.append(wavepacket.spread_at(wavepacket.SpreadQuery(mass, elapsed, args.initial_spread_m)))
    out.write(",".join(header) + "\n")
    out.write(",".join(_f(v) for v in row) + "\n")


def cmd_spectrum(args, out_path):
    if args.nmax < 2:
        raise UsageError("--nmax must be at least 2")
    spec = gravatom.spectrum(args.mass_gev, args.nmax, args.cycles)
    if out_path in (None, "-"):
        gravatom.write_levels_csv(spec, sys.stdout)
        sys.stdout.write("\n")
        gravatom.write_lines_csv(spec, sys.stdout)
        return
    root, ext = os.path.splitext(out_path)
    with open(out_path, "w", newline="") as fh:
        gravatom.write_levels_csv(spec, fh)
    with open(f"{root}_lines{ext or '.csv'}", "w", newline="") as fh:
        gravatom.write_lines_csv(spec, fh)


def cmd_lensing(args, out):
    scene = lensing.default_scene(args.separation, args.lens_mass, args.omega, args.theta_max,
                                  args.points, args.branches, args.width)
    cl = lensing.intensity_classical(scene)
    qg = lensing.intensity_quantum(scene)
    sys.stderr.write(f"contrast_cl={lensing.fringe_contrast(cl)!r} "
                     f"contrast_qg={lensing.fringe_contrast(qg)!r}\n")
    if args.format == "svg":
        theta = scene.theta_grid.tolist()
        out.write(svgplot.line_plot([("I_cl", theta, cl.values.tolist()),
                                     ("I_qg", theta, qg.values.tolist())],
                                    "theta [Einstein angles]", "intensity", "lensing intensity"))
    else:
        lensing.write_profiles_csv(cl, qg, out)


def cmd_witness(args, out):
    k = qstate.default_grid(args.sigma_k, args.grid_points)
    if args.state == "product":
        phi = qstate.gaussian_wavefunction(k, 0.0, args.sigma_k)
        state = qstate.product_state(k, phi, phi)
    elif args.state == "schmidt":
        a = qstate.gaussian_wavefunction(k, 0.0, args.sigma_k)
        b = a * (k / args.sigma_k)
        state = qstate.schmidt_state(k, [1.0, 1.0], [a / np.linalg.norm(a), b / np.linalg.norm(b)],
                                     [a / np.linalg.norm(a), b / np.linalg.norm(b)])
    elif args.state == "correlated":
        state = qstate.correlated_gaussian(k, args.sigma_k, args.correlation)
    else:
        rng = np.random.default_rng(args.seed)
        n = len(k)
        state = qstate.TwoParticleState.normalized(
            k, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    out.write("state,reduced_purity\n")
    out.write(f"{args.state},{_f(qstate.reduced_purity(state))}\n")


COMMANDS = {
    "gamma": cmd_gamma,
    "sweep": cmd_sweep,
    "evolve": cmd_evolve,
    "spread": cmd_spread,
    "lensing": cmd_lensing,
    "witness": cmd_witness,
}


def run(argv=None):
    """Run the CLI and return its exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (OSError, tomllib.TOMLDecodeError) as exc:
        sys.stderr.write(f"error: cannot read config: {exc}\n")
        return EXIT_IO if isinstance(exc, OSError) else EXIT_USAGE

    try:
        if args.command == "spectrum":
            cmd_spectrum(args, args.out)
        else:
            # buffer so that a failure never leaves a half-written file
            buffer = io.StringIO()
            COMMANDS[args.command](args, buffer)
            with _output(args.out) as fh:
                fh.write(buffer.getvalue())
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except PrimordialQGError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
