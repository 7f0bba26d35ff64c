#!/bin/python
from __future__ import absolute_import
from __future__ import print_function
import argparse
import collections
import logging
import sys
from io import open
from phstair import counting, exact_dist, martingale, transform
from phstair.config import CONFIG_ENV_VAR, load_config
from phstair.errors import QuadratureFailure, StaircaseError
from phstair.model import EXACT, MODES, format_scalar, parse_p
from phstair.report import REPORT_CSV_COLUMNS, to_json_value, write_csv, write_json
from phstair.simulate import simulate_batch, write_paths_csv, write_paths_json
from phstair.verify import X_GRID, run_verification


VERSION = "0.1.0"

EXIT_OK = 0
EXIT_GATE_FAILURE = 1
EXIT_USAGE = 2
EXIT_QUADRATURE = 3

SIMULATE_DEFAULT_PATHS = 10
DEFAULT_HORIZON = 5


def _split(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def _scalars(text, params):
    return [params.scalar(part) for part in _split(text)]


def _floats(text):
    return [float(part) for part in _split(text)]


def resolve_config(args):
    # Config file (or $PHSTAIR_CONFIG, or defaults), then explicit flags.
    config = load_config(args.config)
    params = config.params
    if args.p is not None:
        params = parse_p(args.p, args.mode)
    elif args.mode is not None and args.mode != params.mode:
        params = parse_p(format_scalar(params.p), args.mode)
    config = config.replace(params=params)
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    if args.paths is not None:
        config = config.replace(paths=args.paths)
    if getattr(args, "martingale_paths", None) is not None:
        config = config.replace(martingale_paths=args.martingale_paths)
    return config


def emit_table(records, columns, args, fd):
    if args.format == "csv":
        write_csv(columns, ([record.get(c, "") for c in columns] for record in records), fd)
    else:
        write_json(records, fd)


def run_simulate(args, config, fd):
    m = args.paths if args.paths is not None else SIMULATE_DEFAULT_PATHS
    paths = simulate_batch(config.params, args.n, m, config.seed, x0=args.x0)
    if args.format == "csv":
        write_paths_csv(paths, fd)
    else:
        write_paths_json(paths, fd)
    return EXIT_OK


def run_cdf(args, config, fd):
    p = config.params.p
    records = []
    for x in _scalars(args.x, config.params):
        continuous, atom = exact_dist.marginal_parts(p, args.n, x)
        records.append(collections.OrderedDict([("x", format_scalar(x)),
                                                ("cdf", format_scalar(exact_dist.marginal_cdf(p, args.n, x))),
                                                ("continuous", format_scalar(continuous)),
                                                ("atom", format_scalar(atom))]))
    emit_table(records, ["x", "cdf", "continuous", "atom"], args, fd)
    return EXIT_OK


def run_joint(args, config, fd):
    thresholds = _scalars(args.thresholds, config.params)
    survival = exact_dist.joint_survival(config.params.p, thresholds)
    records = [collections.OrderedDict([("thresholds", " ".join(format_scalar(x) for x in thresholds)),
                                        ("survival", format_scalar(survival))])]
    emit_table(records, ["thresholds", "survival"], args, fd)
    return EXIT_OK


def run_pmf(args, config, fd):
    p = config.params.p
    if args.oracle:
        table = counting.oracle_pmf(p, args.n)
    else:
        table = counting.pmf(p, args.n, fast=args.fast)
    if table.cancellation_risk:
        print("Warning: float PMF at n=%d may have lost precision." % args.n, file=sys.stderr)
    emit_table(table.to_records(), ["k", "prob", "prob_exact"], args, fd)
    return EXIT_OK


def run_pgf(args, config, fd):
    params = config.params
    x = params.scalar(args.x)
    oracle = counting.pgf_oracle(params.p, args.n).at_x(x) if args.oracle else None
    records = []
    for z in _scalars(args.z, params):
        record = collections.OrderedDict([("z", format_scalar(z)),
                                          ("pgf", format_scalar(counting.pgf_eval(params.p, args.n, z))),
                                          ("G_n", format_scalar(counting.closed_form_Gn(params.p, args.n, z)(x)))])
        if oracle is not None:
            record["oracle"] = format_scalar(oracle(z))
        records.append(record)
    columns = ["z", "pgf", "G_n"] + (["oracle"] if oracle is not None else [])
    emit_table(records, columns, args, fd)
    return EXIT_OK


def run_laplace(args, config, fd):
    p = config.params.p_float
    x = float(args.x)
    rel_tol = config.tolerances.quad_rel_tol
    records = []
    if args.z:
        for t in _floats(args.t):
            for z in _floats(args.z):
                gap, bound = transform.gf_tail_gap(p, t, x, z, args.n, rel_tol)
                records.append(collections.OrderedDict([("t", "%g" % t), ("z", "%g" % z), ("N", args.n),
                                                        ("H", format_scalar(transform.gf_closed_form(p, t, x, z, rel_tol))),
                                                        ("gap", format_scalar(gap)), ("bound", format_scalar(bound)),
                                                        ("pass", bool(gap <= bound))]))
        emit_table(records, ["t", "z", "N", "H", "gap", "bound", "pass"], args, fd)
        return EXIT_OK
    for t in _floats(args.t):
        series = transform.laplace_partial_sums(p, t, args.n, x, rel_tol)
        grid = transform.laplace_oracle_grid(p, t, args.n, args.grid)
        for n, w in enumerate(series):
            oracle = grid.at(n, x)
            records.append(collections.OrderedDict([("n", n), ("t", "%g" % t), ("W_n", format_scalar(w)),
                                                    ("oracle_W_n", format_scalar(oracle)),
                                                    ("abs_diff", format_scalar(abs(w - oracle)))]))
    emit_table(records, ["n", "t", "W_n", "oracle_W_n", "abs_diff"], args, fd)
    return EXIT_OK


def _family(args, p, rel_tol):
    if args.family == "example":
        return martingale.closed_form_family(p)
    if args.family == "coordinate":
        return martingale.coordinate_family(p)
    return martingale.build_family(martingale.SeedFunction.log_seed(p), p, args.n_max, rel_tol=rel_tol)


def run_martingale(args, config, fd):
    p = config.params.p_float
    rel_tol = config.tolerances.quad_rel_tol
    family = _family(args, p, rel_tol)
    if family.domain_cap < 1:
        print("p = 1: martingale evaluations restricted to x <= %.9g." % family.domain_cap, file=sys.stderr)
    if args.mc:
        gates = martingale.mc_martingale_check(family, config.params, args.n_max, config.martingale_paths,
                                               config.seed, rel_tol=rel_tol)
        write_json(to_json_value([gate.to_dict() for gate in gates]), fd)
        return EXIT_OK if all(gate.passed for gate in gates) else EXIT_GATE_FAILURE
    xs = _floats(args.x) if args.x else list(X_GRID)
    records = []
    for n in range(1, args.n_max + 1):
        for x in xs:
            if x > family.domain_cap:
                continue
            residual = martingale.martingale_residual(family, n, x, rel_tol)
            tolerance = martingale.residual_tolerance(family, n, x, rel_tol)
            records.append(collections.OrderedDict([("n", n), ("x", "%g" % x), ("residual", format_scalar(residual)),
                                                    ("tolerance", format_scalar(tolerance)),
                                                    ("pass", bool(abs(residual) <= tolerance))]))
    emit_table(records, ["n", "x", "residual", "tolerance", "pass"], args, fd)
    return EXIT_OK


def run_verify(args, config, fd):
    report = run_verification(config)
    if args.format == "csv":
        write_csv(REPORT_CSV_COLUMNS, report.rows(), fd)
    else:
        write_json(report.to_dict(include_timing=not args.no_timing), fd)
    total, failed = report.counts()
    print("Checks: %i, Failed: %i" % (total, failed), file=sys.stderr)
    for name in report.failures():
        print("FAILED %s" % name, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_GATE_FAILURE


def _add_simulate(parser):
    parser.add_argument("--n", type=int, default=DEFAULT_HORIZON, help="Number of steps per path.")
    parser.add_argument("--x0", type=float, default=1.0, help="Initial state in (0, 1]. Defaults to 1.")


def _add_cdf(parser):
    parser.add_argument("--n", type=int, default=DEFAULT_HORIZON, help="Time index of X_n.")
    parser.add_argument("--x", type=str, required=True, help="Comma separated thresholds in (0, 1].")


def _add_joint(parser):
    parser.add_argument("--thresholds", type=str, required=True, help="Comma separated x_1..x_n in [0, 1).")


def _add_pmf(parser):
    parser.add_argument("--n", type=int, default=DEFAULT_HORIZON, help="Horizon of N_n.")
    parser.add_argument("--fast", action="store_true", default=False, help="Use plain float sums in float mode.")
    parser.add_argument("--oracle", action="store_true", default=False, help="Compute through the exact bivariate recursion instead. Requires exact mode.")


def _add_pgf(parser):
    parser.add_argument("--n", type=int, default=DEFAULT_HORIZON, help="Horizon of N_n.")
    parser.add_argument("--z", type=str, required=True, help="Comma separated points z.")
    parser.add_argument("--x", type=str, default="1", help="Initial state x for G_n(x; z). Defaults to 1.")
    parser.add_argument("--oracle", action="store_true", default=False, help="Add a column from the exact bivariate recursion. Requires exact mode.")


def _add_laplace(parser):
    parser.add_argument("--n", type=int, default=DEFAULT_HORIZON, help="Largest horizon n.")
    parser.add_argument("--t", type=str, default="1", help="Comma separated Laplace arguments t >= 0.")
    parser.add_argument("--x", type=str, default="1", help="Initial state in (0, 1]. Defaults to 1.")
    parser.add_argument("--grid", type=int, default=transform.DEFAULT_GRID_NODES, help="Grid nodes for the recursion oracle. Defaults to %d." % transform.DEFAULT_GRID_NODES)
    parser.add_argument("--z", type=str, default="", help="Comma separated z with |z| < 1. Emits generating function tail gaps with N = --n instead.")


def _add_martingale(parser):
    parser.add_argument("--n-max", type=int, default=DEFAULT_HORIZON, help="Largest index n.")
    parser.add_argument("--x", type=str, default="", help="Comma separated states x. Defaults to 0.1..0.9.")
    parser.add_argument("--family", choices=["numeric", "example", "coordinate"], default="numeric",
                        help="numeric: built by quadrature from f_0(x) = -(1/p) ln(1 - p x). example: its closed form. coordinate: f_n(x) = x, not a martingale.")
    parser.add_argument("--mc", action="store_true", default=False, help="Run the Monte Carlo check at n = --n-max instead of the residual table.")
    parser.add_argument("--martingale-paths", type=int, default=None, help="Paths for --mc.")


def _add_verify(parser):
    parser.add_argument("--martingale-paths", type=int, default=None, help="Paths for the martingale Monte Carlo check.")
    parser.add_argument("--no-timing", action="store_true", default=False, help="Leave runtimes out of the JSON report.")


COMMANDS = collections.OrderedDict([
    ("simulate", (run_simulate, _add_simulate, "Dump simulated paths.")),
    ("cdf", (run_cdf, _add_cdf, "Marginal CDF of X_n.")),
    ("joint", (run_joint, _add_joint, "Joint survival P(X_1 > x_1, ..., X_n > x_n).")),
    ("pmf", (run_pmf, _add_pmf, "Law of the jump count N_n.")),
    ("pgf", (run_pgf, _add_pgf, "Generating function E[z^N_n].")),
    ("laplace", (run_laplace, _add_laplace, "Laplace transform of S_n by two routes.")),
    ("martingale", (run_martingale, _add_martingale, "Martingale residual tables and Monte Carlo checks.")),
    ("verify", (run_verify, _add_verify, "Run the full verification suite.")),
])


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--p", type=str, default=None, help="Jump parameter, a ratio \"a/b\" (exact) or a float.")
    shared.add_argument("--seed", type=int, default=None, help="Master seed of the random streams.")
    shared.add_argument("--paths", type=int, default=None, help="Number of simulated paths.")
    shared.add_argument("--mode", choices=MODES, default=None, help="Numeric mode. Defaults to exact for ratios, float otherwise.")
    shared.add_argument("--format", choices=["json", "csv"], default="json", help="Output format. Defaults to json.")
    shared.add_argument("--out", type=str, default="", help="File path where output should be saved. Omit to write to stdout.")
    shared.add_argument("--config", type=str, default=None, help="JSON config file. Defaults to $%s." % CONFIG_ENV_VAR)
    shared.add_argument("--verbose", action="store_true", default=False, help="Log progress and quadrature details to stderr.")

    parser = argparse.ArgumentParser(prog="phstair", formatter_class=argparse.RawDescriptionHelpFormatter,
                                     description="Version %s\nExact laws, oracles and Monte Carlo checks for the Poisson hyperbolic staircase chain." % VERSION)
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True
    for name, (_, add_arguments, help_text) in COMMANDS.items():
        subparser = subparsers.add_parser(name, parents=[shared], help=help_text)
        add_arguments(subparser)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    run = COMMANDS[args.command][0]

    try:
        config = resolve_config(args)
        if getattr(args, "oracle", False) and config.params.mode != EXACT:
            print("--oracle requires exact mode (p as \"a/b\").", file=sys.stderr)
            return EXIT_USAGE
        if args.out == "":
            return run(args, config, sys.stdout)
        with open(args.out, "w", encoding="utf-8") as fd:
            return run(args, config, fd)
    except QuadratureFailure as e:
        print("Quadrature failed: %s" % e, file=sys.stderr)
        return EXIT_QUADRATURE
    except (StaircaseError, ValueError, IOError) as e:
        print("Error: %s" % e, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
