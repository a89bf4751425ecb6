"""Command line interface of PEVSiter.

Sub-commands:

#. ``evaluate``: score a given deployment and write ``report.json``.
#. ``optimize``: run the GA and write ``ga_result.json``, ``fit_curve.csv`` and
   ``network.dot``.
#. ``oracle``: enumerate every deployment and write ``oracle.json``.
#. ``gen-trips``: generate OD trips and write ``trips.json`` or ``trips.csv``.
#. ``gen-network``: generate a grid city and write ``network.json`` and
   ``network.dot``.

Exit codes are 0 on success, 2 on invalid input and 1 on any other failure.
"""
import argparse
import logging
import sys
from pathlib import Path

import pandas as pd
import yaml

from .demand import count_area_pairs, parse_trips, save_trips
from .exceptions import UnknownNodeError
from .jobs import evaluate_step, generate_trips_step, optimize_step, oracle_step
from .network import generate_grid_network, load_network, save_network
from .preprocessing import process_network_options
from .utils.export import to_dot, write_curve_csv

log = logging.getLogger(__name__)

# argparse destination -> option key.
_option_keys = {
    "alpha": "alpha",
    "beta": "beta",
    "rate": "rate",
    "rest_mode": "rest_mode",
    "k": "k",
    "pop": "pop_size",
    "generations": "generations",
    "pc": "pc",
    "pm": "pm",
    "window": "window_len",
    "elitism": "elitism",
    "seed": "seed",
    "threads": "n_parallel",
    "max_candidates": "max_candidates",
    "trip_count": "trip_count",
    "rows": "rows",
    "cols": "cols",
    "spacing": "spacing",
    "jitter": "jitter",
    "cluster_fraction": "cluster_fraction",
}


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _non_negative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"must be an unsigned 64-bit integer: {text}")
    return value


def _probability(text):
    value = float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"must be within [0, 1], got {value}")
    return value


def _station_ids(text):
    try:
        return [int(s) for s in text.split(",") if s.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma separated node ids, got {text}"
        ) from None


def build_parser():
    """Build the argument parser.

    Returns:
        argparse.ArgumentParser.
    """
    parser = argparse.ArgumentParser(
        prog="pevsiter",
        description="Evaluate and optimize PEV charging station deployments.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="More logging, repeatable."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--options", help="YAML file of options.")
    common.add_argument("--out", default=".", help="Output directory.")

    network = argparse.ArgumentParser(add_help=False)
    network.add_argument("--network", required=True, help="Network JSON or CSV.")
    network.add_argument("--lengths", help="Road lengths CSV of an incidence CSV.")

    trips = argparse.ArgumentParser(add_help=False)
    trips.add_argument("--trips", required=True, help="Trips JSON or CSV.")

    scoring = argparse.ArgumentParser(add_help=False)
    scoring.add_argument("--alpha", type=float)
    scoring.add_argument("--beta", type=float)
    scoring.add_argument("--rate", type=float)
    scoring.add_argument("--rest-mode", choices=["literal", "shortfall"])

    evaluate = subparsers.add_parser(
        "evaluate",
        parents=[common, network, trips, scoring],
        help="Score a deployment.",
    )
    evaluate.add_argument(
        "--stations", required=True, type=_station_ids, help="e.g. 1,4"
    )
    evaluate.set_defaults(func=cmd_evaluate)

    optimize = subparsers.add_parser(
        "optimize",
        parents=[common, network, trips, scoring],
        help="Search a deployment with the genetic algorithm.",
    )
    optimize.add_argument("--k", required=True, type=_non_negative_int)
    optimize.add_argument("--pop", type=_positive_int)
    optimize.add_argument("--generations", type=_positive_int)
    optimize.add_argument("--pc", type=_probability)
    optimize.add_argument("--pm", type=_probability)
    optimize.add_argument("--window", type=_positive_int)
    optimize.add_argument(
        "--no-elitism", dest="elitism", action="store_const", const=False
    )
    optimize.add_argument("--seed", type=_seed)
    optimize.add_argument("--threads", type=_positive_int)
    optimize.set_defaults(func=cmd_optimize)

    oracle = subparsers.add_parser(
        "oracle",
        parents=[common, network, trips, scoring],
        help="Find the optimal deployment by enumeration.",
    )
    oracle.add_argument("--k", required=True, type=_non_negative_int)
    oracle.add_argument("--max-candidates", type=_positive_int)
    oracle.add_argument("--threads", type=_positive_int)
    oracle.set_defaults(func=cmd_oracle)

    gen_trips = subparsers.add_parser(
        "gen-trips", parents=[common, network], help="Generate OD trips."
    )
    gen_trips.add_argument("--demand", required=True, help="Demand YAML file.")
    gen_trips.add_argument("--trip-count", type=_non_negative_int)
    gen_trips.add_argument("--seed", type=_seed)
    gen_trips.add_argument("--rate", type=float)
    gen_trips.add_argument("--format", choices=["json", "csv"], default="json")
    gen_trips.set_defaults(func=cmd_gen_trips)

    gen_network = subparsers.add_parser(
        "gen-network", parents=[common], help="Generate a grid city."
    )
    gen_network.add_argument("--rows", type=_positive_int)
    gen_network.add_argument("--cols", type=_positive_int)
    gen_network.add_argument("--spacing", type=float)
    gen_network.add_argument("--jitter", type=float)
    gen_network.add_argument("--cluster-fraction", type=float)
    gen_network.add_argument("--seed", type=_seed)
    gen_network.set_defaults(func=cmd_gen_network)
    return parser


def _load_yaml(path):
    with open(path) as fin:
        d = yaml.safe_load(fin)
    if d is None:
        return {}
    if not isinstance(d, dict):
        raise ValueError(f"Options file {path} must hold a mapping!")
    return d


def _collect_options(args, *yaml_paths):
    """Merge YAML options with the flags given on the command line."""
    options = {}
    for path in yaml_paths:
        if path is not None:
            options.update(_load_yaml(path))
    for dest, key in _option_keys.items():
        value = getattr(args, dest, None)
        if value is not None:
            options[key] = value
    return options


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_document(document, path):
    Path(path).write_text(document.model_dump_json(indent=2) + "\n")
    log.info(f"Wrote {path}.")


def cmd_evaluate(args):
    """Score a deployment and write report.json."""
    options = _collect_options(args, args.options)
    net = load_network(args.network, args.lengths)
    trips = parse_trips(args.trips, net)
    for s in args.stations:
        if not 1 <= s <= net.num_nodes:
            raise UnknownNodeError(
                f"Station {s} is not in the network of {net.num_nodes} nodes!"
            )
    out = _out_dir(args)

    report = evaluate_step(net, trips, [s - 1 for s in args.stations], options)
    _write_document(report, out / "report.json")
    print(f"total_unsatisfied_soc: {report.total_unsatisfied_soc}")
    print(f"fit_value: {report.fit_value}")


def cmd_optimize(args):
    """Run the GA and write ga_result.json, fit_curve.csv and network.dot."""
    options = _collect_options(args, args.options)
    net = load_network(args.network, args.lengths)
    trips = parse_trips(args.trips, net)
    out = _out_dir(args)

    document = optimize_step(net, trips, options)
    _write_document(document, out / "ga_result.json")
    write_curve_csv(
        [(point.best_fit, point.mean_fit) for point in document.curve],
        out / "fit_curve.csv",
    )
    stations = [s - 1 for s in document.best_stations]
    (out / "network.dot").write_text(to_dot(net, stations))
    print(f"best_stations: {','.join(str(s) for s in document.best_stations)}")
    print(f"best_unsatisfied_soc: {document.best_unsatisfied_soc}")
    print(f"fit_value: {document.fit_value}")


def cmd_oracle(args):
    """Enumerate every deployment and write oracle.json."""
    options = _collect_options(args, args.options)
    net = load_network(args.network, args.lengths)
    trips = parse_trips(args.trips, net)
    out = _out_dir(args)

    document = oracle_step(net, trips, options)
    _write_document(document, out / "oracle.json")
    print(f"stations: {','.join(str(s) for s in document.stations)}")
    print(f"unsatisfied_soc: {document.unsatisfied_soc}")


def cmd_gen_trips(args):
    """Generate trips and write trips.json or trips.csv."""
    options = _collect_options(args, args.options, args.demand)
    net = load_network(args.network, args.lengths)
    out = _out_dir(args)

    trips = generate_trips_step(net, options)
    save_trips(trips, out / f"trips.{args.format}")
    counts = pd.Series(count_area_pairs(net, trips)).unstack()
    counts.index.name = "origin"
    counts.columns.name = "destination"
    print(counts.to_string())


def cmd_gen_network(args):
    """Generate a grid city and write network.json and network.dot."""
    options = process_network_options(_collect_options(args, args.options))
    out = _out_dir(args)

    net = generate_grid_network(**options)
    save_network(net, out / "network.json")
    (out / "network.dot").write_text(to_dot(net))
    print(f"nodes: {net.num_nodes}, roads: {net.num_edges}")


def main(argv=None):
    """Run the command line interface.

    Args:
        argv(list of str): optional
            Arguments without the program name. Default to sys.argv[1:].

    Returns:
        int:
            Exit code.
    """
    args = build_parser().parse_args(argv)
    level = max(logging.DEBUG, logging.WARNING - 10 * args.verbose)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        args.func(args)
    except (ValueError, KeyError, FileNotFoundError, yaml.YAMLError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        log.exception(e)
        return 1
    return 0


def run():
    """Console script entry."""
    sys.exit(main())
