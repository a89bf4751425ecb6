"""Unitary steps of a station siting run, and their jobflow jobs."""
import logging
from dataclasses import asdict
from warnings import warn

from jobflow import job

from .demand import generate_trips
from .evaluation import Deployment, evaluate_deployment, fitness
from .optimizer import brute_force, count_candidates, run_ga
from .preprocessing import (
    get_demand_config,
    get_eval_params,
    get_ga_config,
    process_demand_options,
    process_evaluation_options,
    process_ga_options,
    process_oracle_options,
)
from .schema import CurvePoint, GaRunDocument, OracleDocument

log = logging.getLogger(__name__)


def _preprocess_options(options):
    """Pre-process and concatenate options."""
    options = options or {}
    eval_options = process_evaluation_options(options)
    ga_options = process_ga_options(options)
    demand_options = process_demand_options(options)
    oracle_options = process_oracle_options(options)

    processed = dict()
    processed.update(demand_options)
    processed.update(eval_options)
    processed.update(ga_options)
    processed.update(oracle_options)
    return processed


def generate_trips_step(network, options=None):
    """Generate OD trips on a network.

    Args:
        network(Network):
            The road network.
        options(dict): optional
            Demand options, see :func:`PEVSiter.preprocessing.process_demand_options`.

    Returns:
        list of Trip.
    """
    cfg = get_demand_config(_preprocess_options(options))
    if cfg.trip_count == 0:
        warn("Trip count is 0, an empty trip set will be generated!")
    return generate_trips(network, cfg)


generate_trips_job = job(generate_trips_step)


def evaluate_step(network, trips, stations, options=None):
    """Evaluate a deployment in detail.

    Args:
        network(Network):
            The road network.
        trips(list of Trip):
            Trips to serve.
        stations(Sequence of int):
            0-based station node ids.
        options(dict): optional
            Evaluation options.

    Returns:
        EvaluationReport.
    """
    params = get_eval_params(_preprocess_options(options))
    deployment = Deployment(tuple(stations), network.num_nodes)
    report = evaluate_deployment(network, trips, deployment, params)
    log.info(
        f"Deployment {report.stations}: total unsatisfied SOC"
        f" {report.total_unsatisfied_soc}, fit value {report.fit_value}."
    )
    return report


evaluate_job = job(evaluate_step)


def optimize_step(network, trips, options=None):
    """Run the genetic algorithm.

    Args:
        network(Network):
            The road network.
        trips(list of Trip):
            Trips to serve.
        options(dict): optional
            Evaluation and GA options. Must contain "k".

    Returns:
        GaRunDocument.
    """
    options = _preprocess_options(options)
    params = get_eval_params(options)
    cfg = get_ga_config(options)
    if len(trips) == 0:
        warn("No trips to serve, every deployment scores 0!")
    if cfg.k == network.num_nodes:
        warn(f"k equals the number of nodes {cfg.k}, only one deployment exists!")

    result = run_ga(network, trips, params, cfg)
    config = cfg.echo()
    config.update(asdict(params))
    return GaRunDocument(
        config=config,
        best_stations=[s + 1 for s in result.best.stations],
        best_unsatisfied_soc=result.best_unsatisfied_soc,
        fit_value=result.fit_value,
        num_evaluated=result.num_evaluated,
        curve=[
            CurvePoint(generation=g, best_fit=best, mean_fit=mean)
            for g, (best, mean) in enumerate(result.curve)
        ],
    )


optimize_job = job(optimize_step)


def oracle_step(network, trips, options=None):
    """Find the exact optimum by enumerating all deployments.

    Args:
        network(Network):
            The road network.
        trips(list of Trip):
            Trips to serve.
        options(dict): optional
            Evaluation and oracle options. Must contain "k".

    Returns:
        OracleDocument.
    """
    options = _preprocess_options(options)
    params = get_eval_params(options)
    k = options["k"]
    if k is None:
        raise ValueError("Number of stations k must be given!")
    deployment, unsatisfied = brute_force(
        network,
        trips,
        k,
        params,
        max_candidates=options["max_candidates"],
        n_parallel=options["n_parallel"],
    )
    return OracleDocument(
        k=k,
        stations=[s + 1 for s in deployment.stations],
        unsatisfied_soc=unsatisfied,
        fit_value=fitness(unsatisfied),
        num_candidates=count_candidates(network.num_nodes, k),
    )


oracle_job = job(oracle_step)
