"""Unsatisfied SOC of trips under a charging station deployment.

A trip that never runs short of energy scores 0. Otherwise the trip is simulated
forward: at every forced-detour point the PEV greedily recharges at the station
minimizing the detour length and comes back to the next route node. A budget of m
detours either finishes the route or strands at the (m+1)-th forced-detour point, and
the trip scores the least unsatisfied SOC over all budgets.
"""
import logging
from dataclasses import dataclass
from itertools import accumulate
from warnings import warn

import numpy as np
from joblib import Parallel, cpu_count, delayed

from .exceptions import DetourIndexError, UnknownNodeError
from .schema import DetourEventRecord, EvaluationReport, TripReport

log = logging.getLogger(__name__)

REST_MODES = ("literal", "shortfall")


@dataclass(frozen=True)
class EvalParams:
    """Weights of unsatisfied SOC.

    Attributes:
        alpha(float):
            Weight of the detour energy when the PEV strands.
        beta(float):
            Weight of the energy needed to finish the route.
        rate(float):
            SOC consumed per unit distance.
        rest_mode(str):
            "literal" counts the whole energy of the unfinished route, "shortfall"
            subtracts the SOC left at the strand node.
    """

    alpha: float = 1.0
    beta: float = 2.0
    rate: float = 1.0
    rest_mode: str = "literal"

    def __post_init__(self):
        if not 0 <= self.alpha <= self.beta:
            raise ValueError(
                f"Weights must satisfy 0 <= alpha <= beta, got alpha={self.alpha},"
                f" beta={self.beta}!"
            )
        if self.beta < 1:
            raise ValueError(f"Weight beta must be at least 1, got {self.beta}!")
        if not self.rate > 0:
            raise ValueError(f"Energy rate must be positive, got {self.rate}!")
        if self.rest_mode not in REST_MODES:
            raise ValueError(
                f"Unknown rest mode {self.rest_mode}, allowed are {REST_MODES}!"
            )


@dataclass(frozen=True)
class Deployment:
    """A set of nodes hosting charging stations.

    Attributes:
        stations(tuple of int):
            Sorted 0-based station node ids.
        num_nodes(int):
            Number of nodes in the network.
    """

    stations: tuple
    num_nodes: int

    def __post_init__(self):
        stations = tuple(sorted(int(s) for s in self.stations))
        if len(set(stations)) != len(stations):
            raise ValueError(f"Duplicate station nodes in {stations}!")
        for s in stations:
            if not 0 <= s < self.num_nodes:
                raise UnknownNodeError(
                    f"Station node {s} is not in the network of"
                    f" {self.num_nodes} nodes!"
                )
        object.__setattr__(self, "stations", stations)

    @property
    def k(self):
        """Number of stations."""
        return len(self.stations)

    @property
    def chromosome(self):
        """0/1 vector with a 1 at every station.

        Returns:
            np.ndarray of int8.
        """
        bits = np.zeros(self.num_nodes, dtype=np.int8)
        bits[list(self.stations)] = 1
        return bits

    @classmethod
    def from_chromosome(cls, bits):
        """Build from a 0/1 vector."""
        bits = np.asarray(bits)
        return cls(tuple(np.flatnonzero(bits).tolist()), len(bits))


@dataclass(frozen=True)
class DetourEvent:
    """A recharging detour, with 0-based node ids."""

    at_node: int
    station: int
    next_node: int
    extra_soc: float


@dataclass(frozen=True)
class DetourTrace:
    """Outcome of a greedy forward simulation.

    Attributes:
        events(tuple of DetourEvent):
            The n detours taken.
        reached(bool):
            Whether the destination is reached after all n detours.
        strand_nodes(tuple of int):
            Node where a budget-m run strands, for every budget that does.
            Length n if reached, n + 1 otherwise.
        soc_rest_per_m(tuple of float):
            SOC needed to finish the route from the strand node of every budget
            m = 0..n; 0 for a budget that finishes.
        soc_detour_prefix(tuple of float):
            Extra SOC of the first m detours, m = 0..n.
    """

    events: tuple
    reached: bool
    strand_nodes: tuple
    soc_rest_per_m: tuple
    soc_detour_prefix: tuple

    @property
    def num_detours(self):
        """Number of detours n."""
        return len(self.events)

    @property
    def needs_charging(self):
        """Whether the trip meets any forced-detour point."""
        return self.num_detours > 0 or not self.reached

    def strand_node(self, m):
        """Node where a budget-m run strands, None if it finishes."""
        if m < len(self.strand_nodes):
            return self.strand_nodes[m]
        return None


def route_energy(net, route, rate=1.0):
    """SOC needed to drive a route, accumulated leg by leg."""
    spent = 0.0
    for u, v in zip(route[:-1], route[1:]):
        spent += net.edge_length(u, v)
    return rate * spent


def best_detour(distances, u, v, soc, capacity, rate, stations):
    """Choose the recharging station for a detour from u back to v.

    A station is feasible if it can be reached with the current SOC and v can be
    reached from it with a full battery.

    Args:
        distances(np.ndarray):
            All-pairs distance table.
        u(int):
            Forced-detour point.
        v(int):
            Next route node.
        soc(float):
            SOC on arrival at u.
        capacity(float):
            Full battery SOC.
        rate(float):
            SOC per unit distance.
        stations(Sequence of int):
            Station nodes, sorted ascending.

    Returns:
        tuple(int, float) or None:
            The station minimizing d(u, s) + d(s, v) (lowest id on ties) with that
            detour length, or None if no station is feasible.
    """
    best = None
    for s in stations:
        if rate * distances[u, s] > soc or rate * distances[s, v] > capacity:
            continue
        length = float(distances[u, s] + distances[s, v])
        if best is None or length < best[1]:
            best = (s, length)
    return best


def simulate_trip(net, trip, deployment, params):
    """Drive a trip forward, recharging greedily at forced-detour points.

    Args:
        net(Network):
            The road network.
        trip(Trip):
            The trip to simulate.
        deployment(Deployment):
            Station nodes.
        params(EvalParams):
            Evaluation parameters.

    Returns:
        DetourTrace.
    """
    rate = params.rate
    route = trip.route
    if route_energy(net, route, rate) <= trip.soc_ini:
        return DetourTrace(
            events=(),
            reached=True,
            strand_nodes=(),
            soc_rest_per_m=(0.0,),
            soc_detour_prefix=(0.0,),
        )

    distances = net.distances
    legs =[net.edge_length(u, v) for u, v in zip(route[:-1], route[1:])]
    remaining = list(accumulate(reversed(legs), initial=0.0))[::-1]

    # SOC at the last refill and distance driven since then.
    charge = trip.soc_ini
    spent = 0.0
    events = []
    strand_nodes = []
    rest = []
    reached = True
    i = 0
    while i < len(legs):
        if rate * (spent + legs[i]) <= charge:
            spent += legs[i]
            i += 1
            continue

        u, v = route[i], route[i + 1]
        soc = charge - rate * spent
        needed = rate * remaining[i]
        if params.rest_mode == "shortfall":
            needed = max(0.0, needed - soc)
        strand_nodes.append(u)
        rest.append(needed)

        choice = best_detour(
            distances, u, v, soc, trip.capacity, rate, deployment.stations
        )
        if choice is None:
            reached = False
            break
        s, length = choice
        extra = max(0.0, rate * length - rate * legs[i])
        events.append(DetourEvent(u, s, v, extra))
        charge = trip.capacity - rate * distances[s, v]
        spent = 0.0
        i += 1

    if reached:
        rest.append(0.0)
    prefix = tuple(accumulate((e.extra_soc for e in events), initial=0.0))
    return DetourTrace(
        events=tuple(events),
        reached=reached,
        strand_nodes=tuple(strand_nodes),
        soc_rest_per_m=tuple(rest),
        soc_detour_prefix=prefix,
    )


def unsatisfied_soc(trace, m, params):
    """Unsatisfied SOC when at most m detours are taken.

    Args:
        trace(DetourTrace):
            Simulation of the trip.
        m(int):
            Detour budget, 0 <= m <= n.
        params(EvalParams):
            Evaluation parameters.

    Returns:
        float.
    """
    n = trace.num_detours
    if not 0 <= m <= n:
        raise DetourIndexError(f"Detour budget {m} is outside 0..{n}!")
    if m == n and trace.reached:
        return trace.soc_detour_prefix[n]
    return (
        params.alpha * trace.soc_detour_prefix[m]
        + params.beta * trace.soc_rest_per_m[m]
    )


def score_trace(trace, params):
    """Least unsatisfied SOC of a trace and the budget achieving it.

    Returns:
        tuple(float, int):
            The score and the smallest budget m reaching it.
    """
    if not trace.needs_charging:
        return 0.0, 0
    best, best_m = None, 0
    for m in range(trace.num_detours + 1):
        e = unsatisfied_soc(trace, m, params)
        if best is None or e < best:
            best, best_m = e, m
    return best, best_m


def trip_score(net, trip, deployment, params):
    """Unsatisfied SOC of a trip.

    Args:
        net(Network):
            The road network.
        trip(Trip):
            The trip to score.
        deployment(Deployment):
            Station nodes.
        params(EvalParams):
            Evaluation parameters.

    Returns:
        float.
    """
    return score_trace(simulate_trip(net, trip, deployment, params), params)[0]


def deployment_score(net, trips, deployment, params):
    """Total unsatisfied SOC of all trips, summed in trip order.

    Returns:
        float.
    """
    total = 0.0
    for trip in trips:
        total += trip_score(net, trip, deployment, params)
    return total


def fitness(unsatisfied):
    """Fit value 1 / (1 + U) of total unsatisfied SOC.

    Args:
        unsatisfied(float or ArrayLike):
            Non-negative total unsatisfied SOC.

    Returns:
        float or np.ndarray.
    """
    u = np.asarray(unsatisfied, dtype=float)
    if np.any(u < 0):
        raise ValueError("Unsatisfied SOC can not be negative!")
    fit = 1.0 / (1.0 + u)
    if fit.ndim == 0:
        return float(fit)
    return fit


def evaluate_deployment(net, trips, deployment, params):
    """Detailed evaluation of a deployment.

    Args:
        net(Network):
            The road network.
        trips(list of Trip):
            Trips to evaluate.
        deployment(Deployment):
            Station nodes.
        params(EvalParams):
            Evaluation parameters.

    Returns:
        EvaluationReport:
            Report with 1-based node ids.
    """
    reports = []
    total = 0.0
    for index, trip in enumerate(trips):
        trace = simulate_trip(net, trip, deployment, params)
        score, m = score_trace(trace, params)
        total += score
        strand = trace.strand_node(m) if trace.needs_charging else None
        reports.append(
            TripReport(
                index=index,
                score=score,
                chosen_m=m,
                num_detours=trace.num_detours,
                reached=trace.reached,
                strand_node=None if strand is None else strand + 1,
                events=[
                    DetourEventRecord(
                        at_node=e.at_node + 1,
                        station=e.station + 1,
                        next_node=e.next_node + 1,
                        extra_soc=e.extra_soc,
                    )
                    for e in trace.events
                ],
            )
        )
    return EvaluationReport(
        stations=[s + 1 for s in deployment.stations],
        params={
            "alpha": params.alpha,
            "beta": params.beta,
            "rate": params.rate,
            "rest_mode": params.rest_mode,
        },
        total_unsatisfied_soc=total,
        fit_value=fitness(total),
        trips=reports,
    )


def _score_chunk(net, trips, params, chunk):
    return [
        deployment_score(net, trips, Deployment(stations, net.num_nodes), params)
        for stations in chunk
    ]


class DeploymentEvaluator:
    """Score deployments of one network and trip set, caching results.

    Deployments are keyed by their sorted station tuple, so a deployment is scored at
    most once and the worker count never changes the results.
    """

    def __init__(self, net, trips, params, n_parallel=1):
        """Initialize.

        Args:
            net(Network):
                The road network.
            trips(list of Trip):
                Trips to score.
            params(EvalParams):
                Evaluation parameters.
            n_parallel(int): optional
                Number of joblib workers. Default to 1, None means all cores.
        """
        self.net = net
        self.trips = list(trips)
        self.params = params
        self.n_parallel = n_parallel or cpu_count()
        if self.n_parallel > cpu_count():
            warn(
                f"{self.n_parallel} workers requested but only {cpu_count()} cores"
                " are available!"
            )
        self._cache = {}
        # Build the distance table before any worker is forked.
        _ = net.distances

    @property
    def num_evaluated(self):
        """Number of distinct deployments scored so far."""
        return len(self._cache)

    def score(self, stations):
        """Total unsatisfied SOC of one deployment."""
        return float(self.score_many([stations])[0])

    def score_many(self, station_sets):
        """Total unsatisfied SOC of many deployments.

        Args:
            station_sets(Sequence of Sequence of int):
                Station nodes of each deployment.

        Returns:
            np.ndarray of float.
        """
        keys = [tuple(sorted(int(s) for s in stations)) for stations in station_sets]
        missing = list(dict.fromkeys(k for k in keys if k not in self._cache))
        if len(missing) > 0:
            n_jobs = min(self.n_parallel, len(missing))
            if n_jobs > 1:
                chunks = [missing[i::n_jobs] for i in range(n_jobs)]
                with Parallel(n_jobs=n_jobs) as par:
                    results = par(
                        delayed(_score_chunk)(self.net, self.trips, self.params, chunk)
                        for chunk in chunks
                    )
            else:
                chunks = [missing]
                results = [_score_chunk(self.net, self.trips, self.params, missing)]
            for chunk, scores in zip(chunks, results):
                self._cache.update(zip(chunk, scores))
            log.debug(f"Scored {len(missing)} new deployments with {n_jobs} workers.")
        return np.array([self._cache[k] for k in keys], dtype=float)

    def score_population(self, population):
        """Total unsatisfied SOC of every chromosome in a population.

        Args:
            population(np.ndarray):
                0/1 array of shape (pop_size, N).

        Returns:
            np.ndarray of float.
        """
        return self.score_many([np.flatnonzero(row).tolist() for row in population])
