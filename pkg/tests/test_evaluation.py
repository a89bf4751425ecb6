"""Test trip simulation and unsatisfied SOC scores."""
from itertools import combinations

import numpy as np
import numpy.testing as npt
import pytest
from joblib import cpu_count

from PEVSiter.demand import Trip
from PEVSiter.evaluation import (
    Deployment,
    DeploymentEvaluator,
    DetourEvent,
    DetourTrace,
    EvalParams,
    best_detour,
    deployment_score,
    evaluate_deployment,
    fitness,
    route_energy,
    simulate_trip,
    trip_score,
    unsatisfied_soc,
)
from PEVSiter.exceptions import DetourIndexError, UnknownNodeError
from PEVSiter.network import Edge, Network, Node, shortest_path

from .utils import (
    exhaustive_trip_score,
    gen_random_network,
    gen_random_walk_trip,
    replay_trace,
    simple_path_distances,
)


def all_deployments(num_nodes):
    for k in range(num_nodes + 1):
        for stations in combinations(range(num_nodes), k):
            yield Deployment(stations, num_nodes)


def test_eval_params():
    params = EvalParams()
    assert (params.alpha, params.beta, params.rate) == (1.0, 2.0, 1.0)
    assert params.rest_mode == "literal"
    EvalParams(alpha=0.0, beta=1.0)
    with pytest.raises(ValueError):
        EvalParams(alpha=3.0, beta=2.0)
    with pytest.raises(ValueError):
        EvalParams(alpha=-1.0)
    with pytest.raises(ValueError):
        EvalParams(alpha=0.5, beta=0.8)
    with pytest.raises(ValueError):
        EvalParams(rate=0.0)
    with pytest.raises(ValueError):
        EvalParams(rest_mode="leftover")


def test_deployment():
    deployment = Deployment((4, 0, 2), 6)
    assert deployment.stations == (0, 2, 4)
    assert deployment.k == 3
    npt.assert_array_equal(deployment.chromosome, [1, 0, 1, 0, 1, 0])
    assert Deployment.from_chromosome([0, 1, 1, 0]) == Deployment((1, 2), 4)
    assert Deployment((), 3).chromosome.sum() == 0

    with pytest.raises(UnknownNodeError):
        Deployment((6,), 6)
    with pytest.raises(ValueError):
        Deployment((1, 1), 6)


def test_simulate_trip(six_node, detour_trip, params):
    # Station on the route: a zero-extra detour at node 4.
    trace = simulate_trip(six_node, detour_trip, Deployment((3,), 6), params)
    assert trace.events == (DetourEvent(3, 3, 1, 0.0),)
    assert trace.reached
    assert trace.num_detours == 1
    assert trace.strand_nodes == (3,)
    assert trace.soc_rest_per_m == (1.0, 0.0)
    assert trace.soc_detour_prefix == (0.0, 0.0)
    assert trace.strand_node(0) == 3
    assert trace.strand_node(1) is None

    # No station: strands at node 4 with 0.5 SOC left.
    trace = simulate_trip(six_node, detour_trip, Deployment((), 6), params)
    assert trace.events == ()
    assert not trace.reached
    assert trace.strand_nodes == (3,)
    assert trace.soc_rest_per_m == (1.0,)

    # Node 1 is 2 away from node 4, out of reach.
    trace = simulate_trip(six_node, detour_trip, Deployment((0,), 6), params)
    assert trace.num_detours == 0
    assert not trace.reached
    assert trace.strand_node(0) == 3

    # Enough energy for the whole route.
    trip = Trip(5, 1, (5, 3, 1), 2.0, 2.0)
    trace = simulate_trip(six_node, trip, Deployment((), 6), params)
    assert trace.reached and not trace.needs_charging
    assert trace.soc_rest_per_m == (0.0,)


@pytest.fixture
def spur_network():
    # Route nodes 0 - 1 - 2, station candidates 3 (near 0) and 4 (near 1).
    nodes = [Node(i) for i in range(5)]
    edges = [
        Edge(0, 1, 2.0),
        Edge(1, 2, 2.0),
        Edge(0, 3, 1.0),
        Edge(1, 3, 2.0),
        Edge(1, 4, 0.5),
        Edge(2, 4, 2.0),
    ]
    return Network(nodes, edges)


def test_detour_off_route(spur_network, params):
    trip = Trip(0, 2, (0, 1, 2), 1.5, 4.0)
    trace = simulate_trip(spur_network, trip, Deployment((3,), 5), params)
    # 0 -> 3 -> 1 is one longer than the road 0 -> 1.
    assert trace.events == (DetourEvent(0, 3, 1, 1.0),)
    assert trace.reached
    assert trace.soc_rest_per_m == (4.0, 0.0)
    assert trip_score(spur_network, trip, Deployment((3,), 5), params) == 1.0

    # A smaller battery reaches node 1 with 1.0 left and strands there.
    trip = Trip(0, 2, (0, 1, 2), 1.5, 3.0)
    trace = simulate_trip(spur_network, trip, Deployment((3,), 5), params)
    assert trace.num_detours == 1
    assert not trace.reached
    assert trace.strand_nodes == (0, 1)
    assert trace.soc_rest_per_m == (4.0, 2.0)
    # E_0 = 2 * 4, E_1 = 1 + 2 * 2.
    assert [unsatisfied_soc(trace, m, params) for m in range(2)] == [8.0, 5.0]
    assert trip_score(spur_network, trip, Deployment((3,), 5), params) == 5.0

    # A second station next to node 1 finishes the route with two detours.
    trace = simulate_trip(spur_network, trip, Deployment((3, 4), 5), params)
    assert trace.events == (DetourEvent(0, 3, 1, 1.0), DetourEvent(1, 4, 2, 0.5))
    assert trace.reached
    assert trace.soc_detour_prefix == (0.0, 1.0, 1.5)
    assert trace.soc_rest_per_m == (4.0, 2.0, 0.0)
    assert [unsatisfied_soc(trace, m, params) for m in range(3)] == [8.0, 5.0, 1.5]
    assert trip_score(spur_network, trip, Deployment((3, 4), 5), params) == 1.5

    for deployment in all_deployments(5):
        assert trip_score(
            spur_network, trip, deployment, params
        ) == exhaustive_trip_score(spur_network, trip, deployment.stations, params)


def test_against_exhaustive_random_networks(params):
    rng = np.random.default_rng(23)
    for _ in range(10):
        net = gen_random_network(int(rng.integers(5, 8)), rng, max_length=3)
        distances = simple_path_distances(net)
        trips = [
            gen_random_walk_trip(
                net, rng, max_legs=4, soc_choices=(1.0, 2.0, 3.0, 4.0), capacity=4.0
            )
            for _ in range(20)
        ]
        for deployment in all_deployments(net.num_nodes):
            for trip in trips:
                score = trip_score(net, trip, deployment, params)
                best = exhaustive_trip_score(
                    net, trip, deployment.stations, params, distances
                )
                # Greedy detours are one of the searched assignments.
                assert score >= best
                if deployment.k <= 1:
                    assert score == best


@pytest.fixture
def two_station_network():
    # Station 3 gives the shorter detour from node 0, station 4 leaves more SOC.
    nodes = [Node(i) for i in range(5)]
    edges = [
        Edge(0, 1, 2.0),
        Edge(1, 2, 2.0),
        Edge(0, 3, 0.5),
        Edge(1, 3, 1.5),
        Edge(0, 4, 1.5),
        Edge(1, 4, 1.0),
    ]
    return Network(nodes, edges)


def test_several_feasible_stations(two_station_network, params):
    net = two_station_network
    trip = Trip(0, 2, (0, 1, 2), 1.5, 3.0)
    trace = simulate_trip(net, trip, Deployment((3, 4), 5), params)
    assert trace.events == (DetourEvent(0, 3, 1, 0.0), DetourEvent(1, 4, 2, 2.0))
    assert trace.reached
    assert trace.soc_rest_per_m == (4.0, 2.0, 0.0)
    assert [unsatisfied_soc(trace, m, params) for m in range(3)] == [8.0, 4.0, 2.0]
    assert trip_score(net, trip, Deployment((3, 4), 5), params) == 2.0
    # Going through 4 first costs 0.5 extra and reaches node 1 with a full leg of SOC.
    assert exhaustive_trip_score(net, trip, (3, 4), params) == 0.5
    assert trip_score(net, trip, Deployment((4,), 5), params) == 0.5
    assert exhaustive_trip_score(net, trip, (4,), params) == 0.5
    assert exhaustive_trip_score(net, trip, (3,), params) == 4.0
    assert exhaustive_trip_score(net, trip, (), params) == 8.0


def test_unsatisfied_soc(params):
    trace = DetourTrace(
        events=(DetourEvent(0, 1, 2, 0.5), DetourEvent(2, 3, 4, 0.7)),
        reached=True,
        strand_nodes=(0, 2),
        soc_rest_per_m=(3.0, 1.0, 0.0),
        soc_detour_prefix=(0.0, 0.5, 1.2),
    )
    assert unsatisfied_soc(trace, 0, params) == 6.0
    assert unsatisfied_soc(trace, 1, params) == 2.5
    assert unsatisfied_soc(trace, 2, params) == 1.2
    with pytest.raises(DetourIndexError):
        unsatisfied_soc(trace, 3, params)
    with pytest.raises(DetourIndexError):
        unsatisfied_soc(trace, -1, params)

    stranded = DetourTrace((), False, (3,), (1.0,), (0.0,))
    assert unsatisfied_soc(stranded, 0, params) == 2.0
    zero = DetourTrace((DetourEvent(3, 3, 1, 0.0),), True, (3,), (1.0, 0.0), (0.0, 0.0))
    assert unsatisfied_soc(zero, 1, params) == 0.0


def test_trip_score(six_node, detour_trip, params):
    full = Trip(5, 1, (5, 3, 1), 2.0, 2.0)
    assert trip_score(six_node, full, Deployment((), 6), params) == 0.0
    assert trip_score(six_node, detour_trip, Deployment((3,), 6), params) == 0.0
    assert trip_score(six_node, detour_trip, Deployment((0,), 6), params) == 2.0
    assert trip_score(six_node, detour_trip, Deployment((), 6), params) == 2.0

    shortfall = EvalParams(rest_mode="shortfall")
    assert trip_score(six_node, detour_trip, Deployment((), 6), shortfall) == 1.0


def test_extra_soc_floor():
    # The route takes the long road 1-2 while the detour 1-3-2 is shorter.
    nodes = [Node(0), Node(1), Node(2)]
    net = Network(nodes, [Edge(0, 1, 5.0), Edge(0, 2, 1.0), Edge(1, 2, 1.0)])
    trip = Trip(0, 1, (0, 1), 1.0, 10.0)
    params = EvalParams()
    trace = simulate_trip(net, trip, Deployment((2,), 3), params)
    assert trace.events == (DetourEvent(0, 2, 1, 0.0),)
    assert trip_score(net, trip, Deployment((2,), 3), params) == 0.0


def test_deployment_score(six_node, detour_trip, params):
    assert deployment_score(six_node, [], Deployment((0,), 6), params) == 0.0
    trips = [detour_trip, detour_trip]
    assert deployment_score(six_node, trips, Deployment((0,), 6), params) == 4.0


def test_fitness():
    assert fitness(0) == 1.0
    assert fitness(1) == 0.5
    assert fitness(3) == 0.25
    npt.assert_array_equal(fitness(np.array([0.0, 1.0, 3.0])), [1.0, 0.5, 0.25])
    assert fitness(2.0) > fitness(2.5)
    with pytest.raises(ValueError):
        fitness(-1.0)


def test_enough_energy_scores_zero(grid_network, params):
    rng = np.random.default_rng(17)
    n = grid_network.num_nodes
    deployments = [
        Deployment(rng.choice(n, size=rng.integers(n + 1), replace=False), n)
        for _ in range(30)
    ]
    for _ in range(300):
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        route = shortest_path(grid_network, u, v).route
        energy = route_energy(grid_network, route, params.rate)
        capacity = energy * rng.uniform(1.0, 2.0)
        soc_ini = rng.uniform(energy, capacity)
        trip = Trip(u, v, route, soc_ini, capacity)
        for deployment in deployments:
            assert trip_score(grid_network, trip, deployment, params) == 0.0


def test_exact_energy_needs_no_detour(grid_network, params):
    # An initial SOC equal to the route energy finishes on an empty battery.
    n = grid_network.num_nodes
    every_node = Deployment(range(n), n)
    for u, v in [(0, n - 1), (n - 1, 0), (1, n // 2)]:
        route = shortest_path(grid_network, u, v).route
        energy = route_energy(grid_network, route, params.rate)
        trip = Trip(u, v, route, energy, energy)
        trace = simulate_trip(grid_network, trip, every_node, params)
        assert not trace.needs_charging
        assert trace.soc_detour_prefix == (0.0,)
        assert trip_score(grid_network, trip, every_node, params) == 0.0

        trip = Trip(u, v, route, energy / 2, energy)
        assert simulate_trip(grid_network, trip, every_node, params).needs_charging


def test_against_exhaustive(six_node, random_trips):
    distances = simple_path_distances(six_node)
    npt.assert_array_equal(distances, six_node.distances)
    for params in [EvalParams(), EvalParams(alpha=1.0, beta=1.0, rest_mode="shortfall")]:
        for deployment in all_deployments(6):
            for trip in random_trips:
                assert trip_score(
                    six_node, trip, deployment, params
                ) == exhaustive_trip_score(
                    six_node, trip, deployment.stations, params, distances
                )


def _check_ledger(net, trip, deployment, distances):
    params = EvalParams(alpha=1.0, beta=1.0)
    trace = simulate_trip(net, trip, deployment, params)
    n = trace.num_detours
    for m in range(n + 1):
        finished, extra, rest = replay_trace(net, trip, trace, m, params, distances)
        assert extra == trace.soc_detour_prefix[m]
        if finished:
            assert m == n and trace.reached
            assert rest == 0.0
        assert extra + rest == unsatisfied_soc(trace, m, params)


def test_trace_ledger(six_node, random_trips):
    distances = simple_path_distances(six_node)
    for deployment in all_deployments(6):
        for trip in random_trips:
            _check_ledger(six_node, trip, deployment, distances)


def test_trace_ledger_random_networks(spur_network, two_station_network):
    rng = np.random.default_rng(5)
    for net in [spur_network, two_station_network]:
        distances = simple_path_distances(net)
        trip = Trip(0, 2, (0, 1, 2), 1.5, 3.0)
        for deployment in all_deployments(net.num_nodes):
            _check_ledger(net, trip, deployment, distances)
    for _ in range(10):
        net = gen_random_network(int(rng.integers(5, 8)), rng, max_length=3)
        distances = simple_path_distances(net)
        for _ in range(10):
            trip = gen_random_walk_trip(
                net, rng, max_legs=4, soc_choices=(1.0, 2.0, 3.0, 4.0), capacity=4.0
            )
            for deployment in all_deployments(net.num_nodes):
                _check_ledger(net, trip, deployment, distances)


def test_trace_properties(six_node, random_trips, params):
    for deployment in all_deployments(6):
        for trip in random_trips:
            trace = simulate_trip(six_node, trip, deployment, params)
            n = trace.num_detours
            assert len(trace.soc_detour_prefix) == n + 1
            assert len(trace.soc_rest_per_m) == n + 1
            assert len(trace.strand_nodes) == (n if trace.reached else n + 1)
            assert np.all(np.diff(trace.soc_detour_prefix) >= 0)
            assert np.all(np.diff(trace.soc_rest_per_m) <= 0)
            if trace.reached:
                assert trace.soc_rest_per_m[-1] == 0
            for event in trace.events:
                assert event.station in deployment.stations
                assert event.extra_soc >= 0


def test_superset_detour():
    rng = np.random.default_rng(5)
    table = None
    for i in range(1000):
        if i % 100 == 0:
            net = Network(
                [Node(j) for j in range(8)],
                [Edge(j, j + 1, float(rng.integers(1, 5))) for j in range(7)]
                + [Edge(0, 7, 2.0), Edge(2, 5, 3.0)],
            )
            table = net.distances
        u, v = (int(x) for x in rng.choice(8, size=2, replace=False))
        soc = float(rng.uniform(0, 8))
        stations = sorted(rng.choice(8, size=rng.integers(1, 8), replace=False))
        extra = rng.choice(8, size=rng.integers(1, 8), replace=False)
        superset = sorted(set(stations) | set(int(s) for s in extra))
        small = best_detour(table, u, v, soc, 8.0, 1.0, stations)
        large = best_detour(table, u, v, soc, 8.0, 1.0, superset)
        if small is not None:
            assert large is not None
            assert large[1] <= small[1]


def test_best_detour_ties(six_node):
    # From node 1 to node 4, stations 2 and 6 both give a detour of 2.
    choice = best_detour(six_node.distances, 0, 3, 2.0, 2.0, 1.0, (1, 5))
    assert choice == (1, 2.0)
    assert best_detour(six_node.distances, 0, 3, 0.5, 2.0, 1.0, (1, 5)) is None
    # A station at the forced-detour point itself is always reachable.
    assert best_detour(six_node.distances, 3, 1, 0.0, 2.0, 1.0, (3, 5)) == (3, 1.0)


def test_evaluate_deployment(six_node, detour_trip, golden_trips, params):
    trips = [detour_trip, Trip(5, 1, (5, 3, 1), 2.0, 2.0)]
    report = evaluate_deployment(six_node, trips, Deployment((), 6), params)
    assert report.stations == []
    assert report.total_unsatisfied_soc == 2.0
    assert report.fit_value == 1 / 3
    assert report.trips[0].strand_node == 4
    assert report.trips[0].chosen_m == 0
    assert not report.trips[0].reached
    assert report.trips[1].score == 0.0
    assert report.trips[1].strand_node is None
    assert report.params["rest_mode"] == "literal"

    report = evaluate_deployment(six_node, trips, Deployment((3,), 6), params)
    assert report.stations == [4]
    assert report.trips[0].chosen_m == 1
    assert report.trips[0].strand_node is None
    event = report.trips[0].events[0]
    assert (event.at_node, event.station, event.next_node) == (4, 4, 2)

    deployment = Deployment((0, 3), 6)
    report = evaluate_deployment(six_node, golden_trips, deployment, params)
    assert report.total_unsatisfied_soc == deployment_score(
        six_node, golden_trips, deployment, params
    )
    assert len(report.trips) == 100


def test_evaluator(six_node, golden_trips, params):
    evaluator = DeploymentEvaluator(six_node, golden_trips, params, n_parallel=1)
    candidates = list(combinations(range(6), 2))
    scores = evaluator.score_many(candidates + candidates[:3])
    assert evaluator.num_evaluated == 15
    for stations, score in zip(candidates, scores):
        assert score == deployment_score(
            six_node, golden_trips, Deployment(stations, 6), params
        )
    assert evaluator.score((4, 1)) == scores[candidates.index((1, 4))]

    population = np.array([[1, 1, 0, 0, 0, 0], [0, 0, 0, 1, 0, 1]])
    npt.assert_array_equal(
        evaluator.score_population(population),
        [scores[candidates.index((0, 1))], scores[candidates.index((3, 5))]],
    )

    parallel = DeploymentEvaluator(six_node, golden_trips, params, n_parallel=2)
    npt.assert_array_equal(parallel.score_many(candidates), scores[:15])

    with pytest.warns(UserWarning, match="workers requested"):
        DeploymentEvaluator(six_node, [], params, n_parallel=cpu_count() + 1)
