import builtins
import json
import types

import networkx as nx
import numpy as np
from monty.json import MontyDecoder, MSONable

from PEVSiter.demand import Trip
from PEVSiter.network import Edge, Network, Node


def assert_msonable(obj, test_if_subclass=True):
    """
    Tests if obj is MSONable and tries to verify whether the contract is
    fulfilled.
    By default, the method tests whether obj is an instance of MSONable.
    This check can be deactivated by setting test_if_subclass to False.
    """
    if test_if_subclass:
        assert isinstance(obj, MSONable)
    assert obj.as_dict() == obj.__class__.from_dict(obj.as_dict()).as_dict()
    _ = json.loads(obj.to_json(), cls=MontyDecoder)


def execute_job_function(job):
    # if Job was created using the job decorator, then access the original function
    function = getattr(job.function, "original", job.function)

    # if function is bound method we need to do some magic to bind the unwrapped
    # function to the class/instance
    bound = getattr(job.function, "__job__", None)
    if bound is not None and bound is not builtins:
        function = types.MethodType(function, bound)

    return function(*job.function_args, **job.function_kwargs)


def gen_random_network(n_nodes, rng, max_length=9, extra_edges=None):
    """Generate a random connected network with integer road lengths.

    A random spanning tree is built first, then extra roads are added between
    random unconnected pairs.

    Args:
        n_nodes(int):
            Number of nodes.
        rng(np.random.Generator):
            Random generator.
        max_length(int):
            Largest road length.
        extra_edges(int): optional
            Number of extra roads. Default to a random number up to n_nodes.

    Returns:
        Network.
    """
    order = rng.permutation(n_nodes)
    pairs = set()
    for i in range(1, n_nodes):
        a = int(order[i])
        b = int(order[rng.integers(i)])
        pairs.add((min(a, b), max(a, b)))
    if extra_edges is None:
        extra_edges = int(rng.integers(n_nodes + 1))
    for _ in range(extra_edges):
        a, b = (int(x) for x in rng.choice(n_nodes, size=2, replace=False))
        pairs.add((min(a, b), max(a, b)))

    nodes = [Node(i) for i in range(n_nodes)]
    edges = [
        Edge(a, b, float(rng.integers(1, max_length + 1))) for a, b in sorted(pairs)
    ]
    return Network(nodes, edges)


def simple_path_distances(net):
    """All-pairs distances by enumerating every simple path."""
    graph = net.to_networkx()
    n = net.num_nodes
    table = np.zeros((n, n))
    for u in range(n):
        for v in range(n):
            if u != v:
                table[u, v] = min(
                    nx.path_weight(graph, path, "length")
                    for path in nx.all_simple_paths(graph, u, v)
                )
    return table


def gen_random_walk_trip(net, rng, max_legs=3, soc_choices=(1.0, 1.5, 2.0), capacity=2.0):
    """A trip along a random walk without immediate backtracking.

    SOC values are multiples of 0.5 so that the arithmetic is exact on integer
    road lengths.
    """
    n_legs = int(rng.integers(1, max_legs + 1))
    route = [int(rng.integers(net.num_nodes))]
    for _ in range(n_legs):
        neighbors = [v for v, _ in net.adjacency[route[-1]] if v not in route]
        if len(neighbors) == 0:
            break
        route.append(int(rng.choice(neighbors)))
    if len(route) == 1:
        route.append(int(net.adjacency[route[0]][0][0]))
    soc_ini = float(rng.choice(soc_choices))
    return Trip(route[0], route[-1], route, soc_ini, capacity)


def _drive(legs, start, soc, rate):
    """Drive legs from index start until the SOC runs short.

    Returns:
        tuple(int, float):
            Index of the first leg that can not be driven (len(legs) if none) and the
            SOC left in front of it.
    """
    i = start
    while i < len(legs) and soc >= rate * legs[i]:
        soc -= rate * legs[i]
        i += 1
    return i, soc


def exhaustive_trip_score(net, trip, stations, params, distances=None):
    """Least unsatisfied SOC over every detour budget and station assignment.

    At every forced-detour point the search branches into stranding there, with
    any number of detours taken so far, and into a detour through each station that
    is reachable with the SOC left and reaches the next route node on a full battery.
    """
    if distances is None:
        distances = simple_path_distances(net)
    rate = params.rate
    route = trip.route
    legs = [net.edge_length(u, v) for u, v in zip(route[:-1], route[1:])]

    def search(start, soc, extra):
        i, soc = _drive(legs, start, soc, rate)
        if i == len(legs):
            return extra
        rest = rate * sum(legs[i:])
        if params.rest_mode == "shortfall":
            rest = max(0.0, rest - soc)
        best = params.alpha * extra + params.beta * rest
        u, v = route[i], route[i + 1]
        for s in stations:
            if rate * distances[u, s] > soc or rate * distances[s, v] > trip.capacity:
                continue
            detour = rate * (distances[u, s] + distances[s, v])
            score = search(
                i + 1,
                trip.capacity - rate * distances[s, v],
                extra + max(0.0, detour - rate * legs[i]),
            )
            best = min(best, score)
        return best

    return search(0, trip.soc_ini, 0.0)


def replay_trace(net, trip, trace, m, params, distances=None):
    """Replay a trace leg by leg with at most m of its detours.

    The SOC is tracked as a ledger: every road and every detour leg is debited on
    departure and the battery is refilled at the station. The PEV must never leave
    a node without the SOC for the road ahead, and the SOC never drops below 0.

    Returns:
        tuple(bool, float, float):
            Whether the route is finished, the extra SOC of the detours taken and
            the SOC needed to finish the route from the strand node.
    """
    if distances is None:
        distances = simple_path_distances(net)
    rate = params.rate
    route = trip.route
    legs = [net.edge_length(u, v) for u, v in zip(route[:-1], route[1:])]
    events = list(trace.events[:m])
    soc = trip.soc_ini
    extra = 0.0
    for i, (u, v) in enumerate(zip(route[:-1], route[1:])):
        cost = rate * legs[i]
        if soc >= cost:
            soc -= cost
            assert soc >= 0
            continue
        if len(events) == 0:
            assert trace.strand_node(m) == u
            return False, extra, rate * sum(legs[i:])

        event = events.pop(0)
        assert (event.at_node, event.next_node) == (u, v)
        to_station = rate * distances[u, event.station]
        assert soc >= to_station
        soc -= to_station
        assert soc >= 0
        soc = trip.capacity
        from_station = rate * distances[event.station, v]
        assert soc >= from_station
        soc -= from_station
        assert soc >= 0
        detour = rate * (distances[u, event.station] + distances[event.station, v])
        extra += max(0.0, detour - cost)

    assert len(events) == 0
    assert trace.strand_node(m) is None
    return True, extra, 0.0
