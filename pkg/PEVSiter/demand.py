"""Origin-destination trip samples between land-use clusters."""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd
from monty.json import MSONable
from pydantic import TypeAdapter, ValidationError

from .exceptions import (
    DemandError,
    EmptyAreaClassError,
    RouteNotConnectedError,
    SchemaError,
    SocOutOfRangeError,
)
from .network import Area, shortest_path
from .schema import TripRecord
from .utils.rng import DEMAND_KEY, get_stream

log = logging.getLogger(__name__)

_trip_records = TypeAdapter(List[TripRecord])
_csv_columns = ["origin", "destination", "route", "soc_ini", "capacity"]


@dataclass(frozen=True)
class Trip(MSONable):
    """One PEV journey along a fixed route.

    Attributes:
        origin(int):
            0-based origin node id.
        destination(int):
            0-based destination node id.
        route(tuple of int):
            Nodes visited from origin to destination.
        soc_ini(float):
            SOC at the origin, in (0, capacity].
        capacity(float):
            SOC of a full battery.
    """

    origin: int
    destination: int
    route: tuple
    soc_ini: float
    capacity: float

    def __post_init__(self):
        object.__setattr__(self, "route", tuple(int(u) for u in self.route))
        if len(self.route) == 0:
            raise RouteNotConnectedError("A trip route can not be empty!")
        if self.route[0] != self.origin or self.route[-1] != self.destination:
            raise RouteNotConnectedError(
                f"Route {self.route} must start at {self.origin}"
                f" and end at {self.destination}!"
            )
        if not self.capacity > 0:
            raise SocOutOfRangeError(
                f"Battery capacity must be positive, got {self.capacity}!"
            )
        if not 0 < self.soc_ini <= self.capacity:
            raise SocOutOfRangeError(
                f"Initial SOC {self.soc_ini} is not within (0, {self.capacity}]!"
            )


@dataclass(frozen=True)
class DemandConfig:
    """Settings of trip generation.

    Attributes:
        trip_count(int):
            Number of trips to generate.
        pair_weights(dict):
            Sampling weight of every ordered (origin area, destination area) pair.
        soc_ini_range(tuple of float):
            Initial SOC bounds as fractions of the capacity.
        capacity(float):
            SOC of a full battery, shared by all trips.
        rate(float):
            SOC consumed per unit distance.
        seed(int):
            Root seed.
    """

    trip_count: int
    pair_weights: dict
    soc_ini_range: tuple = (0.2, 1.0)
    capacity: float = 1.0
    rate: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.trip_count < 0:
            raise DemandError(f"Trip count must be non-negative: {self.trip_count}!")
        weights = {}
        for (o_area, d_area), w in self.pair_weights.items():
            if w < 0:
                raise DemandError(f"Pair weight of {o_area}->{d_area} is negative!")
            weights[(Area(o_area), Area(d_area))] = float(w)
        if sum(weights.values()) <= 0:
            raise DemandError("Area pair weights can not all be zero!")
        object.__setattr__(self, "pair_weights", weights)

        lo, hi = self.soc_ini_range
        if not 0 < lo <= hi <= 1:
            raise DemandError(
                f"Initial SOC range {self.soc_ini_range} must satisfy"
                f" 0 < lo <= hi <= 1!"
            )
        object.__setattr__(self, "soc_ini_range", (float(lo), float(hi)))
        if not self.capacity > 0 or not self.rate > 0:
            raise DemandError("Battery capacity and energy rate must be positive!")

    @classmethod
    def from_options(cls, options):
        """Build from processed demand options.

        Args:
            options(dict):
                Output of :func:`PEVSiter.preprocessing.process_demand_options`.

        Returns:
            DemandConfig.
        """
        weights = {(o, d): options["default_pair_weight"] for o in Area for d in Area}
        for entry in options["pair_weights"]:
            weights[(Area(entry["origin"]), Area(entry["destination"]))] = entry[
                "weight"
            ]
        return cls(
            trip_count=options["trip_count"],
            pair_weights=weights,
            soc_ini_range=tuple(options["soc_ini_range"]),
            capacity=options["capacity"],
            rate=options["rate"],
            seed=options["seed"],
        )


def _weighted_pairs(net, cfg):
    """Ordered area pairs with positive weights, checked against the network."""
    pairs = []
    weights = []
    for o_area in Area:
        for d_area in Area:
            w = cfg.pair_weights.get((o_area, d_area), 0.0)
            if w <= 0:
                continue
            for area in (o_area, d_area):
                if len(net.nodes_in_area(area)) == 0:
                    raise EmptyAreaClassError(
                        f"Area {area.value} is weighted but has no nodes!"
                    )
            if o_area == d_area and len(net.nodes_in_area(o_area)) < 2:
                raise EmptyAreaClassError(
                    f"Trips within area {o_area.value} need at least two nodes!"
                )
            pairs.append((o_area, d_area))
            weights.append(w)
    weights = np.array(weights)
    return pairs, weights / weights.sum()


def generate_trips(net, cfg):
    """Generate seeded OD trips between area clusters.

    An area pair is drawn proportionally to its weight, then an origin and a distinct
    destination uniformly inside the two areas. Routes are shortest paths. The initial
    SOC is uniform in the configured range and raised to the cost of the first road if
    it falls below, since a rational driver would not depart otherwise.

    Args:
        net(Network):
            The road network.
        cfg(DemandConfig):
            Generation settings.

    Returns:
        list of Trip.
    """
    if net.num_nodes < 2:
        raise DemandError("Trips need a network with at least two nodes!")
    pairs, probs = _weighted_pairs(net, cfg)
    members = {area: np.array(net.nodes_in_area(area), dtype=int) for area in Area}
    lo, hi = cfg.soc_ini_range
    rng = get_stream(cfg.seed, *DEMAND_KEY)

    routes = {}
    trips = []
    for _ in range(cfg.trip_count):
        o_area, d_area = pairs[rng.choice(len(pairs), p=probs)]
        origin = int(rng.choice(members[o_area]))
        candidates = members[d_area][members[d_area] != origin]
        destination = int(rng.choice(candidates))
        if (origin, destination) not in routes:
            routes[(origin, destination)] = shortest_path(net, origin, destination).route
        route = routes[(origin, destination)]

        first_leg = cfg.rate * net.edge_length(route[0], route[1])
        if first_leg > cfg.capacity:
            raise DemandError(
                f"A full battery can not cover the road {route[0] + 1}-{route[1] + 1}!"
            )
        soc_ini = float(rng.uniform(lo * cfg.capacity, hi * cfg.capacity))
        trips.append(
            Trip(origin, destination, route, max(soc_ini, first_leg), cfg.capacity)
        )
    log.info(f"Generated {len(trips)} trips over {len(routes)} distinct OD pairs.")
    return trips


def count_area_pairs(net, trips):
    """Count trips per ordered (origin area, destination area) pair.

    Args:
        net(Network):
            The road network.
        trips(list of Trip):
            The trips.

    Returns:
        dict:
            Counts keyed by (origin area name, destination area name), every
            ordered pair present.
    """
    counts = {(o.value, d.value): 0 for o in Area for d in Area}
    for trip in trips:
        o_area = net.nodes[trip.origin].area.value
        d_area = net.nodes[trip.destination].area.value
        counts[(o_area, d_area)] += 1
    return counts


def validate_trip(net, trip):
    """Check that a trip follows roads of a network.

    Args:
        net(Network):
            The road network.
        trip(Trip):
            The trip to check.
    """
    for u in trip.route:
        if not net.has_node(u):
            raise RouteNotConnectedError(f"Route node {u + 1} is not in the network!")
    for u, v in zip(trip.route[:-1], trip.route[1:]):
        if not net.has_edge(u, v):
            raise RouteNotConnectedError(f"No road joins nodes {u + 1} and {v + 1}!")


def trip_from_record(record):
    """Convert a 1-based file record into a trip."""
    return Trip(
        origin=record.origin - 1,
        destination=record.destination - 1,
        route=[u - 1 for u in record.route],
        soc_ini=record.soc_ini,
        capacity=record.capacity,
    )


def trip_to_record(trip):
    """Convert a trip into a 1-based file record."""
    return TripRecord(
        origin=trip.origin + 1,
        destination=trip.destination + 1,
        route=[u + 1 for u in trip.route],
        soc_ini=trip.soc_ini,
        capacity=trip.capacity,
    )


def _read_csv_records(path):
    table = pd.read_csv(path, dtype={"route": str}, float_precision="round_trip")
    if list(table.columns) != _csv_columns:
        raise SchemaError(
            f"Trips CSV columns must be {_csv_columns}, got {list(table.columns)}!"
        )
    records = []
    for row in table.itertuples(index=False):
        try:
            route = [int(u) for u in str(row.route).split("-")]
        except ValueError as e:
            raise SchemaError(f"Malformed route {row.route} in {path}!") from e
        records.append(
            TripRecord(
                origin=int(row.origin),
                destination=int(row.destination),
                route=route,
                soc_ini=float(row.soc_ini),
                capacity=float(row.capacity),
            )
        )
    return records


def parse_trips(path, net=None):
    """Read trips from a JSON or CSV file.

    Args:
        path(str or Path):
            A ".json" array of trip records or a ".csv" table with columns origin,
            destination, route ("-"-joined ids), soc_ini and capacity.
        net(Network): optional
            If given, every route is checked against its roads.

    Returns:
        list of Trip.
    """
    path = Path(path)
    log.info(f"Loading trips from {path}.")
    try:
        if path.suffix.lower() == ".csv":
            if path.stat().st_size == 0:
                return []
            records = _read_csv_records(path)
        else:
            records = _trip_records.validate_json(path.read_bytes())
    except ValidationError as e:
        raise SchemaError(f"Invalid trips file {path}:\n{e}") from e

    trips = [trip_from_record(record) for record in records]
    if net is not None:
        for trip in trips:
            validate_trip(net, trip)
    return trips


def save_trips(trips, path):
    """Write trips to a JSON or CSV file chosen by suffix.

    Args:
        trips(list of Trip):
            Trips to save.
        path(str or Path):
            Target file.
    """
    path = Path(path)
    records = [trip_to_record(trip) for trip in trips]
    if path.suffix.lower() == ".csv":
        table = pd.DataFrame(
            [
                [
                    r.origin,
                    r.destination,
                    "-".join(str(u) for u in r.route),
                    r.soc_ini,
                    r.capacity,
                ]
                for r in records
            ],
            columns=_csv_columns,
        )
        table.to_csv(path, index=False)
    else:
        path.write_bytes(_trip_records.dump_json(records, indent=2) + b"\n")
