"""Road networks: construction, incidence matrices and shortest paths.

Node ids are 0-based and contiguous in memory; files store them 1-based.
Roads are undirected, with one road at most between two nodes.
"""

import heapq
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import networkx as nx
import numpy as np
import pandas as pd
from monty.json import MSONable

from .exceptions import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    LengthCountMismatchError,
    MalformedColumnError,
    NetworkError,
    NonPositiveLengthError,
    SelfLoopError,
    UnknownNodeError,
)
from .schema import EdgeRecord, NetworkRecord, NodeRecord
from .utils.rng import NETWORK_KEY, get_stream

log = logging.getLogger(__name__)


class Area(str, Enum):
    """Land-use class of a node."""

    RESIDENTIAL = "residential"
    COMMERCIAL = "commercial"
    OTHER = "other"


@dataclass(frozen=True)
class Node:
    """A road node.

    Attributes:
        id(int):
            0-based node index.
        area(Area):
            Land-use class of the node.
        coord(tuple of float): optional
            Layout position, only used for exports.
    """

    id: int
    area: Area = Area.OTHER
    coord: tuple = None


@dataclass(frozen=True)
class Edge:
    """An undirected road between nodes a and b."""

    a: int
    b: int
    length: float

    @property
    def endpoints(self):
        """Sorted node pair."""
        return min(self.a, self.b), max(self.a, self.b)


@dataclass(frozen=True)
class PathResult:
    """A shortest path and its length."""

    distance: float
    route: tuple


class Network(MSONable):
    """Undirected weighted road network.

    A network is validated on construction and never modified afterwards, so the
    adjacency lists and the all-pairs distance table can be shared freely.
    """

    def __init__(self, nodes, edges):
        """Initialize.

        Args:
            nodes(list of Node):
                Nodes with ids exactly 0..N-1 in order.
            edges(list of Edge):
                Roads between existing nodes.
        """
        self.nodes = tuple(nodes)
        self.edges = tuple(edges)
        self._lengths = {}
        self._validate()

        adjacency = [[] for _ in self.nodes]
        for e in self.edges:
            adjacency[e.a].append((e.b, e.length))
            adjacency[e.b].append((e.a, e.length))
        self.adjacency = tuple(tuple(sorted(neighbors)) for neighbors in adjacency)
        self._distances = None

    def _validate(self):
        if len(self.nodes) == 0:
            raise NetworkError("A network needs at least one node!")
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise NetworkError(
                    f"Node ids must be contiguous from 0, got id {node.id}"
                    f" at position {i}!"
                )
        n = len(self.nodes)
        for e in self.edges:
            for end in (e.a, e.b):
                if not 0 <= end < n:
                    raise UnknownNodeError(f"Road {e} refers to unknown node {end}!")
            if e.a == e.b:
                raise SelfLoopError(f"Road {e} is a self-loop!")
            if not (math.isfinite(e.length) and e.length > 0):
                raise NonPositiveLengthError(f"Road {e} must have a positive length!")
            if e.endpoints in self._lengths:
                raise DuplicateEdgeError(
                    f"More than one road between nodes {e.a} and {e.b}!"
                )
            self._lengths[e.endpoints] = float(e.length)

        if n > 1 and not nx.is_connected(self.to_networkx()):
            n_comps = nx.number_connected_components(self.to_networkx())
            raise DisconnectedGraphError(
                f"Road network has {n_comps} connected components!"
            )

    @property
    def num_nodes(self):
        """Number of nodes."""
        return len(self.nodes)

    @property
    def num_edges(self):
        """Number of roads."""
        return len(self.edges)

    @property
    def degrees(self):
        """Number of roads touching each node.

        Returns:
            np.ndarray of int.
        """
        return np.array([len(neighbors) for neighbors in self.adjacency], dtype=int)

    @property
    def distances(self):
        """All-pairs shortest distance table, computed once.

        Returns:
            np.ndarray:
                Read-only N*N array.
        """
        if self._distances is None:
            self._distances = all_pairs_distances(self)
        return self._distances

    def has_node(self, u):
        """Whether u is a valid node id."""
        return isinstance(u, (int, np.integer)) and 0 <= u < self.num_nodes

    def check_node(self, u):
        """Raise UnknownNodeError if u is not a node id."""
        if not self.has_node(u):
            raise UnknownNodeError(
                f"Node {u} is not in the network of {self.num_nodes} nodes!"
            )

    def has_edge(self, u, v):
        """Whether a road joins u and v."""
        return (min(u, v), max(u, v)) in self._lengths

    def edge_length(self, u, v):
        """Length of the road joining u and v.

        Raises:
            KeyError: if no such road exists.
        """
        return self._lengths[(min(u, v), max(u, v))]

    def nodes_in_area(self, area):
        """Ids of all nodes in a land-use class.

        Args:
            area(Area or str):
                The land-use class.

        Returns:
            list of int.
        """
        area = Area(area)
        return [node.id for node in self.nodes if node.area == area]

    def to_networkx(self):
        """Convert to a networkx graph with "length" edge attributes.

        Returns:
            nx.Graph.
        """
        graph = nx.Graph()
        for node in self.nodes:
            graph.add_node(node.id, area=node.area.value)
        for e in self.edges:
            graph.add_edge(e.a, e.b, length=e.length)
        return graph

    def as_dict(self):
        """Serialize into a dictionary.

        Returns:
            dict.
        """
        return {
            "@module": self.__class__.__module__,
            "@class": self.__class__.__name__,
            "nodes": [
                [
                    node.id,
                    node.area.value,
                    None if node.coord is None else list(node.coord),
                ]
                for node in self.nodes
            ],
            "edges": [[e.a, e.b, e.length] for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d):
        """Load from a dictionary.

        Args:
            d(dict):
                Serialized network.

        Returns:
            Network.
        """
        nodes = [
            Node(i, Area(area), None if coord is None else tuple(coord))
            for i, area, coord in d["nodes"]
        ]
        edges = [Edge(int(a), int(b), float(length)) for a, b, length in d["edges"]]
        return cls(nodes, edges)


def build_network(nodes, edges):
    """Build a validated network.

    Args:
        nodes(list of Node or int):
            Nodes, either as :class:`Node` or bare ids (area "other").
        edges(list of Edge or tuple):
            Roads, either as :class:`Edge` or (a, b, length) tuples.

    Returns:
        Network:
            A connected network with adjacency lists built.
    """
    nodes = [node if isinstance(node, Node) else Node(int(node)) for node in nodes]
    edges = [
        e if isinstance(e, Edge) else Edge(int(e[0]), int(e[1]), float(e[2]))
        for e in edges
    ]
    return Network(nodes, edges)


def from_incidence(matrix, lengths, areas=None, coords=None):
    """Build a network from a road-node incidence matrix.

    Args:
        matrix(2D ArrayLike of int):
            N*E matrix with a 1 where road j touches node i.
        lengths(1D ArrayLike of float):
            Length of every road, aligned with the columns.
        areas(list of Area or str): optional
            Land-use class of every node. Default to "other" everywhere.
        coords(list of tuple): optional
            Layout position of every node.

    Returns:
        Network.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise MalformedColumnError("Incidence matrix must be 2-dimensional!")
    if not np.all(np.isin(matrix, (0, 1))):
        raise MalformedColumnError("Incidence matrix may only contain 0s and 1s!")
    n_nodes, n_roads = matrix.shape
    col_sums = matrix.sum(axis=0)
    bad_cols = np.flatnonzero(col_sums != 2)
    if len(bad_cols) > 0:
        j = bad_cols[0]
        raise MalformedColumnError(
            f"Road column {j + 1} has {col_sums[j]} nodes instead of 2!"
        )

    lengths = np.asarray(lengths, dtype=float).ravel()
    if len(lengths) != n_roads:
        raise LengthCountMismatchError(
            f"Got {len(lengths)} road lengths for {n_roads} incidence columns!"
        )

    areas = areas or [Area.OTHER] * n_nodes
    coords = coords or [None] * n_nodes
    nodes = [Node(i, Area(areas[i]), coords[i]) for i in range(n_nodes)]
    edges = []
    for j in range(n_roads):
        a, b = np.flatnonzero(matrix[:, j])
        edges.append(Edge(int(a), int(b), float(lengths[j])))
    return Network(nodes, edges)


def to_incidence(net):
    """Road-node incidence matrix of a network.

    Args:
        net(Network):
            The road network.

    Returns:
        np.ndarray:
            N*E 0/1 matrix, columns in road order.
    """
    matrix = np.zeros((net.num_nodes, net.num_edges), dtype=int)
    for j, e in enumerate(net.edges):
        matrix[e.a, j] = 1
        matrix[e.b, j] = 1
    return matrix


def _dijkstra(net, source, target=None):
    """Single-source Dijkstra keeping the lowest-id predecessor among ties."""
    n = net.num_nodes
    dist = [math.inf] * n
    pred = [-1] * n
    done = [False] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == target:
            break
        for v, length in net.adjacency[u]:
            if done[v]:
                continue
            nd = d + length
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and u < pred[v]:
                pred[v] = u
    return dist, pred


def shortest_path(net, u, v):
    """Minimal-distance path between two nodes.

    Among predecessors reaching a node at equal distance, the one with the
    lowest id is kept, so routes are reproducible.

    Args:
        net(Network):
            The road network.
        u(int):
            Source node id.
        v(int):
            Target node id.

    Returns:
        PathResult.
    """
    net.check_node(u)
    net.check_node(v)
    if u == v:
        return PathResult(0.0, (u,))

    dist, pred = _dijkstra(net, u, target=v)
    route = [v]
    while route[-1] != u:
        route.append(pred[route[-1]])
    # Distances are always measured from the lower id so both directions agree.
    distance = dist[v] if u < v else _dijkstra(net, v, target=u)[0][u]
    return PathResult(distance, tuple(reversed(route)))


def all_pairs_distances(net):
    """Shortest distances between all node pairs.

    Row i is filled from a Dijkstra run out of node i for every j > i and mirrored,
    so table[u, v] equals shortest_path(net, u, v).distance exactly.

    Args:
        net(Network):
            The road network.

    Returns:
        np.ndarray:
            Symmetric, read-only N*N table with a zero diagonal.
    """
    n = net.num_nodes
    table = np.zeros((n, n))
    for i in range(n - 1):
        dist, _ = _dijkstra(net, i)
        table[i, i + 1 :] = dist[i + 1 :]
        table[i + 1 :, i] = dist[i + 1 :]
    table.setflags(write=False)
    return table


def network_from_record(record):
    """Convert a file record (1-based ids) into a network.

    Args:
        record(NetworkRecord):
            Validated file content.

    Returns:
        Network.
    """
    ids = sorted(node.id for node in record.nodes)
    if ids != list(range(1, len(ids) + 1)):
        raise NetworkError("Node ids in a network file must be exactly 1..N!")
    by_id = {node.id: node for node in record.nodes}
    nodes = []
    for i in ids:
        node = by_id[i]
        coord = None if node.x is None or node.y is None else (node.x, node.y)
        nodes.append(Node(i - 1, Area(node.area), coord))
    edges = [Edge(e.a - 1, e.b - 1, e.length) for e in record.edges]
    return Network(nodes, edges)


def network_to_record(net):
    """Convert a network into a file record with 1-based ids.

    Args:
        net(Network):
            The road network.

    Returns:
        NetworkRecord.
    """
    nodes = [
        NodeRecord(
            id=node.id + 1,
            area=node.area.value,
            x=None if node.coord is None else node.coord[0],
            y=None if node.coord is None else node.coord[1],
        )
        for node in net.nodes
    ]
    edges = [EdgeRecord(a=e.a + 1, b=e.b + 1, length=e.length) for e in net.edges]
    return NetworkRecord(nodes=nodes, edges=edges)


def _default_lengths_path(path):
    path = Path(path)
    return path.with_name(path.stem + "_lengths.csv")


def load_network(path, lengths_path=None):
    """Load a network from a JSON file or an incidence CSV file.

    Args:
        path(str or Path):
            A ".json" network file, or a ".csv" incidence matrix with a header row
            of road ids and one row per node.
        lengths_path(str or Path): optional
            Companion CSV with columns "road" and "length". Default to
            "<stem>_lengths.csv" next to the incidence file.

    Returns:
        Network.
    """
    path = Path(path)
    log.info(f"Loading road network from {path}.")
    if path.suffix.lower() == ".json":
        record = NetworkRecord.model_validate_json(path.read_text())
        return network_from_record(record)

    incidence = pd.read_csv(path, index_col=0)
    lengths_path = Path(lengths_path or _default_lengths_path(path))
    lengths = pd.read_csv(lengths_path, float_precision="round_trip")
    lengths = lengths.set_index("road")["length"]
    roads = [int(r) for r in incidence.columns]
    if sorted(roads) != sorted(int(r) for r in lengths.index) or len(
        set(roads)
    ) != len(roads):
        raise LengthCountMismatchError(
            f"Roads in {lengths_path} do not match the incidence columns of {path}!"
        )
    lengths.index = [int(r) for r in lengths.index]
    return from_incidence(incidence.to_numpy(), lengths.loc[roads].to_numpy())


def save_network(net, path, lengths_path=None):
    """Save a network as JSON or as incidence and lengths CSV files.

    Args:
        net(Network):
            The road network.
        path(str or Path):
            Target file; the suffix ".json" selects JSON, anything else CSV.
        lengths_path(str or Path): optional
            Lengths CSV for the incidence format.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(network_to_record(net).model_dump_json(indent=2) + "\n")
        return

    roads = list(range(1, net.num_edges + 1))
    incidence = pd.DataFrame(
        to_incidence(net),
        index=pd.Index(range(1, net.num_nodes + 1), name="node"),
        columns=roads,
    )
    incidence.to_csv(path)
    lengths = pd.DataFrame({"road": roads, "length": [e.length for e in net.edges]})
    lengths.to_csv(lengths_path or _default_lengths_path(path), index=False)


def generate_grid_network(
    rows, cols, spacing=1.0, jitter=0.0, cluster_fraction=0.3, seed=0
):
    """Generate a synthetic grid city with clustered land use.

    Residential nodes fill the block in the upper-left corner, commercial nodes the
    block in the lower-right corner and all remaining nodes are "other".

    Args:
        rows(int):
            Number of grid rows.
        cols(int):
            Number of grid columns.
        spacing(float): optional
            Nominal road length. Default to 1.
        jitter(float): optional
            Every road length is spacing * (1 + U(0, jitter)). Default to 0.
        cluster_fraction(float): optional
            Side fraction of the grid covered by each cluster block. Default to 0.3.
        seed(int): optional
            Seed of the length jitter. Default to 0.

    Returns:
        Network.
    """
    if rows < 1 or cols < 1:
        raise NetworkError("A grid needs at least one row and one column!")
    if spacing <= 0 or jitter < 0:
        raise NetworkError("Grid spacing must be positive and jitter non-negative!")
    if not 0 <= cluster_fraction <= 0.5:
        raise NetworkError("Cluster fraction must be within [0, 0.5]!")

    rng = get_stream(seed, *NETWORK_KEY)
    block_rows = max(1, math.ceil(rows * cluster_fraction))
    block_cols = max(1, math.ceil(cols * cluster_fraction))

    def area_of(r, c):
        if r < block_rows and c < block_cols:
            return Area.RESIDENTIAL
        if r >= rows - block_rows and c >= cols - block_cols:
            return Area.COMMERCIAL
        return Area.OTHER

    nodes = [
        Node(r * cols + c, area_of(r, c), (c * spacing, r * spacing))
        for r in range(rows)
        for c in range(cols)
    ]
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append(Edge(i, i + 1, spacing * (1 + rng.uniform(0, jitter))))
            if r + 1 < rows:
                edges.append(
                    Edge(i, i + cols, spacing * (1 + rng.uniform(0, jitter)))
                )
    log.info(f"Generated a {rows}*{cols} grid network with {len(edges)} roads.")
    return Network(nodes, edges)
