"""Plot-ready exports: DOT networks and fitness curves."""
import pandas as pd

_area_colors = {
    "residential": "lightblue",
    "commercial": "orange",
    "other": "white",
}
_curve_columns = ["generation", "best_fit", "mean_fit"]


def to_dot(net, stations=()):
    """Write a network as an undirected DOT graph.

    Nodes are labelled with 1-based ids and carry their area class and whether they
    host a station. Station nodes are drawn filled and doubled.

    Args:
        net(Network):
            The road network.
        stations(Sequence of int): optional
            0-based station node ids. Default to none.

    Returns:
        str:
            DOT source.
    """
    stations = set(int(s) for s in stations)
    dot = "graph network {\n"
    dot += "    node [shape=circle];\n"
    for node in net.nodes:
        area = node.area.value
        attrs = [
            f'label="{node.id + 1}"',
            f'area="{area}"',
            f'station="{"true" if node.id in stations else "false"}"',
        ]
        if node.coord is not None:
            attrs.append(f'pos="{node.coord[0]:g},{node.coord[1]:g}!"')
        if node.id in stations:
            attrs.append('style=filled fillcolor="green" shape=doublecircle')
        else:
            attrs.append(f'style=filled fillcolor="{_area_colors[area]}"')
        dot += f"    {node.id + 1} [{' '.join(attrs)}];\n"
    for e in net.edges:
        dot += f'    {e.a + 1} -- {e.b + 1} [label="{e.length:g}"];\n'
    dot += "}\n"
    return dot


def curve_to_frame(curve):
    """Tabulate a fitness curve.

    Args:
        curve(list of tuple):
            (best fit, mean fit) of every generation.

    Returns:
        pd.DataFrame.
    """
    return pd.DataFrame(
        [(g, best, mean) for g, (best, mean) in enumerate(curve)],
        columns=_curve_columns,
    )


def write_curve_csv(curve, path):
    """Save a fitness curve with columns generation, best_fit and mean_fit."""
    curve_to_frame(curve).to_csv(path, index=False)


def read_curve_csv(path):
    """Load a fitness curve saved by :func:`write_curve_csv`.

    Returns:
        list of tuple.
    """
    table = pd.read_csv(path, float_precision="round_trip")
    return list(zip(table["best_fit"].tolist(), table["mean_fit"].tolist()))
