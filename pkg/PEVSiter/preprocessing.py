"""Option processing needed before building configs and Makers.

Every option group is a plain dictionary. The functions here fill in defaults for all
keys of one group, so a single flat dictionary (for example read from a YAML file)
can carry the options of every group.
"""
from .demand import DemandConfig
from .evaluation import EvalParams
from .optimizer import GaConfig


def process_evaluation_options(d):
    """Get options to score trips.

    Args:
        d(dict):
            An input dictionary containing various options in the input file.

    Returns:
        dict:
            A dict containing evaluation options, including the following keys:
             alpha(float):
                 Weight of the detour energy of a PEV that strands.
                 Default to 1.0.
             beta(float):
                 Weight of the energy needed to finish an unfinished route.
                 Must be no less than alpha and 1. Default to 2.0.
             rate(float):
                 SOC consumed per unit distance. Default to 1.0.
             rest_mode(str):
                 How the energy of the unfinished route is counted. "literal"
                 counts the whole remaining route, "shortfall" subtracts the SOC
                 left at the strand node. Default to "literal".
    """
    return {
        "alpha": d.get("alpha", 1.0),
        "beta": d.get("beta", 2.0),
        "rate": d.get("rate", 1.0),
        "rest_mode": d.get("rest_mode", "literal"),
    }


def process_ga_options(d):
    """Get options of the genetic algorithm.

    Args:
        d(dict):
            An input dictionary containing various options in the input file.

    Returns:
        dict:
            A dict containing GA options, including the following keys:
             k(int):
                 Number of charging stations to deploy. No default.
             pop_size(int):
                 Number of chromosomes in a generation. Default to 50.
             generations(int):
                 Number of generations, the initial one included. Default to 200.
             pc(float):
                 Crossover probability of a pair of chromosomes. Default to 0.8.
             pm(float):
                 Mutation probability of a chromosome. Default to 0.1.
             window_len(int):
                 Length of the crossover window. Default to None, which
                 means max(2, round(N / 5)) on a network of N nodes.
             elitism(bool):
                 Whether the best chromosome of a generation replaces the worst
                 one of the next generation. Default to true.
             seed(int):
                 Root seed of all random streams. Default to 0.
             n_parallel(int):
                 Number of parallel workers scoring deployments. Default to None,
                 which uses all cores. Results do not depend on it.
    """
    return {
        "k": d.get("k"),
        "pop_size": d.get("pop_size", 50),
        "generations": d.get("generations", 200),
        "pc": d.get("pc", 0.8),
        "pm": d.get("pm", 0.1),
        "window_len": d.get("window_len"),
        "elitism": d.get("elitism", True),
        "seed": d.get("seed", 0),
        "n_parallel": d.get("n_parallel"),
    }


def process_demand_options(d):
    """Get options to generate OD trips.

    Args:
        d(dict):
            An input dictionary containing various options in the input file.

    Returns:
        dict:
            A dict containing demand options, including the following keys:
             trip_count(int):
                 Number of trips. Default to 100.
             pair_weights(list of dict):
                 Weights of ordered area pairs, each given as
                 {"origin": area, "destination": area, "weight": float}, with area
                 one of "residential", "commercial" or "other".
                 Default to [{"origin": "residential",
                 "destination": "commercial", "weight": 1.0}].
             default_pair_weight(float):
                 Weight of every ordered pair not listed. Default to 0.
             soc_ini_range(list of float):
                 Bounds of the initial SOC as fractions of the capacity.
                 Default to [0.2, 1.0].
             capacity(float):
                 SOC of a full battery. Default to 1.0.
             rate(float):
                 SOC consumed per unit distance. Default to 1.0.
             seed(int):
                 Root seed. Default to 0.
    """
    return {
        "trip_count": d.get("trip_count", 100),
        "pair_weights": d.get(
            "pair_weights",
            [{"origin": "residential", "destination": "commercial", "weight": 1.0}],
        ),
        "default_pair_weight": d.get("default_pair_weight", 0.0),
        "soc_ini_range": d.get("soc_ini_range", [0.2, 1.0]),
        "capacity": d.get("capacity", 1.0),
        "rate": d.get("rate", 1.0),
        "seed": d.get("seed", 0),
    }


def process_oracle_options(d):
    """Get options of the exhaustive oracle.

    Args:
        d(dict):
            An input dictionary containing various options in the input file.

    Returns:
        dict:
            A dict containing oracle options, including the following keys:
             max_candidates(int):
                 Largest number of deployments to enumerate. Default to 10**6.
             n_parallel(int):
                 Number of parallel workers. Default to None, all cores.
    """
    return {
        "max_candidates": d.get("max_candidates", 10**6),
        "n_parallel": d.get("n_parallel"),
    }


def process_network_options(d):
    """Get options to generate a synthetic grid city.

    Args:
        d(dict):
            An input dictionary containing various options in the input file.

    Returns:
        dict:
            A dict containing network options, including the following keys:
             rows(int):
                 Number of grid rows. Default to 10.
             cols(int):
                 Number of grid columns. Default to 10.
             spacing(float):
                 Nominal road length. Default to 1.0.
             jitter(float):
                 Relative random elongation of roads. Default to 0.
             cluster_fraction(float):
                 Side fraction of the grid covered by the residential and the
                 commercial block. Default to 0.3.
             seed(int):
                 Root seed. Default to 0.
    """
    return {
        "rows": d.get("rows", 10),
        "cols": d.get("cols", 10),
        "spacing": d.get("spacing", 1.0),
        "jitter": d.get("jitter", 0.0),
        "cluster_fraction": d.get("cluster_fraction", 0.3),
        "seed": d.get("seed", 0),
    }


def get_eval_params(options):
    """Build evaluation parameters from processed options."""
    return EvalParams(**process_evaluation_options(options))


def get_ga_config(options):
    """Build a GA config from processed options."""
    return GaConfig(**process_ga_options(options))


def get_demand_config(options):
    """Build a demand config from processed options."""
    return DemandConfig.from_options(process_demand_options(options))
