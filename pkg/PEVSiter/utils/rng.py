"""Seeded random streams.

All randomness is drawn from PCG64 generators keyed by a root seed and a spawn key,
so any stream can be rebuilt independently of the order other streams were used in.

Keys used by the package:

#. ``(0,)``: initial GA population.
#. ``(1, g, 0)``, ``(1, g, 1)``, ``(1, g, 2)``: selection, crossover and mutation of
   GA generation g.
#. ``(2,)``: trip generation.
#. ``(3,)``: synthetic network generation.
"""
import numpy as np

INIT_KEY = (0,)
DEMAND_KEY = (2,)
NETWORK_KEY = (3,)
SELECT, CROSSOVER, MUTATE = 0, 1, 2


def get_stream(seed, *key):
    """Get a random generator for a seed and a spawn key.

    Args:
        seed(int):
            Non-negative root seed (up to 64 bits).
        *key(int):
            Spawn key of the stream.

    Returns:
        np.random.Generator:
            A PCG64 generator.
    """
    if seed < 0:
        raise ValueError(f"Seed must be non-negative, got {seed}!")
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))


def get_generation_stream(seed, generation, phase):
    """Get the stream of one phase of a GA generation.

    Args:
        seed(int):
            Root seed.
        generation(int):
            Generation index, counting from 0.
        phase(int):
            One of SELECT, CROSSOVER or MUTATE.

    Returns:
        np.random.Generator.
    """
    return get_stream(seed, 1, generation, phase)
