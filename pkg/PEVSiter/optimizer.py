"""Genetic algorithm over fixed-cardinality station deployments, and an exact oracle.

A chromosome is a 0/1 vector over network nodes with exactly k ones. Every operator
keeps the number of ones unchanged.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from warnings import warn

import numpy as np
from scipy.special import comb

from .evaluation import Deployment, DeploymentEvaluator, fitness
from .exceptions import (
    InvalidCardinalityError,
    SearchSpaceTooLargeError,
    ZeroTotalFitError,
)
from .utils.rng import (
    CROSSOVER,
    INIT_KEY,
    MUTATE,
    SELECT,
    get_generation_stream,
    get_stream,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaConfig:
    """Genetic algorithm settings.

    Attributes:
        k(int):
            Number of stations.
        pop_size(int):
            Population size.
        generations(int):
            Number of generations, the initial one included.
        pc(float):
            Crossover probability of a parent pair.
        pm(float):
            Mutation probability of a chromosome.
        window_len(int):
            Crossover window length. None means max(2, round(N / 5)).
        elitism(bool):
            Whether the best chromosome survives into the next generation.
        seed(int):
            Root seed.
        n_parallel(int):
            Number of evaluation workers. None means all cores.
    """

    k: int
    pop_size: int = 50
    generations: int = 200
    pc: float = 0.8
    pm: float = 0.1
    window_len: int = None
    elitism: bool = True
    seed: int = 0
    n_parallel: int = None

    def __post_init__(self):
        if self.k is None or self.k < 0:
            raise InvalidCardinalityError(
                f"Station count must be a non-negative integer, got {self.k}!"
            )
        if self.pop_size < 1 or self.generations < 1:
            raise ValueError("Population size and generations must be at least 1!")
        for name in ("pc", "pm"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"Probability {name} must be within [0, 1]!")
        if self.window_len is not None and self.window_len < 2:
            raise ValueError(
                f"Crossover window must be at least 2 long, got {self.window_len}!"
            )
        if self.seed < 0:
            raise ValueError(f"Seed must be non-negative, got {self.seed}!")
        if self.pop_size % 2 == 1 and self.pop_size > 1:
            warn(
                f"Odd population size {self.pop_size}: the last chromosome of every"
                f" generation is never crossed."
            )

    def resolve_window(self, num_nodes):
        """Crossover window length on a network of num_nodes nodes."""
        window_len = self.window_len or max(2, round(num_nodes / 5))
        return min(window_len, num_nodes)

    def echo(self):
        """Settings written to result files, without the worker count.

        Returns:
            dict.
        """
        return {
            "k": self.k,
            "pop_size": self.pop_size,
            "generations": self.generations,
            "pc": self.pc,
            "pm": self.pm,
            "window_len": self.window_len,
            "elitism": self.elitism,
            "seed": self.seed,
        }


@dataclass
class GaResult:
    """Outcome of a GA run.

    Attributes:
        best(Deployment):
            Best deployment ever seen.
        best_unsatisfied_soc(float):
            Its total unsatisfied SOC.
        curve(list of tuple):
            (best fit, mean fit) of every generation.
        num_evaluated(int):
            Number of distinct deployments scored.
    """

    best: Deployment
    best_unsatisfied_soc: float
    curve: list = field(default_factory=list)
    num_evaluated: int = 0

    @property
    def fit_value(self):
        """Fit value of the best deployment."""
        return fitness(self.best_unsatisfied_soc)


def _check_cardinality(num_nodes, k):
    if not 0 <= k <= num_nodes:
        raise InvalidCardinalityError(
            f"Can not place {k} stations on a network of {num_nodes} nodes!"
        )


def init_population(num_nodes, k, pop_size, rng):
    """Draw uniformly random k-subsets as chromosomes.

    Args:
        num_nodes(int):
            Chromosome length N.
        k(int):
            Number of ones.
        pop_size(int):
            Number of chromosomes.
        rng(np.random.Generator):
            Random stream.

    Returns:
        np.ndarray:
            0/1 array of shape (pop_size, N).
    """
    _check_cardinality(num_nodes, k)
    population = np.zeros((pop_size, num_nodes), dtype=np.int8)
    for row in population:
        row[rng.choice(num_nodes, size=k, replace=False)] = 1
    return population


def selection_probabilities(fits):
    """Roulette probabilities fit_i / sum(fit)."""
    fits = np.asarray(fits, dtype=float)
    total = fits.sum()
    if np.any(fits < 0) or not np.isfinite(total) or total <= 0:
        raise ZeroTotalFitError(
            "Fit values must be non-negative with a positive finite total!"
        )
    return fits / total


def roulette_wheel(fits, n_draws, rng):
    """Draw indices with replacement, proportionally to fit values.

    Returns:
        np.ndarray of int.
    """
    p = selection_probabilities(fits)
    return rng.choice(len(p), size=n_draws, p=p)


def select(population, fits, rng):
    """Roulette-wheel selection of a whole new population.

    Args:
        population(np.ndarray):
            Current chromosomes.
        fits(np.ndarray):
            Fit value of every chromosome.
        rng(np.random.Generator):
            Random stream.

    Returns:
        np.ndarray:
            Selected chromosomes, as copies.
    """
    return population[roulette_wheel(fits, len(population), rng)].copy()


def _window(start, window_len, num_nodes):
    return (start + np.arange(window_len)) % num_nodes


def find_crossover_window(a, b, window_len, offset=0):
    """Find the first cyclic window where two parents hold the same number of ones.

    Args:
        a(np.ndarray):
            First parent.
        b(np.ndarray):
            Second parent.
        window_len(int):
            Window length, clipped to the chromosome length.
        offset(int): optional
            Start position of the scan. Default to 0.

    Returns:
        int or None:
            Start position of the window, None if no window matches.
    """
    n = len(a)
    window_len = min(window_len, n)
    for t in range(n):
        start = (offset + t) % n
        idx = _window(start, window_len, n)
        if a[idx].sum() == b[idx].sum():
            return start
    return None


def swap_window(a, b, start, window_len):
    """Exchange a cyclic window between two chromosomes.

    Returns:
        tuple(np.ndarray, np.ndarray):
            The two children.
    """
    idx = _window(start, min(window_len, len(a)), len(a))
    child_a = a.copy()
    child_b = b.copy()
    child_a[idx] = b[idx]
    child_b[idx] = a[idx]
    return child_a, child_b


def crossover(a, b, pc, window_len, rng):
    """Window crossover of a parent pair.

    With probability pc, windows are scanned from a random offset and the first one
    where both parents hold equally many ones is swapped.

    Args:
        a(np.ndarray):
            First parent.
        b(np.ndarray):
            Second parent.
        pc(float):
            Crossover probability.
        window_len(int):
            Window length.
        rng(np.random.Generator):
            Random stream.

    Returns:
        tuple(np.ndarray, np.ndarray):
            The two children.
    """
    if rng.random() >= pc:
        return a.copy(), b.copy()
    start = find_crossover_window(a, b, window_len, int(rng.integers(len(a))))
    if start is None:
        return a.copy(), b.copy()
    return swap_window(a, b, start, window_len)


def mutate(chromosome, pm, rng):
    """Swap a random station node with a random empty node, with probability pm.

    Returns:
        np.ndarray.
    """
    child = chromosome.copy()
    if rng.random() >= pm:
        return child
    ones = np.flatnonzero(child == 1)
    zeros = np.flatnonzero(child == 0)
    if len(ones) == 0 or len(zeros) == 0:
        return child
    i = rng.choice(ones)
    j = rng.choice(zeros)
    child[i], child[j] = 0, 1
    return child


def breed(population, fits, generation, cfg, window_len):
    """Make the offspring of one generation.

    Selection, crossover of adjacent pairs (2i, 2i + 1) and mutation each draw from
    their own stream of the generation.

    Returns:
        np.ndarray.
    """
    offspring = select(
        population, fits, get_generation_stream(cfg.seed, generation, SELECT)
    )
    cx_rng = get_generation_stream(cfg.seed, generation, CROSSOVER)
    for i in range(0, len(offspring) - 1, 2):
        offspring[i], offspring[i + 1] = crossover(
            offspring[i], offspring[i + 1], cfg.pc, window_len, cx_rng
        )
    mut_rng = get_generation_stream(cfg.seed, generation, MUTATE)
    for i in range(len(offspring)):
        offspring[i] = mutate(offspring[i], cfg.pm, mut_rng)
    return offspring


def run_ga(net, trips, params, cfg, evaluator=None):
    """Search for the deployment of k stations with the least unsatisfied SOC.

    Args:
        net(Network):
            The road network.
        trips(list of Trip):
            Trips to serve.
        params(EvalParams):
            Evaluation parameters.
        cfg(GaConfig):
            GA settings.
        evaluator(DeploymentEvaluator): optional
            Evaluator to reuse. By default a new one is created.

    Returns:
        GaResult.
    """
    n = net.num_nodes
    _check_cardinality(n, cfg.k)
    evaluator = evaluator or DeploymentEvaluator(net, trips, params, cfg.n_parallel)
    window_len = cfg.resolve_window(n)

    population = init_population(
        n, cfg.k, cfg.pop_size, get_stream(cfg.seed, *INIT_KEY)
    )
    scores = evaluator.score_population(population)
    best_bits, best_u = None, np.inf
    curve = []
    for generation in range(cfg.generations):
        fits = fitness(scores)
        i_best = int(np.argmin(scores))
        if scores[i_best] < best_u:
            best_u = float(scores[i_best])
            best_bits = population[i_best].copy()
        curve.append((float(fits.max()), float(fits.mean())))
        log.debug(
            f"Generation {generation}: best fit {curve[-1][0]:.6f},"
            f" mean fit {curve[-1][1]:.6f}."
        )
        if generation == cfg.generations - 1:
            break

        offspring = breed(population, fits, generation, cfg, window_len)
        offspring_scores = evaluator.score_population(offspring)
        if cfg.elitism:
            worst = int(np.argmax(offspring_scores))
            if scores[i_best] < offspring_scores[worst]:
                offspring[worst] = population[i_best]
                offspring_scores[worst] = scores[i_best]
        population, scores = offspring, offspring_scores

    log.info(
        f"GA finished {cfg.generations} generations, best unsatisfied SOC"
        f" {best_u}, {evaluator.num_evaluated} deployments evaluated."
    )
    return GaResult(
        best=Deployment.from_chromosome(best_bits),
        best_unsatisfied_soc=best_u,
        curve=curve,
        num_evaluated=evaluator.num_evaluated,
    )


def count_candidates(num_nodes, k):
    """Number of deployments C(N, k)."""
    return int(comb(num_nodes, k, exact=True))


def brute_force(
    net, trips, k, params, max_candidates=10**6, n_parallel=1, evaluator=None
):
    """Find the exact optimum by enumerating every k-subset.

    Args:
        net(Network):
            The road network.
        trips(list of Trip):
            Trips to serve.
        k(int):
            Number of stations.
        params(EvalParams):
            Evaluation parameters.
        max_candidates(int): optional
            Largest number of deployments to enumerate. Default to 10**6.
        n_parallel(int): optional
            Number of evaluation workers. Default to 1.
        evaluator(DeploymentEvaluator): optional
            Evaluator to reuse.

    Returns:
        tuple(Deployment, float):
            The lexicographically first optimal deployment and its total
            unsatisfied SOC.
    """
    n = net.num_nodes
    _check_cardinality(n, k)
    num_candidates = count_candidates(n, k)
    if num_candidates > max_candidates:
        raise SearchSpaceTooLargeError(num_candidates, max_candidates)
    evaluator = evaluator or DeploymentEvaluator(net, trips, params, n_parallel)

    log.info(f"Enumerating {num_candidates} deployments of {k} stations.")
    candidates = list(combinations(range(n), k))
    scores = evaluator.score_many(candidates)
    i_best = int(np.argmin(scores))
    return Deployment(candidates[i_best], n), float(scores[i_best])
