"""Cooperative coevolution of node orderings and edge bitstrings.

Two subpopulations evolve side by side: permutations of the nodes and
binary connectivity vectors. A member's fitness is the score of the best
complete solution it forms with collaborators from the other subpopulation
(the recorded best plus one uniformly random member; the higher assembled
score is credited). At generation 0 no best exists yet, so only a random
collaborator is used.

Each generation runs selection, crossover, mutation, evaluation, and
elitist replacement for the permutation species and then for the binary
species. Runs are deterministic given the seed; parallel evaluation may
reorder cache population but never changes a fitness value.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bayesnet import Dataset
from .encoding import (
    BinaryGenome,
    PermutationGenome,
    decode_parents,
    triangular_index,
    triangular_size,
)
from .errors import EmptyDataError, EngineError, ValidationError
from .scoring import LocalScoreCache, PriorSpec, score_parent_sets

PERMUTATION = "permutation"
BINARY = "binary"


@dataclass
class GaConfig:
    """Engine parameters. p_mb=None means one expected bit flip per genome
    (1/E with E = n(n-1)/2, resolved once the node count is known)."""

    generations: int = 250
    population_size: int = 100
    p_c: float = 0.6
    p_mb: float | None = None
    p_mp: float = 0.5
    seed: int = 0
    parallel_eval: bool = False

    def validate(self) -> None:
        if self.population_size < 2 or self.population_size % 2 != 0:
            raise ValidationError(
                f"population_size must be even and >= 2 (tournament pairing), "
                f"got {self.population_size}"
            )
        if self.generations < 0:
            raise ValidationError(f"generations must be >= 0, got {self.generations}")
        for name in ("p_c", "p_mp"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {p}")
        if self.p_mb is not None and not 0.0 <= self.p_mb <= 1.0:
            raise ValidationError(f"p_mb must lie in [0, 1], got {self.p_mb}")


@dataclass
class Subpopulation:
    """One species' members and their fitness values (aligned by index)."""

    species: str
    members: list
    fitness: np.ndarray | None = None

    @property
    def best_index(self) -> int:
        if self.fitness is None:
            raise EngineError("subpopulation has no recorded fitness yet")
        return int(np.argmax(self.fitness))  # ties: lowest index

    @property
    def best(self):
        return self.members[self.best_index]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class TraceRecord:
    generation: int
    best_score: float
    mean_score: float
    evaluations: int


class ConvergenceTrace:
    """Per-generation statistics of a single run."""

    def __init__(self):
        self.records: list[TraceRecord] = []

    def append(self, record: TraceRecord) -> None:
        if self.records and record.generation <= self.records[-1].generation:
            raise EngineError("trace generations must be strictly increasing")
        self.records.append(record)

    @property
    def best_scores(self) -> list[float]:
        return [r.best_score for r in self.records]

    def to_csv(self) -> str:
        lines = ["generation,best_score,mean_score,evaluations"]
        for r in self.records:
            lines.append(
                f"{r.generation},{r.best_score:.6f},{r.mean_score:.6f},{r.evaluations}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            f.write(self.to_csv())

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


@dataclass(frozen=True)
class BestSolution:
    perm: PermutationGenome
    bits: BinaryGenome
    log_score: float


@dataclass
class EvolutionState:
    generation: int
    perm_pop: Subpopulation
    bin_pop: Subpopulation
    best_so_far: BestSolution
    trace: ConvergenceTrace


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------

def init_permutation_pop(n: int, size: int, rng: np.random.Generator) -> Subpopulation:
    """Uniformly random orderings, no further constraints."""
    members = [PermutationGenome(rng.permutation(n)) for _ in range(size)]
    return Subpopulation(PERMUTATION, members)


def init_binary_pop(n: int, size: int, rng: np.random.Generator) -> Subpopulation:
    """Sparse start: every position j > 1 gets exactly one parent position,
    uniform among 1..j-1, so each decoded graph is a tree rooted at the
    first position."""
    E = triangular_size(n)
    members = []
    for _ in range(size):
        bits = np.zeros(E, dtype=bool)
        for j in range(2, n + 1):
            i = int(rng.integers(1, j))
            bits[triangular_index(i, j, n)] = True
        members.append(BinaryGenome(n, bits))
    return Subpopulation(BINARY, members)


# ---------------------------------------------------------------------------
# Genetic operators
# ---------------------------------------------------------------------------

def tournament_select(pop: Subpopulation, rng: np.random.Generator) -> list:
    """Two independent random pairings; the fitter member of each pair
    advances (ties by coin flip). Every member competes exactly once per
    pairing, so each participates in exactly two tournaments and the pool
    size equals the population size."""
    size = len(pop)
    if size % 2 != 0:
        raise EngineError(f"tournament pairing needs an even population, got {size}")
    if pop.fitness is None:
        raise EngineError("tournament selection requires evaluated fitness")
    pool = []
    for _ in range(2):
        order = rng.permutation(size)
        for t in range(0, size, 2):
            i, j = int(order[t]), int(order[t + 1])
            fi, fj = pop.fitness[i], pop.fitness[j]
            if fi > fj:
                winner = i
            elif fj > fi:
                winner = j
            else:
                winner = i if rng.random() < 0.5 else j
            pool.append(pop.members[winner])
    return pool


def two_point_crossover(a: BinaryGenome, b: BinaryGenome,
                        rng: np.random.Generator,
                        cuts: tuple[int, int] | None = None
                        ) -> tuple[BinaryGenome, BinaryGenome]:
    """Exchange the middle of the three segments delimited by two distinct
    cut points (drawn uniformly without replacement from the boundaries
    1..L). Genomes of length < 2 are returned unchanged. `cuts` fixes the
    cut points, mainly for tests."""
    if a.n != b.n:
        raise EngineError(f"cannot cross genomes for n={a.n} and n={b.n}")
    L = len(a)
    if L < 2:
        return a, b
    if cuts is None:
        c1, c2 = sorted(int(c) for c in rng.choice(np.arange(1, L + 1), size=2,
                                                   replace=False))
    else:
        c1, c2 = sorted(int(c) for c in cuts)
        if not 0 <= c1 < c2 <= L:
            raise EngineError(f"cut points must satisfy 0 <= c1 < c2 <= {L}, got {cuts}")
    child1 = np.concatenate([a.bits[:c1], b.bits[c1:c2], a.bits[c2:]])
    child2 = np.concatenate([b.bits[:c1], a.bits[c1:c2], b.bits[c2:]])
    return BinaryGenome(a.n, child1), BinaryGenome(a.n, child2)


def cycle_crossover(a: PermutationGenome, b: PermutationGenome,
                    rng: np.random.Generator | None = None
                    ) -> tuple[PermutationGenome, PermutationGenome]:
    """Exchange whole position-cycles between the parents.

    Cycles are discovered from the first unused position onward; the first
    child takes odd-numbered cycles from `a` and even-numbered ones from
    `b`, the second child the complement. Every child position keeps a
    value present at that position in one of the parents. Deterministic;
    `rng` is accepted for signature uniformity and never consumed.
    """
    if len(a) != len(b) or sorted(a.order) != sorted(b.order):
        raise EngineError("cycle crossover requires permutations of the same set")
    n = len(a)
    pos_in_a = {v: p for p, v in enumerate(a.order)}
    used = [False] * n
    child1 = [0] * n
    child2 = [0] * n
    take_from_a = True
    for start in range(n):
        if used[start]:
            continue
        cycle = []
        p = start
        while True:
            cycle.append(p)
            used[p] = True
            p = pos_in_a[b.order[p]]
            if p == start:
                break
        for p in cycle:
            child1[p] = a.order[p] if take_from_a else b.order[p]
            child2[p] = b.order[p] if take_from_a else a.order[p]
        take_from_a = not take_from_a
    return PermutationGenome(child1), PermutationGenome(child2)


def bit_flip_mutation(g: BinaryGenome, p_mb: float,
                      rng: np.random.Generator) -> BinaryGenome:
    """Flip each bit independently with probability p_mb."""
    if not 0.0 <= p_mb <= 1.0:
        raise ValidationError(f"p_mb must lie in [0, 1], got {p_mb}")
    if len(g) == 0:
        return g
    flips = rng.random(len(g)) < p_mb
    if not flips.any():
        return g
    return BinaryGenome(g.n, np.logical_xor(g.bits, flips))


def swap_mutation(g: PermutationGenome, p_mp: float,
                  rng: np.random.Generator) -> PermutationGenome:
    """With probability p_mp, swap the values at two distinct positions."""
    if not 0.0 <= p_mp <= 1.0:
        raise ValidationError(f"p_mp must lie in [0, 1], got {p_mp}")
    if len(g) < 2:
        return g
    if rng.random() >= p_mp:
        return g
    i, j = (int(x) for x in rng.choice(len(g), size=2, replace=False))
    order = list(g.order)
    order[i], order[j] = order[j], order[i]
    return PermutationGenome(order)


def elitist_replace(prev: Subpopulation, offspring_members: list,
                    offspring_fitness) -> Subpopulation:
    """Next generation: previous best member plus all offspring except the
    single worst-fitness child (ties for worst: lowest index)."""
    offspring_fitness = np.asarray(offspring_fitness, dtype=float)
    if len(offspring_members) != len(prev) or offspring_fitness.size != len(prev):
        raise EngineError(
            f"offspring count {len(offspring_members)} does not match "
            f"population size {len(prev)}"
        )
    worst = int(np.argmin(offspring_fitness))
    elite_fit = prev.fitness[prev.best_index]
    members = [prev.best] + [m for k, m in enumerate(offspring_members) if k != worst]
    fitness = np.concatenate([[elite_fit], np.delete(offspring_fitness, worst)])
    return Subpopulation(prev.species, members, fitness)


# ---------------------------------------------------------------------------
# Fitness evaluation
# ---------------------------------------------------------------------------

def _assembled_score(perm: PermutationGenome, bits: BinaryGenome, data: Dataset,
                     prior: PriorSpec, cache: LocalScoreCache | None) -> float:
    return score_parent_sets(data, decode_parents(perm.order, bits.bits), prior, cache)


def evaluate(member, own_species: str, other_pop: Subpopulation, data: Dataset,
             prior: PriorSpec | None, cache: LocalScoreCache | None,
             rng: np.random.Generator) -> float:
    """Credit a member with the score of its best assembled solution.

    Collaborators: one uniformly random member of the other subpopulation,
    plus its recorded best once fitness exists (generation 0 has none).
    """
    prior = prior or PriorSpec()
    idx = int(rng.integers(0, len(other_pop)))
    partners = [other_pop.members[idx]]
    if other_pop.fitness is not None:
        partners.append(other_pop.best)
    scores = []
    for partner in partners:
        if own_species == PERMUTATION:
            scores.append(_assembled_score(member, partner, data, prior, cache))
        else:
            scores.append(_assembled_score(partner, member, data, prior, cache))
    return max(scores)


class _BestTracker:
    """Running argmax over every complete solution scored in a run."""

    def __init__(self):
        self._best: tuple[float, PermutationGenome, BinaryGenome] | None = None

    def update(self, perm: PermutationGenome, bits: BinaryGenome, score: float) -> None:
        if self._best is None or score > self._best[0]:
            self._best = (score, perm, bits)

    @property
    def score(self) -> float:
        return self._best[0]

    def solution(self) -> BestSolution:
        score, perm, bits = self._best
        return BestSolution(perm, bits, score)


def _score_pairs(pairs, data, prior, cache, executor) -> list[float]:
    def one(pair):
        perm, bits = pair
        return _assembled_score(perm, bits, data, prior, cache)

    if executor is None:
        return [one(p) for p in pairs]
    return list(executor.map(one, pairs))


def _mean_fitness(perm_pop: Subpopulation, bin_pop: Subpopulation) -> float:
    return float(np.concatenate([perm_pop.fitness, bin_pop.fitness]).mean())


def _initial_evaluation(perm_pop, bin_pop, data, prior, cache, rng, executor,
                        tracker) -> int:
    size = len(perm_pop)
    idx_for_perm = rng.integers(0, len(bin_pop), size=size)
    idx_for_bin = rng.integers(0, len(perm_pop), size=len(bin_pop))
    perm_pairs = [(perm_pop.members[t], bin_pop.members[int(idx_for_perm[t])])
                  for t in range(size)]
    bin_pairs = [(perm_pop.members[int(idx_for_bin[t])], bin_pop.members[t])
                 for t in range(len(bin_pop))]
    perm_scores = _score_pairs(perm_pairs, data, prior, cache, executor)
    bin_scores = _score_pairs(bin_pairs, data, prior, cache, executor)
    perm_pop.fitness = np.asarray(perm_scores, dtype=float)
    bin_pop.fitness = np.asarray(bin_scores, dtype=float)
    for (perm, bits), s in zip(perm_pairs + bin_pairs, perm_scores + bin_scores):
        tracker.update(perm, bits, s)
    return len(perm_pairs) + len(bin_pairs)


def _species_generation(pop, other_pop, data, prior, cache, rng, cfg, p_mb,
                        executor, tracker) -> tuple[Subpopulation, int]:
    size = len(pop)
    pool = tournament_select(pop, rng)
    offspring = []
    for t in range(0, size, 2):
        p1, p2 = pool[t], pool[t + 1]
        if rng.random() < cfg.p_c:
            if pop.species == PERMUTATION:
                c1, c2 = cycle_crossover(p1, p2, rng)
            else:
                c1, c2 = two_point_crossover(p1, p2, rng)
        else:
            c1, c2 = p1, p2  # exact copies (genomes are immutable)
        if pop.species == PERMUTATION:
            c1 = swap_mutation(c1, cfg.p_mp, rng)
            c2 = swap_mutation(c2, cfg.p_mp, rng)
        else:
            c1 = bit_flip_mutation(c1, p_mb, rng)
            c2 = bit_flip_mutation(c2, p_mb, rng)
        offspring.extend((c1, c2))

    # Collaborator indices are drawn sequentially so that parallel scoring
    # cannot perturb the rng stream.
    rand_idx = rng.integers(0, len(other_pop), size=size)
    best_partner = other_pop.best
    pairs = []
    for t, child in enumerate(offspring):
        random_partner = other_pop.members[int(rand_idx[t])]
        if pop.species == PERMUTATION:
            pairs.append((child, best_partner))
            pairs.append((child, random_partner))
        else:
            pairs.append((best_partner, child))
            pairs.append((random_partner, child))
    scores = _score_pairs(pairs, data, prior, cache, executor)
    fitness = np.maximum(scores[0::2], scores[1::2])
    for (perm, bits), s in zip(pairs, scores):
        tracker.update(perm, bits, s)
    return elitist_replace(pop, offspring, fitness), len(pairs)


def evolve(data: Dataset, cfg: GaConfig, prior: PriorSpec | None = None,
           use_cache: bool = True) -> tuple[EvolutionState, ConvergenceTrace]:
    """Run the full coevolution loop and return the final state and trace.

    Deterministic given (data, cfg.seed) in sequential mode; with
    parallel_eval the trajectory and trace are unchanged because all rng
    draws happen before fitness values are computed.
    """
    cfg.validate()
    if data.n_rows == 0:
        raise EmptyDataError("cannot evolve structures on a dataset with no rows")
    prior = prior or PriorSpec()
    cache = LocalScoreCache() if use_cache else None
    n = data.n_cols
    E = triangular_size(n)
    p_mb = cfg.p_mb if cfg.p_mb is not None else (1.0 / E if E else 0.0)
    rng = np.random.default_rng(cfg.seed)
    size = cfg.population_size

    perm_pop = init_permutation_pop(n, size, rng)
    bin_pop = init_binary_pop(n, size, rng)
    tracker = _BestTracker()
    trace = ConvergenceTrace()

    executor = None
    if cfg.parallel_eval:
        executor = ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1))
    try:
        evals = _initial_evaluation(perm_pop, bin_pop, data, prior, cache, rng,
                                    executor, tracker)
        trace.append(TraceRecord(0, tracker.score,
                                 _mean_fitness(perm_pop, bin_pop), evals))
        for gen in range(1, cfg.generations + 1):
            perm_pop, e1 = _species_generation(perm_pop, bin_pop, data, prior,
                                               cache, rng, cfg, p_mb, executor,
                                               tracker)
            bin_pop, e2 = _species_generation(bin_pop, perm_pop, data, prior,
                                              cache, rng, cfg, p_mb, executor,
                                              tracker)
            trace.append(TraceRecord(gen, tracker.score,
                                     _mean_fitness(perm_pop, bin_pop), e1 + e2))
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    state = EvolutionState(cfg.generations, perm_pop, bin_pop,
                           tracker.solution(), trace)
    return state, trace
