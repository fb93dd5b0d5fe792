"""Baselines and brute-force oracles: K2 greedy search, exhaustive DAG
enumeration for small node counts, and the exact labeled-DAG counter."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import comb
from typing import Iterator

import numpy as np

from .bayesnet import Dag, Dataset
from .encoding import PermutationGenome, triangular_size
from .errors import EmptyDataError, ValidationError
from .scoring import LocalScoreCache, PriorSpec, bde_log_score, local_log_score

ENUMERATION_LIMIT = 5
EXHAUSTIVE_SEARCH_LIMIT = 4


@dataclass
class K2Config:
    """Greedy search settings. ordering may be a PermutationGenome, an index
    sequence, or "random" (drawn uniformly from the seed)."""

    ordering: object = "random"
    max_parents: int = 10
    seed: int = 0

    def validate(self) -> None:
        if self.max_parents < 0:
            raise ValidationError(f"max_parents must be >= 0, got {self.max_parents}")


def _resolve_ordering(cfg: K2Config, n: int) -> tuple[int, ...]:
    if isinstance(cfg.ordering, str):
        if cfg.ordering != "random":
            raise ValidationError(
                f"ordering must be a permutation or 'random', got {cfg.ordering!r}"
            )
        rng = np.random.default_rng(cfg.seed)
        return tuple(int(v) for v in rng.permutation(n))
    order = cfg.ordering.order if isinstance(cfg.ordering, PermutationGenome) \
        else PermutationGenome(cfg.ordering).order
    if len(order) != n:
        raise ValidationError(
            f"ordering has {len(order)} entries but dataset has {n} columns"
        )
    return order


def k2_learn(data: Dataset, cfg: K2Config, prior: PriorSpec | None = None,
             cache: LocalScoreCache | None = None,
             steps: list | None = None) -> tuple[Dag, float]:
    """Greedy structure search along a node ordering.

    Every node starts parentless; the single predecessor whose addition
    raises the node's local score the most is added, until no addition
    strictly improves it or max_parents is reached. Ties between candidate
    parents go to the one earliest in the ordering. If `steps` is a list,
    each accepted addition is appended as (node, parent, before, after).
    """
    cfg.validate()
    if data.n_rows == 0:
        raise EmptyDataError("cannot learn structures from a dataset with no rows")
    prior = prior or PriorSpec()
    n = data.n_cols
    order = _resolve_ordering(cfg, n)
    parent_sets: list[tuple[int, ...]] = [()] * n
    for pos, node in enumerate(order):
        chosen: list[int] = []
        current = local_log_score(data, node, (), prior, cache)
        while len(chosen) < cfg.max_parents:
            best_score = current
            best_cand = None
            for cand in order[:pos]:
                if cand in chosen:
                    continue
                trial = tuple(sorted(chosen + [cand]))
                s = local_log_score(data, node, trial, prior, cache)
                if s > best_score:  # strict: first best wins ties
                    best_score = s
                    best_cand = cand
            if best_cand is None:
                break
            if steps is not None:
                steps.append((node, best_cand, current, best_score))
            chosen.append(best_cand)
            current = best_score
        parent_sets[node] = tuple(sorted(chosen))
    dag = Dag(n, parent_sets)
    return dag, bde_log_score(data, dag, prior, cache)


_DAG_COUNTS: dict[int, int] = {0: 1}


def count_dags(n: int) -> int:
    """Exact number of labeled DAGs on n nodes, by inclusion-exclusion
    over the nodes with no incoming edges (exact integer arithmetic)."""
    if n < 1:
        raise ValidationError(f"node count must be >= 1, got {n}")
    return _count_recursive(n)


def _count_recursive(n: int) -> int:
    if n in _DAG_COUNTS:
        return _DAG_COUNTS[n]
    total = 0
    for k in range(1, n + 1):
        term = comb(n, k) * (1 << (k * (n - k))) * _count_recursive(n - k)
        total += term if k % 2 == 1 else -term
    _DAG_COUNTS[n] = total
    return total


def enumerate_dags(n: int) -> Iterator[Dag]:
    """Yield every labeled DAG on n nodes exactly once.

    Iterates ordering x upper-triangular edge mask and deduplicates by
    canonical parent sets; the cross-check that the yielded count equals
    count_dags(n) doubles as a completeness test of the encoding.
    """
    if n < 1:
        raise ValidationError(f"node count must be >= 1, got {n}")
    if n > ENUMERATION_LIMIT:
        raise ValidationError(
            f"refusing to enumerate DAGs on {n} nodes: the count is "
            f"super-exponential ({count_dags(ENUMERATION_LIMIT + 1)} already at "
            f"{ENUMERATION_LIMIT + 1}); limit is {ENUMERATION_LIMIT}"
        )
    E = triangular_size(n)
    pairs = [(s, t) for s in range(n) for t in range(s + 1, n)]
    mask_edges = [[pairs[b] for b in range(E) if (mask >> b) & 1]
                  for mask in range(1 << E)]
    seen: set[tuple[tuple[int, ...], ...]] = set()
    for order in permutations(range(n)):
        for edges in mask_edges:
            parents: list[list[int]] = [[] for _ in range(n)]
            for s, t in edges:
                parents[order[t]].append(order[s])
            key = tuple(tuple(sorted(ps)) for ps in parents)
            if key not in seen:
                seen.add(key)
                yield Dag(n, key)


def score_all_dags(data: Dataset, prior: PriorSpec | None = None,
                   cache: LocalScoreCache | None = None
                   ) -> Iterator[tuple[Dag, float]]:
    """Score every structure on the dataset's variables (small n only)."""
    prior = prior or PriorSpec()
    for dag in enumerate_dags(data.n_cols):
        yield dag, bde_log_score(data, dag, prior, cache)


@dataclass
class ExhaustiveBest:
    dag: Dag
    log_score: float
    ties: list[Dag]          # every structure within tie_tol of the optimum
    num_evaluated: int


def exhaustive_best(data: Dataset, prior: PriorSpec | None = None,
                    cache: LocalScoreCache | None = None,
                    tie_tol: float = 1e-9) -> ExhaustiveBest:
    """Global optimum by scoring every structure (n <= 4)."""
    n = data.n_cols
    if n > EXHAUSTIVE_SEARCH_LIMIT:
        raise ValidationError(
            f"exhaustive search is limited to {EXHAUSTIVE_SEARCH_LIMIT} nodes "
            f"({count_dags(EXHAUSTIVE_SEARCH_LIMIT)} structures); got {n}"
        )
    cache = cache if cache is not None else LocalScoreCache()
    results = list(score_all_dags(data, prior, cache))
    best_dag, best_score = max(results, key=lambda pair: pair[1])
    ties = [dag for dag, s in results if s >= best_score - tie_tol]
    return ExhaustiveBest(best_dag, best_score, ties, len(results))
