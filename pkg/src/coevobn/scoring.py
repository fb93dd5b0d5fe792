"""Bayesian (BDe) log-score of a structure given a fully observable dataset.

The total score decomposes into one local term per (node, parent set); those
terms are memoized in a LocalScoreCache. prequential_log_score computes the
same quantity by the chain rule of the marginal likelihood, multiplying
posterior-predictive probabilities row by row; it serves as an independent
oracle for the closed form.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .bayesnet import (
    BayesianNetwork,
    Dag,
    Dataset,
    parent_config_count,
    parent_config_index,
    parent_config_indices,
)
from .errors import EmptyDataError, SchemaError, ValidationError


@dataclass(frozen=True)
class PriorSpec:
    """Dirichlet prior with one shared pseudo-count for every cell.

    The per-row total pseudo-count is arity * hyperparameter.
    """

    hyperparameter: float = 1.0

    def __post_init__(self):
        if not self.hyperparameter > 0:
            raise ValidationError(
                f"prior hyperparameter must be > 0, got {self.hyperparameter}"
            )


@dataclass
class SufficientStats:
    """Counts of (parent configuration, child value) pairs for one node."""

    node: int
    parent_set: tuple[int, ...]
    counts: np.ndarray       # shape (q, r)
    row_totals: np.ndarray   # shape (q,)


class LocalScoreCache:
    """Memo of (node, sorted parent tuple) -> local log-score.

    Inserts are idempotent (a key always maps to the same value), so
    concurrent lookups and stores are safe; hits/misses are tracked.
    """

    def __init__(self):
        self._table: dict[tuple[int, tuple[int, ...]], float] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, node: int, parent_set: tuple[int, ...]) -> float | None:
        with self._lock:
            value = self._table.get((node, parent_set))
            if value is None:
                self.misses += 1
            else:
                self.hits += 1
            return value

    def put(self, node: int, parent_set: tuple[int, ...], value: float) -> None:
        with self._lock:
            self._table[(node, parent_set)] = value

    def __len__(self) -> int:
        return len(self._table)


def count_stats(data: Dataset, node: int, parent_set: Sequence[int]) -> SufficientStats:
    """Tally every row into its (parent configuration, child value) cell."""
    n = data.n_cols
    if not 0 <= node < n:
        raise ValidationError(f"node index {node} outside 0..{n - 1}")
    parent_set = tuple(sorted(int(p) for p in parent_set))
    for p in parent_set:
        if not 0 <= p < n:
            raise ValidationError(f"parent index {p} outside 0..{n - 1}")
        if p == node:
            raise ValidationError(f"node {node} cannot be its own parent")
    if data.n_rows == 0:
        raise EmptyDataError(
            "dataset has no rows; scores over an empty dataset do not rank structures"
        )
    arities = data.arities
    r = arities[node]
    q = parent_config_count(parent_set, arities)
    j = parent_config_indices(data.rows, parent_set, arities)
    flat = np.bincount(j * r + data.rows[:, node], minlength=q * r)
    counts = flat.reshape(q, r)
    return SufficientStats(node, parent_set, counts, counts.sum(axis=1))


def local_log_score(data: Dataset, node: int, parent_set: Sequence[int],
                    prior: PriorSpec | None = None,
                    cache: LocalScoreCache | None = None) -> float:
    """Log marginal likelihood contribution of one node given its parents."""
    prior = prior or PriorSpec()
    key = tuple(sorted(int(p) for p in parent_set))
    if cache is not None:
        hit = cache.get(node, key)
        if hit is not None:
            return hit
    stats = count_stats(data, node, key)
    a = prior.hyperparameter
    row_prior = data.arities[node] * a
    score = float(
        np.sum(gammaln(row_prior) - gammaln(row_prior + stats.row_totals))
        + np.sum(gammaln(a + stats.counts) - gammaln(a))
    )
    if cache is not None:
        cache.put(node, key, score)
    return score


def score_parent_sets(data: Dataset, parent_sets: Sequence[tuple[int, ...]],
                      prior: PriorSpec, cache: LocalScoreCache | None) -> float:
    """Sum of local scores for an entire family of parent sets (hot path)."""
    total = 0.0
    for node, ps in enumerate(parent_sets):
        total += local_log_score(data, node, ps, prior, cache)
    return total


def bde_log_score(data: Dataset, dag: Dag, prior: PriorSpec | None = None,
                  cache: LocalScoreCache | None = None) -> float:
    """Log marginal likelihood of the data under the structure."""
    if dag.n != data.n_cols:
        raise SchemaError(
            f"structure has {dag.n} nodes but dataset has {data.n_cols} columns"
        )
    return score_parent_sets(data, dag.parents, prior or PriorSpec(), cache)


def prequential_log_score(data: Dataset, dag: Dag,
                          prior: PriorSpec | None = None) -> float:
    """Sequential-predictive evaluation of the same marginal likelihood.

    Processes rows in order, scoring each row by the current
    posterior-mean predictive of every node and then updating the counts.
    Mathematically identical to bde_log_score, but shares no code path
    with the closed form.
    """
    prior = prior or PriorSpec()
    if dag.n != data.n_cols:
        raise SchemaError(
            f"structure has {dag.n} nodes but dataset has {data.n_cols} columns"
        )
    if data.n_rows == 0:
        raise EmptyDataError(
            "dataset has no rows; scores over an empty dataset do not rank structures"
        )
    arities = data.arities
    a = prior.hyperparameter
    counts = []
    for i in range(dag.n):
        q = parent_config_count(dag.parents[i], arities)
        counts.append(np.zeros((q, arities[i]), dtype=np.int64))
    total = 0.0
    for row in data.rows:
        for i in range(dag.n):
            j = parent_config_index(row, dag.parents[i], arities)
            k = int(row[i])
            c = counts[i]
            predictive = (a + c[j, k]) / (arities[i] * a + c[j].sum())
            total += math.log(predictive)
            c[j, k] += 1
    return total


def fit_network(data: Dataset, dag: Dag,
                prior: PriorSpec | None = None) -> BayesianNetwork:
    """Fill a structure with posterior-mean CPTs from the data counts:
    (a + N_ijk) / (r_i a + N_ij) per cell."""
    prior = prior or PriorSpec()
    if dag.n != data.n_cols:
        raise SchemaError(
            f"structure has {dag.n} nodes but dataset has {data.n_cols} columns"
        )
    a = prior.hyperparameter
    cpts = []
    for i in range(dag.n):
        stats = count_stats(data, i, dag.parents[i])
        r = data.arities[i]
        cpts.append((a + stats.counts) / (r * a + stats.row_totals[:, None]))
    return BayesianNetwork(data.variables, dag, cpts)
