"""Shared builders for small hand-checked networks and datasets."""

import numpy as np

from coevobn import BayesianNetwork, Dag, Dataset, Variable


def binary_vars(n):
    return [Variable(f"X{i + 1}", 2) for i in range(n)]


def single_binary(p_one):
    """One binary node with P(X=1) = p_one."""
    return BayesianNetwork(binary_vars(1), Dag(1, [()]),
                           [np.array([[1.0 - p_one, p_one]])])


def independent_pair(p_one):
    """Two binary nodes, empty graph, both with P(X=1) = p_one."""
    cpt = np.array([[1.0 - p_one, p_one]])
    return BayesianNetwork(binary_vars(2), Dag(2, [(), ()]), [cpt, cpt])


def chain_pair(p_a, p_b_given):
    """A -> B binary; p_b_given[a] = P(B=1 | A=a)."""
    cpt_a = np.array([[1.0 - p_a, p_a]])
    cpt_b = np.array([[1.0 - p_b_given[0], p_b_given[0]],
                      [1.0 - p_b_given[1], p_b_given[1]]])
    return BayesianNetwork(binary_vars(2), Dag(2, [(), (0,)]), [cpt_a, cpt_b])


def chain3(strength=0.9):
    """X1 -> X2 -> X3 binary chain; each link copies its parent with
    probability `strength`."""
    root = np.array([[0.5, 0.5]])
    link = np.array([[strength, 1.0 - strength],
                     [1.0 - strength, strength]])
    return BayesianNetwork(binary_vars(3), Dag(3, [(), (0,), (1,)]),
                           [root, link, link])


def chain4(seed=99):
    """X1 -> X2 -> X3 -> X4 binary chain with flat-Dirichlet CPT rows."""
    rng = np.random.default_rng(seed)
    cpts = [rng.dirichlet(np.ones(2), size=1)]
    cpts += [rng.dirichlet(np.ones(2), size=2) for _ in range(3)]
    return BayesianNetwork(binary_vars(4), Dag(4, [(), (0,), (1,), (2,)]), cpts)


def dataset(arities, rows):
    variables = [Variable(f"X{i + 1}", a) for i, a in enumerate(arities)]
    return Dataset(variables, rows)


def random_instance(rng, max_nodes=4, max_rows=50):
    """Random dataset (arities 2-3) plus an unrelated random DAG on its nodes."""
    n = int(rng.integers(1, max_nodes + 1))
    arities = [int(a) for a in rng.integers(2, 4, size=n)]
    m = int(rng.integers(1, max_rows + 1))
    rows = np.stack([rng.integers(0, a, size=m) for a in arities], axis=1)
    order = rng.permutation(n)
    parents = [[] for _ in range(n)]
    for s in range(n - 1):
        for t in range(s + 1, n):
            if rng.random() < 0.5:
                parents[int(order[t])].append(int(order[s]))
    return dataset(arities, rows), Dag(n, parents)
