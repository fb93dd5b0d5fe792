"""Discrete Bayesian networks: representation, synthesis, sampling, file I/O.

Networks and datasets are immutable after construction and safe to share
across threads. CPT rows are addressed by a mixed-radix encoding of the
parent values (ascending parent index, lowest index least significant);
the scoring module relies on the exact same convention.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ParseError, SchemaError, ValidationError


@dataclass(frozen=True)
class Variable:
    """A named discrete variable taking values 0 .. arity-1."""

    name: str
    arity: int


def check_variables(variables: Sequence[Variable]) -> None:
    """Raise ValidationError unless names are unique and non-empty and arities >= 2."""
    seen = set()
    for var in variables:
        if not var.name:
            raise ValidationError("variable names must be non-empty")
        if var.name in seen:
            raise ValidationError(
                f"duplicate variable name {var.name!r}; names within a network must be unique"
            )
        seen.add(var.name)
        if var.arity < 2:
            raise ValidationError(
                f"variable {var.name!r} has arity {var.arity}; arity must be >= 2"
            )


class Dag:
    """Directed acyclic graph over nodes 0..n-1, stored as one sorted parent
    tuple per node. Construction validates acyclicity by topological sort."""

    __slots__ = ("n", "parents")

    def __init__(self, n: int, parents: Iterable[Iterable[int]]):
        norm = tuple(tuple(sorted({int(p) for p in ps})) for ps in parents)
        if len(norm) != n:
            raise ValidationError(
                f"expected one parent set per node ({n}), got {len(norm)}"
            )
        for i, ps in enumerate(norm):
            for p in ps:
                if p == i:
                    raise ValidationError(f"node {i} lists itself as a parent")
                if not 0 <= p < n:
                    raise ValidationError(
                        f"node {i} has parent index {p} outside 0..{n - 1}"
                    )
        self.n = n
        self.parents = norm
        self.topological_order()  # raises on cycles

    @classmethod
    def _unchecked(cls, n: int, parents: tuple[tuple[int, ...], ...]) -> "Dag":
        """Skip validation; caller guarantees sorted, acyclic parent tuples."""
        dag = object.__new__(cls)
        dag.n = n
        dag.parents = parents
        return dag

    def topological_order(self) -> list[int]:
        """Return nodes in ancestor-first order (lowest index first among
        ready nodes); raise ValidationError if the graph has a cycle."""
        remaining_parents = [set(ps) for ps in self.parents]
        children: list[list[int]] = [[] for _ in range(self.n)]
        for i, ps in enumerate(self.parents):
            for p in ps:
                children[p].append(i)
        ready = sorted(i for i in range(self.n) if not remaining_parents[i])
        order: list[int] = []
        while ready:
            node = ready.pop(0)
            order.append(node)
            newly = []
            for c in children[node]:
                remaining_parents[c].discard(node)
                if not remaining_parents[c]:
                    newly.append(c)
            ready = sorted(ready + newly)
        if len(order) != self.n:
            raise ValidationError("graph contains a cycle; a DAG is required")
        return order

    def edges(self) -> Iterator[tuple[int, int]]:
        for child, ps in enumerate(self.parents):
            for p in ps:
                yield (p, child)

    @property
    def edge_count(self) -> int:
        return sum(len(ps) for ps in self.parents)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Dag)
            and self.n == other.n
            and self.parents == other.parents
        )

    def __hash__(self) -> int:
        return hash((self.n, self.parents))

    def __repr__(self) -> str:
        return f"Dag(n={self.n}, parents={self.parents!r})"


def parent_config_count(parents: Sequence[int], arities: Sequence[int]) -> int:
    """Number of joint parent assignments (1 for an empty parent set)."""
    q = 1
    for p in parents:
        q *= int(arities[p])
    return q


def parent_config_index(values: Sequence[int], parents: Sequence[int],
                        arities: Sequence[int]) -> int:
    """Mixed-radix row index of one full assignment's parent values."""
    idx = 0
    stride = 1
    for p in parents:  # ascending parent index = least significant first
        idx += int(values[p]) * stride
        stride *= int(arities[p])
    return idx


def parent_config_indices(rows: np.ndarray, parents: Sequence[int],
                          arities: Sequence[int]) -> np.ndarray:
    """Vectorized parent_config_index over a (m, n) value matrix."""
    if not parents:
        return np.zeros(rows.shape[0], dtype=np.int64)
    strides = np.empty(len(parents), dtype=np.int64)
    stride = 1
    for k, p in enumerate(parents):
        strides[k] = stride
        stride *= int(arities[p])
    return rows[:, list(parents)] @ strides


class BayesianNetwork:
    """A DAG plus one conditional probability table per node.

    cpts[i] has shape (q_i, r_i): one row per joint parent assignment
    (mixed-radix order) and one column per value of node i.
    """

    __slots__ = ("variables", "dag", "cpts")

    def __init__(self, variables: Sequence[Variable], dag: Dag,
                 cpts: Sequence[np.ndarray], renormalize: bool = False,
                 tol: float = 1e-9):
        variables = list(variables)
        check_variables(variables)
        if dag.n != len(variables):
            raise SchemaError(
                f"graph has {dag.n} nodes but {len(variables)} variables given"
            )
        arities = [v.arity for v in variables]
        tables: list[np.ndarray] = []
        for i, var in enumerate(variables):
            t = np.array(cpts[i], dtype=float)
            q = parent_config_count(dag.parents[i], arities)
            if t.shape != (q, var.arity):
                raise ValidationError(
                    f"CPT for {var.name!r} has shape {t.shape}; expected "
                    f"({q}, {var.arity}) = (parent configurations, arity)"
                )
            if np.any(t < 0.0) or np.any(t > 1.0):
                raise ValidationError(
                    f"CPT for {var.name!r} contains probabilities outside [0, 1]"
                )
            sums = t.sum(axis=1)
            if renormalize:
                if np.any(sums <= 0.0):
                    raise ValidationError(
                        f"CPT for {var.name!r} has a zero-mass row; cannot renormalize"
                    )
                t = t / sums[:, None]
            elif np.any(np.abs(sums - 1.0) > tol):
                j = int(np.argmax(np.abs(sums - 1.0)))
                raise ValidationError(
                    f"CPT row {j} for {var.name!r} sums to {sums[j]!r}; "
                    f"rows must sum to 1 within {tol}"
                )
            t.setflags(write=False)
            tables.append(t)
        self.variables = variables
        self.dag = dag
        self.cpts = tables

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def arities(self) -> list[int]:
        return [v.arity for v in self.variables]


class Dataset:
    """Fully observable integer-coded samples over a fixed variable schema."""

    __slots__ = ("variables", "rows")

    def __init__(self, variables: Sequence[Variable], rows):
        variables = list(variables)
        check_variables(variables)
        arr = np.array(rows, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, len(variables))
        if arr.ndim != 2 or arr.shape[1] != len(variables):
            raise SchemaError(
                f"data matrix has shape {arr.shape}; expected (rows, {len(variables)})"
            )
        for i, var in enumerate(variables):
            col = arr[:, i]
            if col.size and (col.min() < 0 or col.max() >= var.arity):
                bad = col[(col < 0) | (col >= var.arity)][0]
                raise ValidationError(
                    f"column {var.name!r} contains value {bad}, outside the "
                    f"allowed codes 0..{var.arity - 1}"
                )
        arr.setflags(write=False)
        self.variables = variables
        self.rows = arr

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_cols(self) -> int:
        return self.rows.shape[1]

    @property
    def arities(self) -> list[int]:
        return [v.arity for v in self.variables]


def joint_probability(net: BayesianNetwork, assignment: Sequence[int]) -> float:
    """Probability of one full assignment: product of per-node CPT entries."""
    if len(assignment) != net.n:
        raise SchemaError(
            f"assignment has {len(assignment)} values; network has {net.n} variables"
        )
    arities = net.arities
    for i, v in enumerate(assignment):
        if not 0 <= int(v) < arities[i]:
            raise SchemaError(
                f"value {v} for variable {net.variables[i].name!r} is outside "
                f"0..{arities[i] - 1}"
            )
    prob = 1.0
    for i in range(net.n):
        j = parent_config_index(assignment, net.dag.parents[i], arities)
        prob *= float(net.cpts[i][j, int(assignment[i])])
    return prob


def ancestral_sample(net: BayesianNetwork, count: int, seed: int) -> Dataset:
    """Draw `count` complete rows by sampling each node after its parents.

    Nodes are visited in the deterministic topological order of the DAG, so
    the result is reproducible given the seed.
    """
    if count < 1:
        raise ValidationError(f"sample count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    arities = net.arities
    values = np.zeros((count, net.n), dtype=np.int64)
    for i in net.dag.topological_order():
        cdf = np.cumsum(net.cpts[i], axis=1)
        cdf[:, -1] = 1.0  # guard against 1e-9 normalization slack
        rows = parent_config_indices(values, net.dag.parents[i], arities)
        u = rng.random(count)
        values[:, i] = (u[:, None] >= cdf[rows]).sum(axis=1)
    return Dataset(net.variables, values)


def random_network(n: int, max_arity: int = 2, edge_density: float = 0.2,
                   seed: int = 0) -> BayesianNetwork:
    """Generate a random network: random topological order, independent
    edge coin-flips at `edge_density`, per-node arity uniform in
    2..max_arity, and flat-Dirichlet CPT rows."""
    if n < 1:
        raise ValidationError(f"node count must be >= 1, got {n}")
    if not 0.0 <= edge_density <= 1.0:
        raise ValidationError(f"edge_density must lie in [0, 1], got {edge_density}")
    if max_arity < 2:
        raise ValidationError(f"max_arity must be >= 2, got {max_arity}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    arities = rng.integers(2, max_arity + 1, size=n)
    variables = [Variable(f"X{i + 1}", int(arities[i])) for i in range(n)]
    parents: list[list[int]] = [[] for _ in range(n)]
    for s in range(n - 1):
        for t in range(s + 1, n):
            if rng.random() < edge_density:
                parents[int(order[t])].append(int(order[s]))
    dag = Dag(n, parents)
    cpts = []
    for i in range(n):
        q = parent_config_count(dag.parents[i], arities)
        cpts.append(rng.dirichlet(np.ones(int(arities[i])), size=q))
    return BayesianNetwork(variables, dag, cpts)


# ---------------------------------------------------------------------------
# File formats. Network: JSON with variables/parents/cpts; a structure-only
# file carries "cpts": null. Dataset: CSV with a "name:arity" header row.
# ---------------------------------------------------------------------------

def _read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object at top level")
    return doc


def _parse_variables(doc: dict, path) -> list[Variable]:
    raw = doc.get("variables")
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{path}: field 'variables' must be a non-empty list")
    variables = []
    for k, entry in enumerate(raw):
        if not isinstance(entry, dict) or "name" not in entry or "arity" not in entry:
            raise ParseError(
                f"{path}: variables[{k}] must be an object with 'name' and 'arity'"
            )
        variables.append(Variable(str(entry["name"]), int(entry["arity"])))
    return variables


def _parse_parents(doc: dict, path, n: int) -> Dag:
    raw = doc.get("parents")
    if not isinstance(raw, list) or len(raw) != n:
        raise ParseError(
            f"{path}: field 'parents' must be a list with one entry per variable ({n})"
        )
    for k, ps in enumerate(raw):
        if not isinstance(ps, list):
            raise ParseError(f"{path}: parents[{k}] must be a list of node indices")
    return Dag(n, raw)


def save_network(net: BayesianNetwork, path) -> None:
    doc = {
        "variables": [{"name": v.name, "arity": v.arity} for v in net.variables],
        "parents": [list(ps) for ps in net.dag.parents],
        "cpts": [t.tolist() for t in net.cpts],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_network(path, renormalize: bool = False) -> BayesianNetwork:
    doc = _read_json(path)
    variables = _parse_variables(doc, path)
    dag = _parse_parents(doc, path, len(variables))
    cpts = doc.get("cpts")
    if cpts is None:
        raise ParseError(
            f"{path}: field 'cpts' is null or missing; this is a structure-only "
            f"file (use load_structure)"
        )
    if not isinstance(cpts, list) or len(cpts) != len(variables):
        raise ParseError(
            f"{path}: field 'cpts' must be a list with one table per variable"
        )
    return BayesianNetwork(variables, dag, cpts, renormalize=renormalize)


def save_structure(variables: Sequence[Variable], dag: Dag, path) -> None:
    """Write a network file without parameters ("cpts": null)."""
    doc = {
        "variables": [{"name": v.name, "arity": v.arity} for v in variables],
        "parents": [list(ps) for ps in dag.parents],
        "cpts": None,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_structure(path) -> tuple[list[Variable], Dag]:
    """Read variables and graph from a network file, ignoring any CPTs."""
    doc = _read_json(path)
    variables = _parse_variables(doc, path)
    dag = _parse_parents(doc, path, len(variables))
    return variables, dag


def save_dataset(data: Dataset, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow([f"{v.name}:{v.arity}" for v in data.variables])
        writer.writerows(data.rows.tolist())


def load_dataset(path) -> Dataset:
    with open(path, "r", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file; expected a header row") from None
        variables = []
        for k, field in enumerate(header):
            name, sep, arity = field.partition(":")
            if not sep or not name:
                raise ParseError(
                    f"{path} line 1 field {k + 1}: expected 'name:arity', got {field!r}"
                )
            try:
                variables.append(Variable(name, int(arity)))
            except ValueError:
                raise ParseError(
                    f"{path} line 1 field {k + 1}: arity {arity!r} is not an integer"
                ) from None
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(variables):
                raise ParseError(
                    f"{path} line {lineno}: expected {len(variables)} fields, "
                    f"got {len(record)}"
                )
            try:
                rows.append([int(cell) for cell in record])
            except ValueError:
                raise ParseError(
                    f"{path} line {lineno}: non-integer cell in {record!r}"
                ) from None
    return Dataset(variables, rows)
