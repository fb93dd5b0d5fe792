"""Experiment orchestration: paired learner comparisons over seeded runs.

Each run draws its own dataset from the ground-truth network; the
coevolutionary learner and K2 consume the identical dataset within a run.
Per-run seeds are derived by mixing (master seed, sample size, run index,
stream tag) into a SeedSequence, so adding runs or sizes never perturbs
the randomness of existing ones.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import t as student_t

from .baselines import K2Config, k2_learn
from .bayesnet import (
    BayesianNetwork,
    Dag,
    ancestral_sample,
    load_dataset,
    load_network,
    load_structure,
    random_network,
    save_structure,
)
from .encoding import decode_parents
from .errors import SchemaError, ValidationError
from .evolution import GaConfig, evolve
from .scoring import PriorSpec, bde_log_score

_STREAM_DATASET = 0
_STREAM_CCGA = 1
_STREAM_K2 = 2


def derive_seed(master: int, *keys: int) -> int:
    """Stable per-run seed from the master seed and integer mixing keys."""
    words = np.random.SeedSequence([int(master), *[int(k) for k in keys]])
    return int(words.generate_state(1, np.uint64)[0])


def welch_one_tailed_t(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """One-tailed p-value for H1: mean(a) > mean(b), unequal variances.

    Uses the unequal-variance t statistic with Welch-Satterthwaite degrees
    of freedom; equal samples give exactly 0.5.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValidationError(
            f"both samples need >= 2 observations, got {a.size} and {b.size}"
        )
    va, vb = a.var(ddof=1), b.var(ddof=1)
    if va + vb == 0.0:
        raise ValidationError("both samples have zero variance; t is undefined")
    se2 = va / a.size + vb / b.size
    t_stat = (a.mean() - b.mean()) / math.sqrt(se2)
    df = se2 ** 2 / ((va / a.size) ** 2 / (a.size - 1)
                     + (vb / b.size) ** 2 / (b.size - 1))
    p = float(student_t.sf(t_stat, df))
    return float(min(max(p, 5e-324), 1.0 - 1e-16))  # keep p inside (0, 1)


def score_structure(structure_path, dataset_path,
                    prior: PriorSpec | None = None) -> float:
    """Score a stored structure (full network or structure-only file)
    against a stored dataset."""
    variables, dag = load_structure(structure_path)
    data = load_dataset(dataset_path)
    if [(v.name, v.arity) for v in variables] != \
            [(v.name, v.arity) for v in data.variables]:
        raise SchemaError(
            f"{structure_path} and {dataset_path} disagree on the variable "
            f"schema (names/arities must match)"
        )
    return bde_log_score(data, dag, prior)


@dataclass
class ExperimentConfig:
    """Comparison experiment settings; mirrors the JSON config format."""

    network_file: str | None = None
    generator: dict | None = None        # nodes / max_arity / edge_density / seed
    sample_sizes: list[int] = field(default_factory=lambda: [1000])
    runs: int = 20
    master_seed: int = 0
    ga: GaConfig = field(default_factory=GaConfig)
    k2: K2Config = field(default_factory=K2Config)
    out_dir: str = "results"
    deterministic_output: bool = True    # zero the seconds column in runs.csv

    def validate(self) -> None:
        if (self.network_file is None) == (self.generator is None):
            raise ValidationError(
                "exactly one of network_file and generator must be given"
            )
        if self.runs < 1:
            raise ValidationError(f"runs must be >= 1, got {self.runs}")
        if not self.sample_sizes or any(s < 1 for s in self.sample_sizes):
            raise ValidationError("sample_sizes must be a non-empty list of >= 1")
        if self.master_seed < 0:
            raise ValidationError("master_seed must be >= 0")
        self.ga.validate()
        self.k2.validate()

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        ga = GaConfig(**doc.get("ga", {}))
        k2 = K2Config(**doc.get("k2", {}))
        known = {"network_file", "generator", "sample_sizes", "runs",
                 "master_seed", "out_dir", "deterministic_output"}
        extra = set(doc) - known - {"ga", "k2"}
        if extra:
            raise ValidationError(f"unknown experiment config fields: {sorted(extra)}")
        kwargs = {k: doc[k] for k in known if k in doc}
        return cls(ga=ga, k2=k2, **kwargs)


@dataclass
class RunResult:
    algorithm: str
    run_index: int
    dataset_id: str
    best_score: float
    seconds: float
    dag: Dag | None = None


@dataclass
class AlgorithmStats:
    mean: float
    std: float | None
    min: float
    max: float

    @classmethod
    def from_scores(cls, scores: Sequence[float]) -> "AlgorithmStats":
        arr = np.asarray(scores, dtype=float)
        std = float(arr.std(ddof=1)) if arr.size > 1 else None
        return cls(float(arr.mean()), std, float(arr.min()), float(arr.max()))

    def to_dict(self) -> dict:
        return {
            "mean": round(self.mean, 6),
            "std": None if self.std is None else round(self.std, 6),
            "min": round(self.min, 6),
            "max": round(self.max, 6),
        }


@dataclass
class ComparisonEntry:
    sample_size: int
    ccga: AlgorithmStats
    k2: AlgorithmStats
    original: AlgorithmStats
    p_value: float | None

    def to_dict(self) -> dict:
        return {
            "sample_size": self.sample_size,
            "ccga": self.ccga.to_dict(),
            "k2": self.k2.to_dict(),
            "original": self.original.to_dict(),
            "mean_difference": round(self.ccga.mean - self.k2.mean, 6),
            "p_value_ccga_greater": None if self.p_value is None
            else round(self.p_value, 6),
        }


@dataclass
class ComparisonReport:
    master_seed: int
    runs: int
    entries: list[ComparisonEntry]
    run_results: list[RunResult]

    def to_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "runs": self.runs,
            "results": [e.to_dict() for e in self.entries],
        }


def _ground_truth(cfg: ExperimentConfig) -> BayesianNetwork:
    if cfg.network_file is not None:
        return load_network(cfg.network_file)
    gen = dict(cfg.generator)
    return random_network(
        n=int(gen.pop("nodes")),
        max_arity=int(gen.pop("max_arity", 2)),
        edge_density=float(gen.pop("edge_density", 0.2)),
        seed=int(gen.pop("seed", 0)),
    )


def run_comparison(cfg: ExperimentConfig) -> ComparisonReport:
    """Run the paired comparison and write runs.csv, report.json,
    mean-convergence traces, and best learned structures to cfg.out_dir.

    Incomplete experiments leave the rows completed so far flushed in
    runs.csv. Per-run wall times go to timings.csv when
    deterministic_output is set (runs.csv then carries zeros so reruns
    with the same seed are byte-identical).
    """
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ground = _ground_truth(cfg)
    prior = PriorSpec()

    entries: list[ComparisonEntry] = []
    all_results: list[RunResult] = []
    single_size = len(cfg.sample_sizes) == 1

    runs_f = open(out / "runs.csv", "w", newline="")
    timings_f = open(out / "timings.csv", "w", newline="") \
        if cfg.deterministic_output else None
    try:
        runs_f.write("algorithm,run,dataset,best_score,seconds\n")
        if timings_f is not None:
            timings_f.write("algorithm,run,dataset,seconds\n")

        def emit(result: RunResult) -> None:
            shown = 0.0 if cfg.deterministic_output else result.seconds
            runs_f.write(
                f"{result.algorithm},{result.run_index},{result.dataset_id},"
                f"{result.best_score:.6f},{shown:.6f}\n"
            )
            runs_f.flush()
            if timings_f is not None:
                timings_f.write(
                    f"{result.algorithm},{result.run_index},{result.dataset_id},"
                    f"{result.seconds:.6f}\n"
                )
                timings_f.flush()
            all_results.append(result)

        for size in cfg.sample_sizes:
            ccga_results: list[RunResult] = []
            k2_results: list[RunResult] = []
            original_results: list[RunResult] = []
            traces = []
            for run in range(cfg.runs):
                dataset_id = f"s{size}-r{run}"
                data = ancestral_sample(
                    ground, size, derive_seed(cfg.master_seed, size, run,
                                              _STREAM_DATASET))

                ga_cfg = replace(cfg.ga, seed=derive_seed(
                    cfg.master_seed, size, run, _STREAM_CCGA))
                t0 = time.perf_counter()
                state, trace = evolve(data, ga_cfg, prior)
                ccga_seconds = time.perf_counter() - t0
                best = state.best_so_far
                ccga_dag = Dag._unchecked(
                    data.n_cols, decode_parents(best.perm.order, best.bits.bits))
                result = RunResult("ccga", run, dataset_id, best.log_score,
                                   ccga_seconds, ccga_dag)
                emit(result)
                ccga_results.append(result)
                traces.append(trace)

                k2_cfg = replace(cfg.k2, seed=derive_seed(
                    cfg.master_seed, size, run, _STREAM_K2))
                t0 = time.perf_counter()
                k2_dag, k2_score = k2_learn(data, k2_cfg, prior)
                k2_seconds = time.perf_counter() - t0
                result = RunResult("k2", run, dataset_id, k2_score, k2_seconds,
                                   k2_dag)
                emit(result)
                k2_results.append(result)

                t0 = time.perf_counter()
                orig_score = bde_log_score(data, ground.dag, prior)
                result = RunResult("original", run, dataset_id, orig_score,
                                   time.perf_counter() - t0, ground.dag)
                emit(result)
                original_results.append(result)

            # Statistics over the 6-decimal values written to runs.csv, so a
            # reader of that file reproduces the report exactly.
            ccga_scores = [round(r.best_score, 6) for r in ccga_results]
            k2_scores = [round(r.best_score, 6) for r in k2_results]
            orig_scores = [round(r.best_score, 6) for r in original_results]
            p_value = None
            if cfg.runs >= 2:
                try:
                    p_value = welch_one_tailed_t(ccga_scores, k2_scores)
                except ValidationError:
                    p_value = None
            entries.append(ComparisonEntry(
                size,
                AlgorithmStats.from_scores(ccga_scores),
                AlgorithmStats.from_scores(k2_scores),
                AlgorithmStats.from_scores(orig_scores),
                p_value,
            ))

            trace_name = "trace_mean.csv" if single_size else f"trace_mean_{size}.csv"
            _write_mean_trace(out / trace_name, traces)
            _save_best_structure(out / f"best_ccga_{size}.json", ground,
                                 ccga_results)
            _save_best_structure(out / f"best_k2_{size}.json", ground, k2_results)
    finally:
        runs_f.close()
        if timings_f is not None:
            timings_f.close()

    report = ComparisonReport(cfg.master_seed, cfg.runs, entries, all_results)
    (out / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2) + "\n")
    return report


def _write_mean_trace(path, traces) -> None:
    generations = len(traces[0])
    best = np.array([trace.best_scores for trace in traces])
    with open(path, "w", newline="") as f:
        f.write("generation,mean_best_score\n")
        for g in range(generations):
            f.write(f"{g},{best[:, g].mean():.6f}\n")


def _save_best_structure(path, ground: BayesianNetwork,
                         results: list[RunResult]) -> None:
    best = max(results, key=lambda r: r.best_score)
    save_structure(ground.variables, best.dag, path)
