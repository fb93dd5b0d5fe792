"""Command-line interface.

Subcommands: random-net, sample, score, learn-ccga, learn-k2, compare,
enumerate, count-dags. Exit codes: 0 success, 1 runtime failure,
2 usage/validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .baselines import (
    K2Config,
    count_dags,
    enumerate_dags,
    k2_learn,
    score_all_dags,
)
from .bayesnet import (
    Dag,
    ancestral_sample,
    load_dataset,
    load_network,
    random_network,
    save_dataset,
    save_network,
    save_structure,
)
from .encoding import decode_parents
from .errors import (
    CoevoBnError,
    EmptyDataError,
    ParseError,
    SchemaError,
    ValidationError,
)
from .evolution import GaConfig, evolve
from .harness import ExperimentConfig, run_comparison, score_structure
from .scoring import fit_network

USAGE_ERRORS = (ValidationError, ParseError, SchemaError, EmptyDataError,
                FileNotFoundError)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--config", type=str, default=None,
                        help="JSON config file")
    common.add_argument("--out", type=str, default=None,
                        help="output directory")

    parser = argparse.ArgumentParser(
        prog="coevobn",
        description="Bayesian network structure learning toolkit",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("random-net", parents=[common],
                       help="generate a synthetic ground-truth network")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--max-arity", type=int, default=2)
    p.add_argument("--density", type=float, default=0.2)
    p.add_argument("--out-file", type=str, default=None)

    p = sub.add_parser("sample", parents=[common],
                       help="draw a dataset from a network by ancestral sampling")
    p.add_argument("--net", type=str, required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--out-file", type=str, default=None)

    p = sub.add_parser("score", parents=[common],
                       help="BDe log-score of a stored structure on a dataset")
    p.add_argument("--net", type=str, required=True)
    p.add_argument("--data", type=str, required=True)

    p = sub.add_parser("learn-ccga", parents=[common],
                       help="learn a structure with the coevolutionary GA")
    p.add_argument("--data", type=str, required=True)
    p.add_argument("--no-cache", action="store_true",
                   help="disable local-score memoization")
    p.add_argument("--fit-cpts", action="store_true",
                   help="also export the structure with posterior-mean CPTs")

    p = sub.add_parser("learn-k2", parents=[common],
                       help="learn a structure with greedy K2 (random ordering)")
    p.add_argument("--data", type=str, required=True)
    p.add_argument("--max-parents", type=int, default=10)
    p.add_argument("--fit-cpts", action="store_true",
                   help="also export the structure with posterior-mean CPTs")

    p = sub.add_parser("compare", parents=[common],
                       help="paired CCGA vs K2 experiment from a JSON config")

    p = sub.add_parser("enumerate", parents=[common],
                       help="enumerate all DAGs on n nodes, optionally scoring them")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--data", type=str, default=None)
    p.add_argument("--out-file", type=str, default=None)

    p = sub.add_parser("count-dags", parents=[common],
                       help="exact number of labeled DAGs on n nodes")
    p.add_argument("n", type=int)

    return parser


def _load_json_config(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"{path}: cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _ga_config(args) -> GaConfig:
    doc = _load_json_config(args.config) if args.config else {}
    cfg = GaConfig(**doc)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _out_dir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_random_net(args) -> int:
    net = random_network(args.nodes, args.max_arity, args.density,
                         args.seed if args.seed is not None else 0)
    if args.out_file:
        save_network(net, args.out_file)
        print(f"wrote {args.out_file} ({net.n} nodes, {net.dag.edge_count} edges)")
    else:
        save_network(net, "/dev/stdout")
    return 0


def _cmd_sample(args) -> int:
    net = load_network(args.net)
    data = ancestral_sample(net, args.rows,
                            args.seed if args.seed is not None else 0)
    if args.out_file:
        save_dataset(data, args.out_file)
        print(f"wrote {args.out_file} ({data.n_rows} rows)")
    else:
        save_dataset(data, "/dev/stdout")
    return 0


def _cmd_score(args) -> int:
    print(f"{score_structure(args.net, args.data):.6f}")
    return 0


def _cmd_learn_ccga(args) -> int:
    data = load_dataset(args.data)
    cfg = _ga_config(args)
    state, trace = evolve(data, cfg, use_cache=not args.no_cache)
    best = state.best_so_far
    print(f"best_score={best.log_score:.6f}")
    out = _out_dir(args)
    if out is not None:
        dag = Dag(data.n_cols, decode_parents(best.perm.order, best.bits.bits))
        save_structure(data.variables, dag, out / "ccga_structure.json")
        trace.write_csv(out / "ccga_trace.csv")
        print(f"wrote {out / 'ccga_structure.json'} and {out / 'ccga_trace.csv'}")
        if args.fit_cpts:
            save_network(fit_network(data, dag), out / "ccga_network.json")
            print(f"wrote {out / 'ccga_network.json'}")
    return 0


def _cmd_learn_k2(args) -> int:
    data = load_dataset(args.data)
    cfg = K2Config(max_parents=args.max_parents,
                   seed=args.seed if args.seed is not None else 0)
    dag, score = k2_learn(data, cfg)
    print(f"best_score={score:.6f}")
    out = _out_dir(args)
    if out is not None:
        save_structure(data.variables, dag, out / "k2_structure.json")
        print(f"wrote {out / 'k2_structure.json'}")
        if args.fit_cpts:
            save_network(fit_network(data, dag), out / "k2_network.json")
            print(f"wrote {out / 'k2_network.json'}")
    return 0


def _cmd_compare(args) -> int:
    if not args.config:
        raise ValidationError("compare requires --config <json>")
    cfg = ExperimentConfig.from_dict(_load_json_config(args.config))
    if args.out is not None:
        cfg.out_dir = args.out
    if args.seed is not None:
        cfg.master_seed = args.seed
    report = run_comparison(cfg)
    for entry in report.entries:
        d = entry.to_dict()
        p = d["p_value_ccga_greater"]
        print(f"sample_size={entry.sample_size} "
              f"ccga_mean={d['ccga']['mean']:.6f} k2_mean={d['k2']['mean']:.6f} "
              f"p={'n/a' if p is None else format(p, '.6f')}")
    print(f"wrote {Path(cfg.out_dir) / 'report.json'}")
    return 0


def _cmd_enumerate(args) -> int:
    if args.data is not None:
        data = load_dataset(args.data)
        if data.n_cols != args.nodes:
            raise SchemaError(
                f"--nodes {args.nodes} does not match dataset columns "
                f"{data.n_cols}"
            )
        lines = ["dag,score"]
        count = 0
        for dag, score in score_all_dags(data):
            spec = ";".join(",".join(map(str, ps)) for ps in dag.parents)
            lines.append(f"{spec},{score:.6f}")
            count += 1
        text = "\n".join(lines) + "\n"
        if args.out_file:
            Path(args.out_file).write_text(text)
            print(f"wrote {args.out_file} ({count} structures)")
        else:
            sys.stdout.write(text)
        return 0
    total = sum(1 for _ in enumerate_dags(args.nodes))
    print(total)
    return 0


def _cmd_count_dags(args) -> int:
    print(count_dags(args.n))
    return 0


_COMMANDS = {
    "random-net": _cmd_random_net,
    "sample": _cmd_sample,
    "score": _cmd_score,
    "learn-ccga": _cmd_learn_ccga,
    "learn-k2": _cmd_learn_k2,
    "compare": _cmd_compare,
    "enumerate": _cmd_enumerate,
    "count-dags": _cmd_count_dags,
}


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CoevoBnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
