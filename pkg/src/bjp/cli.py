"""Command-line entry point: ``bjp <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import secrets
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .bench import ExperimentConfig, aggregate, run_experiment, write_outputs
from .citest import CITestEngine
from .dataset import read_csv, write_csv
from .errors import DataFormatError, InvariantError
from .graph import (gen_hub, gen_random, gen_scale_free, hamming_distance, irregularity,
                    read_edge_list, write_edge_list)
from .mrf_sim import BURN_IN, ITERATIONS, MrfModel, gibbs_sample, random_model
from .scores import SCORES
from .search import DEFAULT_MAX_N, exhaustive_search, hill_climb

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(32)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_gen_graph(args) -> int:
    rng = np.random.default_rng(_seed(args)) if args.kind in ("scale-free", "random") else None
    try:
        if args.kind == "hub":
            g = gen_hub(args.n, args.hubs)
        elif args.kind == "star":
            g = gen_hub(args.n, 1)
        elif args.kind == "scale-free":
            g = gen_scale_free(args.n, args.m, rng)
        else:
            g = gen_random(args.n, args.p, rng)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(write_edge_list(g), args.out)
    print(f"n={g.n} edges={len(g.edges)} irr={irregularity(g)}", file=sys.stderr)
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.nd < 1:
        raise UsageError(f"--nd must be >= 1, got {args.nd}")
    seed = _seed(args)
    text = _read(args.input)
    if text.lstrip().startswith("{"):
        model = MrfModel.from_json(text)
    else:
        g = read_edge_list(text)
        cards = (args.cardinality,) * g.n
        model = random_model(g, cards, np.random.default_rng([seed, 1]))
    if args.save_model:
        Path(args.save_model).write_text(model.to_json(), encoding="utf-8")
    print(f"gibbs: burn-in={args.burn_in} iterations={args.iterations} rows={args.nd} "
          f"backend={_kernels.backend()}", file=sys.stderr)
    data = gibbs_sample(model, args.nd, args.burn_in, args.iterations, seed)
    _emit(write_csv(data), args.out)
    return EXIT_OK


def _parse_cards(spec: str | None):
    if not spec:
        return None
    try:
        return [int(c) for c in spec.split(",")]
    except ValueError:
        raise UsageError(f"--cardinalities must be comma-separated integers, got {spec!r}") from None


def cmd_learn(args) -> int:
    text = _read(args.data)
    cards = _parse_cards(args.cardinalities)
    data = read_csv(text)
    if cards is not None:
        if len(cards) == 1:
            cards = cards * data.n_vars
        data = read_csv(text, cards)
    engine = CITestEngine(data, args.alpha, args.alpha_marginal, args.prior)
    score = SCORES[args.score]
    if args.method == "exhaustive":
        if data.n_vars > args.max_n:
            raise UsageError(f"exhaustive search capped at n={args.max_n}; dataset has {data.n_vars}")
        res = exhaustive_search(data.n_vars, score, engine, max_n=args.max_n)
        print(f"enumerated {res.evaluations} graphs", file=sys.stderr)
    else:
        res = hill_climb(data.n_vars, score, engine)
        print(f"hill climbing: {res.iterations} iterations, {res.evaluations} score evaluations",
              file=sys.stderr)
    bd = res.breakdown
    print(f"score={args.score} total={res.best_score!r} evaluated={len(bd.evaluated())} "
          f"inferred={len(bd.inferred())} edges={len(res.best_graph.edges)}", file=sys.stderr)
    _emit(write_edge_list(res.best_graph), args.out)
    if args.report:
        Path(args.report).write_text(bd.to_report(), encoding="utf-8")
    return EXIT_OK


def cmd_eval(args) -> int:
    learned = read_edge_list(_read(args.learned))
    truth = read_edge_list(_read(args.truth))
    if learned.n != truth.n:
        raise DataFormatError(f"node-count mismatch: learned n={learned.n}, truth n={truth.n}")
    ham = hamming_distance(learned, truth)
    fp = len(learned.edges - truth.edges)
    fn = len(truth.edges - learned.edges)
    print(f"hamming={ham} false_positives={fp} false_negatives={fn} "
          f"irr_learned={irregularity(learned)} irr_truth={irregularity(truth)}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg_path = Path(args.config)
    cfg = ExperimentConfig.from_json(_read(args.config), cfg_path.resolve().parent)
    if args.seed is not None:
        cfg.seed = args.seed
    records = run_experiment(cfg, workers=args.threads)
    out_dir = Path(args.out) if args.out else cfg_path.resolve().parent / "results"
    paths = write_outputs(records, cfg.scores, out_dir)
    for row in aggregate(records):
        print(f"{row.structure} {row.score} nd={row.nd} success={row.success_rate:.2f} "
              f"hamming={row.hamming_mean:.2f} ({row.hamming_std:.2f})", file=sys.stderr)
    print(f"{len(records)} records -> {paths['results']}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bjp", description="Markov network structure learning with the BJP and IB scores.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-graph", help="generate a structure as an edge list")
    g.add_argument("--kind", choices=["hub", "star", "scale-free", "random"], required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--hubs", type=int, default=1)
    g.add_argument("--m", type=int, default=1, help="attachments per node (scale-free)")
    g.add_argument("--p", type=float, default=0.2, help="edge probability (random)")
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_graph)

    s = sub.add_parser("sample", help="Gibbs-sample a dataset from a model or an edge list")
    s.add_argument("input", help="model JSON file or edge-list file")
    s.add_argument("--nd", "--n-rows", dest="nd", type=int, required=True)
    s.add_argument("--burn-in", type=int, default=BURN_IN)
    s.add_argument("--iterations", type=int, default=ITERATIONS)
    s.add_argument("--cardinality", type=int, default=2)
    s.add_argument("--seed", type=int)
    s.add_argument("--save-model")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    l = sub.add_parser("learn", help="learn a structure from a CSV dataset")
    l.add_argument("data")
    l.add_argument("--score", choices=sorted(SCORES), default="bjp")
    l.add_argument("--method", choices=["exhaustive", "hc"], default="hc")
    l.add_argument("--alpha", type=float, default=1.0)
    l.add_argument("--alpha-marginal", type=float, default=1.0)
    l.add_argument("--prior", type=float, default=0.5, help="prior probability of independence")
    l.add_argument("--cardinalities", help="one value for all variables or a comma-separated list")
    l.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)
    l.add_argument("--report", help="write the per-assertion score report here")
    l.add_argument("--out")
    l.set_defaults(func=cmd_learn)

    e = sub.add_parser("eval", help="compare a learned structure with the truth")
    e.add_argument("learned")
    e.add_argument("truth")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="run an experiment grid from a JSON config")
    b.add_argument("config")
    b.add_argument("--out", help="output directory (default: results/ next to the config)")
    b.add_argument("--seed", type=int, help="override the config's base seed")
    b.add_argument("--threads", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bjp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"bjp: internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (DataFormatError, ValueError, IndexError) as exc:
        print(f"bjp: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
