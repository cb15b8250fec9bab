"""Command-line interface.

Subcommands: ``train``, ``sample``, ``estimate``, ``oracle``,
``experiment``, ``bench``. Exit codes: 0 success, 2 input or file
errors, 3 exhausted budgets. ``GUESSRANK_OUTDIR`` sets the default
output directory for ``experiment``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import estimator, kernels, metrics, oracle
from .corpus import load_corpus_file, top_n
from .errors import DrawBudgetError, EnumerationBudgetError, GuessrankError
from .experiment import ExperimentConfig, run_experiment
from .models import load_model, train_from_spec


def _int_list(text):
    return tuple(int(part) for part in text.split(",") if part)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="guessrank",
        description="Train password models and estimate guess ranks by Monte Carlo sampling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train a model and save it")
    train.add_argument("--corpus", required=True, help="password corpus file")
    train.add_argument("--format", default="plain", choices=["plain", "counted"])
    train.add_argument("--top-n", type=int, default=None, help="train on the N most frequent passwords")
    train.add_argument("--model", required=True,
                       help="model spec: Kgram (e.g. 4gram), backoff, or pcfg; "
                            "a comma-separated list with --sweep")
    train.add_argument("--backoff-threshold", type=int, default=10)
    train.add_argument("--unweighted", action="store_true",
                       help="ignore corpus counts during training")
    train.add_argument("--out", help="model file to write (required unless --sweep)")
    train.add_argument("--sweep", type=_int_list, default=None,
                       help="comma-separated training sizes; emits a size CSV instead of a model")
    train.add_argument("--csv", help="CSV path for --sweep output (default stdout)")

    sample = sub.add_parser("sample", help="build a sample table from a model")
    sample.add_argument("--model", required=True)
    sample.add_argument("--n", type=int, required=True, help="table size")
    sample.add_argument("--mode", default="plain", choices=["plain", "unique"])
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--draw-budget", type=int, default=None)
    sample.add_argument("--out", required=True, help="table file to write")
    sample.add_argument("--csv", help="also export index,neglog,cumrank CSV")

    estimate = sub.add_parser("estimate", help="estimate ranks of passwords on stdin")
    estimate.add_argument("--model", required=True)
    estimate.add_argument("--table", required=True)
    estimate.add_argument("--interpolate", action="store_true")
    estimate.add_argument("--bins", type=int, default=None,
                          help="narrow the search with N uniform bins over neg-log [0, 100)")
    estimate.add_argument("--backend", default=None, choices=["compiled", "pure"])

    orc = sub.add_parser("oracle", help="exact ranks of all passwords above a threshold")
    orc.add_argument("--model", required=True)
    orc.add_argument("--threshold", type=float, required=True,
                     help="max neg-log2 probability to enumerate")
    orc.add_argument("--budget", type=int, default=oracle.DEFAULT_ENTRY_BUDGET)
    orc.add_argument("--out", required=True, help="CSV file: rank,neglog,password")

    exp = sub.add_parser("experiment", help="run the full experiment bundle")
    exp.add_argument("--config", help="JSON config; flags override its values")
    exp.add_argument("--corpus")
    exp.add_argument("--format", dest="corpus_format", choices=["plain", "counted"])
    exp.add_argument("--top-n", dest="top_n", type=int)
    exp.add_argument("--seed", type=int)
    exp.add_argument("--models", type=lambda s: tuple(s.split(",")))
    exp.add_argument("--precision-model", dest="precision_model")
    exp.add_argument("--sample-size", dest="sample_size", type=int)
    exp.add_argument("--overlap-sizes", dest="overlap_sizes", type=_int_list)
    exp.add_argument("--overlap-runs", dest="overlap_runs", type=int)
    exp.add_argument("--draws-runs", dest="draws_runs", type=int)
    exp.add_argument("--threshold", type=float)
    exp.add_argument("--oracle-budget", dest="oracle_budget", type=int)
    exp.add_argument("--trials", type=int)
    exp.add_argument("--bench-sizes", dest="bench_sizes", type=_int_list)
    exp.add_argument("--bench-bins", dest="bench_bins", type=_int_list)
    exp.add_argument("--bench-queries", dest="bench_queries", type=int)
    exp.add_argument("--bench-reps", dest="bench_reps", type=int)
    exp.add_argument("--backoff-threshold", dest="backoff_threshold", type=int)
    exp.add_argument("--unweighted", action="store_true")
    exp.add_argument("--outdir")
    exp.add_argument("--quiet", action="store_true")

    bench = sub.add_parser("bench", help="time plain vs binned estimation")
    bench.add_argument("--model", help="model file; omit for synthetic tables")
    bench.add_argument("--sizes", type=_int_list, default=(10000, 30000, 50000, 100000))
    bench.add_argument("--bins", type=_int_list, default=(100, 1000))
    bench.add_argument("--queries", type=int, default=10**6)
    bench.add_argument("--reps", type=int, default=5)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--backend", default=None, choices=["compiled", "pure"])
    bench.add_argument("--compare-backends", action="store_true",
                       help="run on every available backend and report the speedup")
    bench.add_argument("--csv", help="write rows to a CSV file instead of stdout")
    return parser


def _cmd_train(args):
    corpus = load_corpus_file(args.corpus, args.format)
    weighted = not args.unweighted
    if args.sweep:
        rows = ["n,model,size_bytes"]
        for size in args.sweep:
            cut = top_n(corpus, size)
            for spec in args.model.split(","):
                model = train_from_spec(
                    spec, cut, weighted=weighted,
                    backoff_threshold=args.backoff_threshold,
                )
                rows.append(f"{size},{spec},{model.size_bytes()}")
        text = "\n".join(rows) + "\n"
        if args.csv:
            with open(args.csv, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
        return 0
    if not args.out:
        print("error: --out is required without --sweep", file=sys.stderr)
        return 2
    if args.top_n is not None:
        corpus = top_n(corpus, args.top_n)
    model = train_from_spec(
        args.model, corpus, weighted=weighted,
        backoff_threshold=args.backoff_threshold,
    )
    written = model.save(args.out)
    print(f"{args.model}: {written} bytes -> {args.out}")
    return 0


def _cmd_sample(args):
    model = load_model(args.model)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    table = estimator.build_sample(
        model, args.n, rng, mode=args.mode, draw_budget=args.draw_budget
    )
    written = estimator.save_table(table, args.out)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="\n") as handle:
            estimator.write_table_csv(table, handle)
    print(
        f"{len(table)} entries ({written} bytes), n_effective={table.n_effective}, "
        f"sampled_count={table.sampled_count}, overlap={metrics.overlap(table)!r}"
    )
    return 0


def _cmd_estimate(args):
    model = load_model(args.model)
    table = estimator.load_table(args.table)
    bins = estimator.default_bins(table, args.bins) if args.bins else None
    passwords = [line.rstrip("\r\n") for line in sys.stdin]
    neglogs = np.array(
        [model.neg_log2_prob(pw) for pw in passwords], dtype=np.float64
    )
    ranks = estimator.estimate_many(
        table, neglogs, interpolate=args.interpolate, bins=bins,
        backend=args.backend,
    )
    out = sys.stdout
    for password, neglog, rank in zip(passwords, neglogs, ranks):
        out.write(f"{password}\t{float(neglog)!r}\t{float(rank)!r}\n")
    return 0


def _cmd_oracle(args):
    model = load_model(args.model)
    ranked = oracle.build_ranked_list(model, args.threshold, args.budget)
    with open(args.out, "w", encoding="utf-8", newline="") as handle:
        oracle.write_ranked_csv(ranked, handle)
    print(f"{len(ranked)} passwords at neg-log <= {args.threshold} -> {args.out}")
    return 0


def _cmd_experiment(args):
    values = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as handle:
            values.update(json.load(handle))
    for name in (
        "corpus", "corpus_format", "top_n", "seed", "models", "precision_model",
        "sample_size", "overlap_sizes", "overlap_runs", "draws_runs", "threshold",
        "oracle_budget", "trials", "bench_sizes", "bench_bins", "bench_queries",
        "bench_reps", "backoff_threshold", "outdir",
    ):
        value = getattr(args, name)
        if value is not None:
            values[name] = value
    if args.unweighted:
        values["weighted"] = False
    if "outdir" not in values:
        values["outdir"] = os.environ.get("GUESSRANK_OUTDIR", ".")
    cfg = ExperimentConfig.from_dict(values)
    if not cfg.corpus:
        print("error: a corpus is required (--corpus or config)", file=sys.stderr)
        return 2
    run_experiment(cfg, log=None if args.quiet else sys.stderr)
    return 0


def _synthetic_table(rng, size):
    # gamma-distributed neg-logs give a realistic bulk in [5, 60]
    draws = rng.gamma(shape=8.0, scale=3.0, size=size)
    return estimator.table_from_neglogs(draws)


def _cmd_bench(args):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    if args.model:
        model = load_model(args.model)
        queries, _ = estimator.sample_neglogs(model, args.queries, rng)
        tables = {
            size: estimator.build_sample(model, size, rng) for size in args.sizes
        }
    else:
        queries = rng.gamma(shape=8.0, scale=3.0, size=args.queries)
        tables = {size: _synthetic_table(rng, size) for size in args.sizes}
    variants = []
    for size in args.sizes:
        variants.append((f"original/{size}", tables[size], None))
        for n_bins in args.bins:
            variants.append(
                (f"bins{n_bins}/{size}", tables[size], estimator.default_bins(tables[size], n_bins))
            )
    backends = (
        kernels.available_backends() if args.compare_backends
        else [args.backend or kernels.default_backend_name()]
    )
    baseline = f"original/{args.sizes[0]}"
    rows = [("backend", "sample_size", "variant", "seconds_per_query", "relative")]
    medians = {}
    for backend in backends:
        results, ratios = metrics.bench_estimation(
            variants, queries, repetitions=args.reps, backend=backend,
            baseline=baseline,
        )
        for result in results:
            variant, size = result.label.split("/")
            medians[(backend, result.label)] = result.median
            rows.append(
                (backend, size, variant, repr(result.median), repr(ratios[result.label]))
            )
    text = "\n".join(",".join(str(v) for v in row) for row in rows) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    if args.compare_backends and len(backends) > 1:
        for label, _, _ in variants:
            speedup = medians[("pure", label)] / medians[("compiled", label)]
            print(f"compiled speedup over pure, {label}: {speedup:.1f}x")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "sample": _cmd_sample,
    "estimate": _cmd_estimate,
    "oracle": _cmd_oracle,
    "experiment": _cmd_experiment,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (DrawBudgetError, EnumerationBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GuessrankError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
