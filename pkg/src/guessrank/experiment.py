"""Seeded experiment runner producing CSV bundles.

One master seed drives everything: per-stage and per-trial generators
are derived through ``numpy.random.SeedSequence`` spawns, so reruns with
the same config write byte-identical CSVs (except measured wall-clock
seconds in the timing table, which are reported as observed).

Outputs, one CSV per experiment, written to the output directory:

* ``table1_overlap.csv``: sampled-probability overlap by model and
  sample size, per run plus mean.
* ``table2_draws.csv``: draws needed to reach the target count of
  distinct probabilities, per run plus mean.
* ``table3_errors.csv``: weighted and simple errors of the estimator
  variants (original, interpolation, sampling, all), per trial plus mean.
* ``table4_timing.csv``: per-estimate time of plain vs binned search
  across table sizes, normalized to plain search at the first size.
* ``fig2_rank_curve.csv``: rank curve (index, neglog, cumulative rank)
  of one table per model.
* ``fig3_error_by_rank.csv``: per-password absolute difference and
  relative error, averaged over trials.
* ``fig4_topk.csv``: head-of-table positions vs true ranks, with the
  exactly-ordered prefix length.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

import numpy as np

from . import metrics, oracle
from .corpus import load_corpus_file, top_n
from .estimator import build_sample, default_bins, estimate_many, sample_neglogs
from .models import train_from_spec

VARIANTS = ("original", "interpolation", "sampling", "all")


@dataclass
class ExperimentConfig:
    corpus: str = ""
    corpus_format: str = "plain"
    top_n: int = 50000
    seed: int = 42
    models: tuple = ("4gram", "5gram", "backoff", "pcfg")
    precision_model: str = "pcfg"
    sample_size: int = 10000
    overlap_sizes: tuple = (10000, 30000, 50000)
    overlap_runs: int = 3
    draws_runs: int = 3
    threshold: float = 20.0
    oracle_budget: int = 10**7
    trials: int = 50
    bench_sizes: tuple = (10000, 30000, 50000, 100000)
    bench_bins: tuple = (100, 1000)
    bench_queries: int = 10**6
    bench_reps: int = 5
    backoff_threshold: int = 10
    weighted: bool = True
    outdir: str = "."

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**values)
        for name in ("models", "overlap_sizes", "bench_sizes", "bench_bins"):
            setattr(cfg, name, tuple(getattr(cfg, name)))
        return cfg


def train_model(spec, corpus, cfg):
    """Build a model from a spec string: ``Kgram``, ``backoff``, ``pcfg``."""
    return train_from_spec(
        spec, corpus, weighted=cfg.weighted, backoff_threshold=cfg.backoff_threshold
    )


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, comment, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"# {comment}\n")
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def _rng(seed_seq):
    return np.random.Generator(np.random.PCG64(seed_seq))


def run_overlap_table(models, cfg, seed_seq, outdir):
    """Overlap of plain sampling per model and sample size."""
    sizes = sorted(cfg.overlap_sizes)
    rows = []
    children = seed_seq.spawn(len(cfg.models) * cfg.overlap_runs)
    for mi, name in enumerate(cfg.models):
        model = models[name]
        per_size = {n: [] for n in sizes}
        for run in range(cfg.overlap_runs):
            rng = _rng(children[mi * cfg.overlap_runs + run])
            draws, _ = sample_neglogs(model, sizes[-1], rng)
            for n in sizes:
                per_size[n].append(metrics.overlap(draws[:n]))
        for n in sizes:
            for run, value in enumerate(per_size[n], start=1):
                rows.append((name, n, run, value))
            rows.append((name, n, "mean", float(np.mean(per_size[n]))))
    _write_csv(
        os.path.join(outdir, "table1_overlap.csv"),
        "table1-overlap: fraction of duplicate sampled probabilities, 1 - distinct/n",
        ("model", "sample_size", "run", "overlap"),
        rows,
    )


def run_draws_table(models, cfg, seed_seq, outdir):
    """Draws required to collect ``sample_size`` distinct probabilities."""
    rows = []
    children = seed_seq.spawn(len(cfg.models) * cfg.draws_runs)
    for mi, name in enumerate(cfg.models):
        model = models[name]
        counts = []
        for run in range(cfg.draws_runs):
            rng = _rng(children[mi * cfg.draws_runs + run])
            table = build_sample(model, cfg.sample_size, rng, mode="unique")
            counts.append(table.sampled_count)
            rows.append((name, cfg.sample_size, run + 1, table.sampled_count))
        rows.append((name, cfg.sample_size, "mean", float(np.mean(counts))))
    _write_csv(
        os.path.join(outdir, "table2_draws.csv"),
        "table2-draws: samples drawn until the target distinct-probability count",
        ("model", "target_size", "run", "sampled_count"),
        rows,
    )


def variant_estimates(plain_table, unique_table, queries, backend=None):
    """Rank estimates of all four estimator variants for the queries."""
    return {
        "original": estimate_many(plain_table, queries, backend=backend),
        "interpolation": estimate_many(
            plain_table, queries, interpolate=True, backend=backend
        ),
        "sampling": estimate_many(unique_table, queries, backend=backend),
        "all": estimate_many(
            unique_table, queries, interpolate=True, backend=backend
        ),
    }


def run_precision_tables(model, cfg, seed_seq, outdir):
    """Errors of the four variants against exact ranks, plus the
    by-rank breakdown and the exactly-ordered head-of-table report."""
    ranked = oracle.build_ranked_list(model, cfg.threshold, cfg.oracle_budget)
    queries = ranked.neglogs
    reports = {v: [] for v in VARIANTS}
    children = seed_seq.spawn(cfg.trials)
    first_unique = None
    for trial in range(cfg.trials):
        plain_seq, unique_seq = children[trial].spawn(2)
        plain = build_sample(model, cfg.sample_size, _rng(plain_seq))
        unique = build_sample(model, cfg.sample_size, _rng(unique_seq), mode="unique")
        if first_unique is None:
            first_unique = unique
        for variant, estimates in variant_estimates(plain, unique, queries).items():
            reports[variant].append(metrics.error_report(ranked, estimates))
    means = {v: metrics.mean_error_reports(reports[v]) for v in VARIANTS}
    rows = []
    for variant in VARIANTS:
        for trial, report in enumerate(reports[variant], start=1):
            rows.append((variant, trial, report.weighted_error, report.simple_error))
        rows.append(
            (variant, "mean", means[variant].weighted_error, means[variant].simple_error)
        )
    _write_csv(
        os.path.join(outdir, "table3_errors.csv"),
        "table3-errors: weighted and simple estimation errors per variant",
        ("variant", "trial", "weighted_error", "simple_error"),
        rows,
    )
    fig3_rows = []
    for variant in VARIANTS:
        mean = means[variant]
        for rank, diff, rel in zip(mean.true_ranks, mean.abs_diff, mean.rel_error):
            fig3_rows.append((variant, int(rank), float(diff), float(rel)))
    _write_csv(
        os.path.join(outdir, "fig3_error_by_rank.csv"),
        f"fig3-error-by-rank: per-password errors, mean of {cfg.trials} trials",
        ("variant", "true_rank", "abs_diff", "rel_error"),
        fig3_rows,
    )
    k = metrics.top_k_exact(ranked, first_unique)
    distinct = np.unique(first_unique.neglogs)
    positions = np.searchsorted(ranked.neglogs, distinct, side="left")
    limit = min(len(distinct), max(1000, 2 * k))
    fig4_rows = [
        (i + 1, float(distinct[i]), int(positions[i]), int(positions[i] == i))
        for i in range(limit)
    ]
    _write_csv(
        os.path.join(outdir, "fig4_topk.csv"),
        f"fig4-topk: table position vs true rank group; exact head length k={k}",
        ("position", "neglog", "true_rank", "exact"),
        fig4_rows,
    )
    return ranked, means


def run_timing_table(model, cfg, seed_seq, outdir, backend=None):
    """Per-estimate timing of plain vs binned search across table sizes."""
    sizes = list(cfg.bench_sizes)
    query_seq, *table_seqs = seed_seq.spawn(len(sizes) + 1)
    queries, _ = sample_neglogs(model, cfg.bench_queries, _rng(query_seq))
    variants = []
    for size, table_seq in zip(sizes, table_seqs):
        table = build_sample(model, size, _rng(table_seq))
        variants.append((f"original/{size}", table, None))
        for n_bins in cfg.bench_bins:
            variants.append((f"bins{n_bins}/{size}", table, default_bins(table, n_bins)))
    baseline = f"original/{sizes[0]}"
    results, ratios = metrics.bench_estimation(
        variants, queries, repetitions=cfg.bench_reps, backend=backend,
        baseline=baseline,
    )
    rows = []
    for result in results:
        variant, size = result.label.split("/")
        for rep, seconds in enumerate(result.seconds_per_query, start=1):
            rows.append((int(size), variant, rep, seconds, ""))
        rows.append(
            (int(size), variant, "median", result.median, ratios[result.label])
        )
    _write_csv(
        os.path.join(outdir, "table4_timing.csv"),
        f"table4-timing: seconds per estimate, relative to {baseline}",
        ("sample_size", "variant", "rep", "seconds_per_query", "relative"),
        rows,
    )
    return ratios


def run_rank_curves(models, cfg, seed_seq, outdir):
    """One rank curve per model for log-scale plotting."""
    children = seed_seq.spawn(len(cfg.models))
    path = os.path.join(outdir, "fig2_rank_curve.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(
            "# fig2-rank-curve: cumulative rank by table position, one table per model\n"
        )
        handle.write("model,index,neglog,cumrank\n")
        for mi, name in enumerate(cfg.models):
            table = build_sample(models[name], cfg.sample_size, _rng(children[mi]))
            for i, (neglog, cumrank) in enumerate(
                zip(table.neglogs, table.cumranks), start=1
            ):
                handle.write(f"{name},{i},{float(neglog)!r},{float(cumrank)!r}\n")


def run_experiment(cfg: ExperimentConfig, log=None):
    """Run every experiment stage and write the CSV bundle."""
    def say(message):
        if log is not None:
            print(message, file=log)

    os.makedirs(cfg.outdir, exist_ok=True)
    corpus = top_n(load_corpus_file(cfg.corpus, cfg.corpus_format), cfg.top_n)
    say(f"corpus: {len(corpus)} unique passwords, total count {corpus.total_count}")
    names = list(dict.fromkeys(list(cfg.models) + [cfg.precision_model]))
    models = {}
    for name in names:
        models[name] = train_model(name, corpus, cfg)
        say(f"trained {name}")
    root = np.random.SeedSequence(cfg.seed)
    overlap_seq, draws_seq, precision_seq, bench_seq, curve_seq = root.spawn(5)
    with open(
        os.path.join(cfg.outdir, "config.json"), "w", encoding="utf-8"
    ) as handle:
        json.dump(dataclasses.asdict(cfg), handle, indent=2, sort_keys=True)
        handle.write("\n")
    run_overlap_table(models, cfg, overlap_seq, cfg.outdir)
    say("wrote table1_overlap.csv")
    run_draws_table(models, cfg, draws_seq, cfg.outdir)
    say("wrote table2_draws.csv")
    run_precision_tables(models[cfg.precision_model], cfg, precision_seq, cfg.outdir)
    say("wrote table3_errors.csv, fig3_error_by_rank.csv, fig4_topk.csv")
    run_timing_table(models[cfg.precision_model], cfg, bench_seq, cfg.outdir)
    say("wrote table4_timing.csv")
    run_rank_curves(models, cfg, curve_seq, cfg.outdir)
    say("wrote fig2_rank_curve.csv")
