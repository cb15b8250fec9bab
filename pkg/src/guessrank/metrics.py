"""Precision and performance metrics for estimator variants."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingEstimateError
from .estimator import SampleTable, estimate_many


def overlap(sample) -> float:
    """Fraction of sampled probability values that duplicate an earlier
    one: ``1 - distinct/n``. Accepts a table or raw draw neg-logs."""
    if isinstance(sample, SampleTable):
        values = sample.neglogs
    else:
        values = np.asarray(sample, dtype=np.float64)
    if len(values) == 0:
        raise ValueError("overlap needs at least one draw")
    return 1.0 - len(np.unique(values)) / len(values)


@dataclass
class ErrorReport:
    """Estimation error against a ground-truth ranked list.

    ``weighted_error`` weights each absolute rank difference by the
    password's model probability (the probabilities of a threshold slice
    do not sum to 1); ``simple_error`` is the plain mean. Per-password
    arrays are kept so differences can be re-binned by rank downstream.
    """

    weighted_error: float
    simple_error: float
    true_ranks: np.ndarray
    abs_diff: np.ndarray
    rel_error: np.ndarray
    trials: int = 1

    def relative_error_by_rank(self):
        """(true_rank, mean relative error) pairs, ascending by rank."""
        ranks, inverse = np.unique(self.true_ranks, return_inverse=True)
        sums = np.zeros(len(ranks))
        counts = np.zeros(len(ranks))
        np.add.at(sums, inverse, self.rel_error)
        np.add.at(counts, inverse, 1.0)
        return ranks, sums / counts


def error_report(ranked, estimates) -> ErrorReport:
    """Compare estimated ranks against a ranked list's true ranks.

    ``estimates`` is either an array aligned with the list or a mapping
    from password to estimated rank; a missing password raises
    :class:`MissingEstimateError`.
    """
    if hasattr(estimates, "keys"):
        values = np.empty(len(ranked), dtype=np.float64)
        for i, password in enumerate(ranked.passwords):
            try:
                values[i] = estimates[password]
            except KeyError:
                raise MissingEstimateError(password) from None
        estimates = values
    else:
        estimates = np.asarray(estimates, dtype=np.float64)
        if len(estimates) != len(ranked):
            raise ValueError(
                f"got {len(estimates)} estimates for {len(ranked)} passwords"
            )
    true_ranks = ranked.group_ranks.astype(np.float64)
    diff = np.abs(estimates - true_ranks)
    probs = np.exp2(-ranked.neglogs)
    return ErrorReport(
        weighted_error=float(np.sum(probs * diff)),
        simple_error=float(np.mean(diff)),
        true_ranks=ranked.group_ranks.copy(),
        abs_diff=diff,
        rel_error=diff / np.maximum(true_ranks, 1.0),
    )


def mean_error_reports(reports) -> ErrorReport:
    """Average reports from repeated trials over the same ranked list."""
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to average")
    first = reports[0]
    for report in reports[1:]:
        if len(report.true_ranks) != len(first.true_ranks):
            raise ValueError("reports cover different ranked lists")
    return ErrorReport(
        weighted_error=float(np.mean([r.weighted_error for r in reports])),
        simple_error=float(np.mean([r.simple_error for r in reports])),
        true_ranks=first.true_ranks.copy(),
        abs_diff=np.mean([r.abs_diff for r in reports], axis=0),
        rel_error=np.mean([r.rel_error for r in reports], axis=0),
        trials=sum(r.trials for r in reports),
    )


def top_k_exact(ranked, table) -> int:
    """Length of the exactly-ordered table head.

    The i-th distinct table probability is treated as the fixed estimate
    "rank i - 1"; returns the largest k such that the first k distinct
    entries all sit at exactly their own group rank in the ranked list.
    """
    distinct = np.unique(table.neglogs)
    positions = np.searchsorted(ranked.neglogs, distinct, side="left")
    matches = positions == np.arange(len(distinct))
    if matches.all():
        return len(distinct)
    return int(np.argmin(matches))


@dataclass
class BenchResult:
    """Per-variant timing: seconds per estimate, one value per repetition."""

    label: str
    seconds_per_query: list[float] = field(default_factory=list)

    @property
    def median(self) -> float:
        return float(np.median(self.seconds_per_query))


def bench_estimation(variants, queries, repetitions=5, backend=None,
                     baseline=None):
    """Time batch estimation for several (label, table, bins) variants.

    Runs every variant once untimed to warm caches, then ``repetitions``
    timed rounds, interleaved so drift hits all variants equally.
    Returns ``(results, ratios)`` where ratios divide each variant's
    median seconds-per-query by the baseline label's (the first label by
    default). Medians suppress scheduler noise.
    """
    queries = np.ascontiguousarray(np.asarray(queries, dtype=np.float64))
    results = [BenchResult(label) for label, _, _ in variants]
    for _, table, bins in variants:
        estimate_many(table, queries, bins=bins, backend=backend)
    for _ in range(repetitions):
        for result, (_, table, bins) in zip(results, variants):
            start = time.perf_counter()
            estimate_many(table, queries, bins=bins, backend=backend)
            elapsed = time.perf_counter() - start
            result.seconds_per_query.append(elapsed / len(queries))
    if baseline is None:
        baseline = variants[0][0]
    matches = [r for r in results if r.label == baseline]
    if not matches:
        raise ValueError(f"baseline label {baseline!r} is not among the variants")
    base = matches[0].median
    ratios = {r.label: r.median / base for r in results}
    return results, ratios
