"""Monte Carlo guess-rank estimation.

The estimator's entire runtime state is a sample table: ``n`` model
draws sorted by ascending neg-log2 probability together with cumulative
rank values ``c_i = (1/n) * sum_{j<=i} 1/p(draw_j)``. The rank of a
query password is the cumulative value at the largest index whose
probability strictly exceeds the query's; a binary search finds it.

Three optional refinements are provided:

* log-space interpolation between adjacent cumulative values,
* unique-probability sampling, which draws until the table holds ``n``
  distinct probabilities and collapses duplicate runs without changing
  any estimate,
* a bin index of precomputed lower/upper search bounds per neg-log
  interval, which narrows the binary search and returns bit-identical
  results.
"""

from __future__ import annotations

import hashlib
import math
import struct
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from . import _ranksearch_py as _pure
from .errors import DrawBudgetError, FileFormatError, TableMismatchError
from .kernels import get_backend

TABLE_MAGIC = b"PWTABLE1"
TABLE_VERSION = 1
_HEADER = struct.Struct("<8sIQQQ")

_INF = float("inf")


class SampleTable:
    """Sorted sample neg-logs plus cumulative ranks.

    ``n_effective`` is the draw count used in the ``1/n`` factor (the
    number of finite draws that entered the cumulative sums, which can
    exceed ``len(neglogs)`` after compression); ``sampled_count`` is
    the total number of draws attempted, including rejected ones.
    """

    def __init__(self, neglogs, cumranks, n_effective, sampled_count):
        self.neglogs = neglogs
        self.cumranks = cumranks
        self.n_effective = int(n_effective)
        self.sampled_count = int(sampled_count)
        self._fingerprint = None
        self._neglog_list = None
        self._cumrank_list = None

    def __len__(self):
        return len(self.neglogs)

    @property
    def fingerprint(self) -> int:
        if self._fingerprint is None:
            digest = hashlib.blake2b(self.neglogs.tobytes(), digest_size=8)
            self._fingerprint = int.from_bytes(digest.digest(), "little")
        return self._fingerprint

    def _lists(self):
        # plain-float copies so single-query math matches the kernels bit
        # for bit (numpy scalar power is not guaranteed to equal libm pow)
        if self._neglog_list is None:
            self._neglog_list = self.neglogs.tolist()
            self._cumrank_list = self.cumranks.tolist()
        return self._neglog_list, self._cumrank_list


@dataclass(frozen=True)
class RankEstimate:
    """Estimated rank plus how it was produced."""

    rank: float
    index: int
    interpolated: bool
    bin_index: int | None = None


@dataclass(frozen=True)
class BinIndex:
    """Per-bin search bounds: queries in bin ``i`` binary-search only
    positions ``lo[i]..hi[i]``. ``width`` is set for uniform layouts,
    which locate bins in constant time (by multiplying with the stored
    reciprocal); otherwise taus are searched."""

    taus: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    table_fingerprint: int
    width: float | None
    inv_width: float
    nbins: int

    def __len__(self):
        return self.nbins


def table_from_neglogs(draws, n_effective=None, sampled_count=None, compress=False):
    """Build a table from raw draw neg-logs (any order, duplicates kept).

    ``n_effective`` defaults to the number of draws. With ``compress``,
    runs of equal neg-logs collapse to one entry carrying the run's last
    cumulative value, which leaves every estimate unchanged.
    """
    draws = np.asarray(draws, dtype=np.float64)
    if draws.ndim != 1 or len(draws) == 0:
        raise ValueError("draws must be a non-empty 1-d array")
    if np.isnan(draws).any() or np.isinf(draws).any():
        raise ValueError("draw neg-logs must be finite")
    if (draws < 0).any():
        raise ValueError("draw neg-logs must be nonnegative")
    if n_effective is None:
        n_effective = len(draws)
    if n_effective < 1:
        raise ValueError("n_effective must be positive")
    if sampled_count is None:
        sampled_count = len(draws)
    neglogs = np.sort(draws)
    cumranks = np.cumsum(np.exp2(neglogs)) / n_effective
    if not np.isfinite(cumranks[-1]):
        raise ValueError("cumulative ranks overflow float64")
    if compress:
        keep = np.append(np.nonzero(np.diff(neglogs))[0], len(neglogs) - 1)
        neglogs = np.ascontiguousarray(neglogs[keep])
        cumranks = np.ascontiguousarray(cumranks[keep])
    return SampleTable(neglogs, cumranks, n_effective, sampled_count)


def compress(table: SampleTable) -> SampleTable:
    """Collapse equal-neglog runs, preserving each run's last cumulative
    value so estimates against the compressed table are identical."""
    neglogs = table.neglogs
    keep = np.append(np.nonzero(np.diff(neglogs))[0], len(neglogs) - 1)
    return SampleTable(
        np.ascontiguousarray(neglogs[keep]),
        np.ascontiguousarray(table.cumranks[keep]),
        table.n_effective,
        table.sampled_count,
    )


def sample_neglogs(model, n, rng, draw_budget=None):
    """Draw ``n`` finite neg-logs from the model, in draw order.

    Draws with infinite neg-log are rejected and redrawn but still
    counted; returns ``(neglogs, attempts)``.
    """
    draws = np.empty(n, dtype=np.float64)
    attempts = 0
    got = 0
    while got < n:
        if draw_budget is not None and attempts >= draw_budget:
            raise DrawBudgetError(
                f"exhausted the draw budget of {draw_budget} before "
                f"collecting {n} finite draws"
            )
        _, neglog = model.sample(rng)
        attempts += 1
        if neglog == _INF:
            continue
        draws[got] = neglog
        got += 1
    return draws, attempts


def build_sample(model, n, rng, mode="plain", draw_budget=None):
    """Build a sample table of size ``n`` from a trained model.

    ``mode="plain"`` takes exactly ``n`` draws. ``mode="unique"`` draws
    until ``n`` distinct neg-log values have been seen, then compresses,
    so the table has ``n`` entries, zero overlap, and cumulative sums
    taken over all draws. A model that cannot produce ``n`` distinct
    probabilities fails with :class:`DrawBudgetError` once the draw
    budget (default ``max(10**6, 200 * n)``) is exhausted.
    """
    if n < 1:
        raise ValueError("sample size must be positive")
    if mode == "plain":
        draws, attempts = sample_neglogs(model, n, rng, draw_budget)
        return table_from_neglogs(draws, sampled_count=attempts)
    if mode != "unique":
        raise ValueError(f"unknown sampling mode {mode!r}")
    if draw_budget is None:
        draw_budget = max(10**6, 200 * n)
    draws = []
    distinct = set()
    attempts = 0
    while len(distinct) < n:
        if attempts >= draw_budget:
            raise DrawBudgetError(
                f"no {n} distinct probabilities within {draw_budget} draws "
                f"({len(distinct)} found); the model may not have that many"
            )
        _, neglog = model.sample(rng)
        attempts += 1
        if neglog == _INF:
            continue
        draws.append(neglog)
        distinct.add(neglog)
    return table_from_neglogs(draws, sampled_count=attempts, compress=True)


def _assign_bins(values, taus, inv_width, nbins):
    """Vectorized bin assignment; branch-identical to the query kernels.

    Uniform layouts multiply by the reciprocal width and truncate, which
    equals floor for the nonnegative neg-logs involved. The kernels use
    the exact same reciprocal, so bounds and lookups always agree.
    """
    values = np.asarray(values, dtype=np.float64)
    if nbins == 1:
        return np.zeros(len(values), dtype=np.intp)
    if inv_width > 0.0:
        tau_last = float(taus[nbins - 2])
        raw = np.minimum(np.floor(values * inv_width), nbins - 1)
        return np.where(values >= tau_last, nbins - 1, raw).astype(np.intp)
    return np.searchsorted(taus, values, side="right").astype(np.intp)


def _make_bins(table, taus, width):
    nbins = len(taus) + 1
    inv_width = 1.0 / width if width else 0.0
    assignment = _assign_bins(table.neglogs, taus, inv_width, nbins)
    edges = np.arange(nbins, dtype=np.intp)
    lo = np.searchsorted(assignment, edges, side="left").astype(np.intp)
    hi = np.searchsorted(assignment, edges, side="right").astype(np.intp)
    return BinIndex(
        taus=taus,
        lo=np.ascontiguousarray(lo),
        hi=np.ascontiguousarray(hi),
        table_fingerprint=table.fingerprint,
        width=width,
        inv_width=inv_width,
        nbins=nbins,
    )


def build_bins(table: SampleTable, taus) -> BinIndex:
    """Build a bin index from explicit thresholds.

    The ``t - 1`` thresholds split neg-log space into ``t`` bins
    ``[0, taus[0]), [taus[0], taus[1]), ..., [taus[-1], inf)``. Bounds
    are derived from the same assignment rule the lookup uses, so the
    narrowed search is exactly equivalent to the full one.
    """
    taus = np.ascontiguousarray(np.asarray(taus, dtype=np.float64))
    if len(taus) > 0:
        if np.isnan(taus).any() or np.isinf(taus).any():
            raise ValueError("bin thresholds must be finite")
        if taus[0] <= 0:
            raise ValueError("bin thresholds must be positive")
        if (np.diff(taus) <= 0).any():
            raise ValueError("bin thresholds must be strictly ascending")
    return _make_bins(table, taus, None)


def uniform_bins(table: SampleTable, n_bins: int, width: float) -> BinIndex:
    """Bin index with ``n_bins`` fixed-width bins starting at 0.

    The last bin is open-ended; bin lookup is a constant-time division.
    """
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    if not (width > 0) or not math.isfinite(width):
        raise ValueError("width must be positive and finite")
    taus = width * np.arange(1, n_bins, dtype=np.float64)
    return _make_bins(table, taus, float(width))


def default_bins(table: SampleTable, n_bins: int) -> BinIndex:
    """Uniform bins covering neg-log [0, 100): width 1 at 100 bins,
    width 0.1 at 1,000 bins."""
    return uniform_bins(table, n_bins, 100.0 / n_bins)


def _check_bins(table, bins):
    if bins.table_fingerprint != table.fingerprint:
        raise TableMismatchError(
            "bin index was built over a different sample table"
        )


def estimate_rank(table, query_neglog, interpolate=False, bins=None) -> RankEstimate:
    """Estimate the rank of one query given as a neg-log2 probability.

    The index is the number of table entries with strictly smaller
    neg-log (equal probabilities fall in the lower rank group); the
    stepped estimate is the cumulative value there, 0 at index 0.
    Interpolation applies only to interior finite queries and is clamped
    to the surrounding cumulative values. An infinite query (a password
    the model cannot produce) gets the most conservative stepped value.
    """
    query_neglog = float(query_neglog)
    if math.isnan(query_neglog):
        raise ValueError("query neg-log must not be NaN")
    if query_neglog < 0:
        raise ValueError("query neg-log must be nonnegative")
    neglogs, cumranks = table._lists()
    n = len(neglogs)
    bin_index = None
    if bins is None:
        j = bisect_left(neglogs, query_neglog)
    else:
        _check_bins(table, bins)
        taus = bins.taus.tolist()
        bin_index = _pure.locate_bin(
            query_neglog, taus, bins.inv_width, bins.nbins
        )
        j = bisect_left(
            neglogs, query_neglog, int(bins.lo[bin_index]), int(bins.hi[bin_index])
        )
    rank = _pure.rank_at(neglogs, cumranks, query_neglog, j, n, interpolate)
    interpolated = bool(interpolate and 0 < j < n and query_neglog != _INF)
    return RankEstimate(rank=rank, index=j, interpolated=interpolated, bin_index=bin_index)


def estimate_many(table, queries, interpolate=False, bins=None, backend=None):
    """Batch rank estimation; returns a float64 array of ranks.

    Runs on the compiled kernel when available (``backend`` may name
    "compiled" or "pure" explicitly). Results are bit-identical across
    backends and to :func:`estimate_rank`.
    """
    queries = np.ascontiguousarray(np.asarray(queries, dtype=np.float64))
    if queries.ndim != 1:
        raise ValueError("queries must be a 1-d array")
    if np.isnan(queries).any():
        raise ValueError("query neg-logs must not be NaN")
    if (queries < 0).any():
        raise ValueError("query neg-logs must be nonnegative")
    impl = get_backend(backend)
    out = np.empty(len(queries), dtype=np.float64)
    if bins is None:
        impl.estimate_plain(table.neglogs, table.cumranks, queries, out, bool(interpolate))
    else:
        _check_bins(table, bins)
        impl.estimate_binned(
            table.neglogs,
            table.cumranks,
            queries,
            out,
            bool(interpolate),
            bins.lo,
            bins.hi,
            bins.taus,
            bins.inv_width,
            bins.nbins,
        )
    return out


def dumps_table(table: SampleTable) -> bytes:
    header = _HEADER.pack(
        TABLE_MAGIC,
        TABLE_VERSION,
        len(table.neglogs),
        table.n_effective,
        table.sampled_count,
    )
    return header + table.neglogs.astype("<f8").tobytes() + table.cumranks.astype(
        "<f8"
    ).tobytes()


def loads_table(data: bytes) -> SampleTable:
    if len(data) < _HEADER.size or data[:8] != TABLE_MAGIC:
        raise FileFormatError("not a sample table file (bad magic)")
    magic, version, n, n_effective, sampled_count = _HEADER.unpack_from(data)
    if version != TABLE_VERSION:
        raise FileFormatError(f"unsupported table format version {version}")
    expected = _HEADER.size + 16 * n
    if len(data) != expected:
        raise FileFormatError(
            f"table file has {len(data)} bytes, expected {expected}"
        )
    neglogs = np.frombuffer(data, dtype="<f8", count=n, offset=_HEADER.size)
    cumranks = np.frombuffer(data, dtype="<f8", count=n, offset=_HEADER.size + 8 * n)
    return SampleTable(
        neglogs.astype(np.float64),
        cumranks.astype(np.float64),
        n_effective,
        sampled_count,
    )


def save_table(table: SampleTable, path) -> int:
    data = dumps_table(table)
    with open(path, "wb") as handle:
        handle.write(data)
    return len(data)


def load_table(path) -> SampleTable:
    with open(path, "rb") as handle:
        return loads_table(handle.read())


def write_table_csv(table: SampleTable, handle) -> None:
    """Write ``index,neglog,cumrank`` rows (1-based index)."""
    handle.write("index,neglog,cumrank\n")
    for i, (neglog, cumrank) in enumerate(zip(table.neglogs, table.cumranks), start=1):
        handle.write(f"{i},{float(neglog)!r},{float(cumrank)!r}\n")
