"""Pure-Python rank-search kernels.

Fallback used when the compiled extension is unavailable. Every
arithmetic step mirrors the compiled kernel operation for operation
(libm ``log2``/``pow`` via the ``math`` module and float ``**``), so the
two backends return bit-identical results.
"""

import math
from bisect import bisect_left, bisect_right

_INF = float("inf")

BACKEND = "pure"


def rank_at(neglogs, cumranks, q, j, n, interpolate):
    """Rank for a query whose strictly-smaller entry count is ``j``.

    Stepped value is ``cumranks[j - 1]`` (0 when ``j`` is 0). With
    ``interpolate``, interior queries blend between the bracketing
    cumulative ranks linearly in (neglog, log2 rank) space, clamped to
    the bracket; boundary and infinite queries keep the stepped value.
    """
    if j == 0:
        return 0.0
    c0 = cumranks[j - 1]
    if not interpolate or j >= n or q == _INF:
        return c0
    x0 = neglogs[j - 1]
    x1 = neglogs[j]
    c1 = cumranks[j]
    frac = (q - x0) / (x1 - x0)
    level = math.log2(c0) + frac * (math.log2(c1) - math.log2(c0))
    rank = 2.0 ** level
    if rank < c0:
        rank = c0
    if rank > c1:
        rank = c1
    return rank


def locate_bin(q, taus, inv_width, nbins):
    """Bin index for a query; must agree exactly with bin construction."""
    if nbins == 1:
        return 0
    if inv_width > 0.0:
        if q >= taus[nbins - 2]:
            return nbins - 1
        b = int(q * inv_width)  # truncation equals floor for q >= 0
        return b if b < nbins - 1 else nbins - 1
    return bisect_right(taus, q, 0, nbins - 1)


def estimate_plain(neglogs, cumranks, queries, out, interpolate):
    nl = neglogs.tolist()
    cum = cumranks.tolist()
    n = len(nl)
    for k, q in enumerate(queries.tolist()):
        j = bisect_left(nl, q)
        out[k] = rank_at(nl, cum, q, j, n, interpolate)


def estimate_binned(neglogs, cumranks, queries, out, interpolate,
                    lo, hi, taus, inv_width, nbins):
    nl = neglogs.tolist()
    cum = cumranks.tolist()
    lo_list = lo.tolist()
    hi_list = hi.tolist()
    tau_list = taus.tolist()
    n = len(nl)
    for k, q in enumerate(queries.tolist()):
        b = locate_bin(q, tau_list, inv_width, nbins)
        j = bisect_left(nl, q, lo_list[b], hi_list[b])
        out[k] = rank_at(nl, cum, q, j, n, interpolate)
