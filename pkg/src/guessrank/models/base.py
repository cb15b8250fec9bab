"""Shared machinery for the generative password models.

All models expose the same four operations: ``neg_log2_prob`` (pure
function of the password, ``inf`` when the model cannot produce it),
``sample`` (one draw from the model's distribution together with its
neg-log2 probability), ``enumerate`` (all passwords up to a neg-log2
threshold, most probable first), and ``size_bytes`` (serialized size).

Start/end-of-password markers are lone surrogate code points. Strict
UTF-8 decoding can never produce them, so they cannot collide with any
character of a real password.
"""

from __future__ import annotations

import heapq
import itertools

import numpy as np

START = "\ud800"
END = "\ud801"


class Distribution:
    """A conditional next-symbol distribution backed by numpy arrays.

    Sampling, probability evaluation, and enumeration all read the same
    precomputed ``neglogs`` array, so a sampled password's reported
    neg-log2 probability is bit-identical to a fresh evaluation.
    """

    __slots__ = ("symbols", "index", "probs", "neglogs", "cum", "_order")

    def __init__(self, symbols, weights):
        self.symbols = list(symbols)
        self.index = {s: i for i, s in enumerate(self.symbols)}
        probs = np.asarray(weights, dtype=np.float64)
        total = probs.sum()
        if total <= 0:
            raise ValueError("distribution has no mass")
        probs = probs / total
        self.probs = probs
        with np.errstate(divide="ignore"):
            self.neglogs = -np.log2(probs)
        self.cum = np.cumsum(probs)
        self._order = None

    @classmethod
    def from_probs(cls, symbols, probs, index=None):
        dist = cls.__new__(cls)
        dist.symbols = symbols if isinstance(symbols, list) else list(symbols)
        dist.index = index if index is not None else {
            s: i for i, s in enumerate(dist.symbols)
        }
        dist.probs = np.asarray(probs, dtype=np.float64)
        with np.errstate(divide="ignore"):
            dist.neglogs = -np.log2(dist.probs)
        dist.cum = np.cumsum(dist.probs)
        dist._order = None
        return dist

    def draw(self, rng):
        """Return (symbol index, neg-log2 probability) for one draw."""
        r = rng.random()
        i = int(np.searchsorted(self.cum, r, side="right"))
        if i >= len(self.symbols):
            i = len(self.symbols) - 1
        # cum may fall a few ulp short of 1.0; never land on a zero bucket
        while self.probs[i] == 0.0 and i > 0:
            i -= 1
        return i, float(self.neglogs[i])

    def neglog(self, symbol):
        i = self.index.get(symbol)
        if i is None:
            return float("inf")
        return float(self.neglogs[i])

    def by_ascending_neglog(self):
        """Symbol indices ordered from most to least probable."""
        if self._order is None:
            self._order = np.argsort(self.neglogs, kind="stable")
        return self._order


def best_first_enumerate(start_states, expand, threshold):
    """Yield ``(password, neglog)`` with ``neglog <= threshold`` in order.

    Order is ascending neg-log2 probability, ties broken by ascending
    lexicographic password order. ``start_states`` is an iterable of
    ``(neglog, prefix, payload)`` states; a ``None`` payload marks a
    completed password, anything else is expanded via ``expand(payload,
    prefix, neglog)``, which yields child states in the same shape.
    States whose accumulated neg-log already exceeds the threshold are
    pruned and never entered into the heap.

    A completed entry sorts before any partial state with the same key,
    and every descendant of a partial state extends its prefix, so the
    heap pops completed passwords in exactly the advertised order.
    """
    if not np.isfinite(threshold):
        raise ValueError("enumeration threshold must be finite")
    counter = itertools.count()
    heap = []
    for neglog, prefix, payload in start_states:
        if neglog <= threshold:
            partial = 0 if payload is None else 1
            heapq.heappush(heap, (neglog, prefix, partial, next(counter), payload))
    while heap:
        neglog, prefix, partial, _, payload = heapq.heappop(heap)
        if not partial:
            yield prefix, float(neglog)
            continue
        for child_neglog, child_prefix, child_payload in expand(
            payload, prefix, neglog
        ):
            if child_neglog > threshold:
                continue
            if child_payload is None:
                entry = (child_neglog, child_prefix, 0, next(counter), None)
            else:
                entry = (child_neglog, child_prefix, 1, next(counter), child_payload)
            heapq.heappush(heap, entry)


class PasswordModel:
    """Interface shared by the trainable password models."""

    model_type = "abstract"

    def neg_log2_prob(self, password: str) -> float:
        raise NotImplementedError

    def sample(self, rng):
        raise NotImplementedError

    def enumerate(self, threshold: float):
        raise NotImplementedError

    def size_bytes(self) -> int:
        from . import serialize

        return len(serialize.dumps(self))

    def save(self, path) -> int:
        from . import serialize

        data = serialize.dumps(self)
        with open(path, "wb") as handle:
            handle.write(data)
        return len(data)


def training_weight(count: int, weighted: bool) -> int:
    return count if weighted else 1


def chain_with_end(password: str):
    return itertools.chain(password, (END,))
