"""Variable-order character model with count-thresholded histories.

Histories are anchored: the context of the first character is the start
marker, so a single-password corpus yields a deterministic model.
Prediction uses the longest suffix of the marker-prefixed preceding
characters whose total observation count clears ``count_threshold`` (the
empty history is always available as the base case and holds plain
character-frequency estimates). At that history, symbols observed at
least ``count_threshold`` times keep their maximum-likelihood
probability; the remaining probability mass is spread over the other
symbols proportional to the next shorter thresholded history's
distribution. Histories below the threshold are dropped at training time
since they can never be used for prediction.
"""

from __future__ import annotations

import numpy as np

from ..errors import TrainingError
from .base import END, START, Distribution, PasswordModel, best_first_enumerate
from .base import chain_with_end, training_weight


class BackoffModel(PasswordModel):
    model_type = "backoff"

    def __init__(self, count_threshold, context_counts):
        if count_threshold < 1:
            raise ValueError("count_threshold must be >= 1")
        self.count_threshold = count_threshold
        # context -> {symbol: count}; only thresholded contexts plus ""
        self.context_counts = context_counts
        if "" not in context_counts:
            raise ValueError("context counts must include the empty history")
        symbols = set()
        for counts in context_counts.values():
            symbols.update(counts)
        symbols.discard(END)
        self.symbols = sorted(symbols) + [END]
        self._index = {s: i for i, s in enumerate(self.symbols)}
        self._totals = {
            ctx: sum(counts.values()) for ctx, counts in context_counts.items()
        }
        self._max_context = max(len(ctx) for ctx in context_counts)
        self._dists = {}

    @classmethod
    def train(cls, corpus, count_threshold=10, weighted=True):
        if not corpus.entries:
            raise TrainingError("cannot train a backoff model on an empty corpus")
        if count_threshold < 1:
            raise ValueError("count_threshold must be >= 1")
        # First pass: total observations per context, over all suffix lengths
        # of the start-anchored prefix.
        totals: dict[str, int] = {}
        for password, count in corpus.entries:
            weight = training_weight(count, weighted)
            text = START + password
            for i in range(1, len(text) + 1):
                for j in range(i + 1):
                    ctx = text[j:i]
                    totals[ctx] = totals.get(ctx, 0) + weight
        qualifying = {ctx for ctx, total in totals.items() if total >= count_threshold}
        qualifying.add("")
        del totals
        # Second pass: per-symbol counts, kept only where prediction can look.
        context_counts: dict[str, dict[str, int]] = {ctx: {} for ctx in qualifying}
        for password, count in corpus.entries:
            weight = training_weight(count, weighted)
            text = START + password
            for i, symbol in enumerate(chain_with_end(password), start=1):
                for j in range(i + 1):
                    counts = context_counts.get(text[j:i])
                    if counts is not None:
                        counts[symbol] = counts.get(symbol, 0) + weight
        return cls(count_threshold, context_counts)

    def _parent(self, context):
        ctx = context[1:]
        while ctx and ctx not in self.context_counts:
            ctx = ctx[1:]
        return ctx

    def _context_for(self, prefix):
        """Longest stored history that is a suffix of the anchored prefix."""
        ctx = START + prefix
        if len(ctx) > self._max_context:
            ctx = ctx[len(ctx) - self._max_context :]
        while ctx and ctx not in self.context_counts:
            ctx = ctx[1:]
        return ctx

    def _dist(self, context):
        dist = self._dists.get(context)
        if dist is not None:
            return dist
        counts = self.context_counts[context]
        total = self._totals[context]
        observed = np.zeros(len(self.symbols))
        for symbol, count in counts.items():
            observed[self._index[symbol]] = count
        if context == "":
            probs = observed / total
        else:
            probs = np.zeros(len(self.symbols))
            reliable = observed >= self.count_threshold
            probs[reliable] = observed[reliable] / total
            leftover = 1.0 - probs[reliable].sum()
            if leftover > 0.0:
                parent = self._dist(self._parent(context)).probs
                rest = ~reliable
                beta = parent[rest].sum()
                if beta > 0.0:
                    probs[rest] = parent[rest] * (leftover / beta)
        dist = Distribution.from_probs(self.symbols, probs, index=self._index)
        self._dists[context] = dist
        return dist

    def neg_log2_prob(self, password):
        total = 0.0
        prefix = ""
        for symbol in chain_with_end(password):
            dist = self._dist(self._context_for(prefix))
            step = dist.neglog(symbol)
            if step == float("inf"):
                return float("inf")
            total += step
            if symbol != END:
                prefix += symbol
        return total

    def sample(self, rng):
        prefix = ""
        total = 0.0
        while True:
            dist = self._dist(self._context_for(prefix))
            i, step = dist.draw(rng)
            total += step
            symbol = dist.symbols[i]
            if symbol == END:
                return prefix, total
            prefix += symbol

    def enumerate(self, threshold):
        def expand(_state, prefix, neglog):
            dist = self._dist(self._context_for(prefix))
            neglogs = dist.neglogs
            for i in dist.by_ascending_neglog():
                child = neglog + neglogs[i]
                if child > threshold:
                    break
                symbol = dist.symbols[i]
                if symbol == END:
                    yield child, prefix, None
                else:
                    yield child, prefix + symbol, True

        return best_first_enumerate([(0.0, "", True)], expand, threshold)
