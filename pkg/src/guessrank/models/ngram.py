"""Fixed-order character n-gram model.

Every password contributes ``order - 1`` start markers and one end
marker, so the model is a proper distribution over finite strings:
conditional probabilities are maximum-likelihood counts with no
smoothing, and any transition unseen in training has probability zero
(neg-log2 probability ``inf``).
"""

from __future__ import annotations

from collections import Counter, defaultdict

from ..errors import TrainingError
from .base import END, START, Distribution, PasswordModel, best_first_enumerate
from .base import chain_with_end, training_weight


class NGramModel(PasswordModel):
    model_type = "ngram"

    def __init__(self, order, counts):
        if order < 2:
            raise ValueError("order must be >= 2")
        self.order = order
        # history (order-1 symbols, possibly START-padded) -> {symbol: count}
        self.counts = counts
        self._dists = {}

    @classmethod
    def train(cls, corpus, order, weighted=True):
        if order < 2:
            raise ValueError("order must be >= 2")
        if not corpus.entries:
            raise TrainingError("cannot train an n-gram model on an empty corpus")
        counts = defaultdict(Counter)
        pad = START * (order - 1)
        for password, count in corpus.entries:
            weight = training_weight(count, weighted)
            history = pad
            for symbol in chain_with_end(password):
                counts[history][symbol] += weight
                history = history[1:] + symbol
        return cls(order, {h: dict(c) for h, c in counts.items()})

    def _dist(self, history):
        dist = self._dists.get(history)
        if dist is None:
            raw = self.counts.get(history)
            if raw is None:
                return None
            symbols = sorted(raw)
            dist = Distribution(symbols, [raw[s] for s in symbols])
            self._dists[history] = dist
        return dist

    def neg_log2_prob(self, password):
        history = START * (self.order - 1)
        total = 0.0
        for symbol in chain_with_end(password):
            dist = self._dist(history)
            if dist is None:
                return float("inf")
            step = dist.neglog(symbol)
            if step == float("inf"):
                return float("inf")
            total += step
            history = history[1:] + symbol
        return total

    def sample(self, rng):
        history = START * (self.order - 1)
        parts = []
        total = 0.0
        while True:
            dist = self._dist(history)
            i, step = dist.draw(rng)
            total += step
            symbol = dist.symbols[i]
            if symbol == END:
                return "".join(parts), total
            parts.append(symbol)
            history = history[1:] + symbol

    def enumerate(self, threshold):
        def expand(history, prefix, neglog):
            dist = self._dist(history)
            if dist is None:
                return
            neglogs = dist.neglogs
            for i in dist.by_ascending_neglog():
                child = neglog + neglogs[i]
                if child > threshold:  # steps ascend, nothing later fits
                    break
                symbol = dist.symbols[i]
                if symbol == END:
                    yield child, prefix, None
                else:
                    yield child, prefix + symbol, history[1:] + symbol

        start = START * (self.order - 1)
        return best_first_enumerate([(0.0, "", start)], expand, threshold)
