"""Structure-plus-terminals grammar model.

A password is segmented into maximal runs of letters, digits, and
symbols; the run-class/run-length template is the base structure. The
password probability factors as ``p(structure) * prod(p(terminal_i))``
where each terminal is drawn from the distribution of training-set runs
of that class and length. Everything is learned from the corpus itself,
including letter terminals; there is no external dictionary. Passwords
whose structure or any terminal was never seen get probability zero,
reported as neg-log2 probability ``inf``.
"""

from __future__ import annotations

from collections import Counter, defaultdict

from ..errors import TrainingError
from .base import Distribution, PasswordModel, best_first_enumerate, training_weight

LETTER, DIGIT, SYMBOL = "L", "D", "S"


def classify(char: str) -> str:
    if char.isalpha():
        return LETTER
    if char.isdigit():
        return DIGIT
    return SYMBOL


def segment(password: str):
    """Split into maximal same-class runs; returns (structure, runs).

    The structure is a tuple of ``(class, length)`` pairs; adjacent
    pairs always differ in class, so every password has a unique parse.
    """
    structure = []
    runs = []
    current_class = None
    start = 0
    for i, char in enumerate(password):
        cls = classify(char)
        if cls != current_class:
            if current_class is not None:
                structure.append((current_class, i - start))
                runs.append(password[start:i])
            current_class = cls
            start = i
    if current_class is not None:
        structure.append((current_class, len(password) - start))
        runs.append(password[start:])
    return tuple(structure), runs


class PcfgModel(PasswordModel):
    model_type = "pcfg"

    def __init__(self, structure_counts, terminal_counts):
        # structure (tuple of (class, length)) -> count
        self.structure_counts = structure_counts
        # (class, length) -> {terminal: count}
        self.terminal_counts = terminal_counts
        self._structs = None
        self._terms = {}

    @classmethod
    def train(cls, corpus, weighted=True):
        if not corpus.entries:
            raise TrainingError("cannot train a grammar model on an empty corpus")
        structure_counts = Counter()
        terminal_counts = defaultdict(Counter)
        for password, count in corpus.entries:
            weight = training_weight(count, weighted)
            structure, runs = segment(password)
            structure_counts[structure] += weight
            for part, run in zip(structure, runs):
                terminal_counts[part][run] += weight
        return cls(
            dict(structure_counts),
            {part: dict(c) for part, c in terminal_counts.items()},
        )

    def _structures(self):
        if self._structs is None:
            keys = sorted(self.structure_counts)
            self._structs = Distribution(
                keys, [self.structure_counts[k] for k in keys]
            )
        return self._structs

    def _terminals(self, part):
        dist = self._terms.get(part)
        if dist is None:
            raw = self.terminal_counts.get(part)
            if raw is None:
                return None
            keys = sorted(raw)
            dist = Distribution(keys, [raw[k] for k in keys])
            self._terms[part] = dist
        return dist

    def neg_log2_prob(self, password):
        structure, runs = segment(password)
        structs = self._structures()
        total = structs.neglog(structure)
        if total == float("inf"):
            return float("inf")
        for part, run in zip(structure, runs):
            dist = self._terminals(part)
            if dist is None:
                return float("inf")
            step = dist.neglog(run)
            if step == float("inf"):
                return float("inf")
            total += step
        return total

    def sample(self, rng):
        structs = self._structures()
        i, total = structs.draw(rng)
        structure = structs.symbols[i]
        parts = []
        for part in structure:
            dist = self._terminals(part)
            j, step = dist.draw(rng)
            total += step
            parts.append(dist.symbols[j])
        return "".join(parts), total

    def enumerate(self, threshold):
        def expand(state, prefix, neglog):
            structure, seg = state
            dist = self._terminals(structure[seg])
            if dist is None:
                return
            neglogs = dist.neglogs
            last = seg + 1 == len(structure)
            for i in dist.by_ascending_neglog():
                child = neglog + neglogs[i]
                if child > threshold:
                    break
                extended = prefix + dist.symbols[i]
                if last:
                    yield child, extended, None
                else:
                    yield child, extended, (structure, seg + 1)

        structs = self._structures()
        start = []
        neglogs = structs.neglogs
        for i in structs.by_ascending_neglog():
            base = neglogs[i]
            if base > threshold:
                break
            structure = structs.symbols[i]
            # the empty structure is already a complete (empty) password
            state = (structure, 0) if structure else None
            start.append((float(base), "", state))
        return best_first_enumerate(start, expand, threshold)
