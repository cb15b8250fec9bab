"""Exact ranks for every password above a probability threshold.

Enumerating the model's most probable passwords and sorting them yields
ground truth against which estimator variants are judged. Equal
probabilities share the lowest rank of their group, the conservative
convention; strictly positional ranks are available behind a flag for
sensitivity checks.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import EnumerationBudgetError

DEFAULT_ENTRY_BUDGET = 10**7


class RankedList:
    """Passwords with neg-log2 probability at most ``threshold``,
    ascending by neg-log, with shared group ranks."""

    def __init__(self, passwords, neglogs, threshold):
        self.passwords = passwords
        self.neglogs = neglogs
        self.threshold = threshold
        self.group_ranks = _group_ranks(neglogs)
        self._positions = None

    def __len__(self):
        return len(self.passwords)

    def _position(self, password):
        if self._positions is None:
            self._positions = {pw: i for i, pw in enumerate(self.passwords)}
        return self._positions.get(password)


def _group_ranks(neglogs):
    if len(neglogs) == 0:
        return np.empty(0, dtype=np.int64)
    starts = np.arange(len(neglogs), dtype=np.int64)
    repeat = np.empty(len(neglogs), dtype=bool)
    repeat[0] = False
    repeat[1:] = neglogs[1:] == neglogs[:-1]
    starts[repeat] = 0
    return np.maximum.accumulate(starts)


def build_ranked_list(model, threshold, entry_budget=DEFAULT_ENTRY_BUDGET) -> RankedList:
    """Enumerate every password with neg-log2 probability <= threshold.

    Raises :class:`EnumerationBudgetError` if more than ``entry_budget``
    passwords fit under the threshold; nothing partial is returned.
    """
    passwords = []
    neglogs = []
    for password, neglog in model.enumerate(threshold):
        if len(passwords) >= entry_budget:
            raise EnumerationBudgetError(entry_budget)
        passwords.append(password)
        neglogs.append(neglog)
    return RankedList(passwords, np.asarray(neglogs, dtype=np.float64), threshold)


def true_rank(ranked, password, model, positional=False):
    """Exact rank of ``password``, or None when above the threshold.

    Group mode (default) counts entries with strictly smaller neg-log;
    positional mode returns the password's position in the sorted list.
    """
    neglog = model.neg_log2_prob(password)
    if neglog > ranked.threshold:
        return None
    if positional:
        position = ranked._position(password)
        if position is None:
            raise LookupError(
                f"password {password!r} is under the threshold but missing "
                "from the ranked list"
            )
        return position
    return int(np.searchsorted(ranked.neglogs, neglog, side="left"))


def write_ranked_csv(ranked: RankedList, handle) -> None:
    """Write ``rank,neglog,password`` rows; passwords are quoted as
    needed since they may contain commas or quotes."""
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["rank", "neglog", "password"])
    for rank, neglog, password in zip(
        ranked.group_ranks, ranked.neglogs, ranked.passwords
    ):
        writer.writerow([int(rank), repr(float(neglog)), password])
