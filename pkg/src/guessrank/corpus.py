"""Password corpus ingestion.

Two on-disk formats are accepted, both newline-delimited UTF-8:

* ``plain``: one password per line, repeated lines accumulate a count of 1
  each; empty lines are skipped.
* ``counted``: ``<count><whitespace><password>`` per line, where the
  password is everything after the first whitespace run and may contain
  internal spaces.

Entries are kept sorted by descending count, ties broken by ascending
lexicographic password order, so every downstream experiment sees the same
deterministic ordering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import CorpusFormatError, EmptyCorpusError

# Count, one whitespace run, then the password. \S pins the password to the
# end of the whitespace run so trailing spaces stay part of the password.
_COUNTED_LINE = re.compile(r"^([0-9]+)\s+(\S.*)$", re.DOTALL)


@dataclass(frozen=True)
class PasswordCorpus:
    """Frequency-ordered password list.

    ``entries`` holds unique ``(password, count)`` pairs sorted by
    descending count, ties by ascending password; ``total_count`` is the
    sum of all counts.
    """

    entries: tuple[tuple[str, int], ...]
    total_count: int

    def __len__(self):
        return len(self.entries)


def _sorted_entries(counts: dict[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


def _iter_lines(source) -> list[bytes]:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = source.read()
        if isinstance(data, str):
            raise TypeError("corpus source must be bytes, not text")
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    return lines


def load_corpus(source, format: str = "plain") -> PasswordCorpus:
    """Parse a byte stream (or bytes) into a :class:`PasswordCorpus`.

    ``format`` is ``"plain"`` or ``"counted"``. Passwords are kept
    verbatim: no case folding, no Unicode normalization, no filtering.
    Lines that fail UTF-8 decoding raise :class:`CorpusFormatError` so
    experiments stay auditable.
    """
    if format not in ("plain", "counted"):
        raise ValueError(f"unknown corpus format {format!r}")
    counts: dict[str, int] = {}
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        if raw.endswith(b"\r"):
            raw = raw[:-1]
        if not raw:
            continue
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusFormatError(lineno, f"invalid UTF-8 ({exc.reason})") from exc
        if format == "plain":
            counts[line] = counts.get(line, 0) + 1
        else:
            match = _COUNTED_LINE.match(line)
            if match is None:
                raise CorpusFormatError(
                    lineno, f"expected '<count> <password>', got {line!r}"
                )
            count = int(match.group(1))
            if count < 1:
                raise CorpusFormatError(lineno, "count must be a positive integer")
            password = match.group(2)
            counts[password] = counts.get(password, 0) + count
    if not counts:
        raise EmptyCorpusError("corpus contains no passwords")
    entries = _sorted_entries(counts)
    return PasswordCorpus(entries=entries, total_count=sum(counts.values()))


def load_corpus_file(path, format: str = "plain") -> PasswordCorpus:
    with open(path, "rb") as handle:
        return load_corpus(handle, format=format)


def top_n(corpus: PasswordCorpus, n: int) -> PasswordCorpus:
    """Keep the ``min(n, len(corpus))`` most frequent entries."""
    if n < 1:
        raise ValueError("n must be >= 1")
    entries = corpus.entries[:n]
    return PasswordCorpus(entries=entries, total_count=sum(c for _, c in entries))


def corpus_from_pairs(pairs) -> PasswordCorpus:
    """Build a corpus from in-memory ``(password, count)`` pairs."""
    counts: dict[str, int] = {}
    for password, count in pairs:
        if count < 1:
            raise ValueError(f"count for {password!r} must be positive")
        counts[password] = counts.get(password, 0) + int(count)
    if not counts:
        raise EmptyCorpusError("corpus contains no passwords")
    return PasswordCorpus(
        entries=_sorted_entries(counts), total_count=sum(counts.values())
    )
