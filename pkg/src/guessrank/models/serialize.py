"""Binary container for trained models.

Layout (all integers little-endian, fixed width):

* 8-byte magic ``PWMODEL1``, ``u16`` format version, ``u8`` model tag
  (1 = ngram, 2 = backoff, 3 = pcfg), then a model-specific body.
* n-gram body: ``u32`` order, symbol table, ``u64`` context count, then
  per context ``order - 1`` symbol indices (``u32`` each) followed by a
  count table.
* backoff body: ``u32`` count threshold, symbol table, ``u64`` context
  count, then per context ``u32`` length, that many ``u32`` symbol
  indices, and a count table.
* pcfg body: ``u32`` structure count, each structure as ``u16`` segment
  count then ``u8`` class / ``u32`` length pairs and a ``u64`` count;
  ``u32`` terminal-group count, each group as ``u8`` class, ``u32``
  length, ``u32`` terminal count, then per terminal a length-prefixed
  UTF-8 string and a ``u64`` count.

Symbol tables store one ``u32`` code point per character; indices 0 and
1 are reserved for the start and end markers, characters start at 2.
Count tables are ``u32`` entry counts followed by ``u32`` symbol index /
``u64`` count pairs. All maps are written in sorted order so identical
models serialize to identical bytes.
"""

from __future__ import annotations

import struct

from ..errors import FileFormatError
from .backoff import BackoffModel
from .base import END, START
from .ngram import NGramModel
from .pcfg import PcfgModel

MAGIC = b"PWMODEL1"
VERSION = 1

_TAGS = {"ngram": 1, "backoff": 2, "pcfg": 3}
_CLASS_CODES = {"L": 0, "D": 1, "S": 2}
_CLASS_NAMES = {code: name for name, code in _CLASS_CODES.items()}


class _Writer:
    def __init__(self):
        self.parts = []

    def raw(self, data):
        self.parts.append(data)

    def pack(self, fmt, *values):
        self.parts.append(struct.pack("<" + fmt, *values))

    def string(self, text):
        data = text.encode("utf-8")
        self.pack("I", len(data))
        self.raw(data)

    def getvalue(self):
        return b"".join(self.parts)


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def pack(self, fmt):
        fmt = "<" + fmt
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise FileFormatError("model file is truncated")
        values = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return values

    def string(self):
        (size,) = self.pack("I")
        if self.pos + size > len(self.data):
            raise FileFormatError("model file is truncated")
        data = self.data[self.pos : self.pos + size]
        self.pos += size
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FileFormatError("model file contains invalid UTF-8") from exc

    def done(self):
        if self.pos != len(self.data):
            raise FileFormatError("model file has trailing data")


def _symbol_table(counts_maps):
    chars = set()
    for counts in counts_maps:
        chars.update(counts)
    chars.discard(START)
    chars.discard(END)
    symbols = [START, END] + sorted(chars)
    return symbols, {s: i for i, s in enumerate(symbols)}


def _write_symbols(writer, symbols):
    writer.pack("I", len(symbols) - 2)
    for symbol in symbols[2:]:
        writer.pack("I", ord(symbol))


def _read_symbols(reader):
    (count,) = reader.pack("I")
    symbols = [START, END]
    for _ in range(count):
        (codepoint,) = reader.pack("I")
        try:
            symbols.append(chr(codepoint))
        except ValueError as exc:
            raise FileFormatError(f"invalid code point {codepoint}") from exc
    return symbols


def _write_count_table(writer, counts, index):
    writer.pack("I", len(counts))
    for symbol in sorted(counts):
        writer.pack("IQ", index[symbol], counts[symbol])


def _read_count_table(reader, symbols):
    (entries,) = reader.pack("I")
    counts = {}
    for _ in range(entries):
        sym, count = reader.pack("IQ")
        if sym >= len(symbols):
            raise FileFormatError(f"symbol index {sym} out of range")
        counts[symbols[sym]] = count
    return counts


def _dump_ngram(writer, model):
    writer.pack("I", model.order)
    symbols, index = _symbol_table(model.counts.values())
    _write_symbols(writer, symbols)
    writer.pack("Q", len(model.counts))
    for history in sorted(model.counts):
        for symbol in history:
            writer.pack("I", index[symbol])
        _write_count_table(writer, model.counts[history], index)


def _load_ngram(reader):
    (order,) = reader.pack("I")
    if order < 2:
        raise FileFormatError(f"invalid n-gram order {order}")
    symbols = _read_symbols(reader)
    (n_contexts,) = reader.pack("Q")
    counts = {}
    for _ in range(n_contexts):
        history = []
        for _ in range(order - 1):
            (sym,) = reader.pack("I")
            if sym >= len(symbols):
                raise FileFormatError(f"symbol index {sym} out of range")
            history.append(symbols[sym])
        counts["".join(history)] = _read_count_table(reader, symbols)
    return NGramModel(order, counts)


def _dump_backoff(writer, model):
    writer.pack("I", model.count_threshold)
    symbols, index = _symbol_table(model.context_counts.values())
    _write_symbols(writer, symbols)
    writer.pack("Q", len(model.context_counts))
    for context in sorted(model.context_counts):
        writer.pack("I", len(context))
        for symbol in context:
            writer.pack("I", index[symbol])
        _write_count_table(writer, model.context_counts[context], index)


def _load_backoff(reader):
    (threshold,) = reader.pack("I")
    symbols = _read_symbols(reader)
    (n_contexts,) = reader.pack("Q")
    context_counts = {}
    for _ in range(n_contexts):
        (length,) = reader.pack("I")
        chars = []
        for _ in range(length):
            (sym,) = reader.pack("I")
            if sym >= len(symbols):
                raise FileFormatError(f"symbol index {sym} out of range")
            chars.append(symbols[sym])
        context_counts["".join(chars)] = _read_count_table(reader, symbols)
    return BackoffModel(threshold, context_counts)


def _dump_pcfg(writer, model):
    writer.pack("I", len(model.structure_counts))
    for structure in sorted(model.structure_counts):
        writer.pack("H", len(structure))
        for cls, length in structure:
            writer.pack("BI", _CLASS_CODES[cls], length)
        writer.pack("Q", model.structure_counts[structure])
    writer.pack("I", len(model.terminal_counts))
    for (cls, length) in sorted(model.terminal_counts):
        terms = model.terminal_counts[(cls, length)]
        writer.pack("BII", _CLASS_CODES[cls], length, len(terms))
        for term in sorted(terms):
            writer.string(term)
            writer.pack("Q", terms[term])


def _load_pcfg(reader):
    (n_structures,) = reader.pack("I")
    structure_counts = {}
    for _ in range(n_structures):
        (n_segments,) = reader.pack("H")
        segments = []
        for _ in range(n_segments):
            cls, length = reader.pack("BI")
            if cls not in _CLASS_NAMES:
                raise FileFormatError(f"invalid run class {cls}")
            segments.append((_CLASS_NAMES[cls], length))
        (count,) = reader.pack("Q")
        structure_counts[tuple(segments)] = count
    (n_groups,) = reader.pack("I")
    terminal_counts = {}
    for _ in range(n_groups):
        cls, length, n_terms = reader.pack("BII")
        if cls not in _CLASS_NAMES:
            raise FileFormatError(f"invalid run class {cls}")
        terms = {}
        for _ in range(n_terms):
            term = reader.string()
            (count,) = reader.pack("Q")
            terms[term] = count
        terminal_counts[(_CLASS_NAMES[cls], length)] = terms
    return PcfgModel(structure_counts, terminal_counts)


def dumps(model) -> bytes:
    writer = _Writer()
    writer.raw(MAGIC)
    writer.pack("HB", VERSION, _TAGS[model.model_type])
    if model.model_type == "ngram":
        _dump_ngram(writer, model)
    elif model.model_type == "backoff":
        _dump_backoff(writer, model)
    elif model.model_type == "pcfg":
        _dump_pcfg(writer, model)
    else:
        raise ValueError(f"cannot serialize model type {model.model_type!r}")
    return writer.getvalue()


def loads(data: bytes):
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise FileFormatError("not a model file (bad magic)")
    reader = _Reader(data)
    reader.pos = len(MAGIC)
    version, tag = reader.pack("HB")
    if version != VERSION:
        raise FileFormatError(f"unsupported model format version {version}")
    if tag == 1:
        model = _load_ngram(reader)
    elif tag == 2:
        model = _load_backoff(reader)
    elif tag == 3:
        model = _load_pcfg(reader)
    else:
        raise FileFormatError(f"unknown model tag {tag}")
    reader.done()
    return model


def load_model(path):
    with open(path, "rb") as handle:
        return loads(handle.read())
