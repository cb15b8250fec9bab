"""Trainable generative password models."""

from .backoff import BackoffModel
from .base import END, START, PasswordModel
from .ngram import NGramModel
from .pcfg import PcfgModel, classify, segment
from .serialize import dumps, load_model, loads

__all__ = [
    "BackoffModel",
    "PasswordModel",
    "END",
    "START",
    "NGramModel",
    "PcfgModel",
    "classify",
    "dumps",
    "load_model",
    "loads",
    "segment",
    "train_backoff",
    "train_from_spec",
    "train_ngram",
    "train_pcfg",
]


def train_ngram(corpus, order, weighted=True):
    """Train a fixed-order n-gram model on a corpus."""
    return NGramModel.train(corpus, order, weighted=weighted)


def train_backoff(corpus, count_threshold=10, weighted=True):
    """Train a thresholded variable-order model on a corpus."""
    return BackoffModel.train(corpus, count_threshold=count_threshold, weighted=weighted)


def train_pcfg(corpus, weighted=True):
    """Train a structure/terminal grammar model on a corpus."""
    return PcfgModel.train(corpus, weighted=weighted)


def train_from_spec(spec, corpus, weighted=True, backoff_threshold=10):
    """Train from a spec string: ``Kgram`` (e.g. ``4gram``), ``backoff``,
    or ``pcfg``."""
    if spec.endswith("gram"):
        return train_ngram(corpus, int(spec[:-4]), weighted=weighted)
    if spec == "backoff":
        return train_backoff(
            corpus, count_threshold=backoff_threshold, weighted=weighted
        )
    if spec == "pcfg":
        return train_pcfg(corpus, weighted=weighted)
    raise ValueError(f"unknown model spec {spec!r}")
