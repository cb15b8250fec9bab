import itertools
import math

import pytest

from conftest import rng_from
from guessrank import corpus_from_pairs, train_ngram
from guessrank.errors import TrainingError


def test_single_password_is_certain():
    # "ab" has no repeated history, so the chain is deterministic
    model = train_ngram(corpus_from_pairs([("ab", 1)]), 2)
    assert model.neg_log2_prob("ab") == 0.0


def test_repeated_history_splits_mass():
    # in "aa" the history "a" is seen both mid-word and at the end, so the
    # single-password bigram is an honest 1/2-1/2 chain, not a point mass
    model = train_ngram(corpus_from_pairs([("aa", 1)]), 2)
    assert model.neg_log2_prob("aa") == 2.0
    assert model.neg_log2_prob("a") == 1.0
    assert _mass_with_residual(model, 20) == pytest.approx(1.0, abs=1e-9)


def test_two_way_split_has_neglog_one():
    model = train_ngram(corpus_from_pairs([("ab", 1), ("ac", 1)]), 2)
    # chain: p(a|start)=1, p(b|a)=1/2, p(end|b)=1
    assert model.neg_log2_prob("ab") == 1.0
    assert model.neg_log2_prob("ac") == 1.0


def test_weighted_counts_follow_frequency():
    model = train_ngram(corpus_from_pairs([("aa", 3), ("ab", 1)]), 2, weighted=True)
    # history "a" was continued by a(3), b(1), end(3): 7 observations
    assert model.neg_log2_prob("aa") == pytest.approx(-math.log2((3 / 7) * (3 / 7)), rel=1e-15)
    assert model.neg_log2_prob("ab") == pytest.approx(-math.log2(1 / 7), rel=1e-15)


def test_unweighted_ignores_counts():
    weighted = train_ngram(corpus_from_pairs([("aa", 3), ("ab", 1)]), 2, weighted=False)
    flat = train_ngram(corpus_from_pairs([("aa", 1), ("ab", 1)]), 2)
    for password in ("aa", "ab", "aab", "b"):
        assert weighted.neg_log2_prob(password) == flat.neg_log2_prob(password)


def test_unseen_transition_is_impossible():
    model = train_ngram(corpus_from_pairs([("ab", 1)]), 2)
    assert model.neg_log2_prob("ba") == math.inf
    assert model.neg_log2_prob("abc") == math.inf
    assert model.neg_log2_prob("") == math.inf


def test_short_password_padded_with_start_markers():
    model = train_ngram(corpus_from_pairs([("a", 2), ("bc", 1)]), 3)
    assert 2.0 ** -model.neg_log2_prob("a") == pytest.approx(2 / 3, rel=1e-15)


def test_training_validation():
    with pytest.raises(ValueError):
        train_ngram(corpus_from_pairs([("aa", 1)]), 1)
    with pytest.raises(TrainingError):
        from guessrank.corpus import PasswordCorpus

        train_ngram(PasswordCorpus(entries=(), total_count=0), 2)


def _mass_with_residual(model, depth):
    """Total probability of all passwords up to ``depth`` plus the mass of
    longer, still-unfinished prefixes; must be 1 for a sound model."""
    from guessrank.models.base import END, START

    total = 0.0

    def recurse(history, prob, left):
        nonlocal total
        dist = model._dist(history)
        if dist is None:
            return
        for symbol, p in zip(dist.symbols, dist.probs):
            if p <= 0:
                continue
            if symbol == END:
                total += prob * p
            elif left == 0:
                total += prob * p
            else:
                recurse(history[1:] + symbol, prob * p, left - 1)

    recurse(START * (model.order - 1), 1.0, depth)
    return total


@pytest.mark.parametrize("order", [2, 3])
def test_probabilities_sum_to_one(order):
    corpus = corpus_from_pairs([("aa", 3), ("ab", 1), ("ba", 2), ("b", 1)])
    model = train_ngram(corpus, order)
    assert _mass_with_residual(model, 10) == pytest.approx(1.0, abs=1e-9)


def test_sample_matches_evaluation_exactly():
    model = train_ngram(corpus_from_pairs([("aa", 3), ("ab", 1), ("ba", 2)]), 2)
    rng = rng_from(42)
    for _ in range(200):
        password, neglog = model.sample(rng)
        assert neglog == model.neg_log2_prob(password)


def test_sample_frequencies_binomial_bound():
    model = train_ngram(corpus_from_pairs([("ab", 1), ("ac", 1)]), 2)
    rng = rng_from(7)
    hits = sum(model.sample(rng)[0] == "ab" for _ in range(10000))
    assert abs(hits - 5000) <= 300  # 6 standard deviations


def test_enumerate_single_password():
    model = train_ngram(corpus_from_pairs([("ab", 1)]), 2)
    assert list(model.enumerate(0.0)) == [("ab", 0.0)]


def test_enumerate_tie_break_lexicographic():
    model = train_ngram(corpus_from_pairs([("ab", 1), ("ac", 1)]), 2)
    assert list(model.enumerate(1.0)) == [("ab", 1.0), ("ac", 1.0)]


@pytest.mark.parametrize("order", [2, 3])
def test_enumerate_matches_exhaustive_generation(order):
    corpus = corpus_from_pairs([("aa", 2), ("ab", 1), ("bab", 2), ("ba", 1)])
    model = train_ngram(corpus, order)
    threshold = 7.0
    alphabet = "ab"
    expected = []
    for length in range(0, 9):
        for chars in itertools.product(alphabet, repeat=length):
            password = "".join(chars)
            neglog = model.neg_log2_prob(password)
            if neglog <= threshold:
                expected.append((password, neglog))
    expected.sort(key=lambda e: (e[1], e[0]))
    got = list(model.enumerate(threshold))
    assert got == expected


def test_enumerate_requires_finite_threshold():
    model = train_ngram(corpus_from_pairs([("aa", 1)]), 2)
    with pytest.raises(ValueError):
        list(model.enumerate(math.inf))
