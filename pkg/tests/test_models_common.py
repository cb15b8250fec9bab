"""Behavior every model must share: serialization, sampling consistency,
and the qualitative size relationships between model types."""

import math

import numpy as np
import pytest
from scipy import stats

import guessrank as gr
from conftest import rng_from
from guessrank.errors import FileFormatError
from guessrank.models import dumps, loads

TINY_PAIRS = [("ab", 3), ("aab", 2), ("b", 4), ("ba", 1), ("a1", 2)]


def _tiny_models():
    corpus = gr.corpus_from_pairs(TINY_PAIRS)
    return {
        "2gram": gr.train_ngram(corpus, 2),
        "3gram": gr.train_ngram(corpus, 3),
        "backoff": gr.train_backoff(corpus, count_threshold=2),
        "pcfg": gr.train_pcfg(corpus),
    }


@pytest.mark.parametrize("name", ["2gram", "3gram", "backoff", "pcfg"])
def test_save_load_roundtrip_is_exact(name, tmp_path):
    model = _tiny_models()[name]
    path = tmp_path / "model.bin"
    written = model.save(path)
    assert written == path.stat().st_size == model.size_bytes()
    loaded = gr.load_model(path)
    rng = rng_from(17)
    probes = [model.sample(rng)[0] for _ in range(50)]
    probes += ["ab", "ba", "zzz", "", "a1", "aaaaab", "b!"]
    for password in probes:
        assert loaded.neg_log2_prob(password) == model.neg_log2_prob(password)


@pytest.mark.parametrize("name", ["2gram", "backoff", "pcfg"])
def test_serialized_bytes_are_deterministic(name):
    model = _tiny_models()[name]
    again = _tiny_models()[name]
    assert dumps(model) == dumps(again)
    assert loads(dumps(model)).model_type == model.model_type


def test_non_ascii_passwords_roundtrip():
    corpus = gr.corpus_from_pairs(
        [("pässwort", 3), ("愛love", 2), ("mot de passe", 2), ("1ü2", 1)]
    )
    for model in (
        gr.train_ngram(corpus, 2),
        gr.train_backoff(corpus, 2),
        gr.train_pcfg(corpus),
    ):
        clone = loads(dumps(model))
        for password, _ in corpus.entries:
            assert clone.neg_log2_prob(password) == model.neg_log2_prob(password)
            assert model.neg_log2_prob(password) < math.inf


def test_corrupt_model_files_rejected():
    model = _tiny_models()["2gram"]
    data = dumps(model)
    with pytest.raises(FileFormatError):
        loads(data[:10])
    with pytest.raises(FileFormatError):
        loads(b"NOTMAGIC" + data[8:])
    with pytest.raises(FileFormatError):
        loads(data + b"extra")


def _chi_square_fit(model, support, n_draws, seed):
    rng = rng_from(seed)
    index = {pw: i for i, pw in enumerate(support)}
    observed = np.zeros(len(support))
    for _ in range(n_draws):
        password, _ = model.sample(rng)
        observed[index[password]] += 1
    expected = n_draws * np.array(
        [2.0 ** -model.neg_log2_prob(pw) for pw in support]
    )
    return stats.chisquare(observed, expected)


def test_sampling_matches_distribution_chi_square():
    # finite-support models with <= 10 passwords
    ngram = gr.train_ngram(gr.corpus_from_pairs([("ab", 5), ("cd", 2), ("ef", 1)]), 2)
    pcfg = gr.train_pcfg(gr.corpus_from_pairs([("ab", 3), ("cd", 2), ("12", 1)]))
    for seed, model in ((11, ngram), (12, pcfg)):
        support = [pw for pw, _ in model.enumerate(40.0)]
        assert len(support) <= 10
        result = _chi_square_fit(model, support, 10000, seed)
        assert result.pvalue > 0.001


def test_degenerate_model_serializes_to_bare_header():
    from guessrank.models.ngram import NGramModel

    empty = NGramModel(2, {})
    data = dumps(empty)
    # magic + version + tag + order + empty symbol table + zero contexts
    assert len(data) == 8 + 2 + 1 + 4 + 4 + 8
    clone = loads(data)
    assert clone.order == 2
    assert clone.neg_log2_prob("anything") == math.inf


def test_size_grows_with_training_set(big_corpus):
    for spec in ("4gram", "backoff", "pcfg"):
        small = gr.models.train_from_spec(spec, gr.top_n(big_corpus, 1000))
        large = gr.models.train_from_spec(spec, gr.top_n(big_corpus, 10000))
        assert small.size_bytes() <= large.size_bytes()


def test_size_ordering_at_10k_training(big_corpus):
    corpus = gr.top_n(big_corpus, 10000)
    backoff = gr.train_backoff(corpus, 10).size_bytes()
    ngram = gr.train_ngram(corpus, 4).size_bytes()
    pcfg = gr.train_pcfg(corpus).size_bytes()
    assert backoff > ngram >= pcfg
