import numpy as np
import pytest

import corpusgen
import guessrank as gr


def rng_from(seed):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


@pytest.fixture(scope="session")
def big_pairs():
    """Synthetic leak used by the overlap/size experiments."""
    return corpusgen.generate_pairs()


@pytest.fixture(scope="session")
def big_corpus(big_pairs):
    return gr.corpus_from_pairs(big_pairs)


@pytest.fixture(scope="session")
def overlap_models(big_corpus):
    """The four models trained on the top 50,000 passwords."""
    corpus = gr.top_n(big_corpus, 50000)
    return {
        "4gram": gr.train_ngram(corpus, 4),
        "5gram": gr.train_ngram(corpus, 5),
        "backoff": gr.train_backoff(corpus, 10),
        "pcfg": gr.train_pcfg(corpus),
    }


@pytest.fixture(scope="session")
def precision_setup():
    """PCFG trained on 100,000 passwords of the deeper-volume leak, plus
    a ground-truth list of at least 20,000 passwords."""
    pairs = corpusgen.generate_precision_pairs()
    corpus = gr.top_n(gr.corpus_from_pairs(pairs), 100000)
    model = gr.train_pcfg(corpus)
    ranked = None
    for threshold in (16.0, 17.0, 18.0, 19.0, 20.0):
        candidate = gr.build_ranked_list(model, threshold, entry_budget=3 * 10**6)
        if len(candidate) >= 20000:
            ranked = candidate
            break
    assert ranked is not None, "no threshold yielded 20k ground-truth passwords"
    return model, ranked
