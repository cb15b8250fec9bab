import io
import itertools

import numpy as np
import pytest

import guessrank as gr
from guessrank.errors import EnumerationBudgetError
from guessrank.oracle import build_ranked_list, true_rank, write_ranked_csv


def test_tied_probabilities_share_lowest_group_rank():
    model = gr.train_ngram(gr.corpus_from_pairs([("ab", 1), ("ac", 1)]), 2)
    ranked = build_ranked_list(model, 1.0)
    assert ranked.passwords == ["ab", "ac"]
    assert list(ranked.group_ranks) == [0, 0]


def test_distinct_probabilities_get_positions():
    model = gr.train_pcfg(gr.corpus_from_pairs([("aa", 4), ("12", 2), ("b!", 1)]))
    ranked = build_ranked_list(model, 10.0)
    assert list(ranked.group_ranks) == list(range(len(ranked)))
    assert ranked.passwords[0] == "aa"


def _brute_force_entries(model, alphabet, threshold, max_len):
    entries = []
    for length in range(0, max_len + 1):
        for chars in itertools.product(alphabet, repeat=length):
            password = "".join(chars)
            neglog = model.neg_log2_prob(password)
            if neglog <= threshold:
                entries.append((password, neglog))
    entries.sort(key=lambda e: (e[1], e[0]))
    return entries


def test_matches_brute_force_on_tiny_model():
    corpus = gr.corpus_from_pairs([("ab", 3), ("aab", 2), ("b", 4), ("ba", 1)])
    model = gr.train_backoff(corpus, count_threshold=2)
    threshold = 7.5
    ranked = build_ranked_list(model, threshold)
    expected = _brute_force_entries(model, "ab", threshold, 8)
    assert list(zip(ranked.passwords, ranked.neglogs)) == expected
    # group ranks equal the brute-force count of strictly smaller neg-logs
    neglogs = [e[1] for e in expected]
    for k, neglog in enumerate(neglogs):
        assert ranked.group_ranks[k] == sum(1 for x in neglogs if x < neglog)


def test_true_rank_semantics():
    model = gr.train_pcfg(
        gr.corpus_from_pairs([("aa", 4), ("bb", 2), ("12", 2), ("c!", 1)])
    )
    ranked = build_ranked_list(model, 6.0)
    assert true_rank(ranked, ranked.passwords[0], model) == 0
    assert true_rank(ranked, "zzzz", model) is None  # above threshold
    for password in ranked.passwords:
        neglog = model.neg_log2_prob(password)
        expected = int(np.sum(ranked.neglogs < neglog))
        assert true_rank(ranked, password, model) == expected


def test_true_rank_positional_mode():
    model = gr.train_ngram(gr.corpus_from_pairs([("ab", 1), ("ac", 1)]), 2)
    ranked = build_ranked_list(model, 1.0)
    assert true_rank(ranked, "ab", model, positional=True) == 0
    assert true_rank(ranked, "ac", model, positional=True) == 1
    assert true_rank(ranked, "ab", model) == true_rank(ranked, "ac", model) == 0


def test_budget_exceeded_is_loud():
    model = gr.train_pcfg(gr.corpus_from_pairs([("ab", 1), ("cd", 1), ("ef", 1)]))
    with pytest.raises(EnumerationBudgetError) as info:
        build_ranked_list(model, 30.0, entry_budget=2)
    assert "2" in str(info.value)


def test_csv_export_quotes_awkward_passwords():
    model = gr.train_pcfg(gr.corpus_from_pairs([('a,"b', 2), ("cd", 1)]))
    ranked = build_ranked_list(model, 10.0)
    out = io.StringIO()
    write_ranked_csv(ranked, out)
    lines = out.getvalue().splitlines()
    assert lines[0] == "rank,neglog,password"
    assert any('"a,""b"' in line for line in lines[1:])
