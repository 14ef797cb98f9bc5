"""TF-IDF n-gram vectorizer against direct-arithmetic oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threatpath.vectorize import NgramTfidfVectorizer, fit_vocabulary, iter_ngrams, transform


def test_fit_vocabulary_unigrams():
    vocab = fit_vocabulary([["a", "b"], ["b", "c"]], n_max=1, min_df=1)
    assert set(vocab.entries) == {("a",), ("b",), ("c",)}
    assert vocab.doc_frequency[("b",)] == 2


def test_fit_vocabulary_min_df_filters():
    vocab = fit_vocabulary([["a", "b"], ["b", "c"]], n_max=1, min_df=2)
    assert set(vocab.entries) == {("b",)}


def test_fit_vocabulary_bigrams():
    vocab = fit_vocabulary([["a", "b", "c"]], n_max=2, min_df=1)
    assert set(vocab.entries) == {("a",), ("b",), ("c",), ("a", "b"), ("b", "c")}


def test_fit_vocabulary_rejects_empty_corpus():
    with pytest.raises(ValueError):
        fit_vocabulary([], n_max=1, min_df=1)


def test_indices_are_lexicographic_and_order_invariant():
    corpus_a = [["b", "a"], ["c", "a"]]
    corpus_b = [["c", "a"], ["b", "a"]]
    va = fit_vocabulary(corpus_a, 1, 1)
    vb = fit_vocabulary(corpus_b, 1, 1)
    assert va.entries == vb.entries
    assert list(va.entries.values()) == sorted(va.entries.values())


def test_transform_oov_stream_is_empty_support():
    vocab = fit_vocabulary([["a", "b"]], 1, 1)
    fv = transform(["z", "q"], vocab)
    assert fv.is_empty
    assert fv.dimension == len(vocab)


def test_transform_matches_hand_computed_tfidf():
    # two-document corpus; query equals document 1
    corpus = [["a", "b", "a"], ["b", "c"]]
    vocab = fit_vocabulary(corpus, n_max=1, min_df=1)
    fv = transform(["a", "b", "a"], vocab)

    # oracle: direct arithmetic with idf(t) = ln((1+N)/(1+df)) + 1
    idf_a = math.log(3 / 2) + 1
    idf_b = math.log(3 / 3) + 1
    raw = {("a",): 2 * idf_a, ("b",): 1 * idf_b}
    norm = math.sqrt(sum(v * v for v in raw.values()))
    dense = fv.to_dense()
    assert dense[vocab.entries[("a",)]] == pytest.approx(raw[("a",)] / norm, abs=1e-12)
    assert dense[vocab.entries[("b",)]] == pytest.approx(raw[("b",)] / norm, abs=1e-12)
    assert dense[vocab.entries[("c",)]] == 0.0


def test_duplicate_tokens_raise_tf():
    vocab = fit_vocabulary([["a", "b"], ["b", "c"]], 1, 1)
    single = transform(["b"], vocab)
    double = transform(["b", "b"], vocab)
    # tf doubles before normalization, so the unit vectors coincide
    assert np.allclose(single.to_dense(), double.to_dense())


def test_unit_norm_when_support_nonempty():
    vocab = fit_vocabulary([["a", "b", "c"], ["a", "c"]], 2, 1)
    fv = transform(["a", "c", "b"], vocab)
    assert abs(np.linalg.norm(fv.values) - 1.0) < 1e-9


token = st.sampled_from(list("abcdefg"))
stream = st.lists(token, min_size=0, max_size=8)


@settings(max_examples=150, deadline=None)
@given(st.lists(stream, min_size=1, max_size=6), st.integers(1, 3), st.integers(1, 3), stream)
def test_equivalence_with_bruteforce_oracle(corpus, n_max, min_df, query):
    vocab = fit_vocabulary(corpus, n_max=n_max, min_df=min_df)

    # oracle: enumerate every n-gram of every doc, count affected docs directly
    all_ngrams = set()
    for doc in corpus:
        all_ngrams |= set(iter_ngrams(doc, n_max))
    expected_entries = set()
    for g in all_ngrams:
        df = sum(1 for doc in corpus if g in set(iter_ngrams(doc, n_max)))
        if df >= min_df:
            expected_entries.add(g)
            assert vocab.doc_frequency[g] == df
    assert set(vocab.entries) == expected_entries

    fv = transform(query, vocab)
    dense = fv.to_dense()
    n = len(corpus)
    expected = np.zeros(len(vocab))
    for g in set(iter_ngrams(query, n_max)):
        if g in vocab.entries:
            tf = sum(
                1
                for i in range(len(query) - len(g) + 1)
                if tuple(query[i : i + len(g)]) == g
            )
            expected[vocab.entries[g]] = tf * (math.log((1 + n) / (1 + vocab.doc_frequency[g])) + 1)
    norm = np.linalg.norm(expected)
    if norm > 0:
        expected /= norm
    assert np.allclose(dense, expected, atol=1e-12)


def test_batch_transform_agrees_with_single():
    corpus = [["a", "b", "c"], ["b", "c", "d"], ["a", "d"]]
    vec = NgramTfidfVectorizer(n_max=2, min_df=1).fit(corpus)
    matrix = vec.transform(corpus)
    for i, doc in enumerate(corpus):
        row = np.asarray(matrix[i].todense()).ravel()
        assert np.allclose(row, vec.transform_one(doc).to_dense(), atol=1e-12)
