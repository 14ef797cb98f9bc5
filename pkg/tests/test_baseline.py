"""Cosine similarity baseline and dense-vector loading."""

import math
import random

import numpy as np
import pytest

from threatpath.baseline import (
    DenseVectorIndex,
    DocumentEmbedding,
    TechniqueSimilarityIndex,
    ZeroVectorError,
    cosine_similarity,
    load_dense_vectors,
    rank_embeddings,
)
from threatpath.records import AttackTechnique


def test_cosine_identical_vectors():
    v = np.array([0.2, 0.5, 0.0])
    assert cosine_similarity(v, v) == pytest.approx(1.0)


def test_cosine_orthogonal_vectors():
    assert cosine_similarity(np.array([1.0, 0.0]), np.array([0.0, 2.0])) == pytest.approx(0.0)


def test_cosine_known_value():
    assert cosine_similarity(np.array([1.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0])) == pytest.approx(1 / math.sqrt(2))


def test_cosine_zero_vector_errors():
    with pytest.raises(ZeroVectorError):
        cosine_similarity(np.zeros(3), np.array([1.0, 0.0, 0.0]))


def test_cosine_dimension_mismatch():
    with pytest.raises(ValueError):
        cosine_similarity(np.ones(2), np.ones(3))


def test_cosine_scale_invariance():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.normal(size=4)
        b = rng.normal(size=4)
        s = cosine_similarity(a, b)
        assert cosine_similarity(3.7 * a, b) == pytest.approx(s, abs=1e-12)
        assert cosine_similarity(a, 0.004 * b) == pytest.approx(s, abs=1e-12)


def _index(vectors):
    return [DocumentEmbedding(f"T{1000+i}", np.array(v, dtype=float)) for i, v in enumerate(vectors)]


def test_rank_matches_bruteforce_sort():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(1, 8)
        index = _index([[rng.uniform(-1, 1) for _ in range(4)] or [1] for _ in range(n)])
        for doc in index:
            if not doc.vector.any():
                doc.vector[0] = 1.0
        query = np.array([rng.uniform(-1, 1) for _ in range(4)])
        if not query.any():
            query[0] = 1.0
        got = rank_embeddings(query, index, k=n)
        brute = sorted(
            ((d.doc_id, cosine_similarity(query, d.vector)) for d in index),
            key=lambda p: (-p[1], p[0]),
        )
        assert [g[0] for g in got] == [b[0] for b in brute]
        assert all(abs(g[1] - b[1]) < 1e-12 for g, b in zip(got, brute))


def test_rank_k_larger_than_index_returns_everything():
    index = _index([[1, 0], [0, 1]])
    assert len(rank_embeddings(np.array([1.0, 0.0]), index, k=10)) == 2


def test_rank_empty_index_errors():
    with pytest.raises(ValueError):
        rank_embeddings(np.ones(2), [], 5)


def _techniques():
    return [
        AttackTechnique("T1059", "Command and Scripting Interpreter",
                        "Adversaries may abuse command and script interpreters to execute commands"),
        AttackTechnique("T1190", "Exploit Public-Facing Application",
                        "Adversaries may attempt to exploit a weakness in an internet facing application"),
        AttackTechnique("T1499", "Endpoint Denial of Service",
                        "Adversaries may perform denial of service attacks to degrade availability"),
    ]


def test_similarity_index_self_query_ranks_first():
    index = TechniqueSimilarityIndex().fit(_techniques())
    ranked = index.rank_techniques(_techniques()[1].description, k=3)
    assert ranked[0][0] == "T1190"
    assert ranked[0][1] == pytest.approx(1.0, abs=1e-9)


def test_similarity_index_zero_support_query_is_total():
    index = TechniqueSimilarityIndex().fit(_techniques())
    ranked = index.rank_techniques("zzzz qqqq xxxx", k=2)
    assert [r[1] for r in ranked] == [0.0, 0.0]
    assert [r[0] for r in ranked] == ["T1059", "T1190"]  # id tie-break


def test_dense_vector_file_round_trip():
    text = "# id then components\nT1059 0.5 0.5 0\nCVE-2020-0001 1 0 0\n"
    embeddings = load_dense_vectors(text)
    assert [e.doc_id for e in embeddings] == ["T1059", "CVE-2020-0001"]
    index = DenseVectorIndex(embeddings)
    ranked = index.rank_techniques("CVE-2020-0001", k=1)
    assert ranked[0][0] == "T1059"
    assert ranked[0][1] == pytest.approx(1 / math.sqrt(2))


def test_dense_vector_file_width_mismatch():
    with pytest.raises(ValueError, match="expected 3 components"):
        load_dense_vectors("T1 1 2 3\nT2 1 2\n")


def test_dense_vector_file_needs_components():
    with pytest.raises(ValueError):
        load_dense_vectors("T1\n")
