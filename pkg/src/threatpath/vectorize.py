"""Sparse TF-IDF feature extraction over word n-grams.

The weighting is frozen so results are exactly reproducible:
    weight(t) = tf(t) * idf(t),  idf(t) = ln((1 + N) / (1 + df(t))) + 1
followed by L2 normalization of each vector. Vocabulary indices are assigned
in lexicographic n-gram order, so fitting is independent of corpus order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

Ngram = tuple[str, ...]


@dataclass
class Vocabulary:
    entries: dict[Ngram, int]
    doc_frequency: dict[Ngram, int]
    corpus_size: int
    n_max: int
    min_df: int

    def __len__(self) -> int:
        return len(self.entries)

    def idf(self, ngram: Ngram) -> float:
        df = self.doc_frequency[ngram]
        return math.log((1 + self.corpus_size) / (1 + df)) + 1.0

    def idf_array(self) -> np.ndarray:
        out = np.zeros(len(self.entries))
        for ngram, j in self.entries.items():
            out[j] = self.idf(ngram)
        return out


@dataclass
class FeatureVector:
    """Sparse unit-L2 vector: strictly increasing indices with positive weights."""

    indices: np.ndarray
    values: np.ndarray
    dimension: int

    @property
    def is_empty(self) -> bool:
        return len(self.indices) == 0

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension)
        dense[self.indices] = self.values
        return dense


def iter_ngrams(tokens: Sequence[str], n_max: int) -> Iterable[Ngram]:
    for n in range(1, n_max + 1):
        for i in range(len(tokens) - n + 1):
            yield tuple(tokens[i : i + n])


def fit_vocabulary(corpus: Sequence[Sequence[str]], n_max: int = 2, min_df: int = 3) -> Vocabulary:
    """Collect all n-grams with document frequency >= min_df."""
    if not corpus:
        raise ValueError("cannot fit a vocabulary on an empty corpus")
    if n_max < 1 or min_df < 1:
        raise ValueError("n_max and min_df must be >= 1")
    df: dict[Ngram, int] = {}
    for tokens in corpus:
        for ngram in set(iter_ngrams(tokens, n_max)):
            df[ngram] = df.get(ngram, 0) + 1
    kept = sorted(g for g, count in df.items() if count >= min_df)
    entries = {g: j for j, g in enumerate(kept)}
    return Vocabulary(
        entries=entries,
        doc_frequency={g: df[g] for g in kept},
        corpus_size=len(corpus),
        n_max=n_max,
        min_df=min_df,
    )


def transform(tokens: Sequence[str], vocab: Vocabulary) -> FeatureVector:
    """TF-IDF vector for one token stream; out-of-vocabulary n-grams are ignored."""
    counts: dict[Ngram, float] = {}
    for ngram in iter_ngrams(tokens, vocab.n_max):
        if ngram in vocab.entries:
            counts[ngram] = counts.get(ngram, 0.0) + 1.0
    if not counts:
        return FeatureVector(np.empty(0, dtype=np.int64), np.empty(0), len(vocab))
    pairs = sorted((vocab.entries[g], c * vocab.idf(g)) for g, c in counts.items())
    idx = np.array([j for j, _ in pairs], dtype=np.int64)
    vals = np.array([v for _, v in pairs])
    norm = np.linalg.norm(vals)
    return FeatureVector(idx, vals / norm, len(vocab))


class NgramTfidfVectorizer(BaseEstimator, TransformerMixin):
    """fit/transform wrapper producing CSR matrices for batched training.

    Input is pre-tokenized streams (see :mod:`threatpath.textprep`), not raw
    strings, so the same normalization is shared across the whole pipeline.
    """

    def __init__(self, n_max: int = 2, min_df: int = 3):
        self.n_max = n_max
        self.min_df = min_df
        self.vocabulary_: Vocabulary | None = None

    def fit(self, X: Sequence[Sequence[str]], y=None):
        self.vocabulary_ = fit_vocabulary(X, n_max=self.n_max, min_df=self.min_df)
        # cache idf per column for the fast batched path
        self._idf = self.vocabulary_.idf_array()
        return self

    def _check_fitted(self):
        if self.vocabulary_ is None:
            raise NotFittedError("NgramTfidfVectorizer is not fitted")

    def transform(self, X: Sequence[Sequence[str]]) -> sparse.csr_matrix:
        self._check_fitted()
        vocab = self.vocabulary_
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for tokens in X:
            counts: dict[int, float] = {}
            for ngram in iter_ngrams(tokens, vocab.n_max):
                j = vocab.entries.get(ngram)
                if j is not None:
                    counts[j] = counts.get(j, 0.0) + 1.0
            row_idx = sorted(counts)
            row_vals = [counts[j] * self._idf[j] for j in row_idx]
            norm = math.sqrt(sum(v * v for v in row_vals))
            if norm > 0:
                row_vals = [v / norm for v in row_vals]
            indices.extend(row_idx)
            data.extend(row_vals)
            indptr.append(len(indices))
        return sparse.csr_matrix(
            (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
            shape=(len(X), len(vocab)),
        )

    def transform_one(self, tokens: Sequence[str]) -> FeatureVector:
        self._check_fitted()
        return transform(tokens, self.vocabulary_)
