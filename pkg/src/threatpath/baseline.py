"""Similarity-search baseline: cosine ranking of technique document vectors.

The default index fits TF-IDF vectors on the technique descriptions only and
transforms query CVE texts against that vocabulary. Pretrained dense vectors
can be loaded from a text file instead (one record per line: id followed by
the vector components); no embedding model is trained here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .textprep import SynonymCodebook, normalize
from .vectorize import NgramTfidfVectorizer


class ZeroVectorError(ValueError):
    """Cosine similarity is undefined for a zero vector."""


@dataclass
class DocumentEmbedding:
    doc_id: str
    vector: np.ndarray


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for zero vectors")
    return float(np.dot(a, b) / (norm_a * norm_b))


def rank_embeddings(
    query: np.ndarray,
    index: Sequence[DocumentEmbedding],
    k: int,
) -> list[tuple[str, float]]:
    """Top-k ids by cosine, descending; ties broken by id ascending.

    A zero-support query scores every document 0.0 instead of erroring, so
    ranking stays total.
    """
    if not index:
        raise ValueError("technique index is empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    query = np.asarray(query, dtype=float)
    qnorm = np.linalg.norm(query)
    scored = []
    for doc in index:
        if qnorm == 0.0:
            scored.append((doc.doc_id, 0.0))
            continue
        scored.append((doc.doc_id, cosine_similarity(query, doc.vector)))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]


def load_dense_vectors(text: str) -> list[DocumentEmbedding]:
    """Parse the dense-vector file format: 'id c1 c2 ... cn' per line."""
    out = []
    width = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"line {lineno}: expected id plus components")
        vec = np.array([float(x) for x in parts[1:]])
        if width is None:
            width = len(vec)
        elif len(vec) != width:
            raise ValueError(f"line {lineno}: expected {width} components, got {len(vec)}")
        out.append(DocumentEmbedding(parts[0], vec))
    return out


class TechniqueSimilarityIndex(BaseEstimator):
    """Cosine-similarity search over technique descriptions."""

    def __init__(self, n_max: int = 2, min_df: int = 1, codebook: SynonymCodebook | None = None):
        self.n_max = n_max
        self.min_df = min_df
        self.codebook = codebook

    def _prep(self, text: str) -> list[str]:
        tokens = normalize(text)
        if self.codebook is not None:
            tokens = self.codebook.apply(tokens)
        return tokens

    def fit(self, techniques: Sequence, y=None):
        """techniques: records with .id and .description."""
        self.vectorizer_ = NgramTfidfVectorizer(n_max=self.n_max, min_df=self.min_df)
        streams = [self._prep(t.description or t.name) for t in techniques]
        matrix = self.vectorizer_.fit(streams).transform(streams)
        self.index_ = [
            DocumentEmbedding(t.id, np.asarray(matrix[i].todense()).ravel())
            for i, t in enumerate(techniques)
        ]
        return self

    def rank_techniques(self, cve_text: str, k: int = 5) -> list[tuple[str, float]]:
        if not hasattr(self, "index_"):
            raise NotFittedError("index not fitted")
        vec = self.vectorizer_.transform_one(self._prep(cve_text))
        return rank_embeddings(vec.to_dense(), self.index_, k)


class DenseVectorIndex:
    """Pretrained-vector variant: everything must come from the loaded file."""

    def __init__(self, embeddings: Sequence[DocumentEmbedding]):
        if not embeddings:
            raise ValueError("no embeddings loaded")
        self.by_id = {e.doc_id: e for e in embeddings}
        self.index = [e for e in embeddings if e.doc_id.startswith("T")]

    def rank_techniques(self, cve_id: str, k: int = 5) -> list[tuple[str, float]]:
        query = self.by_id.get(cve_id)
        if query is None:
            raise KeyError(f"no pretrained vector for {cve_id}")
        return rank_embeddings(query.vector, self.index, k)
