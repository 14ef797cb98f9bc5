"""Per-CWE sigmoid units and threshold-guided descent of the weakness DAG.

Each trainable node gets a single-layer sigmoid classifier (regularized
log-loss, full-batch gradient descent, fixed seed). Classification scores
the roots, keeps those above the threshold (falling back to the best root
when none qualifies), then repeats level by level down the hierarchy.
"""

from __future__ import annotations

import io
import json
import logging
import pickle
from dataclasses import dataclass, field, asdict
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .hierarchy import WeaknessHierarchy, build_hierarchy
from .snapshot import KnowledgeSnapshot
from .textprep import SynonymCodebook, build_codebook, normalize
from .vectorize import NgramTfidfVectorizer

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 2


@dataclass
class TrainingConfig:
    n_max: int = 2
    min_df: int = 3
    min_samples: int = 25          # positives required for a node to be trainable
    negative_ratio: float = 5.0    # cap on negatives per positive
    learning_rate: float = 2.0
    epochs: int = 150
    l2: float = 1e-4
    threshold: float = 0.5
    tune_threshold: bool = False   # pick threshold over threshold_grid on validation split
    threshold_grid: tuple[float, ...] = (0.3, 0.4, 0.5, 0.6, 0.7)
    seed: int = 7

    @classmethod
    def from_dict(cls, d: dict) -> "TrainingConfig":
        cfg = cls()
        for k, v in d.items():
            if not hasattr(cfg, k):
                raise ValueError(f"unknown training config key: {k}")
            setattr(cfg, k, tuple(v) if k == "threshold_grid" else v)
        return cfg


@dataclass
class NodeClassifier:
    node: int
    weights: np.ndarray
    bias: float

    def score(self, x_indices: np.ndarray, x_values: np.ndarray) -> float:
        z = self.bias
        if len(x_indices):
            z += float(np.dot(self.weights[x_indices], x_values))
        return 1.0 / (1.0 + np.exp(-z))


@dataclass
class CwePrediction:
    cwe: int
    score: float
    path: list[int]
    fallback: bool = False


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logloss_and_grad(
    w: np.ndarray,
    b: float,
    X: sparse.csr_matrix,
    y: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, float]:
    """Mean regularized log-loss and its gradient wrt (w, b).

    The L2 penalty applies to the weights only, not the bias.
    """
    n = X.shape[0]
    z = X @ w + b
    p = sigmoid(z)
    eps = 1e-12
    loss = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
    loss += 0.5 * l2 * float(np.dot(w, w))
    residual = (p - y) / n
    grad_w = X.T @ residual + l2 * w
    grad_b = float(np.sum(residual))
    return float(loss), np.asarray(grad_w).ravel(), grad_b


def train_node(
    node: int,
    positives: sparse.csr_matrix,
    negatives: sparse.csr_matrix,
    config: TrainingConfig,
) -> NodeClassifier:
    """Fit one sigmoid unit by full-batch gradient descent (deterministic)."""
    if positives.shape[0] == 0 or negatives.shape[0] == 0:
        raise ValueError(f"CWE-{node}: training requires at least one positive and one negative")
    X = sparse.vstack([positives, negatives], format="csr")
    y = np.concatenate([np.ones(positives.shape[0]), np.zeros(negatives.shape[0])])
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(config.epochs):
        _, grad_w, grad_b = logloss_and_grad(w, b, X, y, config.l2)
        w -= config.learning_rate * grad_w
        b -= config.learning_rate * grad_b
    return NodeClassifier(node=node, weights=w, bias=b)


@dataclass
class HierarchicalModel:
    hierarchy: WeaknessHierarchy
    vectorizer: NgramTfidfVectorizer
    codebook: SynonymCodebook
    classifiers: dict[int, NodeClassifier]
    threshold: float
    trained_on: str
    sample_counts: dict[int, int]
    config: TrainingConfig = field(default_factory=TrainingConfig)

    def preprocess(self, text: str) -> list[str]:
        return self.codebook.apply(normalize(text))

    def score_text(self, text: str) -> Callable[[int], float]:
        fv = self.vectorizer.transform_one(self.preprocess(text))
        cache: dict[int, float] = {}

        def score(node: int) -> float:
            if node not in cache:
                cache[node] = self.classifiers[node].score(fv.indices, fv.values)
            return cache[node]

        return score

    def predict_cwes(self, text: str) -> list[CwePrediction]:
        if not self.classifiers:
            raise NotFittedError("model has no trained node classifiers")
        return traverse_hierarchy(self.hierarchy, set(self.classifiers), self.score_text(text), self.threshold)

    def predicted_label_set(self, text: str) -> set[int]:
        return {p.cwe for p in self.predict_cwes(text)}


def traverse_hierarchy(
    hierarchy: WeaknessHierarchy,
    trainable: set[int],
    score: Callable[[int], float],
    threshold: float,
) -> list[CwePrediction]:
    """Threshold-guided descent with best-child fallback at every level.

    Returns every visited node kept by the threshold plus fallback picks,
    deduplicated (a DAG node reachable twice keeps its strongest path),
    sorted by score descending then CWE id.
    """
    roots = [r for r in hierarchy.roots if r in trainable]
    if not roots:
        raise ValueError("no trainable root classifiers")

    kept: dict[int, tuple[float, list[int], bool]] = {}

    def path_strength(path: list[int]) -> tuple:
        return (min(score(n) for n in path), [-n for n in path])

    def keep(node: int, path: list[int], fallback: bool) -> bool:
        """Record the visit; True when this path displaced the stored one."""
        value = (score(node), path, fallback)
        if node not in kept:
            kept[node] = value
            return True
        if path_strength(path) > path_strength(kept[node][1]):
            kept[node] = value
            return True
        return False

    def descend(node: int, path: list[int]) -> None:
        children = [c for c in hierarchy.children.get(node, []) if c in trainable]
        if not children:
            return
        above = [c for c in children if score(c) >= threshold]
        if above:
            picks = [(c, False) for c in above]
        else:
            best = max(children, key=lambda c: (score(c), -c))
            picks = [(best, True)]
        for child, fallback in picks:
            child_path = path + [child]
            if keep(child, child_path, fallback):
                descend(child, child_path)

    root_above = [r for r in roots if score(r) >= threshold]
    if root_above:
        root_picks = [(r, False) for r in root_above]
    else:
        best = max(roots, key=lambda r: (score(r), -r))
        root_picks = [(best, True)]
    for root, fallback in root_picks:
        if keep(root, [root], fallback):
            descend(root, [root])

    predictions = [
        CwePrediction(cwe=node, score=s, path=path, fallback=fallback)
        for node, (s, path, fallback) in kept.items()
    ]
    predictions.sort(key=lambda p: (-p.score, p.cwe))
    return predictions


def _negative_pool(hierarchy: WeaknessHierarchy, node: int) -> list[str]:
    """CVEs indexed under the node's siblings (same parent), minus its own.

    An only child has no sibling pool; it falls back to everything labeled
    outside its own subtree so chain nodes stay trainable.
    """
    own = set(hierarchy.training_index.get(node, []))
    pool: set[str] = set()
    node_parents = hierarchy.parents.get(node, [])
    if node_parents:
        for parent in node_parents:
            for sibling in hierarchy.children.get(parent, []):
                if sibling != node:
                    pool.update(hierarchy.training_index.get(sibling, []))
    else:
        for other_root in hierarchy.roots:
            if other_root != node:
                pool.update(hierarchy.training_index.get(other_root, []))
    pool -= own
    if not pool:
        for root in hierarchy.roots:
            pool.update(hierarchy.training_index.get(root, []))
        pool -= own
    return sorted(pool)


def train_hierarchy(
    snapshot: KnowledgeSnapshot,
    config: TrainingConfig | None = None,
    cve_ids: Sequence[str] | None = None,
    glossary: Sequence[Sequence[str]] = (),
    extra_labels: dict[str, set[int]] | None = None,
    removed_labels: dict[str, set[int]] | None = None,
) -> HierarchicalModel:
    """Train one sigmoid unit per sufficiently-populated CWE node.

    ``cve_ids`` restricts training to a subset of the snapshot (the training
    split); ``extra_labels``/``removed_labels`` apply reviewer feedback on
    top of the NVD assignments before indexing.
    """
    config = config or TrainingConfig()
    hierarchy = build_hierarchy(snapshot)

    allowed = set(cve_ids) if cve_ids is not None else None
    label_sets: dict[str, set[int]] = {}
    for cve in snapshot.cves:
        if allowed is not None and cve.id not in allowed:
            continue
        labels = set(cve.assigned_cwes)
        if removed_labels and cve.id in removed_labels:
            labels -= removed_labels[cve.id]
        if extra_labels and cve.id in extra_labels:
            labels |= extra_labels[cve.id]
        labels &= hierarchy.nodes
        if labels:
            label_sets[cve.id] = labels

    # rebuild the training index over exactly the training CVEs
    hierarchy.training_index = {n: [] for n in hierarchy.nodes}
    hierarchy.direct_counts = {n: 0 for n in hierarchy.nodes}
    for cve_id in sorted(label_sets):
        labels = label_sets[cve_id]
        for node in hierarchy.closure(labels):
            hierarchy.training_index[node].append(cve_id)
        for label in labels:
            hierarchy.direct_counts[label] += 1

    if not any(hierarchy.training_index[r] for r in hierarchy.roots):
        raise ValueError("no trainable roots: snapshot has no usable CWE assignments")

    texts = {c.id: c.description for c in snapshot.cves if c.id in label_sets}
    codebook = build_codebook(snapshot.cwes, glossary=glossary)
    streams = {cid: codebook.apply(normalize(texts[cid])) for cid in sorted(texts)}

    vectorizer = NgramTfidfVectorizer(n_max=config.n_max, min_df=config.min_df)
    ordered_ids = sorted(streams)
    matrix = vectorizer.fit(list(streams.values())).transform([streams[c] for c in ordered_ids])
    row_of = {cid: i for i, cid in enumerate(ordered_ids)}

    rng = np.random.default_rng(config.seed)
    classifiers: dict[int, NodeClassifier] = {}
    sample_counts: dict[int, int] = dict(hierarchy.direct_counts)

    for node in sorted(hierarchy.nodes):
        positive_ids = hierarchy.training_index[node]
        if len(positive_ids) < config.min_samples:
            continue
        negative_ids = _negative_pool(hierarchy, node)
        if not negative_ids:
            continue
        cap = int(config.negative_ratio * len(positive_ids))
        if len(negative_ids) > cap:
            chosen = rng.choice(len(negative_ids), size=cap, replace=False)
            negative_ids = [negative_ids[i] for i in sorted(chosen)]
        pos_rows = [row_of[c] for c in positive_ids]
        neg_rows = [row_of[c] for c in negative_ids]
        classifiers[node] = train_node(node, matrix[pos_rows], matrix[neg_rows], config)

    logger.info("trained %d node classifiers over %d CVEs", len(classifiers), len(label_sets))
    return HierarchicalModel(
        hierarchy=hierarchy,
        vectorizer=vectorizer,
        codebook=codebook,
        classifiers=classifiers,
        threshold=config.threshold,
        trained_on=snapshot.snapshot_id,
        sample_counts=sample_counts,
        config=config,
    )


def save_model(model: HierarchicalModel) -> bytes:
    """Serialize a model with a format header for version checking."""
    header = json.dumps(
        {"format_version": MODEL_FORMAT_VERSION, "trained_on": model.trained_on}
    ).encode()
    buf = io.BytesIO()
    buf.write(len(header).to_bytes(4, "big"))
    buf.write(header)
    pickle.dump(model, buf, protocol=4)
    return buf.getvalue()


class ModelFormatError(ValueError):
    pass


def load_model(raw: bytes, expect_snapshot: str | None = None) -> HierarchicalModel:
    try:
        header_len = int.from_bytes(raw[:4], "big")
        header = json.loads(raw[4 : 4 + header_len])
    except Exception as exc:
        raise ModelFormatError(f"not a model file: {exc}") from exc
    if header.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"model format version {header.get('format_version')!r} is not supported "
            f"(expected {MODEL_FORMAT_VERSION})"
        )
    try:
        model = pickle.loads(raw[4 + header_len :])
    except Exception as exc:
        raise ModelFormatError(f"truncated or corrupt model body: {exc}") from exc
    if expect_snapshot and model.trained_on != expect_snapshot:
        logger.warning(
            "model trained on snapshot %s but %s was requested",
            model.trained_on[:12],
            expect_snapshot[:12],
        )
    return model


class HierarchicalCweClassifier(BaseEstimator, ClassifierMixin):
    """sklearn-style facade: fit on a snapshot, predict CWE sets for texts."""

    def __init__(
        self,
        n_max: int = 2,
        min_df: int = 3,
        min_samples: int = 25,
        negative_ratio: float = 5.0,
        learning_rate: float = 2.0,
        epochs: int = 150,
        l2: float = 1e-4,
        threshold: float = 0.5,
        seed: int = 7,
    ):
        self.n_max = n_max
        self.min_df = min_df
        self.min_samples = min_samples
        self.negative_ratio = negative_ratio
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2 = l2
        self.threshold = threshold
        self.seed = seed

    def _config(self) -> TrainingConfig:
        return TrainingConfig(
            n_max=self.n_max,
            min_df=self.min_df,
            min_samples=self.min_samples,
            negative_ratio=self.negative_ratio,
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            l2=self.l2,
            threshold=self.threshold,
            seed=self.seed,
        )

    def fit(self, snapshot: KnowledgeSnapshot, cve_ids: Sequence[str] | None = None):
        self.model_ = train_hierarchy(snapshot, self._config(), cve_ids=cve_ids)
        return self

    def predict(self, texts: Sequence[str]) -> list[list[CwePrediction]]:
        if not hasattr(self, "model_"):
            raise NotFittedError("call fit before predict")
        return [self.model_.predict_cwes(t) for t in texts]
