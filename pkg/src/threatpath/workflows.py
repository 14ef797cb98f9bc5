"""End-to-end orchestration: sampling, training, evaluation, ranking.

These glue functions are shared by the CLI, the HTTP service and the
evaluation harness so every entry point reproduces the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .baseline import TechniqueSimilarityIndex
from .classifier import HierarchicalModel, TrainingConfig, train_hierarchy
from .mapping import MappingTable, ORIGIN_ASSIGNED
from .metrics import (
    GroundTruthEntry,
    ScoreReport,
    mean_reciprocal_rank,
    micro_macro_scores,
    split_dataset,
    stratified_sample,
    threshold_sweep,
)
from .snapshot import KnowledgeSnapshot

DEFAULT_RANK_K = 5


def labeled_entries(snapshot: KnowledgeSnapshot) -> list[tuple[str, set[int]]]:
    """(cve_id, active CWE label set) for every CVE with usable assignments."""
    active = {c.id for c in snapshot.cwes if c.status == "active"}
    out = []
    for cve in snapshot.cves:
        labels = {w for w in cve.assigned_cwes if w in active}
        if labels:
            out.append((cve.id, labels))
    return out


@dataclass
class DeskSplit:
    sample: list[str]
    train: list[str]
    validation: list[str]
    test: list[str]


def desk_sample_and_split(
    snapshot: KnowledgeSnapshot,
    sample_size: int = 10_000,
    seed: int = 7,
    ratios: tuple[float, float, float] = (0.7, 0.1, 0.2),
) -> DeskSplit:
    entries = labeled_entries(snapshot)
    sample_ids = stratified_sample(entries, sample_size, seed=seed)
    chosen = set(sample_ids)
    sample_entries = [(c, labels) for c, labels in entries if c in chosen]
    train, validation, test = split_dataset(sample_entries, ratios, seed=seed)
    return DeskSplit(sample=sample_ids, train=train, validation=validation, test=test)


def test_entry_triples(
    snapshot: KnowledgeSnapshot, cve_ids: Sequence[str]
) -> list[tuple[str, set[int], str]]:
    """(cve_id, direct labels, description) for the evaluation split."""
    active = {c.id for c in snapshot.cwes if c.status == "active"}
    index = snapshot.cve_index()
    out = []
    for cve_id in cve_ids:
        record = index[cve_id]
        labels = {w for w in record.assigned_cwes if w in active}
        out.append((cve_id, labels, record.description))
    return out


def evaluate_split(
    model: HierarchicalModel,
    snapshot: KnowledgeSnapshot,
    cve_ids: Sequence[str],
    cutoffs: Sequence[int] = (500, 200, 100, 50),
    coverage_any: bool = False,
) -> list[ScoreReport]:
    return threshold_sweep(model, test_entry_triples(snapshot, cve_ids), cutoffs, coverage_any)


def tune_threshold(
    model: HierarchicalModel,
    snapshot: KnowledgeSnapshot,
    validation_ids: Sequence[str],
    grid: Sequence[float] = (0.3, 0.4, 0.5, 0.6, 0.7),
) -> float:
    """Pick the traversal threshold maximizing micro-F on the validation split."""
    triples = test_entry_triples(snapshot, validation_ids)
    best = (model.threshold, -1.0)
    original = model.threshold
    try:
        for threshold in grid:
            model.threshold = threshold
            predicted = {c: model.predicted_label_set(text) for c, _, text in triples}
            actual = {c: model.hierarchy.closure(labels) & set(model.classifiers) for c, labels, _ in triples}
            predicted = {c: p & set(model.classifiers) for c, p in predicted.items()}
            report = micro_macro_scores(predicted, actual)
            if report.micro_f > best[1]:
                best = (threshold, report.micro_f)
    finally:
        model.threshold = original
    return best[0]


def train_desk_model(
    snapshot: KnowledgeSnapshot,
    config: TrainingConfig | None = None,
    glossary: Sequence[Sequence[str]] = (),
    sample_size: int = 10_000,
) -> tuple[HierarchicalModel, DeskSplit]:
    """Stratified sample, 70/10/20 split, training on the 70%."""
    config = config or TrainingConfig()
    split = desk_sample_and_split(snapshot, sample_size, seed=config.seed)
    model = train_hierarchy(snapshot, config, cve_ids=split.train, glossary=glossary)
    if config.tune_threshold and split.validation:
        model.threshold = tune_threshold(model, snapshot, split.validation, config.threshold_grid)
    return model, split


def iterated_evaluation(
    snapshot: KnowledgeSnapshot,
    config: TrainingConfig,
    cutoffs: Sequence[int] = (500, 200, 100, 50),
    iterations: int = 5,
    sample_size: int = 10_000,
    glossary: Sequence[Sequence[str]] = (),
    coverage_any: bool = False,
) -> list[ScoreReport]:
    """Average micro/macro scores over k seeded re-splits (retrains each time)."""
    from .metrics import average_reports

    per_cutoff: list[list[ScoreReport]] = [[] for _ in cutoffs]
    for i in range(iterations):
        seed = config.seed + i
        iter_config = TrainingConfig(**{**config.__dict__, "seed": seed})
        split = desk_sample_and_split(snapshot, sample_size, seed=seed)
        model = train_hierarchy(snapshot, iter_config, cve_ids=split.train, glossary=glossary)
        reports = evaluate_split(model, snapshot, split.test, cutoffs, coverage_any)
        for j, report in enumerate(reports):
            per_cutoff[j].append(report)
    return [average_reports(reports) for reports in per_cutoff]


def pipeline_rank_techniques(
    text: str,
    model: HierarchicalModel,
    table: MappingTable,
    k: int = DEFAULT_RANK_K,
) -> list[tuple[str, float]]:
    """Two-step ranking: classify to CWEs, rank mapped techniques by CWE score."""
    best: dict[str, float] = {}
    for prediction in model.predict_cwes(text):
        for technique in table.techniques_for(prediction.cwe):
            if technique not in best or prediction.score > best[technique]:
                best[technique] = prediction.score
    ranked = sorted(best.items(), key=lambda pair: (-pair[1], pair[0]))
    return ranked[:k]


def assigned_rank_techniques(
    cwes: Sequence[int],
    table: MappingTable,
    k: int = DEFAULT_RANK_K,
) -> list[tuple[str, float]]:
    """Lookup ranking for CVEs that already carry valid CWE assignments."""
    techniques = sorted({t for w in cwes for t in table.techniques_for(w)})
    return [(t, 1.0) for t in techniques[:k]]


def ground_truth_mrr_pipeline(
    entries: Sequence[GroundTruthEntry],
    model: HierarchicalModel,
    table: MappingTable,
    snapshot: KnowledgeSnapshot,
    k: int = DEFAULT_RANK_K,
) -> float:
    """Classification-based MRR over the ground truth (assignments ignored)."""
    index = snapshot.cve_index()
    ranked = {}
    truth = {}
    for entry in entries:
        record = index.get(entry.cve_id)
        if record is None:
            continue
        ranked[entry.cve_id] = [t for t, _ in pipeline_rank_techniques(record.description, model, table, k)]
        truth[entry.cve_id] = entry.labels
    return mean_reciprocal_rank(ranked, truth)


def ground_truth_mrr_baseline(
    entries: Sequence[GroundTruthEntry],
    index: TechniqueSimilarityIndex,
    snapshot: KnowledgeSnapshot,
    k: int = DEFAULT_RANK_K,
) -> float:
    """Cosine-similarity MRR over the same ground truth."""
    cves = snapshot.cve_index()
    ranked = {}
    truth = {}
    for entry in entries:
        record = cves.get(entry.cve_id)
        if record is None:
            continue
        ranked[entry.cve_id] = [t for t, _ in index.rank_techniques(record.description, k)]
        truth[entry.cve_id] = entry.labels
    return mean_reciprocal_rank(ranked, truth)


def lookup_coverage(snapshot: KnowledgeSnapshot) -> float:
    """Fraction of CVEs already carrying a valid (active) CWE assignment."""
    active = {c.id for c in snapshot.cwes if c.status == "active"}
    if not snapshot.cves:
        return 0.0
    covered = sum(1 for c in snapshot.cves if any(w in active for w in c.assigned_cwes))
    return covered / len(snapshot.cves)
