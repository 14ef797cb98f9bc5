"""Evaluation machinery: splits, micro/macro P/R/F, sweeps, MRR, combined MRR."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


@dataclass
class LabelScores:
    precision: float
    recall: float
    f_score: float
    support: int
    tp: int = 0
    fp: int = 0
    fn: int = 0


@dataclass
class ScoreReport:
    per_label: dict = field(default_factory=dict)   # label -> LabelScores
    micro_precision: float = 0.0
    micro_recall: float = 0.0
    micro_f: float = 0.0
    macro_precision: float = 0.0
    macro_recall: float = 0.0
    macro_f: float = 0.0
    sample_threshold: int | None = None
    coverage: float | None = None
    label_universe_size: int = 0
    degenerate: bool = False


@dataclass
class GroundTruthEntry:
    cve_id: str
    labels: set
    origin: str  # procedure_example | manual

    def __post_init__(self):
        if not self.labels:
            raise ValueError(f"{self.cve_id}: ground truth entry has no labels")


def load_ground_truth(text: str) -> list[GroundTruthEntry]:
    """Columnar ground-truth file: 'CVE-id<TAB>label,label<TAB>origin' per line."""
    entries = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"ground truth line {lineno}: expected 3 columns")
        cve_id, labels_raw, origin = parts
        if cve_id in seen:
            raise ValueError(f"ground truth line {lineno}: duplicate {cve_id}")
        seen.add(cve_id)
        entries.append(GroundTruthEntry(cve_id, set(labels_raw.split(",")), origin))
    return entries


def largest_remainder_sizes(total: int, ratios: Sequence[float]) -> list[int]:
    """Integer split sizes by largest-remainder rounding (sums to total)."""
    quotas = [total * r for r in ratios]
    sizes = [math.floor(q) for q in quotas]
    remainder = total - sum(sizes)
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[:remainder]:
        sizes[i] += 1
    return sizes


def split_dataset(
    entries: Sequence[tuple[str, set]],
    ratios: Sequence[float] = (0.7, 0.1, 0.2),
    seed: int = 7,
) -> tuple[list[str], list[str], list[str]]:
    """Deterministic stratified split of (id, label-set) pairs.

    Split sizes follow largest-remainder rounding of the ratios. Labels are
    stratified greedily from rarest to most common (iterative stratification),
    which keeps per-label proportions close wherever counts permit.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    rng = random.Random(seed)
    sizes = largest_remainder_sizes(len(entries), ratios)
    splits = range(len(ratios))

    # exact-label-set strata: entries sharing a label combination are spread
    # together, so every label's split shares stay proportional to within the
    # number of strata it touches
    strata: dict[tuple, list[str]] = {}
    for cve, labels in entries:
        strata.setdefault(tuple(sorted(labels, key=str)), []).append(cve)
    order = sorted(strata, key=lambda key: (-len(strata[key]), str(key)))

    # smooth weighted round-robin: per-entry credits keep every contiguous
    # window (hence every stratum) proportional while filling exact sizes
    credits = [0.0] * len(ratios)
    counts = [0] * len(ratios)
    assignment: dict[str, int] = {}
    for key in order:
        members = list(strata[key])
        rng.shuffle(members)
        for cve in members:
            for s in splits:
                credits[s] += ratios[s]
            open_splits = [s for s in splits if counts[s] < sizes[s]]
            split = max(open_splits, key=lambda s: (credits[s], ratios[s], -s))
            credits[split] -= 1.0
            counts[split] += 1
            assignment[cve] = split

    buckets: list[list[str]] = [[] for _ in ratios]
    for cve, _ in entries:
        buckets[assignment[cve]].append(cve)
    return tuple(buckets)  # type: ignore[return-value]


def stratified_sample(
    entries: Sequence[tuple[str, set]],
    size: int,
    seed: int = 7,
) -> list[str]:
    """Label-stratified sample of ``size`` ids, via a two-way stratified split."""
    if size >= len(entries):
        return [cve for cve, _ in entries]
    frac = size / len(entries)
    buckets = split_dataset(entries, (frac, 1.0 - frac), seed=seed)
    return buckets[0]


def micro_macro_scores(
    predicted: Mapping[str, set],
    actual: Mapping[str, set],
    sample_threshold: int | None = None,
    coverage: float | None = None,
) -> ScoreReport:
    """Per-label and pooled precision/recall/F over the actual∪predicted universe."""
    if set(predicted) != set(actual):
        missing = sorted(set(actual) ^ set(predicted))
        raise ValueError(f"predicted/actual key mismatch: {missing[:10]}")

    universe = set()
    for labels in predicted.values():
        universe |= labels
    for labels in actual.values():
        universe |= labels

    per_label = {}
    pooled_tp = pooled_fp = pooled_fn = 0
    macro_p = macro_r = macro_f = 0.0
    for label in sorted(universe, key=str):
        tp = fp = fn = support = 0
        for cve in actual:
            in_pred = label in predicted[cve]
            in_act = label in actual[cve]
            if in_act:
                support += 1
            if in_pred and in_act:
                tp += 1
            elif in_pred:
                fp += 1
            elif in_act:
                fn += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f_score = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_label[label] = LabelScores(precision, recall, f_score, support, tp, fp, fn)
        pooled_tp += tp
        pooled_fp += fp
        pooled_fn += fn
        macro_p += precision
        macro_r += recall
        macro_f += f_score

    n_labels = len(universe)
    micro_p = pooled_tp / (pooled_tp + pooled_fp) if pooled_tp + pooled_fp else 0.0
    micro_r = pooled_tp / (pooled_tp + pooled_fn) if pooled_tp + pooled_fn else 0.0
    micro_f = 2 * micro_p * micro_r / (micro_p + micro_r) if micro_p + micro_r else 0.0
    return ScoreReport(
        per_label=per_label,
        micro_precision=micro_p,
        micro_recall=micro_r,
        micro_f=micro_f,
        macro_precision=macro_p / n_labels if n_labels else 0.0,
        macro_recall=macro_r / n_labels if n_labels else 0.0,
        macro_f=macro_f / n_labels if n_labels else 0.0,
        sample_threshold=sample_threshold,
        coverage=coverage,
        label_universe_size=n_labels,
        degenerate=n_labels == 0,
    )


def threshold_sweep(
    model,
    test_entries: Sequence[tuple[str, set[int], str]],
    cutoffs: Sequence[int],
    coverage_any: bool = False,
) -> list[ScoreReport]:
    """Evaluate the model per sample-count cutoff.

    ``test_entries`` is (cve_id, direct labels, description) triples. For each
    cutoff the label universe shrinks to CWEs whose training sample count
    meets it; truth is the ancestor closure of the direct labels intersected
    with that universe (prediction follows the hierarchy, so ancestors of a
    true label are true as well). Coverage counts CVEs whose direct labels
    all qualify (or any, behind the flag).
    """
    predictions = {cve: model.predicted_label_set(text) for cve, _, text in test_entries}
    reports = []
    for cutoff in cutoffs:
        qualifying = {n for n, c in model.sample_counts.items() if c >= cutoff}
        predicted = {}
        actual = {}
        covered = 0
        for cve, direct, _ in test_entries:
            predicted[cve] = predictions[cve] & qualifying
            actual[cve] = model.hierarchy.closure(direct) & qualifying
            in_universe = [w for w in direct if w in qualifying]
            if direct and (any(in_universe) if coverage_any else len(in_universe) == len(direct)):
                covered += 1
        coverage = covered / len(test_entries) if test_entries else 0.0
        report = micro_macro_scores(predicted, actual, sample_threshold=cutoff, coverage=coverage)
        report.label_universe_size = len(qualifying)
        report.degenerate = not qualifying
        reports.append(report)
    return reports


def reciprocal_rank(ranked: Sequence, truth: Iterable) -> float:
    """1/position of the first ranked item found in truth; 0 on a miss."""
    if len(set(ranked)) != len(ranked):
        raise ValueError("ranked list contains duplicates")
    truth_set = set(truth)
    for position, item in enumerate(ranked, 1):
        if item in truth_set:
            return 1.0 / position
    return 0.0


def mean_reciprocal_rank(
    ranked_by_cve: Mapping[str, Sequence],
    truth_by_cve: Mapping[str, Iterable],
) -> float:
    """Mean of reciprocal ranks over the truth set; a missing list scores 0."""
    if not truth_by_cve:
        raise ValueError("empty ground truth set")
    total = 0.0
    for cve, truth in truth_by_cve.items():
        ranked = ranked_by_cve.get(cve, ())
        total += reciprocal_rank(ranked, truth)
    return total / len(truth_by_cve)


def combined_mrr(lookup_coverage: float, model_mrr: float) -> float:
    """Existing assignments count as rank 1; the model covers the rest."""
    if not 0.0 <= lookup_coverage <= 1.0 or not 0.0 <= model_mrr <= 1.0:
        raise ValueError("inputs must lie in [0, 1]")
    return lookup_coverage * 1.0 + (1.0 - lookup_coverage) * model_mrr


def average_reports(reports: Sequence[ScoreReport]) -> ScoreReport:
    """Plain average of micro/macro aggregates over k iterations."""
    if not reports:
        raise ValueError("no reports to average")
    out = ScoreReport()
    n = len(reports)
    for r in reports:
        out.micro_precision += r.micro_precision / n
        out.micro_recall += r.micro_recall / n
        out.micro_f += r.micro_f / n
        out.macro_precision += r.macro_precision / n
        out.macro_recall += r.macro_recall / n
        out.macro_f += r.macro_f / n
    out.sample_threshold = reports[0].sample_threshold
    coverages = [r.coverage for r in reports if r.coverage is not None]
    out.coverage = sum(coverages) / len(coverages) if coverages else None
    out.label_universe_size = reports[0].label_universe_size
    return out
