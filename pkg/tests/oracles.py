"""Independent brute-force reference implementations used as test oracles.

These deliberately avoid the library's code paths: straight set arithmetic,
exhaustive recursion and finite differences only.
"""

from __future__ import annotations

import numpy as np


def brute_label_counts(predicted: dict, actual: dict, label) -> tuple[int, int, int]:
    tp = fp = fn = 0
    for cve in actual:
        p = label in predicted[cve]
        a = label in actual[cve]
        tp += p and a
        fp += p and not a
        fn += a and not p
    return tp, fp, fn


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def brute_micro_macro(predicted: dict, actual: dict) -> dict:
    universe = set()
    for s in list(predicted.values()) + list(actual.values()):
        universe |= s
    tps = fps = fns = 0
    macro = np.zeros(3)
    for label in universe:
        tp, fp, fn = brute_label_counts(predicted, actual, label)
        tps, fps, fns = tps + tp, fps + fp, fns + fn
        macro += _prf(tp, fp, fn)
    micro = _prf(tps, fps, fns)
    n = len(universe)
    return {
        "micro": micro,
        "macro": tuple(macro / n) if n else (0.0, 0.0, 0.0),
        "universe": universe,
    }


def brute_reciprocal_rank(ranked, truth) -> float:
    for i, item in enumerate(ranked):
        if item in truth:
            return 1.0 / (i + 1)
    return 0.0


def brute_mrr(ranked_by_cve: dict, truth_by_cve: dict) -> float:
    return sum(
        brute_reciprocal_rank(ranked_by_cve.get(c, []), t) for c, t in truth_by_cve.items()
    ) / len(truth_by_cve)


def brute_combined_mrr(coverage: float, model_mrr: float) -> float:
    return coverage + (1 - coverage) * model_mrr


def brute_traverse(
    roots: list[int],
    children: dict[int, list[int]],
    trainable: set[int],
    scores: dict[int, float],
    threshold: float,
) -> dict[int, tuple[float, list[int], bool]]:
    """Exhaustive recursive reference for the threshold descent.

    Enumerates every kept path, then keeps for each node the path maximizing
    (min score along path, then lexicographically smallest id sequence).
    Returns node -> (score, best path, fallback flag).
    """
    visited_paths: list[tuple[list[int], bool]] = []

    def level_picks(candidates: list[int]) -> list[tuple[int, bool]]:
        above = [c for c in candidates if scores[c] >= threshold]
        if above:
            return [(c, False) for c in above]
        best = max(candidates, key=lambda c: (scores[c], -c))
        return [(best, True)]

    def walk(node: int, path: list[int], fallback: bool) -> None:
        visited_paths.append((path, fallback))
        kids = [c for c in children.get(node, []) if c in trainable]
        if not kids:
            return
        for child, child_fb in level_picks(kids):
            walk(child, path + [child], child_fb)

    usable_roots = [r for r in roots if r in trainable]
    for root, fb in level_picks(usable_roots):
        walk(root, [root], fb)

    def strength(path: list[int]):
        return (min(scores[n] for n in path), [-n for n in path])

    best: dict[int, tuple[float, list[int], bool]] = {}
    for path, fallback in visited_paths:
        node = path[-1]
        if node not in best or strength(path) > strength(best[node][1]):
            best[node] = (scores[node], path, fallback)
    return best


def finite_difference_gradient(loss_fn, w: np.ndarray, b: float, eps: float = 1e-6):
    """Central finite differences of loss_fn(w, b) wrt every coordinate and b."""
    grad_w = np.zeros_like(w)
    for j in range(len(w)):
        wp, wm = w.copy(), w.copy()
        wp[j] += eps
        wm[j] -= eps
        grad_w[j] = (loss_fn(wp, b) - loss_fn(wm, b)) / (2 * eps)
    grad_b = (loss_fn(w, b + eps) - loss_fn(w, b - eps)) / (2 * eps)
    return grad_w, grad_b
