"""The CWE parent/child DAG with per-node training corpora."""

from __future__ import annotations

from dataclasses import dataclass, field

from .snapshot import KnowledgeSnapshot


class HierarchyIntegrityError(ValueError):
    pass


@dataclass
class WeaknessHierarchy:
    nodes: set[int]
    children: dict[int, list[int]]
    parents: dict[int, list[int]]
    roots: list[int]
    training_index: dict[int, list[str]] = field(default_factory=dict)
    direct_counts: dict[int, int] = field(default_factory=dict)

    def ancestors(self, node: int) -> set[int]:
        """All strict ancestors of a node (every parent path, DAG-aware)."""
        seen: set[int] = set()
        stack = list(self.parents.get(node, []))
        while stack:
            current = stack.pop()
            if current in seen:
                continue
            seen.add(current)
            stack.extend(self.parents.get(current, []))
        return seen

    def closure(self, labels) -> set[int]:
        """Labels plus all their ancestors, restricted to hierarchy nodes."""
        out: set[int] = set()
        for label in labels:
            if label in self.nodes:
                out.add(label)
                out.update(self.ancestors(label))
        return out


def _check_acyclic(children: dict[int, list[int]], nodes: set[int]) -> None:
    state = {n: 0 for n in nodes}  # 0 unvisited / 1 on stack / 2 done
    path: list[int] = []

    def visit(node: int) -> None:
        state[node] = 1
        path.append(node)
        for child in children.get(node, []):
            if state[child] == 1:
                cycle = path[path.index(child):] + [child]
                pretty = " -> ".join(f"CWE-{n}" for n in cycle)
                raise HierarchyIntegrityError(f"cycle in CWE hierarchy: {pretty}")
            if state[child] == 0:
                visit(child)
        path.pop()
        state[node] = 2

    for node in sorted(nodes):
        if state[node] == 0:
            visit(node)


def build_hierarchy(snapshot: KnowledgeSnapshot) -> WeaknessHierarchy:
    """Build the active-CWE DAG and index every CVE at its CWEs plus ancestors.

    Deprecated/obsolete entries are excluded entirely, so they carry no
    children and receive no training examples.
    """
    active = {c.id for c in snapshot.cwes if c.status == "active"}
    parents: dict[int, list[int]] = {n: [] for n in active}
    children: dict[int, list[int]] = {n: [] for n in active}
    for cwe in snapshot.cwes:
        if cwe.id not in active:
            continue
        for p in cwe.parents:
            if p in active:
                parents[cwe.id].append(p)
                children[p].append(cwe.id)
    for adj in (parents, children):
        for node in adj:
            adj[node] = sorted(set(adj[node]))

    _check_acyclic(children, active)
    roots = sorted(n for n in active if not parents[n])

    hierarchy = WeaknessHierarchy(
        nodes=active,
        children=children,
        parents=parents,
        roots=roots,
        training_index={n: [] for n in active},
        direct_counts={n: 0 for n in active},
    )

    for cve in snapshot.cves:
        if not cve.assigned_cwes:
            continue
        reached = hierarchy.closure(cve.assigned_cwes)
        for node in reached:
            hierarchy.training_index[node].append(cve.id)
        for label in cve.assigned_cwes:
            if label in active:
                hierarchy.direct_counts[label] += 1

    for node in hierarchy.training_index:
        hierarchy.training_index[node].sort()
    return hierarchy
