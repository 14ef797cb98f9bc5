"""CWE -> technique and technique -> actor lookup tables with provenance.

Three sources feed the CWE->technique table (union semantics, every edge
tagged): the CWE->CAPEC->technique chain, CVE references found in technique
procedure examples, and a curated columnar map file. Actor edges come from
ATT&CK usage relationships, with sub-technique usage also credited to the
parent technique.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .classifier import HierarchicalModel
from .snapshot import KnowledgeSnapshot

logger = logging.getLogger(__name__)

SOURCE_CAPEC = "capec_chain"
SOURCE_PROCEDURE = "procedure_example"
SOURCE_CURATED = "curated_map"
_VALID_SOURCES = {SOURCE_CAPEC, SOURCE_PROCEDURE, SOURCE_CURATED}

ORIGIN_ASSIGNED = "nvd_assigned"
ORIGIN_PREDICTED = "model_predicted"


@dataclass(frozen=True)
class MappingEdge:
    from_id: str
    to_id: str
    source: str
    evidence: str

    def __post_init__(self):
        if self.source not in _VALID_SOURCES:
            raise ValueError(f"unknown edge source {self.source!r}")
        if not self.evidence:
            raise ValueError(f"edge {self.from_id}->{self.to_id} lacks evidence")


@dataclass
class MappingTable:
    cwe_to_technique: dict[int, list[MappingEdge]]
    technique_to_actor: dict[str, list[MappingEdge]]
    built_from: str

    def techniques_for(self, cwe: int) -> set[str]:
        return {e.to_id for e in self.cwe_to_technique.get(cwe, [])}

    def actors_for(self, technique: str) -> set[str]:
        return {e.to_id for e in self.technique_to_actor.get(technique, [])}

    def capec_chain_stats(self) -> tuple[int, int]:
        """(distinct CWEs, distinct techniques) covered by the CAPEC chain alone."""
        cwes = set()
        techniques = set()
        for cwe, edges in self.cwe_to_technique.items():
            for e in edges:
                if e.source == SOURCE_CAPEC:
                    cwes.add(cwe)
                    techniques.add(e.to_id)
        return len(cwes), len(techniques)


@dataclass
class CweLink:
    cwe: int
    origin: str  # nvd_assigned | model_predicted
    score: float | None = None
    fallback: bool = False


@dataclass
class ExplanationChain:
    cve: str
    description: str
    cwe_links: list[CweLink]
    technique_links: list[MappingEdge] = field(default_factory=list)
    actor_links: list[MappingEdge] = field(default_factory=list)

    @property
    def cwes(self) -> list[int]:
        return [link.cwe for link in self.cwe_links]

    @property
    def techniques(self) -> list[str]:
        return sorted({e.to_id for e in self.technique_links})

    @property
    def actors(self) -> list[str]:
        return sorted({e.to_id for e in self.actor_links})

    def counts(self) -> dict[str, int]:
        return {
            "cwes": len(self.cwe_links),
            "techniques": len(self.techniques),
            "actors": len(self.actors),
        }


def _dedup(edges: list[MappingEdge]) -> list[MappingEdge]:
    seen: set[tuple] = set()
    out = []
    for e in edges:
        key = (e.from_id, e.to_id, e.source)
        if key not in seen:
            seen.add(key)
            out.append(e)
    return out


def parse_curated_map(text: str) -> list[tuple[int, str, str]]:
    """Parse the curated map file: 'CWE-id<TAB>technique-id<TAB>note' rows."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            logger.warning("curated map line %d: expected at least 2 columns, skipped", lineno)
            continue
        cwe_raw = parts[0].removeprefix("CWE-")
        if not cwe_raw.isdigit():
            logger.warning("curated map line %d: bad CWE id %r, skipped", lineno, parts[0])
            continue
        note = parts[2] if len(parts) > 2 else "curated mapping"
        rows.append((int(cwe_raw), parts[1], note))
    return rows


def build_cwe_to_technique(
    snapshot: KnowledgeSnapshot,
    curated_map_text: str | None = None,
) -> dict[int, list[MappingEdge]]:
    """Union the three public sources into a tagged CWE->technique multimap."""
    known_cwes = {c.id for c in snapshot.cwes}
    known_techniques = {t.id for t in snapshot.techniques}
    edges: list[MappingEdge] = []

    # (a) CWE -> CAPEC -> technique chain
    for pattern in snapshot.capecs:
        if not pattern.related_techniques:
            continue
        for cwe in pattern.related_cwes:
            for technique in pattern.related_techniques:
                edges.append(
                    MappingEdge(
                        from_id=str(cwe),
                        to_id=technique,
                        source=SOURCE_CAPEC,
                        evidence=f"via CAPEC-{pattern.id}",
                    )
                )

    # (b) procedure-example CVE references: technique mentions CVE x, x is
    # assigned CWE w  =>  edge w -> technique
    cve_index = snapshot.cve_index()
    for technique in snapshot.techniques:
        for cve_id in technique.referenced_cves:
            record = cve_index.get(cve_id)
            if record is None:
                continue
            for cwe in record.assigned_cwes:
                edges.append(
                    MappingEdge(
                        from_id=str(cwe),
                        to_id=technique.id,
                        source=SOURCE_PROCEDURE,
                        evidence=f"{technique.id} procedure example references {cve_id}",
                    )
                )

    # (c) curated map file
    if curated_map_text:
        for cwe, technique, note in parse_curated_map(curated_map_text):
            if cwe not in known_cwes:
                logger.warning("curated map: unknown CWE-%d, row skipped", cwe)
                continue
            if technique not in known_techniques:
                logger.warning("curated map: unknown technique %s, row skipped", technique)
                continue
            edges.append(MappingEdge(str(cwe), technique, SOURCE_CURATED, note))

    table: dict[int, list[MappingEdge]] = {}
    for edge in _dedup(edges):
        table.setdefault(int(edge.from_id), []).append(edge)
    return table


def build_technique_to_actor(snapshot: KnowledgeSnapshot) -> dict[str, list[MappingEdge]]:
    """One edge per usage relationship; sub-technique usage credits the parent too."""
    known = snapshot.technique_index()
    edges: list[MappingEdge] = []
    for actor in snapshot.actors:
        for technique_id in actor.used_techniques:
            edges.append(
                MappingEdge(
                    from_id=technique_id,
                    to_id=actor.id,
                    source=SOURCE_PROCEDURE,
                    evidence=f"{actor.name or actor.id} uses {technique_id}",
                )
            )
            technique = known.get(technique_id)
            if technique is not None and technique.parent_technique:
                edges.append(
                    MappingEdge(
                        from_id=technique.parent_technique,
                        to_id=actor.id,
                        source=SOURCE_PROCEDURE,
                        evidence=f"{actor.name or actor.id} uses sub-technique {technique_id} (credited to parent)",
                    )
                )
    table: dict[str, list[MappingEdge]] = {}
    for edge in _dedup(edges):
        table.setdefault(edge.from_id, []).append(edge)
    return table


def build_mapping_table(
    snapshot: KnowledgeSnapshot,
    curated_map_text: str | None = None,
) -> MappingTable:
    return MappingTable(
        cwe_to_technique=build_cwe_to_technique(snapshot, curated_map_text),
        technique_to_actor=build_technique_to_actor(snapshot),
        built_from=snapshot.snapshot_id,
    )


class CveNotFoundError(KeyError):
    pass


def analyze_cve(
    cve: str,
    model: HierarchicalModel | None,
    table: MappingTable,
    snapshot: KnowledgeSnapshot,
) -> ExplanationChain:
    """Build the full CVE -> CWEs -> techniques -> actors explanation chain.

    ``cve`` is a CVE id or a raw description. Valid NVD assignments win;
    otherwise the text is classified with the model.
    """
    record = snapshot.cve_index().get(cve) if cve.startswith("CVE-") else None
    if cve.startswith("CVE-") and record is None:
        raise CveNotFoundError(f"{cve} is not in the snapshot and no description was given")

    description = record.description if record else cve
    cve_id = record.id if record else "(description)"

    active_cwes = {c.id for c in snapshot.cwes if c.status == "active"}
    assigned = [w for w in (record.assigned_cwes if record else []) if w in active_cwes]
    if assigned:
        cwe_links = [CweLink(cwe=w, origin=ORIGIN_ASSIGNED) for w in sorted(assigned)]
    else:
        if model is None:
            raise ValueError(f"{cve_id}: no valid NVD assignment and no model loaded")
        predictions = model.predict_cwes(description)
        cwe_links = [
            CweLink(cwe=p.cwe, origin=ORIGIN_PREDICTED, score=p.score, fallback=p.fallback)
            for p in predictions
        ]

    technique_links: list[MappingEdge] = []
    for link in cwe_links:
        technique_links.extend(table.cwe_to_technique.get(link.cwe, []))
    technique_links = _dedup(technique_links)

    actor_links: list[MappingEdge] = []
    for technique in sorted({e.to_id for e in technique_links}):
        actor_links.extend(table.technique_to_actor.get(technique, []))
    actor_links = _dedup(actor_links)

    return ExplanationChain(
        cve=cve_id,
        description=description,
        cwe_links=cwe_links,
        technique_links=technique_links,
        actor_links=actor_links,
    )


def rank_actors(chain: ExplanationChain) -> list[tuple[str, int]]:
    """Actors ordered by number of distinct supporting techniques, then id."""
    support: dict[str, set[str]] = {}
    for edge in chain.actor_links:
        support.setdefault(edge.to_id, set()).add(edge.from_id)
    return sorted(((a, len(ts)) for a, ts in support.items()), key=lambda p: (-p[1], p[0]))
