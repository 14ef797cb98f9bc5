"""CWE XML catalog parsing; parents come from the Research Concepts view only."""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET

from ..records import CweEntry

logger = logging.getLogger(__name__)

_NS = {"cwe": "http://cwe.mitre.org/cwe-6"}
RESEARCH_CONCEPTS_VIEW = "1000"

_STATUS_MAP = {
    "deprecated": "deprecated",
    "obsolete": "obsolete",
}


class CatalogConfigurationError(ValueError):
    pass


class CatalogIntegrityError(ValueError):
    pass


def _find_cycle(parents: dict[int, list[int]]) -> list[int] | None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node: WHITE for node in parents}
    stack_path: list[int] = []

    def visit(node: int) -> list[int] | None:
        color[node] = GRAY
        stack_path.append(node)
        for parent in parents.get(node, []):
            if parent not in color:
                continue
            if color[parent] == GRAY:
                return stack_path[stack_path.index(parent):] + [parent]
            if color[parent] == WHITE:
                cycle = visit(parent)
                if cycle:
                    return cycle
        stack_path.pop()
        color[node] = BLACK
        return None

    for node in sorted(parents):
        if color[node] == WHITE:
            cycle = visit(node)
            if cycle:
                return cycle
    return None


def parse_cwe_catalog(raw: bytes) -> list[CweEntry]:
    """Parse a CWE catalog export into entries with Research Concepts parents.

    Alternative-term phrases are preserved verbatim, lowercased. Raises
    CatalogConfigurationError when the catalog lacks the Research Concepts
    view and CatalogIntegrityError when parent relations form a cycle.
    """
    try:
        root = ET.fromstring(raw)
    except ET.ParseError as exc:
        raise CatalogIntegrityError(f"malformed CWE catalog XML: {exc}") from exc

    has_view = any(
        view.get("ID") == RESEARCH_CONCEPTS_VIEW
        for view in root.findall(".//cwe:Views/cwe:View", _NS)
    )
    if not has_view:
        raise CatalogConfigurationError(
            "CWE catalog does not carry the Research Concepts view (CWE-1000)"
        )

    entries: list[CweEntry] = []
    for weakness in root.findall(".//cwe:Weaknesses/cwe:Weakness", _NS):
        cwe_id = int(weakness.get("ID"))
        name = weakness.get("Name", "")
        status = _STATUS_MAP.get((weakness.get("Status") or "").lower(), "active")

        desc_el = weakness.find("cwe:Description", _NS)
        description = "".join(desc_el.itertext()).strip() if desc_el is not None else ""

        parents = []
        for rel in weakness.findall("cwe:Related_Weaknesses/cwe:Related_Weakness", _NS):
            if rel.get("Nature") == "ChildOf" and rel.get("View_ID") == RESEARCH_CONCEPTS_VIEW:
                parent = int(rel.get("CWE_ID"))
                if parent not in parents:
                    parents.append(parent)

        terms = []
        for term in weakness.findall("cwe:Alternate_Terms/cwe:Alternate_Term/cwe:Term", _NS):
            if term.text:
                terms.append(term.text.strip().lower())

        entries.append(CweEntry(cwe_id, name, description, parents, terms, status))

    known = {e.id for e in entries}
    for entry in entries:
        unknown = [p for p in entry.parents if p not in known]
        if unknown:
            logger.warning("CWE-%d: dropping unknown parents %s", entry.id, unknown)
            entry.parents = [p for p in entry.parents if p in known]

    cycle = _find_cycle({e.id: e.parents for e in entries})
    if cycle:
        pretty = " -> ".join(f"CWE-{n}" for n in cycle)
        raise CatalogIntegrityError(f"cyclic parent relations: {pretty}")

    return entries
