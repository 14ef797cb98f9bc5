"""CAPEC attack-pattern catalog parsing: CWE relations and ATT&CK mappings."""

from __future__ import annotations

import logging
import re
import xml.etree.ElementTree as ET

from ..records import CapecPattern

logger = logging.getLogger(__name__)

_NS = {"capec": "http://capec.mitre.org/capec-3"}
_ENTRY_ID = re.compile(r"(\d{4})(\.\d{3})?$")


def parse_capec_catalog(raw: bytes) -> list[CapecPattern]:
    """Extract per-pattern CWE relations and ATT&CK technique mappings.

    A malformed taxonomy mapping is skipped with a warning naming the
    pattern; the pattern itself is kept.
    """
    try:
        root = ET.fromstring(raw)
    except ET.ParseError as exc:
        raise ValueError(f"malformed CAPEC catalog XML: {exc}") from exc

    patterns: list[CapecPattern] = []
    for ap in root.findall(".//capec:Attack_Patterns/capec:Attack_Pattern", _NS):
        pattern_id = int(ap.get("ID"))

        cwes = []
        for rel in ap.findall("capec:Related_Weaknesses/capec:Related_Weakness", _NS):
            cwe_id = rel.get("CWE_ID")
            if cwe_id and cwe_id.isdigit():
                cwes.append(int(cwe_id))

        techniques = []
        for tm in ap.findall("capec:Taxonomy_Mappings/capec:Taxonomy_Mapping", _NS):
            if tm.get("Taxonomy_Name") != "ATTACK":
                continue
            entry = tm.find("capec:Entry_ID", _NS)
            text = (entry.text or "").strip() if entry is not None else ""
            m = _ENTRY_ID.fullmatch(text)
            if not m:
                logger.warning("CAPEC-%d: malformed ATT&CK taxonomy mapping %r, skipped", pattern_id, text)
                continue
            techniques.append(f"T{text}")

        patterns.append(CapecPattern(pattern_id, cwes, techniques))

    return patterns
