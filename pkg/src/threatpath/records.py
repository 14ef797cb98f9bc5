"""Normalized records for the four public catalogs."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

CVE_PATTERN = re.compile(r"CVE-\d{4}-\d{4,}")
TECHNIQUE_PATTERN = re.compile(r"T\d{4}(?:\.\d{3})?$")
GROUP_PATTERN = re.compile(r"G\d{4}$")


class RecordError(ValueError):
    """A parsed record violates its invariants."""


@dataclass
class CveRecord:
    id: str
    description: str
    assigned_cwes: list[int] = field(default_factory=list)
    published: str = ""  # ISO date

    def __post_init__(self):
        if not CVE_PATTERN.fullmatch(self.id):
            raise RecordError(f"bad CVE id: {self.id!r}")
        if not self.description:
            raise RecordError(f"{self.id}: empty description")
        if len(set(self.assigned_cwes)) != len(self.assigned_cwes):
            raise RecordError(f"{self.id}: duplicate CWE assignments")


@dataclass
class CweEntry:
    id: int
    name: str
    description: str = ""
    parents: list[int] = field(default_factory=list)
    alternative_terms: list[str] = field(default_factory=list)
    status: str = "active"  # active | deprecated | obsolete

    def __post_init__(self):
        if self.id in self.parents:
            raise RecordError(f"CWE-{self.id}: self-parenting")
        if self.status not in ("active", "deprecated", "obsolete"):
            raise RecordError(f"CWE-{self.id}: bad status {self.status!r}")


@dataclass
class CapecPattern:
    id: int
    related_cwes: list[int] = field(default_factory=list)
    related_techniques: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.id <= 0:
            raise RecordError(f"bad CAPEC id: {self.id}")
        self.related_cwes = sorted(set(self.related_cwes))
        self.related_techniques = sorted(set(self.related_techniques))


@dataclass
class AttackTechnique:
    id: str
    name: str
    description: str = ""
    parent_technique: str | None = None
    referenced_cves: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not TECHNIQUE_PATTERN.fullmatch(self.id):
            raise RecordError(f"bad technique id: {self.id!r}")
        for cve in self.referenced_cves:
            if not CVE_PATTERN.fullmatch(cve):
                raise RecordError(f"{self.id}: bad referenced CVE {cve!r}")

    @property
    def is_subtechnique(self) -> bool:
        return "." in self.id


@dataclass
class ThreatActor:
    id: str
    name: str
    aliases: list[str] = field(default_factory=list)
    used_techniques: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not GROUP_PATTERN.fullmatch(self.id):
            raise RecordError(f"bad group id: {self.id!r}")


def extract_cve_ids(text: str) -> list[str]:
    """All CVE ids mentioned in free text, deduplicated, in order of appearance."""
    seen = set()
    out = []
    for m in CVE_PATTERN.finditer(text):
        if m.group(0) not in seen:
            seen.add(m.group(0))
            out.append(m.group(0))
    return out
