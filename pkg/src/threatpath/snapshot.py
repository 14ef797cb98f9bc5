"""Pinned, content-addressed bundles of the parsed catalogs.

A snapshot freezes the five record collections behind a deterministic
content hash so every downstream stage (training, mapping tables, service)
is reproducible and network-free. Archives are tar.gz files holding five
newline-delimited JSON record files, a manifest and an unresolved-reference
report; the layout is documented in the README and stable across versions.
"""

from __future__ import annotations

import gzip
import hashlib
import io
import json
import tarfile
from dataclasses import asdict, dataclass, field
from datetime import date
from pathlib import Path

from .records import AttackTechnique, CapecPattern, CveRecord, CweEntry, ThreatActor

ARCHIVE_VERSION = 1

_MEMBERS = ("cves", "cwes", "capecs", "techniques", "actors")
_TYPES = {
    "cves": CveRecord,
    "cwes": CweEntry,
    "capecs": CapecPattern,
    "techniques": AttackTechnique,
    "actors": ThreatActor,
}


@dataclass
class KnowledgeSnapshot:
    snapshot_id: str
    created: str
    cves: list[CveRecord]
    cwes: list[CweEntry]
    capecs: list[CapecPattern]
    techniques: list[AttackTechnique]
    actors: list[ThreatActor]
    source_manifest: list[tuple[str, str, str]] = field(default_factory=list)
    unresolved: list[str] = field(default_factory=list)

    def cve_index(self) -> dict[str, CveRecord]:
        return {c.id: c for c in self.cves}

    def cwe_index(self) -> dict[int, CweEntry]:
        return {c.id: c for c in self.cwes}

    def technique_index(self) -> dict[str, AttackTechnique]:
        return {t.id: t for t in self.techniques}

    def actor_index(self) -> dict[str, ThreatActor]:
        return {a.id: a for a in self.actors}


def _canonical_lines(records) -> list[str]:
    lines = [json.dumps(asdict(r), sort_keys=True, separators=(",", ":")) for r in records]
    return sorted(lines)


def compute_snapshot_id(cves, cwes, capecs, techniques, actors) -> str:
    digest = hashlib.sha256()
    for name, records in zip(_MEMBERS, (cves, cwes, capecs, techniques, actors)):
        digest.update(name.encode())
        for line in _canonical_lines(records):
            digest.update(line.encode())
            digest.update(b"\n")
    return digest.hexdigest()


def _find_unresolved(cves, cwes, capecs, techniques, actors) -> list[str]:
    cwe_ids = {c.id for c in cwes}
    cve_ids = {c.id for c in cves}
    tech_ids = {t.id for t in techniques}
    report = []
    for cve in cves:
        for w in cve.assigned_cwes:
            if w not in cwe_ids:
                report.append(f"{cve.id}: assigned CWE-{w} not in catalog")
    for cwe in cwes:
        for p in cwe.parents:
            if p not in cwe_ids:
                report.append(f"CWE-{cwe.id}: parent CWE-{p} not in catalog")
    for pattern in capecs:
        for w in pattern.related_cwes:
            if w not in cwe_ids:
                report.append(f"CAPEC-{pattern.id}: related CWE-{w} not in catalog")
        for t in pattern.related_techniques:
            if t not in tech_ids:
                report.append(f"CAPEC-{pattern.id}: related technique {t} not in bundle")
    for technique in techniques:
        if technique.parent_technique and technique.parent_technique not in tech_ids:
            report.append(f"{technique.id}: parent {technique.parent_technique} not in bundle")
        for cve in technique.referenced_cves:
            if cve not in cve_ids:
                report.append(f"{technique.id}: referenced {cve} not in feed")
    for actor in actors:
        for t in actor.used_techniques:
            if t not in tech_ids:
                report.append(f"{actor.id}: used technique {t} not in bundle")
    return sorted(report)


def build_snapshot(
    cves,
    cwes,
    capecs,
    techniques,
    actors,
    source_manifest: list[tuple[str, str, str]] | None = None,
    created: str | None = None,
) -> KnowledgeSnapshot:
    """Freeze parsed collections into a content-addressed snapshot.

    The id depends only on record contents (input order is irrelevant).
    Unresolved cross-references are reported on the snapshot, never fatal.
    """
    cves = sorted(cves, key=lambda r: r.id)
    cwes = sorted(cwes, key=lambda r: r.id)
    capecs = sorted(capecs, key=lambda r: r.id)
    techniques = sorted(techniques, key=lambda r: r.id)
    actors = sorted(actors, key=lambda r: r.id)
    snapshot_id = compute_snapshot_id(cves, cwes, capecs, techniques, actors)
    return KnowledgeSnapshot(
        snapshot_id=snapshot_id,
        created=created or date.today().isoformat(),
        cves=cves,
        cwes=cwes,
        capecs=capecs,
        techniques=techniques,
        actors=actors,
        source_manifest=list(source_manifest or []),
        unresolved=_find_unresolved(cves, cwes, capecs, techniques, actors),
    )


def save_snapshot(snapshot: KnowledgeSnapshot, path: str | Path) -> None:
    """Write the snapshot archive (tar.gz, five .jsonl members + manifest)."""
    path = Path(path)
    manifest = {
        "archive_version": ARCHIVE_VERSION,
        "snapshot_id": snapshot.snapshot_id,
        "created": snapshot.created,
        "sources": [list(s) for s in snapshot.source_manifest],
        "counts": {name: len(getattr(snapshot, name)) for name in _MEMBERS},
    }
    with open(path, "wb") as fh, gzip.GzipFile(
        filename="", fileobj=fh, mode="wb", mtime=0
    ) as gz, tarfile.open(fileobj=gz, mode="w") as tar:
        def add(name: str, data: bytes):
            info = tarfile.TarInfo(name)
            info.size = len(data)
            info.mtime = 0
            tar.addfile(info, io.BytesIO(data))

        for name in _MEMBERS:
            body = "\n".join(
                json.dumps(asdict(r), sort_keys=True) for r in getattr(snapshot, name)
            )
            add(f"{name}.jsonl", (body + "\n").encode() if body else b"")
        add("manifest.json", json.dumps(manifest, indent=2, sort_keys=True).encode())
        add("unresolved.txt", ("\n".join(snapshot.unresolved) + "\n").encode() if snapshot.unresolved else b"")


def load_snapshot(path: str | Path) -> KnowledgeSnapshot:
    path = Path(path)
    collections: dict[str, list] = {}
    with tarfile.open(path, "r:gz") as tar:
        def read(name: str) -> bytes:
            member = tar.extractfile(name)
            if member is None:
                raise ValueError(f"snapshot archive missing {name}")
            return member.read()

        manifest = json.loads(read("manifest.json"))
        if manifest.get("archive_version") != ARCHIVE_VERSION:
            raise ValueError(
                f"unsupported snapshot archive version {manifest.get('archive_version')!r}"
            )
        for name in _MEMBERS:
            cls = _TYPES[name]
            records = []
            for line in read(f"{name}.jsonl").decode().splitlines():
                if line:
                    records.append(cls(**json.loads(line)))
            collections[name] = records

    snapshot = build_snapshot(
        collections["cves"],
        collections["cwes"],
        collections["capecs"],
        collections["techniques"],
        collections["actors"],
        source_manifest=[tuple(s) for s in manifest.get("sources", [])],
        created=manifest.get("created"),
    )
    if snapshot.snapshot_id != manifest["snapshot_id"]:
        raise ValueError(
            f"snapshot id mismatch: archive says {manifest['snapshot_id'][:12]}, "
            f"contents hash to {snapshot.snapshot_id[:12]}"
        )
    return snapshot


def read_source_file(path: str | Path) -> bytes:
    """Read a catalog source file, transparently gunzipping *.gz."""
    path = Path(path)
    data = path.read_bytes()
    if path.suffix == ".gz":
        return gzip.decompress(data)
    return data
