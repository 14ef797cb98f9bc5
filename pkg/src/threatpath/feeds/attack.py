"""ATT&CK STIX 2.1 bundle parsing: techniques, groups and usage edges."""

from __future__ import annotations

import json
import logging

from ..records import AttackTechnique, ThreatActor, extract_cve_ids

logger = logging.getLogger(__name__)


def _mitre_external_id(obj: dict, prefix: str) -> str | None:
    for ref in obj.get("external_references", []):
        if ref.get("source_name") == "mitre-attack":
            ext = ref.get("external_id", "")
            if ext.startswith(prefix):
                return ext
    return None


def _is_excluded(obj: dict) -> bool:
    return bool(obj.get("revoked")) or bool(obj.get("x_mitre_deprecated"))


def parse_attack_bundle(raw: bytes, report: dict | None = None) -> tuple[list[AttackTechnique], list[ThreatActor]]:
    """Parse an enterprise ATT&CK bundle into techniques and threat actors.

    Technique/actor usage edges come from "uses" relationships between
    intrusion sets and attack patterns. referenced_cves is populated by
    scanning each technique's description plus the procedure-example texts
    (descriptions of its incoming "uses" relationships). Revoked or
    deprecated objects are excluded and counted in ``report``.
    """
    try:
        bundle = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValueError(f"malformed STIX bundle: {exc}") from exc
    objects = bundle.get("objects", [])

    excluded = 0
    techniques_by_ref: dict[str, AttackTechnique] = {}
    actors_by_ref: dict[str, ThreatActor] = {}
    uses: list[tuple[str, str, str]] = []  # (source_ref, target_ref, description)

    for obj in objects:
        otype = obj.get("type")
        if otype not in ("attack-pattern", "intrusion-set", "relationship"):
            continue
        if _is_excluded(obj):
            excluded += 1
            continue
        if otype == "attack-pattern":
            tid = _mitre_external_id(obj, "T")
            if not tid:
                logger.warning("attack-pattern %s has no ATT&CK id, skipped", obj.get("id"))
                continue
            parent = tid.rsplit(".", 1)[0] if "." in tid else None
            techniques_by_ref[obj["id"]] = AttackTechnique(
                id=tid,
                name=obj.get("name", ""),
                description=obj.get("description", ""),
                parent_technique=parent,
                referenced_cves=[],
            )
        elif otype == "intrusion-set":
            gid = _mitre_external_id(obj, "G")
            if not gid:
                logger.warning("intrusion-set %s has no group id, skipped", obj.get("id"))
                continue
            actors_by_ref[obj["id"]] = ThreatActor(
                id=gid,
                name=obj.get("name", ""),
                aliases=[a for a in obj.get("aliases", []) if a != obj.get("name")],
                used_techniques=[],
            )
        else:
            if obj.get("relationship_type") == "uses":
                uses.append((obj.get("source_ref", ""), obj.get("target_ref", ""), obj.get("description", "")))

    procedure_texts: dict[str, list[str]] = {}
    for source_ref, target_ref, description in uses:
        technique = techniques_by_ref.get(target_ref)
        if technique is None:
            continue
        if description:
            procedure_texts.setdefault(technique.id, []).append(description)
        actor = actors_by_ref.get(source_ref)
        if actor is not None and technique.id not in actor.used_techniques:
            actor.used_techniques.append(technique.id)

    techniques = sorted(techniques_by_ref.values(), key=lambda t: t.id)
    known_ids = {t.id for t in techniques}
    for technique in techniques:
        corpus = [technique.description] + procedure_texts.get(technique.id, [])
        technique.referenced_cves = extract_cve_ids(" ".join(corpus))
        if technique.parent_technique and technique.parent_technique not in known_ids:
            logger.warning("%s: parent technique %s missing from bundle", technique.id, technique.parent_technique)

    actors = sorted(actors_by_ref.values(), key=lambda a: a.id)
    for actor in actors:
        actor.used_techniques.sort()

    if report is not None:
        report["excluded_objects"] = excluded
        report["techniques"] = len(techniques)
        report["actors"] = len(actors)
        report["uses_relationships"] = len(uses)
    return techniques, actors
