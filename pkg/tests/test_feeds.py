"""Catalog parser behaviour on small inline fixtures."""

import json
import re

import pytest

from threatpath.feeds import (
    CatalogConfigurationError,
    CatalogIntegrityError,
    FeedParseError,
    UnsupportedVersionError,
    parse_attack_bundle,
    parse_capec_catalog,
    parse_cwe_catalog,
    parse_nvd_feed,
)
from threatpath.records import extract_cve_ids


# ---------------------------------------------------------------------- NVD

def _v11_feed(items):
    return json.dumps({"CVE_data_type": "CVE", "CVE_data_version": "4.0", "CVE_Items": items}).encode()


def _v11_item(cve_id, description, weaknesses, published="2021-12-10T10:15Z"):
    return {
        "cve": {
            "CVE_data_meta": {"ID": cve_id},
            "description": {"description_data": [{"lang": "en", "value": description}]},
            "problemtype": {
                "problemtype_data": [{"description": [{"lang": "en", "value": w} for w in weaknesses]}]
            },
        },
        "publishedDate": published,
    }


def test_parse_v11_feed_with_multiple_cwes():
    feed = _v11_feed([_v11_item("CVE-2021-44228", "Apache Log4j2 JNDI lookup", ["CWE-20", "CWE-400", "CWE-502"])])
    records = parse_nvd_feed(feed)
    assert len(records) == 1
    assert records[0].assigned_cwes == [20, 400, 502]
    assert records[0].published == "2021-12-10"


def test_parse_noinfo_is_empty_assignment():
    feed = _v11_feed([_v11_item("CVE-2020-0001", "something broken", ["NVD-CWE-noinfo"])])
    assert parse_nvd_feed(feed)[0].assigned_cwes == []
    feed = _v11_feed([_v11_item("CVE-2020-0002", "other broken", ["NVD-CWE-Other"])])
    assert parse_nvd_feed(feed)[0].assigned_cwes == []


def test_parse_empty_feed():
    assert parse_nvd_feed(_v11_feed([])) == []


def test_parse_v20_feed():
    feed = json.dumps(
        {
            "resultsPerPage": 1,
            "vulnerabilities": [
                {
                    "cve": {
                        "id": "CVE-2022-23305",
                        "published": "2022-01-18T16:15:00.000",
                        "descriptions": [{"lang": "en", "value": "SQL injection in Log4j 1.x JDBCAppender"}],
                        "weaknesses": [{"description": [{"lang": "en", "value": "CWE-89"}]}],
                    }
                }
            ],
        }
    ).encode()
    records = parse_nvd_feed(feed)
    assert records[0].id == "CVE-2022-23305"
    assert records[0].assigned_cwes == [89]
    assert records[0].published == "2022-01-18"


def test_malformed_feed_reports_offset():
    raw = b'{"CVE_Items": [}'
    with pytest.raises(FeedParseError) as err:
        parse_nvd_feed(raw)
    assert err.value.offset == raw.index(b"}")
    assert "byte offset" in str(err.value)


def test_unknown_schema_version():
    with pytest.raises(UnsupportedVersionError):
        parse_nvd_feed(b'{"something_else": []}')


# ---------------------------------------------------------------------- CWE

def _cwe_catalog(weaknesses_xml, with_view=True):
    views = '<Views><View ID="1000" Name="Research Concepts" Type="Graph"/></Views>' if with_view else ""
    return f"""<?xml version="1.0"?>
<Weakness_Catalog xmlns="http://cwe.mitre.org/cwe-6" Name="CWE" Version="4.8" Date="2022-06-28">
  <Weaknesses>{weaknesses_xml}</Weaknesses>
  {views}
</Weakness_Catalog>""".encode()


def _weakness(cwe_id, name, parents=(), terms=(), status="Stable"):
    rels = "".join(
        f'<Related_Weakness Nature="ChildOf" CWE_ID="{p}" View_ID="1000" Ordinal="Primary"/>'
        for p in parents
    )
    alt = "".join(f"<Alternate_Term><Term>{t}</Term></Alternate_Term>" for t in terms)
    return (
        f'<Weakness ID="{cwe_id}" Name="{name}" Abstraction="Base" Structure="Simple" Status="{status}">'
        f"<Description>{name} description</Description>"
        f"<Related_Weaknesses>{rels}</Related_Weaknesses>"
        + (f"<Alternate_Terms>{alt}</Alternate_Terms>" if terms else "")
        + "</Weakness>"
    )


def test_parse_cwe_chain():
    raw = _cwe_catalog(
        _weakness(707, "Improper Neutralization")
        + _weakness(74, "Injection", parents=[707])
        + _weakness(79, "Cross-site Scripting", parents=[74])
        + _weakness(80, "Basic XSS", parents=[79])
    )
    entries = {e.id: e for e in parse_cwe_catalog(raw)}
    assert entries[80].parents == [79]
    assert entries[79].parents == [74]
    assert entries[74].parents == [707]
    assert entries[707].parents == []


def test_parse_cwe_alternative_terms_lowercased():
    raw = _cwe_catalog(_weakness(119, "Memory Buffer Bounds", terms=["Buffer Overflow", "buffer overrun"]))
    entry = parse_cwe_catalog(raw)[0]
    assert entry.alternative_terms == ["buffer overflow", "buffer overrun"]


def test_parse_cwe_deprecated_status():
    raw = _cwe_catalog(_weakness(365, "Old Thing", status="Deprecated"))
    assert parse_cwe_catalog(raw)[0].status == "deprecated"


def test_parse_cwe_missing_research_view_is_config_error():
    raw = _cwe_catalog(_weakness(707, "Improper Neutralization"), with_view=False)
    with pytest.raises(CatalogConfigurationError):
        parse_cwe_catalog(raw)


def test_parse_cwe_cycle_is_integrity_error():
    raw = _cwe_catalog(
        _weakness(1, "A", parents=[2]) + _weakness(2, "B", parents=[1])
    )
    with pytest.raises(CatalogIntegrityError, match="CWE-"):
        parse_cwe_catalog(raw)


def test_parse_cwe_ignores_non_research_view_parents():
    weak = (
        '<Weakness ID="79" Name="XSS" Abstraction="Base" Structure="Simple" Status="Stable">'
        "<Description>d</Description>"
        '<Related_Weaknesses><Related_Weakness Nature="ChildOf" CWE_ID="74" View_ID="699"/></Related_Weaknesses>'
        "</Weakness>"
    ) + _weakness(74, "Injection")
    entries = {e.id: e for e in parse_cwe_catalog(_cwe_catalog(weak))}
    assert entries[79].parents == []


# -------------------------------------------------------------------- CAPEC

def _capec_catalog(patterns_xml):
    return f"""<?xml version="1.0"?>
<Attack_Pattern_Catalog xmlns="http://capec.mitre.org/capec-3" Name="CAPEC" Version="3.7">
  <Attack_Patterns>{patterns_xml}</Attack_Patterns>
</Attack_Pattern_Catalog>""".encode()


def _capec_pattern(pid, cwes=(), techniques=(), malformed=False):
    rels = "".join(f'<Related_Weakness CWE_ID="{c}"/>' for c in cwes)
    maps = "".join(
        f'<Taxonomy_Mapping Taxonomy_Name="ATTACK"><Entry_ID>{t}</Entry_ID></Taxonomy_Mapping>'
        for t in techniques
    )
    if malformed:
        maps += '<Taxonomy_Mapping Taxonomy_Name="ATTACK"><Entry_ID>not-a-technique</Entry_ID></Taxonomy_Mapping>'
    return (
        f'<Attack_Pattern ID="{pid}" Name="Pattern {pid}" Abstraction="Standard" Status="Stable">'
        f"<Related_Weaknesses>{rels}</Related_Weaknesses>"
        f"<Taxonomy_Mappings>{maps}</Taxonomy_Mappings>"
        "</Attack_Pattern>"
    )


def test_parse_capec_pattern_fields():
    raw = _capec_catalog(_capec_pattern(66, cwes=[89, 74], techniques=["1190"]))
    p = parse_capec_catalog(raw)[0]
    assert p.id == 66
    assert p.related_cwes == [74, 89]
    assert p.related_techniques == ["T1190"]


def test_parse_capec_empty_relations():
    p = parse_capec_catalog(_capec_catalog(_capec_pattern(1)))[0]
    assert p.related_cwes == [] and p.related_techniques == []


def test_parse_capec_malformed_mapping_skipped_with_warning(caplog):
    raw = _capec_catalog(_capec_pattern(9, cwes=[20], techniques=["1059.001"], malformed=True))
    with caplog.at_level("WARNING"):
        p = parse_capec_catalog(raw)[0]
    assert p.related_techniques == ["T1059.001"]
    assert any("CAPEC-9" in r.message for r in caplog.records)


def test_parse_capec_dedups():
    raw = _capec_catalog(_capec_pattern(3, cwes=[20, 20], techniques=["1203", "1203"]))
    p = parse_capec_catalog(raw)[0]
    assert p.related_cwes == [20] and p.related_techniques == ["T1203"]


# -------------------------------------------------------------------- STIX

def _stix_bundle(objects):
    return json.dumps({"type": "bundle", "id": "bundle--x", "objects": objects}).encode()


def _attack_pattern(tid, name, description="", revoked=False, stix_id=None):
    return {
        "type": "attack-pattern",
        "id": stix_id or f"attack-pattern--{tid}",
        "name": name,
        "description": description,
        "revoked": revoked,
        "external_references": [{"source_name": "mitre-attack", "external_id": tid}],
    }


def _intrusion_set(gid, name, aliases=(), stix_id=None):
    return {
        "type": "intrusion-set",
        "id": stix_id or f"intrusion-set--{gid}",
        "name": name,
        "aliases": [name, *aliases],
        "external_references": [{"source_name": "mitre-attack", "external_id": gid}],
    }


def _uses(source, target, description=""):
    return {
        "type": "relationship",
        "id": f"relationship--{source}-{target}",
        "relationship_type": "uses",
        "source_ref": source,
        "target_ref": target,
        "description": description,
    }


def test_parse_attack_bundle_group_uses_technique():
    bundle = _stix_bundle(
        [
            _attack_pattern("T1203", "Exploitation for Client Execution"),
            _intrusion_set("G0007", "APT28", aliases=["Fancy Bear"]),
            _uses("intrusion-set--G0007", "attack-pattern--T1203", "APT28 exploited browsers"),
        ]
    )
    techniques, actors = parse_attack_bundle(bundle)
    assert [t.id for t in techniques] == ["T1203"]
    assert actors[0].used_techniques == ["T1203"]
    assert "Fancy Bear" in actors[0].aliases


def test_parse_attack_bundle_extracts_procedure_cves():
    bundle = _stix_bundle(
        [
            _attack_pattern("T1211", "Exploitation for Defense Evasion", "Adversaries may exploit defenses."),
            _intrusion_set("G0007", "APT28"),
            _uses(
                "intrusion-set--G0007",
                "attack-pattern--T1211",
                "APT28 has used CVE-2015-4902 to bypass security features.",
            ),
        ]
    )
    techniques, _ = parse_attack_bundle(bundle)
    assert techniques[0].referenced_cves == ["CVE-2015-4902"]


def test_parse_attack_bundle_subtechnique_parent():
    bundle = _stix_bundle(
        [
            _attack_pattern("T1134", "Access Token Manipulation"),
            _attack_pattern("T1134.001", "Token Impersonation/Theft"),
        ]
    )
    techniques, _ = parse_attack_bundle(bundle)
    by_id = {t.id: t for t in techniques}
    assert by_id["T1134.001"].parent_technique == "T1134"
    assert by_id["T1134"].parent_technique is None


def test_parse_attack_bundle_excludes_revoked_and_counts():
    report = {}
    bundle = _stix_bundle(
        [
            _attack_pattern("T1000", "Old Technique", revoked=True),
            _attack_pattern("T1203", "Live Technique"),
        ]
    )
    techniques, actors = parse_attack_bundle(bundle, report=report)
    assert [t.id for t in techniques] == ["T1203"]
    assert report["excluded_objects"] == 1


def test_parse_attack_bundle_no_groups():
    bundle = _stix_bundle([_attack_pattern("T1203", "X")])
    _, actors = parse_attack_bundle(bundle)
    assert actors == []


def test_referenced_cve_extraction_matches_bruteforce_regex():
    text = (
        "APT28 has used CVE-2015-4902 to bypass; also CVE-2017-0144 and CVE-2017-0144 again, "
        "but not CVE-123 or OVE-2020-1111. Tail CVE-2021-44228."
    )
    bundle = _stix_bundle([_attack_pattern("T1210", "Exploitation of Remote Services", text)])
    techniques, _ = parse_attack_bundle(bundle)
    brute = []
    for m in re.finditer(r"CVE-\d{4}-\d{4,}", text):
        if m.group(0) not in brute:
            brute.append(m.group(0))
    assert techniques[0].referenced_cves == brute
    assert extract_cve_ids(text) == brute
