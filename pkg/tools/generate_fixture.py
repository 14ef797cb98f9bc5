#!/usr/bin/env python3
"""Generate the pinned June-2022-era fixture snapshot sources.

Produces synthetic but structurally faithful NVD / CWE / CAPEC / ATT&CK
exports plus the curated map, glossary and ground-truth files, engineered so
the documented reference statistics hold exactly on this fixture. After
writing the files the script re-parses everything through the library and
hard-asserts every pinned number, so a committed fixture is a verified one.

Deterministic: fixed seed, no set-iteration-order dependence.

Usage: python3 tools/generate_fixture.py [--out fixtures/june2022]
"""

from __future__ import annotations

import argparse
import gzip
import hashlib
import json
import random
import sys
import uuid
from pathlib import Path
from xml.sax.saxutils import escape

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

SEED = 20220630

# ---------------------------------------------------------------------------
# Technique sets (the pinned CWE -> technique targets)
# ---------------------------------------------------------------------------

T20 = [
    "T1055", "T1203", "T1211", "T1554", "T1559.001",
    "T1562.003", "T1565", "T1574.006", "T1574.007",
]
T400 = ["T1499"]
T502 = ["T1059", "T1134", "T1134.001", "T1134.002", "T1550.004"]
T89 = ["T1190", "T1505.003", "T1213", "T1485"]
T276 = [
    "T1548", "T1548.001", "T1548.002", "T1548.003",
    "T1078", "T1078.001", "T1078.002", "T1078.003",
    "T1222", "T1222.001", "T1222.002", "T1574.010",
    "T1613", "T1619", "T1552", "T1552.001", "T1552.002", "T1552.007",
    "T1526", "T1538", "T1580", "T1087", "T1087.001", "T1087.002",
    "T1069", "T1069.001", "T1069.002", "T1098", "T1098.001",
]

TARGETS = {20: T20, 400: T400, 502: T502, 89: T89, 276: T276, 74: [], 674: []}
CONSTRAINED = set(TARGETS)

# 80 additional techniques carried only by the CAPEC chain of unconstrained CWEs
POOL80 = [
    "T1003", "T1005", "T1007", "T1010", "T1012", "T1014", "T1016", "T1018", "T1021", "T1027",
    "T1033", "T1036", "T1040", "T1046", "T1047", "T1049", "T1053", "T1056", "T1057", "T1070",
    "T1071", "T1072", "T1074", "T1082", "T1083", "T1090", "T1091", "T1095", "T1102", "T1104",
    "T1105", "T1106", "T1110", "T1111", "T1112", "T1113", "T1114", "T1115", "T1119", "T1120",
    "T1123", "T1124", "T1125", "T1129", "T1132", "T1135", "T1137", "T1140", "T1176", "T1185",
    "T1187", "T1189", "T1197", "T1199", "T1201", "T1202", "T1204", "T1205", "T1207", "T1210",
    "T1216", "T1217", "T1218", "T1219", "T1220", "T1221", "T1480", "T1482", "T1484", "T1486",
    "T1489", "T1490", "T1495", "T1496", "T1498", "T1505", "T1518", "T1525", "T1529", "T1531",
]

EXTRA_PARENTS = ["T1550", "T1559", "T1562", "T1574"]  # parents of used sub-techniques
EXTRA_TECHNIQUES = ["T1068"]  # referenced by ground-truth text only

TECHNIQUE_NAMES = {
    "T1055": "Process Injection",
    "T1203": "Exploitation for Client Execution",
    "T1211": "Exploitation for Defense Evasion",
    "T1554": "Compromise Client Software Binary",
    "T1559.001": "Component Object Model",
    "T1562.003": "Impair Command History Logging",
    "T1565": "Data Manipulation",
    "T1574.006": "Dynamic Linker Hijacking",
    "T1574.007": "Path Interception by PATH Environment Variable",
    "T1499": "Endpoint Denial of Service",
    "T1059": "Command and Scripting Interpreter",
    "T1134": "Access Token Manipulation",
    "T1134.001": "Token Impersonation/Theft",
    "T1134.002": "Create Process with Token",
    "T1550.004": "Web Session Cookie",
    "T1190": "Exploit Public-Facing Application",
    "T1505.003": "Web Shell",
    "T1505": "Server Software Component",
    "T1213": "Data from Information Repositories",
    "T1485": "Data Destruction",
    "T1550": "Use Alternate Authentication Material",
    "T1559": "Inter-Process Communication",
    "T1562": "Impair Defenses",
    "T1574": "Hijack Execution Flow",
    "T1548": "Abuse Elevation Control Mechanism",
    "T1078": "Valid Accounts",
    "T1222": "File and Directory Permissions Modification",
    "T1068": "Exploitation for Privilege Escalation",
    "T1189": "Drive-by Compromise",
    "T1210": "Exploitation of Remote Services",
    "T1083": "File and Directory Discovery",
}

_NAME_WORDS = [
    "Staging", "Relay", "Harvesting", "Beaconing", "Tampering", "Pivoting",
    "Enumeration", "Cloaking", "Exfiltration", "Spoofing", "Persistence",
    "Discovery", "Collection", "Injection", "Abuse",
]


def technique_name(tid: str, rng: random.Random) -> str:
    if tid in TECHNIQUE_NAMES:
        return TECHNIQUE_NAMES[tid]
    return f"{rng.choice(_NAME_WORDS)} Operation {tid[1:].replace('.', ' ')}"


_TECH_VERBS = ["abuse", "leverage", "manipulate", "subvert", "stage", "co-opt"]
_TECH_GOALS = [
    "maintain persistence inside victim environments",
    "move laterally across enterprise networks",
    "evade endpoint defenses during intrusions",
    "collect operational intelligence from compromised hosts",
    "escalate privileges on managed infrastructure",
    "establish command and control channels",
]


def technique_description(tid: str, name: str, rng: random.Random) -> str:
    return (
        f"Adversaries may {rng.choice(_TECH_VERBS)} {name.lower()} capabilities to "
        f"{rng.choice(_TECH_GOALS)}. Tracked operations show {name.lower()} activity "
        f"chained with living-off-the-land tooling and staged payload delivery."
    )


# ---------------------------------------------------------------------------
# Threat actors
# ---------------------------------------------------------------------------

NAMED_ACTORS = [
    ("G0007", "APT28", ["Fancy Bear", "Sofacy"], ["T1203", "T1134.001", "T1211"], "shared"),
    ("G0016", "APT29", ["Cozy Bear", "The Dukes"], ["T1550.004", "T1203"], "shared"),
    ("G0032", "Lazarus Group", ["HIDDEN COBRA"], ["T1134.002", "T1203"], "shared"),
    ("G0034", "Sandworm Team", ["BlackEnergy Group"], ["T1499"], "a400"),
    ("G0059", "Magic Hound", ["Phosphorus", "Charming Kitten"], ["T1059"], "a502"),
    ("G0067", "APT37", ["Reaper", "Group123"], ["T1055", "T1203"], "a20"),
    ("G0069", "MuddyWater", ["Muddy Water", "Seedworm"], ["T1559.001", "T1203"], "a20"),
    ("G0096", "APT41", ["Wicked Panda"], ["T1055", "T1203"], "a20"),
    ("G0117", "Fox Kitten", ["Parisite", "Pioneer Kitten"], ["T1059"], "a502"),
    ("G0125", "HAFNIUM", ["Hafnium"], ["T1203"], "a20"),
]

_ACTOR_ADJ = ["Crimson", "Saffron", "Cobalt", "Umber", "Viridian", "Slate", "Amber", "Indigo",
              "Onyx", "Scarlet", "Teal", "Ochre", "Ivory", "Sable", "Copper", "Cerulean"]
_ACTOR_NOUN = ["Mantis", "Jackal", "Heron", "Lynx", "Viper", "Badger", "Falcon", "Wolverine",
               "Cicada", "Osprey", "Weasel", "Kestrel", "Stoat", "Magpie", "Hornet", "Marten"]


def build_actors(rng: random.Random) -> list[dict]:
    """Actor roster engineered for the pinned actor-set cardinalities."""
    actors: list[dict] = [
        {"gid": gid, "name": name, "aliases": aliases, "uses": list(uses), "pool": pool}
        for gid, name, aliases, uses, pool in NAMED_ACTORS
    ]

    def synth(gid_num: int, uses: list[str], pool: str) -> dict:
        name = f"{_ACTOR_ADJ[gid_num % 16]} {_ACTOR_NOUN[(gid_num // 16 + gid_num) % 16]}"
        return {
            "gid": f"G{gid_num:04d}",
            "name": name,
            "aliases": [f"TG-{gid_num:04d}"],
            "uses": uses,
            "pool": pool,
        }

    # 27 more a20-only actors (total 31 with the four named ones)
    for i in range(27):
        uses = [T20[i % 9]]
        if i % 3 == 0:
            uses.append(T20[(i + 4) % 9])
        actors.append(synth(200 + i, sorted(set(uses)), "a20"))
    # 3 more shared actors (total 6)
    actors.append(synth(230, ["T1059", "T1055"], "shared"))
    actors.append(synth(231, ["T1134", "T1565"], "shared"))
    actors.append(synth(232, ["T1550.004", "T1211"], "shared"))
    # 10 more a502-only actors (total 12)
    for i in range(10):
        actors.append(synth(240 + i, [T502[i % 5]], "a502"))
    # 6 fresh actors reachable only through the SQL-injection technique set
    for i in range(6):
        actors.append(synth(300 + i, [T89[i % 4]], "a89"))

    # |A(T89)| must be 14: six fresh ones plus eight existing a20-only actors
    a20_actors = [a for a in actors if a["pool"] == "a20"]
    for i, actor in enumerate(a20_actors[:8]):
        actor["uses"].append(T89[i % 4])

    # |A(T276)| must be 62: 28 fresh plus 34 existing actors
    for i in range(28):
        uses = [T276[i % len(T276)]]
        if i % 2 == 0:
            uses.append(T276[(i + 7) % len(T276)])
        actors.append(synth(400 + i, sorted(set(uses)), "a276"))
    existing = [a for a in actors if a["pool"] in ("a20", "shared", "a502", "a400", "a89")]
    existing.sort(key=lambda a: a["gid"])
    for i, actor in enumerate(existing[:34]):
        actor["uses"].append(T276[(3 * i) % len(T276)])

    # 12 unrelated actors using chain-only techniques
    for i in range(12):
        actors.append(synth(500 + i, [POOL80[(7 * i) % 80], POOL80[(7 * i + 3) % 80]], "other"))

    for actor in actors:
        actor["uses"] = sorted(set(actor["uses"]))
    return actors


def credited(uses: list[str]) -> set[str]:
    """Technique ids credited to an actor: used ones plus parents of used subs."""
    out = set(uses)
    for tid in uses:
        if "." in tid:
            out.add(tid.split(".")[0])
    return out


def actors_of(actors: list[dict], technique_set: list[str]) -> set[str]:
    wanted = set(technique_set)
    return {a["gid"] for a in actors if credited(a["uses"]) & wanted}


# ---------------------------------------------------------------------------
# CWE catalog
# ---------------------------------------------------------------------------

ROOTS = [284, 435, 664, 682, 691, 693, 697, 703, 707, 710]

# (id, name, parents)
STRUCTURAL = [
    (284, "Improper Access Control", []),
    (435, "Improper Interaction Between Multiple Correctly-Behaving Entities", []),
    (664, "Improper Control of a Resource Through its Lifetime", []),
    (682, "Incorrect Calculation", []),
    (691, "Insufficient Control Flow Management", []),
    (693, "Protection Mechanism Failure", []),
    (697, "Incorrect Comparison", []),
    (703, "Improper Check or Handling of Exceptional Conditions", []),
    (707, "Improper Neutralization", []),
    (710, "Improper Adherence to Coding Standards", []),
    (285, "Improper Authorization", [284]),
    (287, "Improper Authentication", [284]),
    (732, "Incorrect Permission Assignment for Critical Resource", [285]),
    (862, "Missing Authorization", [285]),
    (276, "Incorrect Default Permissions", [732]),
    (306, "Missing Authentication for Critical Function", [287]),
    (345, "Insufficient Verification of Data Authenticity", [693]),
    (326, "Inadequate Encryption Strength", [693]),
    (330, "Use of Insufficiently Random Values", [693]),
    (352, "Cross-Site Request Forgery (CSRF)", [345]),
    (295, "Improper Certificate Validation", [345]),
    (20, "Improper Input Validation", [707]),
    (74, "Improper Neutralization of Special Elements in Output Used by a Downstream Component ('Injection')", [707]),
    (116, "Improper Encoding or Escaping of Output", [707]),
    (77, "Improper Neutralization of Special Elements used in a Command ('Command Injection')", [74]),
    (78, "Improper Neutralization of Special Elements used in an OS Command ('OS Command Injection')", [74]),
    (79, "Improper Neutralization of Input During Web Page Generation ('Cross-site Scripting')", [74]),
    (89, "Improper Neutralization of Special Elements used in an SQL Command ('SQL Injection')", [74]),
    (94, "Improper Control of Generation of Code ('Code Injection')", [74]),
    (917, "Improper Neutralization of Special Elements used in an Expression Language Statement", [74]),
    (80, "Improper Neutralization of Script-Related HTML Tags in a Web Page (Basic XSS)", [79]),
    (98, "Improper Control of Filename for Include/Require Statement in PHP Program ('PHP Remote File Inclusion')", [94]),
    (118, "Incorrect Access of Indexable Resource ('Range Error')", [664]),
    (400, "Uncontrolled Resource Consumption", [664]),
    (404, "Improper Resource Shutdown or Release", [664]),
    (668, "Exposure of Resource to Wrong Sphere", [664]),
    (669, "Incorrect Resource Transfer Between Spheres", [664]),
    (672, "Operation on a Resource after Expiration or Release", [664]),
    (706, "Use of Incorrectly-Resolved Name or Reference", [664]),
    (913, "Improper Control of Dynamically-Managed Code Resources", [664]),
    (922, "Insecure Storage of Sensitive Information", [664]),
    (119, "Improper Restriction of Operations within the Bounds of a Memory Buffer", [118]),
    (121, "Stack-based Buffer Overflow", [119]),
    (122, "Heap-based Buffer Overflow", [119]),
    (125, "Out-of-bounds Read", [119]),
    (787, "Out-of-bounds Write", [119]),
    (772, "Missing Release of Resource after Effective Lifetime", [404]),
    (200, "Exposure of Sensitive Information to an Unauthorized Actor", [668]),
    (749, "Exposed Dangerous Method or Function", [668]),
    (618, "Exposed Unsafe ActiveX Method", [749]),
    (416, "Use After Free", [672]),
    (22, "Improper Limitation of a Pathname to a Restricted Directory ('Path Traversal')", [706]),
    (59, "Improper Link Resolution Before File Access ('Link Following')", [706]),
    (434, "Unrestricted Upload of File with Dangerous Type", [669]),
    (502, "Deserialization of Untrusted Data", [913]),
    (190, "Integer Overflow or Wraparound", [682]),
    (369, "Divide By Zero", [682]),
    (674, "Uncontrolled Recursion", [691]),
    (834, "Excessive Iteration", [691]),
    (662, "Improper Synchronization", [691]),
    (185, "Incorrect Regular Expression", [697]),
    (595, "Comparison of Object References Instead of Object Contents", [697]),
    (754, "Improper Check for Unusual or Exceptional Conditions", [703]),
    (755, "Improper Handling of Exceptional Conditions", [703]),
    (476, "NULL Pointer Dereference", [754]),
    (684, "Incorrect Provision of Specified Functionality", [710]),
    (1164, "Irrelevant Code", [710]),
    (451, "User Interface (UI) Misrepresentation of Critical Information", [684]),
    (436, "Interpretation Conflict", [435]),
]

ALTERNATIVE_TERMS = {
    119: ["Buffer Overflow", "buffer overrun"],
    22: ["directory traversal"],
    89: ["SQLi"],
    352: ["CSRF", "XSRF"],
    476: ["NPE"],
    79: ["XSS"],
}

HEAD_CWES = [20, 22, 59, 78, 79, 89, 94, 98, 119, 121, 122, 125, 190, 200, 287, 352, 416, 434, 451, 476, 618, 787]

# co-occurrence cycle: each head CWE's secondary labels are the next two entries
CYCLE = [20, 89, 78, 94, 98, 434, 22, 59, 200, 287, 352, 79, 451, 618, 476, 416, 122, 121, 119, 787, 125, 190]

TAIL_A = [502, 306]   # ~380 feed CVEs each: qualify at cutoff 200, not 500
TAIL_B = [400, 862]   # ~190 each: qualify at cutoff 100
TAIL_C = [295, 772]   # ~95 each: qualify at cutoff 50

CHAIN_FILLER_CWES = [306, 862, 295, 772, 522, 611, 918, 77, 639, 326, 330, 347, 384, 732, 668, 706]
EXTRA_STRUCTURAL = [  # referenced by CAPEC/tail but outside the base tree above
    (522, "Insufficiently Protected Credentials", [668]),
    (611, "Improper Restriction of XML External Entity Reference", [74]),
    (918, "Server-Side Request Forgery (SSRF)", [74]),
    (639, "Authorization Bypass Through User-Controlled Key", [285]),
    (347, "Improper Verification of Cryptographic Signature", [345]),
    (384, "Session Fixation", [287]),
]


def build_cwe_entries(rng: random.Random) -> tuple[list[dict], list[int]]:
    """All 891 catalog entries plus the filler ids available for tail labels."""
    entries = []
    used_ids = set()
    for cid, name, parents in STRUCTURAL + EXTRA_STRUCTURAL:
        entries.append({"id": cid, "name": name, "parents": parents, "status": "Stable",
                        "terms": ALTERNATIVE_TERMS.get(cid, [])})
        used_ids.add(cid)

    deprecated_ids = []
    next_id = 900
    while len(deprecated_ids) < 25:
        if next_id not in used_ids:
            deprecated_ids.append(next_id)
            used_ids.add(next_id)
        next_id += 1
    for cid in deprecated_ids:
        entries.append({"id": cid, "name": f"Deprecated Weakness {cid}", "parents": [],
                        "status": "Deprecated", "terms": []})

    attach_points = [436, 922, 185, 595, 834, 662, 369, 116, 755, 1164, 326, 330, 77, 404]
    filler_ids = []
    next_id = 1200
    while len(entries) < 891:
        if next_id not in used_ids:
            parent = attach_points[len(filler_ids) % len(attach_points)]
            entries.append({"id": next_id, "name": f"Improper Handling of Condition {next_id}",
                            "parents": [parent], "status": "Stable", "terms": []})
            filler_ids.append(next_id)
            used_ids.add(next_id)
        next_id += 1
    return entries, filler_ids


def cwe_catalog_xml(entries: list[dict]) -> str:
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<Weakness_Catalog xmlns="http://cwe.mitre.org/cwe-6" Name="CWE" Version="4.8" Date="2022-06-28">',
        "  <Weaknesses>",
    ]
    for e in sorted(entries, key=lambda e: e["id"]):
        parts.append(
            f'    <Weakness ID="{e["id"]}" Name="{escape(e["name"])}" Abstraction="Base" '
            f'Structure="Simple" Status="{e["status"]}">'
        )
        parts.append(f"      <Description>{escape(e['name'])}.</Description>")
        if e["parents"]:
            parts.append("      <Related_Weaknesses>")
            for p in e["parents"]:
                parts.append(
                    f'        <Related_Weakness Nature="ChildOf" CWE_ID="{p}" View_ID="1000" Ordinal="Primary"/>'
                )
            parts.append("      </Related_Weaknesses>")
        if e["terms"]:
            parts.append("      <Alternate_Terms>")
            for t in e["terms"]:
                parts.append(f"        <Alternate_Term><Term>{escape(t)}</Term></Alternate_Term>")
            parts.append("      </Alternate_Terms>")
        parts.append("    </Weakness>")
    parts += [
        "  </Weaknesses>",
        "  <Views>",
        '    <View ID="1000" Name="Research Concepts" Type="Graph" Status="Stable"/>',
        "  </Views>",
        "</Weakness_Catalog>",
    ]
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# CAPEC catalog
# ---------------------------------------------------------------------------

def build_capec_patterns(all_cwe_ids: list[int]) -> list[dict]:
    """530 patterns: 42 edge-bearing, 37 technique-only, 297 CWE-only, 154 bare."""
    patterns: list[dict] = []

    # constrained chain contributions (strict subsets of the pinned target sets)
    patterns.append({"cwes": [20], "techniques": ["T1055", "T1203"]})
    patterns.append({"cwes": [20], "techniques": ["T1211"]})
    patterns.append({"cwes": [400], "techniques": ["T1499"]})
    patterns.append({"cwes": [502], "techniques": ["T1059", "T1134"]})
    patterns.append({"cwes": [89], "techniques": ["T1190"]})
    patterns.append({"cwes": [276], "techniques": ["T1548", "T1078"]})

    # 36 unconstrained CWEs carry the remaining 80 chain techniques
    unconstrained = [c for c in HEAD_CWES if c not in CONSTRAINED] + CHAIN_FILLER_CWES
    assert len(unconstrained) == 36
    cursor = 0
    for i, cwe in enumerate(unconstrained):
        width = 3 if i < 8 else 2  # 8*3 + 28*2 = 80
        patterns.append({"cwes": [cwe], "techniques": POOL80[cursor : cursor + width]})
        cursor += width
    assert cursor == 80

    # 37 technique-only patterns reusing already-mapped techniques
    used_techniques = sorted({t for p in patterns for t in p["techniques"]})
    for i in range(37):
        patterns.append({"cwes": [], "techniques": [used_techniques[(5 * i) % len(used_techniques)]]})

    # 297 CWE-only patterns over 79 additional distinct CWEs
    chain_cwes = {c for p in patterns for c in p["cwes"]}
    extra_cwes = [74, 674, 404, 913, 285, 345, 116, 922, 749, 80, 917, 436, 185, 369, 662]
    extra_cwes += [c for c in all_cwe_ids if c >= 1200][: 79 - len(extra_cwes)]
    extra_cwes = extra_cwes[:79]
    assert len(set(extra_cwes)) == 79 and not (set(extra_cwes) & chain_cwes)
    for i in range(297):
        cwes = [extra_cwes[i % 79]]
        if i % 4 == 0:
            cwes.append(extra_cwes[(i + 13) % 79])
        patterns.append({"cwes": sorted(set(cwes)), "techniques": []})

    # 154 bare patterns
    for _ in range(154):
        patterns.append({"cwes": [], "techniques": []})

    assert len(patterns) == 530
    for pid, p in enumerate(patterns, start=1):
        p["id"] = pid
    return patterns


def capec_catalog_xml(patterns: list[dict]) -> str:
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<Attack_Pattern_Catalog xmlns="http://capec.mitre.org/capec-3" Name="CAPEC" Version="3.7" Date="2022-06-28">',
        "  <Attack_Patterns>",
    ]
    for p in patterns:
        parts.append(
            f'    <Attack_Pattern ID="{p["id"]}" Name="Attack Pattern {p["id"]}" '
            f'Abstraction="Standard" Status="Stable">'
        )
        if p["cwes"]:
            parts.append("      <Related_Weaknesses>")
            for c in p["cwes"]:
                parts.append(f'        <Related_Weakness CWE_ID="{c}"/>')
            parts.append("      </Related_Weaknesses>")
        if p["techniques"]:
            parts.append("      <Taxonomy_Mappings>")
            for t in p["techniques"]:
                parts.append(
                    '        <Taxonomy_Mapping Taxonomy_Name="ATTACK">'
                    f"<Entry_ID>{t[1:]}</Entry_ID><Entry_Name>mapped</Entry_Name></Taxonomy_Mapping>"
                )
            parts.append("      </Taxonomy_Mappings>")
        parts.append("    </Attack_Pattern>")
    parts += ["  </Attack_Patterns>", "</Attack_Pattern_Catalog>"]
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# NVD feed
# ---------------------------------------------------------------------------

PRODUCTS = [
    "Acme CMS", "BlueRiver Portal", "Cardinal ERP", "DataForge Server", "EagleEye Monitor",
    "FalconGate Proxy", "GreenField Wiki", "HarborPoint NAS", "IronClad VPN", "JadeStream Player",
    "KiteLine Chat", "LumenDesk Helpdesk", "MapleSoft Accounting", "NightOwl Scheduler", "OakTree LMS",
    "PineValley Forum", "QuartzDB Studio", "RedStone Firewall", "SilverPeak Router", "ThunderBolt FTP",
    "UrbanFlow CRM", "VelvetCloud Drive", "WillowPath Gateway", "XenonTrack Logger", "YellowStone Backup",
    "ZephyrMail Server", "NovaPrint Manager", "OrbitPoint Kiosk", "PulseWave SCADA", "QuietHill Archiver",
    "RiverBend Editor", "StoneBridge API", "TealHarbor Dashboard", "UmberLight IDS", "VistaPeak Reporter",
    "WinterFox Agent", "AmberGate Broker", "BoldPine Switch", "CrystalBay Viewer", "DriftWood Cache",
]
PARAMS = ["id", "q", "name", "file", "path", "user", "page", "token", "query", "target",
          "redirect", "lang", "sort", "category", "action"]
COMPONENTS = ["admin console", "report viewer", "session handler", "upload handler", "search endpoint",
              "profile editor", "sync agent", "export module", "login form", "template engine",
              "rpc listener", "feed parser", "print spooler", "license manager", "media indexer"]

TEMPLATES = {
    20: [
        "{p} {v} does not properly validate user supplied input in the {param} parameter, allowing remote attackers to cause unspecified impact via a crafted request",
        "Improper input validation in the {comp} of {p} {v} lets remote attackers submit malformed values through the {param} field",
        "{p} before {v} fails to sanitize incoming request data, and improper validation of the {param} value permits unexpected application behavior",
    ],
    89: [
        "SQL injection vulnerability in {p} {v} allows remote attackers to execute arbitrary SQL commands via the {param} parameter",
        "{p} before {v} is prone to sqli in the {comp} where the {param} value is concatenated into a database query",
        "Multiple SQL injection issues in {p} {v} let attackers alter database statements through the {param} parameter",
    ],
    78: [
        "{p} {v} allows remote attackers to execute arbitrary operating system commands via shell metacharacters in the {param} parameter",
        "OS command injection in the {comp} of {p} before {v} permits execution of injected system commands through the {param} field",
    ],
    94: [
        "{p} {v} allows remote attackers to inject and execute arbitrary php statements via the {param} parameter, aka eval injection",
        "Eval injection vulnerability in the {comp} of {p} before {v} permits execution of injected expressions supplied in {param}",
    ],
    98: [
        "PHP remote file inclusion vulnerability in the {comp} of {p} {v} allows remote attackers to include and execute arbitrary remote php files via a url in the {param} parameter",
        "{p} before {v} permits remote file inclusion when the {param} parameter references an external script location",
    ],
    434: [
        "Unrestricted file upload vulnerability in {p} {v} allows remote attackers to upload and execute files with dangerous extensions via the {comp}",
        "{p} before {v} does not restrict uploaded file types, letting attackers place executable payloads on the server through the {param} upload field",
    ],
    22: [
        "Directory traversal vulnerability in {p} {v} allows remote attackers to read arbitrary files via a .. (dot dot) in the {param} parameter",
        "{p} before {v} permits traversal sequences in the {param} value, exposing files outside the intended directory root",
    ],
    59: [
        "{p} {v} allows local users to overwrite arbitrary files via a symlink attack on the {comp} temporary file",
        "Link following issue in {p} before {v}: the {comp} dereferences attacker controlled symbolic links during startup",
    ],
    200: [
        "{p} {v} exposes sensitive information to unauthorized actors through verbose error messages in the {comp}",
        "Information disclosure in {p} before {v} lets remote attackers read configuration details via the {param} debug parameter",
    ],
    287: [
        "{p} {v} allows remote attackers to bypass authentication in the {comp} via a crafted session value",
        "Improper authentication in {p} before {v} permits use of protected functionality without valid credentials",
    ],
    352: [
        "Cross-site request forgery vulnerability in {p} {v} allows remote attackers to hijack the authentication of administrators via a forged {comp} request",
        "{p} before {v} lacks anti-forgery tokens, enabling csrf attacks that change user settings through the {param} action",
    ],
    79: [
        "Cross-site scripting vulnerability in {p} {v} allows remote attackers to inject arbitrary web script or html via the {param} parameter",
        "Stored xss in the {comp} of {p} before {v} permits script injection through the {param} field",
    ],
    451: [
        "{p} {v} renders misleading interface information, allowing attackers to misrepresent the origin of displayed content in the {comp}",
        "User interface misrepresentation in {p} before {v} lets attackers spoof the address information shown for {comp} windows",
    ],
    618: [
        "The {comp} ActiveX control in {p} {v} exposes unsafe methods to untrusted web pages, allowing remote attackers to perform privileged operations",
        "{p} before {v} marks the {comp} activex control safe for scripting although it exposes dangerous methods",
    ],
    476: [
        "{p} {v} allows remote attackers to cause a denial of service via a null pointer dereference in the {comp}",
        "Null dereference in the {comp} of {p} before {v} crashes the service when a truncated packet omits required fields",
    ],
    416: [
        "Use-after-free vulnerability in {p} {v} allows remote attackers to execute arbitrary code via crafted {comp} objects that are released early",
        "{p} before {v} frees the {comp} structure while references remain, and subsequent use of the freed memory corrupts the process",
    ],
    122: [
        "Heap-based buffer overflow in {p} {v} allows remote attackers to execute arbitrary code via a long {param} value processed by the {comp}",
        "{p} before {v} writes attacker controlled data beyond a heap allocation in the {comp}",
    ],
    121: [
        "Stack-based buffer overflow in the {comp} of {p} {v} allows remote attackers to execute arbitrary code via an oversized {param} argument",
        "{p} before {v} copies the {param} value into a fixed size stack buffer without bounds checking",
    ],
    119: [
        "Buffer overflow in {p} {v} allows remote attackers to cause a denial of service or possibly execute arbitrary code via a long {param} string",
        "{p} before {v} performs operations outside the bounds of a memory buffer when parsing {comp} records",
    ],
    787: [
        "Out-of-bounds write in the {comp} of {p} {v} allows remote attackers to corrupt memory via a malformed {param} field",
        "{p} before {v} writes past the end of an allocated structure while processing {comp} input",
    ],
    125: [
        "Out-of-bounds read in {p} {v} allows remote attackers to obtain sensitive memory contents via a truncated {comp} record",
        "{p} before {v} reads beyond the buffer boundary when the {param} length field exceeds the actual data size",
    ],
    190: [
        "Integer wraparound in {p} {v} causes an undersized allocation in the {comp}, with subsequent memory corruption via a large {param} value",
        "{p} before {v} miscomputes an allocation size when the {param} count multiplies past the integer maximum",
    ],
}

SECONDARY_CLAUSE = {
    20: "due to improper input validation of user supplied data",
    89: "allowing sql injection through unsanitized database queries",
    78: "which permits os command injection through shell metacharacters",
    94: "leading to eval injection of attacker supplied php payloads",
    98: "allowing remote file inclusion of externally hosted php scripts",
    434: "after uploading files with dangerous extensions that bypass restrictions",
    22: "involving directory traversal sequences in the requested pathname",
    59: "by following symbolic links outside the intended folder",
    200: "exposing sensitive information to unauthorized parties",
    287: "because weak authentication checks let the login be bypassed",
    352: "through csrf requests forged on behalf of logged in users",
    79: "injecting arbitrary web script into rendered pages",
    451: "misrepresenting critical interface information to the victim",
    618: "exposing unsafe activex methods to untrusted callers",
    476: "causing a null pointer dereference and crash",
    416: "triggering a use after free condition in the allocator",
    122: "corrupting heap memory through an overflowed allocation",
    121: "smashing the stack with oversized local data",
    119: "performing out of bounds memory operations on a buffer",
    787: "writing past the end of the allocated region",
    125: "reading beyond the buffer boundary and leaking adjacent memory",
    190: "after an integer wraparound miscomputes the allocation size",
}

TAIL_TEMPLATES = {
    502: [
        "{p} {v} deserializes untrusted data received on the {comp}, allowing remote attackers to instantiate arbitrary objects via a serialized payload",
        "Deserialization of untrusted data in {p} before {v} lets attackers supply crafted object graphs to the {comp}",
    ],
    306: [
        "{p} {v} does not require authentication for the critical {comp}, allowing remote attackers to invoke it directly",
        "Missing authentication for a critical function in {p} before {v} exposes the {comp} to unauthenticated use",
    ],
    400: [
        "{p} {v} allows remote attackers to consume excessive memory and cpu resources via a flood of requests to the {comp}",
        "Uncontrolled resource consumption in {p} before {v} lets attackers exhaust connection pools through the {comp}",
    ],
    862: [
        "{p} {v} is missing an authorization check on the {comp}, allowing remote authenticated users to perform administrative actions",
        "Missing authorization in {p} before {v} permits low privileged users to invoke the {comp}",
    ],
    295: [
        "{p} {v} does not properly verify tls certificates presented by upstream servers, allowing machine-in-the-middle interception of the {comp} traffic",
        "Improper certificate verification in {p} before {v} accepts self signed chains for the {comp} connection",
    ],
    772: [
        "{p} {v} fails to release file handles held by the {comp} after use, allowing attackers to exhaust descriptors",
        "Missing release of resources in {p} before {v} leaks sockets in the {comp} under repeated errors",
    ],
}

LOG4J_CVES = [
    ("CVE-2021-44228", [20, 400, 502],
     "Apache Log4j2 2.0-beta9 through 2.15.0 JNDI features used in configuration, log messages, and "
     "parameters do not protect against attacker controlled LDAP and other JNDI related endpoints, "
     "allowing remote attackers who can control log messages or log message parameters to execute "
     "arbitrary code loaded from remote servers when message lookup substitution is enabled.",
     "2021-12-10"),
    ("CVE-2021-44832", [20, 74],
     "Apache Log4j2 2.0-beta7 through 2.17.0 is vulnerable to a remote code execution attack when a "
     "configuration uses a JDBC Appender with a JNDI LDAP data source URI that an attacker can control.",
     "2021-12-28"),
    ("CVE-2021-45046", [502],
     "The fix to address the original JNDI lookup flaw in Apache Log4j 2.15.0 was incomplete in certain "
     "non-default configurations, allowing attackers with control over Thread Context Map input data to "
     "craft malicious input data using a JNDI lookup pattern, resulting in an information leak and remote "
     "code execution in some environments.",
     "2021-12-14"),
    ("CVE-2021-4104", [502],
     "JMSAppender in Log4j 1.2 is vulnerable to deserialization of untrusted data when the attacker has "
     "write access to the Log4j configuration, causing remote code execution if the deployment uses "
     "JMSAppender with attacker controlled broker settings.",
     "2021-12-14"),
    ("CVE-2021-44530", [20, 74],
     "An injection issue in the logging pipeline accepts attacker controlled pattern lookups that are not "
     "properly validated, permitting crafted substitution values to reach downstream interpreters.",
     "2021-12-20"),
    ("CVE-2021-45105", [20, 674],
     "Apache Log4j2 versions 2.0-alpha1 through 2.16.0 did not protect from uncontrolled recursion from "
     "self-referential lookups, allowing an attacker with control over Thread Context Map data to cause a "
     "denial of service via a crafted string that triggers recursive evaluation.",
     "2021-12-18"),
    ("CVE-2022-21704", [276],
     "Incorrect default permissions in the log4js library before 6.4.0 allow local users to read log "
     "files that are created world readable by the default appender configuration.",
     "2022-01-19"),
    ("CVE-2022-23302", [502],
     "JMSSink in all versions of Log4j 1.x is vulnerable to deserialization of untrusted data when the "
     "attacker has write access to the Log4j configuration or the configuration references an LDAP "
     "service the attacker controls.",
     "2022-01-18"),
    ("CVE-2022-23305", [89],
     "By design, the JDBCAppender in Log4j 1.2.x accepts an SQL statement as a configuration parameter "
     "where the values to be inserted are converters from PatternLayout; the parameters are not sanitized, "
     "allowing attackers to manipulate the SQL by entering crafted strings into input fields of the "
     "application, resulting in unintended SQL queries.",
     "2022-01-18"),
    ("CVE-2022-23307", [502],
     "A deserialization issue present in the chainsaw log viewer component bundled with Log4j 1.2.x "
     "allows remote code execution when a crafted log event is parsed by the viewer.",
     "2022-01-18"),
]

# thematic procedure-example technique per unconstrained head CWE
GT_TECHNIQUE = {
    22: "T1083", 59: "T1222", 78: "T1059", 79: "T1189", 94: "T1059", 98: "T1105",
    119: "T1210", 121: "T1210", 122: "T1203", 125: "T1203", 190: "T1210",
    200: "T1005", 287: "T1110", 352: "T1185", 416: "T1189", 434: "T1105",
    451: "T1204", 476: "T1529", 618: "T1203", 787: "T1203",
}


class IdAllocator:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.used = {cid for cid, _, _, _ in LOG4J_CVES} | {"CVE-2015-4902"}

    def fresh(self, year: int, serial: int) -> str:
        cve = f"CVE-{year}-{serial}"
        while cve in self.used:
            serial += 1
            cve = f"CVE-{year}-{serial}"
        self.used.add(cve)
        return cve


def head_text(cwe: int, rng: random.Random, secondary: int | None) -> str:
    template = rng.choice(TEMPLATES[cwe])
    text = template.format(
        p=rng.choice(PRODUCTS),
        v=f"{rng.randint(1, 9)}.{rng.randint(0, 9)}.{rng.randint(0, 9)}",
        param=rng.choice(PARAMS),
        param2=rng.choice(PARAMS),
        comp=rng.choice(COMPONENTS),
    )
    if secondary is not None:
        text += ", " + SECONDARY_CLAUSE[secondary]
    return text + "."


def tail_text(cwe: int, name: str, rng: random.Random) -> str:
    pool = TAIL_TEMPLATES.get(cwe)
    if pool:
        template = rng.choice(pool)
        return template.format(
            p=rng.choice(PRODUCTS),
            v=f"{rng.randint(1, 9)}.{rng.randint(0, 9)}.{rng.randint(0, 9)}",
            comp=rng.choice(COMPONENTS),
        ) + "."
    product = rng.choice(PRODUCTS)
    return f"{product} {rng.randint(1,9)}.{rng.randint(0,9)} contains a weakness classified as {name.lower()}."


def rand_date(rng: random.Random, lo: int = 2004, hi: int = 2022) -> str:
    return f"{rng.randint(lo, hi)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"


def build_nvd_items(rng, filler_ids, cwe_names, gt_plan):
    """All feed CVEs. Returns (items, per-category id lists)."""
    items = []
    alloc = IdAllocator(rng)

    def add(cve_id, text, cwes, published):
        items.append({"id": cve_id, "text": text, "cwes": cwes, "published": published})

    # --- head corpus: 560 primaries per head CWE, every CVE carries a secondary
    # drawn round-robin from the next six cycle positions (decorrelates labels)
    head_ids = []
    serial = 10000
    position = {c: i for i, c in enumerate(CYCLE)}
    for cwe in HEAD_CWES:
        idx = position[cwe]
        partners = [CYCLE[(idx + 1 + j) % 22] for j in range(6)]
        for i in range(560):
            secondary = partners[i % 6]
            cve = alloc.fresh(rng.randint(2005, 2022), serial)
            serial += 3
            add(cve, head_text(cwe, rng, secondary), [cwe, secondary], rand_date(rng))
            head_ids.append(cve)

    # --- tail groups
    for cwe, count in [(TAIL_A[0], 430), (TAIL_A[1], 430), (TAIL_B[0], 215), (TAIL_B[1], 215),
                       (TAIL_C[0], 120), (TAIL_C[1], 120)]:
        for _ in range(count):
            cve = alloc.fresh(rng.randint(2008, 2022), serial)
            serial += 3
            add(cve, tail_text(cwe, cwe_names[cwe], rng), [cwe], rand_date(rng))

    # --- sparse tail: 235 distinct extra labels, one CVE each (includes CWE-80/917)
    sparse = [80, 917] + filler_ids[:233]
    for cwe in sparse:
        cve = alloc.fresh(rng.randint(2006, 2022), serial)
        serial += 3
        add(cve, tail_text(cwe, cwe_names[cwe], rng), [cwe], rand_date(rng))

    # --- log4j family (pinned Table rows)
    for cve_id, cwes, text, published in LOG4J_CVES:
        add(cve_id, text, cwes, published)

    # --- ground-truth CVEs referenced from technique texts
    for cve_id, cwe, _techs in gt_plan:
        year = int(cve_id.split("-")[1])
        add(cve_id, head_text(cwe, rng, None), [cwe], rand_date(rng, year, year))

    # --- manual annotation sample CVEs
    manual_ids = []
    for i in range(12):
        cwe = [79, 89, 22, 787, 200, 287, 434, 416, 125, 94, 352, 119][i]
        cve = alloc.fresh(2020, 30000 + 17 * i)
        add(cve, head_text(cwe, rng, None), [cwe], rand_date(rng, 2020, 2021))
        manual_ids.append((cve, cwe))

    # --- no-information and deprecated-only assignments
    for i in range(40):
        cve = alloc.fresh(2019, 90000 + i)
        marker = "NVD-CWE-noinfo" if i % 2 == 0 else "NVD-CWE-Other"
        add(cve, f"An unspecified issue in {rng.choice(PRODUCTS)} with no weakness details.", [marker], rand_date(rng))
    deprecated_assign = [900 + (i % 25) for i in range(10)]
    for i, dep in enumerate(deprecated_assign):
        cve = alloc.fresh(2012, 60000 + i)
        add(cve, f"A legacy issue in {rng.choice(PRODUCTS)} mapped to an obsolete weakness category.", [dep], rand_date(rng))

    return items, head_ids, manual_ids


def nvd_feed_json(items, rng) -> dict:
    feed_items = []
    for item in items:
        weaknesses = item["cwes"]
        values = [w if isinstance(w, str) else f"CWE-{w}" for w in weaknesses]
        feed_items.append(
            {
                "cve": {
                    "data_type": "CVE",
                    "CVE_data_meta": {"ID": item["id"], "ASSIGNER": "cve@mitre.org"},
                    "problemtype": {
                        "problemtype_data": [
                            {"description": [{"lang": "en", "value": v} for v in values]}
                        ]
                    },
                    "description": {
                        "description_data": [{"lang": "en", "value": item["text"]}]
                    },
                },
                "publishedDate": item["published"] + "T10:15Z",
                "lastModifiedDate": item["published"] + "T10:15Z",
            }
        )
    return {
        "CVE_data_type": "CVE",
        "CVE_data_format": "MITRE",
        "CVE_data_version": "4.0",
        "CVE_data_numberOfCVEs": str(len(feed_items)),
        "CVE_data_timestamp": "2022-06-30T00:00Z",
        "CVE_Items": feed_items,
    }


# ---------------------------------------------------------------------------
# ATT&CK bundle
# ---------------------------------------------------------------------------

def stix_id(kind: str, key: str) -> str:
    return f"{kind}--{uuid.uuid5(uuid.NAMESPACE_URL, f'threatpath/{kind}/{key}')}"


def build_gt_plan(rng: random.Random) -> list[tuple[str, int, list[str]]]:
    """46 procedure-example CVEs: (cve_id, assigned CWE, referencing techniques)."""
    plan = [("CVE-2015-4902", 20, ["T1211"])]
    unconstrained = [c for c in HEAD_CWES if c not in CONSTRAINED]
    serial = 3000
    year = 2014
    for i in range(45):
        cwe = unconstrained[i % len(unconstrained)]
        techniques = [GT_TECHNIQUE[cwe]]
        if i % 3 == 0:
            techniques.append("T1068")
        cve = f"CVE-{year + (i % 8)}-{serial + 13 * i}"
        plan.append((cve, cwe, techniques))
    assert len({cve for cve, _, _ in plan}) == 46
    return plan


def build_attack_bundle(rng, actors, gt_plan):
    all_tids = sorted(
        set(T20 + T400 + T502 + T89 + T276 + POOL80 + EXTRA_PARENTS + EXTRA_TECHNIQUES)
    )
    # every sub-technique's parent must exist
    for tid in all_tids:
        if "." in tid:
            assert tid.split(".")[0] in all_tids, tid

    refs_by_technique: dict[str, list[str]] = {}
    for cve, _cwe, techniques in gt_plan:
        for t in techniques:
            if not (cve == "CVE-2015-4902" and t == "T1211"):
                refs_by_technique.setdefault(t, []).append(cve)

    objects = []
    for tid in all_tids:
        name = technique_name(tid, rng)
        description = technique_description(tid, name, rng)
        for cve in refs_by_technique.get(tid, []):
            description += f" In the wild, {cve} has been exploited to deliver this behavior."
        obj = {
            "type": "attack-pattern",
            "id": stix_id("attack-pattern", tid),
            "created": "2020-01-01T00:00:00.000Z",
            "modified": "2022-06-01T00:00:00.000Z",
            "name": name,
            "description": description,
            "external_references": [
                {"source_name": "mitre-attack", "external_id": tid,
                 "url": f"https://attack.mitre.org/techniques/{tid.replace('.', '/')}"}
            ],
            "x_mitre_is_subtechnique": "." in tid,
        }
        objects.append(obj)

    for actor in actors:
        objects.append(
            {
                "type": "intrusion-set",
                "id": stix_id("intrusion-set", actor["gid"]),
                "created": "2019-01-01T00:00:00.000Z",
                "modified": "2022-06-01T00:00:00.000Z",
                "name": actor["name"],
                "aliases": [actor["name"], *actor["aliases"]],
                "external_references": [
                    {"source_name": "mitre-attack", "external_id": actor["gid"],
                     "url": f"https://attack.mitre.org/groups/{actor['gid']}"}
                ],
            }
        )
        for tid in actor["uses"]:
            if actor["gid"] == "G0007" and tid == "T1211":
                description = "APT28 has used CVE-2015-4902 to bypass security features."
            else:
                description = f"{actor['name']} has used {technique_name(tid, rng).lower()} during intrusions against enterprise targets."
            objects.append(
                {
                    "type": "relationship",
                    "id": stix_id("relationship", f"{actor['gid']}/{tid}"),
                    "created": "2021-01-01T00:00:00.000Z",
                    "modified": "2022-06-01T00:00:00.000Z",
                    "relationship_type": "uses",
                    "source_ref": stix_id("intrusion-set", actor["gid"]),
                    "target_ref": stix_id("attack-pattern", tid),
                    "description": description,
                }
            )

    # revoked/deprecated objects, excluded by the parser and counted in reports
    objects.append(
        {
            "type": "attack-pattern",
            "id": stix_id("attack-pattern", "T1999-revoked"),
            "name": "Retired Technique",
            "revoked": True,
            "external_references": [{"source_name": "mitre-attack", "external_id": "T1999"}],
        }
    )
    objects.append(
        {
            "type": "attack-pattern",
            "id": stix_id("attack-pattern", "T1998-deprecated"),
            "name": "Deprecated Technique",
            "x_mitre_deprecated": True,
            "external_references": [{"source_name": "mitre-attack", "external_id": "T1998"}],
        }
    )
    objects.append(
        {
            "type": "intrusion-set",
            "id": stix_id("intrusion-set", "G9999-revoked"),
            "name": "Disbanded Group",
            "revoked": True,
            "external_references": [{"source_name": "mitre-attack", "external_id": "G9999"}],
        }
    )

    return {
        "type": "bundle",
        "id": stix_id("bundle", "enterprise-attack-11.3"),
        "spec_version": "2.1",
        "objects": objects,
    }


# ---------------------------------------------------------------------------
# curated map / glossary / ground truth files
# ---------------------------------------------------------------------------

def curated_map_text() -> str:
    lines = [
        "# Curated CWE -> ATT&CK technique mapping (fixture copy of the public map)",
        "# columns: CWE id <TAB> technique id <TAB> note",
    ]
    notes = {20: "input validation weakness chained to execution primitives",
             400: "resource exhaustion enables endpoint denial of service",
             502: "deserialization gadgets drive execution and token abuse",
             89: "sql injection against exposed applications",
             276: "permission misconfiguration enables account and privilege abuse"}
    for cwe in (20, 400, 502, 89, 276):
        for tid in TARGETS[cwe]:
            lines.append(f"CWE-{cwe}\t{tid}\t{notes[cwe]}")
    # a few unconstrained rows for flavor (already chain-covered CWEs)
    lines.append("CWE-79\tT1189\tstored xss used for drive-by delivery")
    lines.append("CWE-787\tT1210\tmemory corruption in remote services")
    lines.append("CWE-22\tT1083\tpath traversal aids file discovery")
    return "\n".join(lines) + "\n"


def glossary_text() -> str:
    return (
        "# CWE glossary fixture: interchangeable general terms, one group per line\n"
        "remote attacker\tunauthenticated attacker\n"
        "specially crafted\tmaliciously crafted\n"
        "gain access\tobtain access\n"
    )


# ---------------------------------------------------------------------------
# verification & main
# ---------------------------------------------------------------------------

def write_gz(path: Path, data: bytes) -> None:
    with open(path, "wb") as fh, gzip.GzipFile(filename="", fileobj=fh, mode="wb", mtime=0) as gz:
        gz.write(data)


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures" / "june2022"))
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rng = random.Random(SEED)

    cwe_entries, filler_ids = build_cwe_entries(rng)
    assert len(cwe_entries) == 891, len(cwe_entries)
    cwe_names = {e["id"]: e["name"] for e in cwe_entries}

    patterns = build_capec_patterns(sorted(cwe_names))
    actors = build_actors(rng)
    gt_plan = build_gt_plan(rng)
    bundle = build_attack_bundle(rng, actors, gt_plan)
    items, head_ids, manual_ids = build_nvd_items(rng, filler_ids, cwe_names, gt_plan)
    feed = nvd_feed_json(items, rng)

    # ---------------- write source files
    write_gz(out / "nvd.json.gz", json.dumps(feed, indent=1).encode())
    write_gz(out / "cwe.xml.gz", cwe_catalog_xml(cwe_entries).encode())
    write_gz(out / "capec.xml.gz", capec_catalog_xml(patterns).encode())
    write_gz(out / "attack.json.gz", json.dumps(bundle, indent=1).encode())
    (out / "curated_map.tsv").write_text(curated_map_text())
    (out / "glossary.tsv").write_text(glossary_text())

    # ---------------- parse back through the library and verify every pin
    from threatpath.feeds import (
        parse_attack_bundle,
        parse_capec_catalog,
        parse_cwe_catalog,
        parse_nvd_feed,
    )
    from threatpath.hierarchy import build_hierarchy
    from threatpath.mapping import analyze_cve, build_mapping_table
    from threatpath.metrics import split_dataset, stratified_sample
    from threatpath.snapshot import build_snapshot, read_source_file
    from threatpath.workflows import labeled_entries

    cves = parse_nvd_feed(read_source_file(out / "nvd.json.gz"))
    cwes = parse_cwe_catalog(read_source_file(out / "cwe.xml.gz"))
    capecs = parse_capec_catalog(read_source_file(out / "capec.xml.gz"))
    report: dict = {}
    techniques, parsed_actors = parse_attack_bundle(read_source_file(out / "attack.json.gz"), report=report)
    snapshot = build_snapshot(
        cves, cwes, capecs, techniques, parsed_actors,
        source_manifest=[
            ("nvd", "2022-06-30", sha256(out / "nvd.json.gz")),
            ("cwe", "4.8", sha256(out / "cwe.xml.gz")),
            ("capec", "3.7", sha256(out / "capec.xml.gz")),
            ("attack", "11.3", sha256(out / "attack.json.gz")),
        ],
        created="2022-06-30",
    )

    assert len(cwes) == 891
    assert len(capecs) == 530
    assert sum(1 for p in capecs if p.related_techniques) == 79
    assert sum(1 for p in capecs if p.related_cwes) == 339
    assert len({c for p in capecs for c in p.related_cwes}) == 120
    assert report["excluded_objects"] == 3
    assert not snapshot.unresolved, snapshot.unresolved[:5]

    hierarchy = build_hierarchy(snapshot)
    assert hierarchy.roots == ROOTS, hierarchy.roots

    table = build_mapping_table(snapshot, (out / "curated_map.tsv").read_text())
    assert table.capec_chain_stats() == (41, 89), table.capec_chain_stats()
    for cwe, target in TARGETS.items():
        assert table.techniques_for(cwe) == set(target), (cwe, sorted(table.techniques_for(cwe)))

    expected_rows = {
        "CVE-2021-44228": (3, 15, 50),
        "CVE-2021-44832": (2, 9, 37),
        "CVE-2021-45046": (1, 5, 18),
        "CVE-2021-4104": (1, 5, 18),
        "CVE-2021-44530": (2, 9, 37),
        "CVE-2021-45105": (2, 9, 37),
        "CVE-2022-21704": (1, 29, 62),
        "CVE-2022-23302": (1, 5, 18),
        "CVE-2022-23305": (1, 4, 14),
        "CVE-2022-23307": (1, 5, 18),
    }
    for cve_id, (n_cwes, n_tech, n_act) in expected_rows.items():
        chain = analyze_cve(cve_id, None, table, snapshot)
        got = (len(chain.cwe_links), len(chain.techniques), len(chain.actors))
        assert got == (n_cwes, n_tech, n_act), (cve_id, got)

    t1203_actors = table.actors_for("T1203")
    for gid in ("G0125", "G0007", "G0067", "G0032"):
        assert gid in t1203_actors

    # ground truth: invert procedure references
    referenced: dict[str, set[str]] = {}
    for technique in snapshot.techniques:
        for cve in technique.referenced_cves:
            referenced.setdefault(cve, set()).add(technique.id)
    assert len(referenced) == 46, len(referenced)
    gt_lines = ["# ground truth: CVE <TAB> technique labels <TAB> origin"]
    for cve in sorted(referenced):
        gt_lines.append(f"{cve}\t{','.join(sorted(referenced[cve]))}\tprocedure_example")
    (out / "ground_truth.tsv").write_text("\n".join(gt_lines) + "\n")

    # manual annotation sample: illustrative, labeled as non-paper data
    manual_lines = [
        "# Manually annotated CVE -> technique sample.",
        "# Illustrative fixture data assembled for this repository; NOT the",
        "# (unpublished) 100-CVE manual annotation set referenced in docs.",
    ]
    for cve, cwe in manual_ids:
        labels = sorted(table.techniques_for(cwe))[:3]
        manual_lines.append(f"{cve}\t{','.join(labels)}\tmanual")
    (out / "manual_annotations.tsv").write_text("\n".join(manual_lines) + "\n")

    # desk-scale sample: exactly the 22 head CWEs clear the 500-sample bar
    entries = labeled_entries(snapshot)
    sample_ids = stratified_sample(entries, 10_000, seed=7)
    chosen = set(sample_ids)
    sample_entries = [(c, l) for c, l in entries if c in chosen]
    train, _val, _test = split_dataset(sample_entries, (0.7, 0.1, 0.2), seed=7)
    train_set = set(train)
    direct: dict[int, int] = {}
    for cve_id, labels in sample_entries:
        if cve_id in train_set:
            for w in labels:
                direct[w] = direct.get(w, 0) + 1
    def qualifying(cutoff):
        return {w for w, n in direct.items() if n >= cutoff}
    assert qualifying(500) == set(HEAD_CWES), sorted(qualifying(500) ^ set(HEAD_CWES))
    assert qualifying(200) == set(HEAD_CWES) | set(TAIL_A), sorted(qualifying(200))
    assert qualifying(100) == set(HEAD_CWES) | set(TAIL_A) | set(TAIL_B)
    assert qualifying(50) == set(HEAD_CWES) | set(TAIL_A) | set(TAIL_B) | set(TAIL_C)
    assert len({w for _, labels in entries for w in labels}) == 266

    counts = {
        "cves": len(cves), "cwes": len(cwes), "capecs": len(capecs),
        "techniques": len(techniques), "actors": len(parsed_actors),
        "snapshot_id": snapshot.snapshot_id,
    }
    (out / "FIXTURE.md").write_text(
        "# June-2022-era fixture snapshot (synthetic)\n\n"
        "Deterministically generated by tools/generate_fixture.py (seed "
        f"{SEED}). The catalogs are synthetic but structurally faithful to the\n"
        "public NVD / CWE / CAPEC / ATT&CK exports, engineered so the pinned\n"
        "reference statistics hold exactly on this data. Regenerate with:\n\n"
        "    python3 tools/generate_fixture.py\n\n"
        f"Record counts: {json.dumps(counts, indent=2)}\n"
    )
    print("fixture verified:", json.dumps(counts, indent=2))


if __name__ == "__main__":
    main()
