"""A small, fully-linked snapshot for service and mapping tests."""

from __future__ import annotations

from threatpath.records import AttackTechnique, CapecPattern, CveRecord, CweEntry, ThreatActor
from threatpath.classifier import TrainingConfig
from threatpath.snapshot import build_snapshot


def toy_snapshot():
    cwes = [
        CweEntry(id=10, name="Memory Safety Root"),
        CweEntry(id=11, name="Buffer Errors", parents=[10]),
        CweEntry(id=12, name="Injection Root"),
        CweEntry(id=13, name="SQL Injection", parents=[12]),
        CweEntry(id=14, name="Command Injection", parents=[12]),
        CweEntry(id=99, name="Retired Weakness", status="deprecated"),
    ]
    techniques = [
        AttackTechnique("T1059", "Command and Scripting Interpreter", "Adversaries may abuse interpreters."),
        AttackTechnique("T1190", "Exploit Public-Facing Application", "Adversaries may exploit internet-facing apps."),
        AttackTechnique("T1134", "Access Token Manipulation", "Adversaries may manipulate tokens."),
        AttackTechnique("T1134.001", "Token Impersonation/Theft", "Adversaries may impersonate tokens.",
                        parent_technique="T1134"),
    ]
    capecs = [
        CapecPattern(66, related_cwes=[13], related_techniques=["T1190"]),
        CapecPattern(88, related_cwes=[14], related_techniques=["T1059"]),
        CapecPattern(90, related_cwes=[11], related_techniques=["T1134.001"]),
    ]
    actors = [
        ThreatActor("G0001", "Toy Bear", ["TB"], ["T1190", "T1059"]),
        ThreatActor("G0002", "Toy Panda", [], ["T1134.001"]),
        ThreatActor("G0003", "Toy Kitten", [], ["T1059"]),
    ]
    cves = []
    for i in range(14):
        cves.append(
            CveRecord(
                id=f"CVE-2020-1{i:03d}",
                description=f"Buffer overflow in memproduct{i} allows attackers to corrupt heap memory via crafted packets",
                assigned_cwes=[11],
                published="2020-01-01",
            )
        )
        cves.append(
            CveRecord(
                id=f"CVE-2020-2{i:03d}",
                description=f"SQL injection in webapp{i} allows remote attackers to execute arbitrary SQL commands via the id parameter",
                assigned_cwes=[13],
                published="2020-02-01",
            )
        )
        cves.append(
            CveRecord(
                id=f"CVE-2020-3{i:03d}",
                description=f"Shell command injection in gateway{i} lets remote attackers run arbitrary system commands via the exec field",
                assigned_cwes=[14],
                published="2020-03-01",
            )
        )
    # unassigned CVEs feed the review queue
    cves.append(CveRecord("CVE-2021-9001", "Heap memory corruption by buffer overflow in memviewer parsing packets", []))
    cves.append(CveRecord("CVE-2021-9002", "SQL injection in the reports id parameter of dashboardapp", []))
    cves.append(CveRecord("CVE-2021-9003", "Remote attackers run arbitrary shell commands via the exec field of toygateway", []))
    return build_snapshot(cves, cwes, capecs, techniques, actors, created="2022-06-01")


TOY_TRAINING = TrainingConfig(min_samples=4, min_df=1, epochs=80, seed=11)


def toy_training_dict() -> dict:
    return {"min_samples": 4, "min_df": 1, "epochs": 80, "seed": 11}
