"""Append-only reviewer feedback log.

One JSON record per line; records are immutable once written and ids grow
monotonically. Appends are serialized by a single writer lock.
"""

from __future__ import annotations

import json
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

VERDICTS = ("accept", "reject", "replace")


class DuplicateFeedbackError(ValueError):
    pass


@dataclass(frozen=True)
class FeedbackRecord:
    record_id: int
    cve_id: str
    proposed_cwe: int
    verdict: str
    replacement_cwe: int | None
    reviewer: str
    timestamp: str
    model_generation: str

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "replace" and self.replacement_cwe is None:
            raise ValueError("replace verdict requires replacement_cwe")


class FeedbackStore:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: list[FeedbackRecord] = []
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                if line:
                    self._records.append(FeedbackRecord(**json.loads(line)))
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.touch()

    def __len__(self) -> int:
        return len(self._records)

    def next_id(self) -> int:
        return self._records[-1].record_id + 1 if self._records else 1

    def has(self, cve_id: str, proposed_cwe: int, reviewer: str, generation: str) -> bool:
        return any(
            r.cve_id == cve_id
            and r.proposed_cwe == proposed_cwe
            and r.reviewer == reviewer
            and r.model_generation == generation
            for r in self._records
        )

    def append(
        self,
        cve_id: str,
        proposed_cwe: int,
        verdict: str,
        reviewer: str,
        model_generation: str,
        replacement_cwe: int | None = None,
    ) -> FeedbackRecord:
        with self._lock:
            if self.has(cve_id, proposed_cwe, reviewer, model_generation):
                raise DuplicateFeedbackError(
                    f"{reviewer} already reviewed {cve_id}/CWE-{proposed_cwe} for this model"
                )
            record = FeedbackRecord(
                record_id=self.next_id(),
                cve_id=cve_id,
                proposed_cwe=proposed_cwe,
                verdict=verdict,
                replacement_cwe=replacement_cwe,
                reviewer=reviewer,
                timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
                model_generation=model_generation,
            )
            with open(self.path, "a") as fh:
                fh.write(json.dumps(asdict(record), sort_keys=True) + "\n")
                fh.flush()
            self._records.append(record)
            return record

    def get(self, record_id: int) -> FeedbackRecord | None:
        for r in self._records:
            if r.record_id == record_id:
                return r
        return None

    def records(self) -> list[FeedbackRecord]:
        return list(self._records)

    def reviewed_pairs(self, generation: str) -> set[tuple[str, int]]:
        return {
            (r.cve_id, r.proposed_cwe)
            for r in self._records
            if r.model_generation == generation
        }

    def label_adjustments(self) -> tuple[dict[str, set[int]], dict[str, set[int]]]:
        """(added labels, removed labels) per CVE, latest verdict per pair wins."""
        latest: dict[tuple[str, int], FeedbackRecord] = {}
        for r in self._records:
            latest[(r.cve_id, r.proposed_cwe)] = r
        added: dict[str, set[int]] = {}
        removed: dict[str, set[int]] = {}
        for (cve_id, cwe), record in latest.items():
            if record.verdict == "accept":
                added.setdefault(cve_id, set()).add(cwe)
            elif record.verdict == "reject":
                removed.setdefault(cve_id, set()).add(cwe)
            else:  # replace
                removed.setdefault(cve_id, set()).add(cwe)
                added.setdefault(cve_id, set()).add(record.replacement_cwe)
        return added, removed
