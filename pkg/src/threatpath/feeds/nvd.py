"""NVD JSON feed ingestion (schema 1.1 and 2.0), normalized to CveRecord."""

from __future__ import annotations

import json
import logging
import re

from ..records import CveRecord

logger = logging.getLogger(__name__)

# CWE assignments that mean "no usable weakness information"
_NO_INFO = {"NVD-CWE-noinfo", "NVD-CWE-Other"}
_CWE_ID = re.compile(r"CWE-(\d+)$")


class FeedParseError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        suffix = f" (at byte offset {offset})" if offset is not None else ""
        super().__init__(message + suffix)


class UnsupportedVersionError(ValueError):
    pass


def _weakness_values_to_cwes(values: list[str], cve_id: str) -> list[int]:
    cwes: list[int] = []
    for value in values:
        if value in _NO_INFO:
            continue
        m = _CWE_ID.match(value)
        if m:
            cwe = int(m.group(1))
            if cwe not in cwes:
                cwes.append(cwe)
        else:
            logger.warning("%s: unrecognized weakness value %r", cve_id, value)
    return cwes


def _english(descriptions: list[dict], value_key: str = "value") -> str:
    for d in descriptions:
        if d.get("lang") == "en" and d.get(value_key):
            return d[value_key]
    return ""


def _parse_v11_item(item: dict) -> CveRecord | None:
    cve = item.get("cve", {})
    cve_id = cve.get("CVE_data_meta", {}).get("ID", "")
    description = _english(cve.get("description", {}).get("description_data", []))
    if not description:
        logger.warning("%s: no english description, skipped", cve_id)
        return None
    values = []
    for ptype in cve.get("problemtype", {}).get("problemtype_data", []):
        for d in ptype.get("description", []):
            if d.get("value"):
                values.append(d["value"])
    published = (item.get("publishedDate") or "")[:10]
    return CveRecord(cve_id, description, _weakness_values_to_cwes(values, cve_id), published)


def _parse_v20_item(item: dict) -> CveRecord | None:
    cve = item.get("cve", {})
    cve_id = cve.get("id", "")
    description = _english(cve.get("descriptions", []))
    if not description:
        logger.warning("%s: no english description, skipped", cve_id)
        return None
    values = []
    for weakness in cve.get("weaknesses", []):
        for d in weakness.get("description", []):
            if d.get("value"):
                values.append(d["value"])
    published = (cve.get("published") or "")[:10]
    return CveRecord(cve_id, description, _weakness_values_to_cwes(values, cve_id), published)


def parse_nvd_feed(raw: bytes) -> list[CveRecord]:
    """Parse an NVD feed (schema 1.1 or 2.0) into one record per CVE.

    Weakness assignments of NVD-CWE-noinfo / NVD-CWE-Other are recorded as
    empty assignments. Raises FeedParseError for malformed JSON (with byte
    offset) and UnsupportedVersionError for unrecognized feed layouts.
    """
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise FeedParseError(f"feed is not valid UTF-8: {exc}", exc.start) from exc
    except json.JSONDecodeError as exc:
        raise FeedParseError(f"malformed JSON: {exc.msg}", exc.pos) from exc

    if not isinstance(doc, dict):
        raise UnsupportedVersionError("feed root is not an object")

    if "CVE_Items" in doc:
        items = doc["CVE_Items"]
        parser = _parse_v11_item
    elif "vulnerabilities" in doc:
        items = doc["vulnerabilities"]
        parser = _parse_v20_item
    else:
        raise UnsupportedVersionError(
            "unrecognized NVD feed schema (expected CVE_Items or vulnerabilities)"
        )

    records = []
    for item in items:
        record = parser(item)
        if record is not None:
            records.append(record)
    return records
