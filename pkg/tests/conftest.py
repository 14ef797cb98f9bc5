"""Session fixtures for the pinned June-2022-era snapshot."""

from pathlib import Path

import pytest

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures" / "june2022"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def fixture_snapshot():
    from threatpath.feeds import (
        parse_attack_bundle,
        parse_capec_catalog,
        parse_cwe_catalog,
        parse_nvd_feed,
    )
    from threatpath.snapshot import build_snapshot, read_source_file

    cves = parse_nvd_feed(read_source_file(FIXTURE_DIR / "nvd.json.gz"))
    cwes = parse_cwe_catalog(read_source_file(FIXTURE_DIR / "cwe.xml.gz"))
    capecs = parse_capec_catalog(read_source_file(FIXTURE_DIR / "capec.xml.gz"))
    techniques, actors = parse_attack_bundle(read_source_file(FIXTURE_DIR / "attack.json.gz"))
    return build_snapshot(cves, cwes, capecs, techniques, actors, created="2022-06-30")


@pytest.fixture(scope="session")
def fixture_table(fixture_snapshot):
    from threatpath.mapping import build_mapping_table

    return build_mapping_table(fixture_snapshot, (FIXTURE_DIR / "curated_map.tsv").read_text())


@pytest.fixture(scope="session")
def fixture_glossary():
    from threatpath.textprep import parse_glossary

    return parse_glossary((FIXTURE_DIR / "glossary.tsv").read_text())


@pytest.fixture(scope="session")
def desk_split(fixture_snapshot):
    from threatpath.workflows import desk_sample_and_split

    return desk_sample_and_split(fixture_snapshot, 10_000, seed=7)


@pytest.fixture(scope="session")
def desk_model(fixture_snapshot, desk_split, fixture_glossary):
    from threatpath.classifier import TrainingConfig, train_hierarchy

    return train_hierarchy(
        fixture_snapshot,
        TrainingConfig(seed=7),
        cve_ids=desk_split.train,
        glossary=fixture_glossary,
    )


@pytest.fixture(scope="session")
def ground_truth_entries(fixture_dir):
    from threatpath.metrics import load_ground_truth

    entries = load_ground_truth((fixture_dir / "ground_truth.tsv").read_text())
    entries += load_ground_truth((fixture_dir / "manual_annotations.tsv").read_text())
    return entries
