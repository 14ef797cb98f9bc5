"""Operator command line: ingest, train, predict, evaluate, report, serve.

Exit codes are stable for scripting: 0 success, 1 internal error, 2 input
error (missing/unparseable source, unknown CVE), 3 configuration error.
Machine-readable output (--format machine) is line oriented: one
`key<TAB>value...` record per line.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .classifier import TrainingConfig, load_model, save_model, train_hierarchy
from .feeds import (
    CatalogConfigurationError,
    parse_attack_bundle,
    parse_capec_catalog,
    parse_cwe_catalog,
    parse_nvd_feed,
)
from .mapping import CveNotFoundError, analyze_cve, build_mapping_table, rank_actors
from .metrics import combined_mrr, load_ground_truth
from .baseline import TechniqueSimilarityIndex
from .snapshot import build_snapshot, load_snapshot, read_source_file, save_snapshot
from .textprep import build_codebook, parse_glossary
from .workflows import (
    desk_sample_and_split,
    evaluate_split,
    ground_truth_mrr_baseline,
    ground_truth_mrr_pipeline,
    iterated_evaluation,
    lookup_coverage,
    tune_threshold,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_CONFIG = 3


class InputError(Exception):
    pass


class UserConfigError(Exception):
    pass


def _read_source(path: str, source_name: str) -> bytes:
    try:
        return read_source_file(path)
    except OSError as exc:
        raise InputError(f"cannot read {source_name} source {path}: {exc}") from exc


def _load_snapshot(path: str):
    try:
        return load_snapshot(path)
    except OSError as exc:
        raise InputError(f"cannot read snapshot {path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"bad snapshot archive {path}: {exc}") from exc


def _load_model_file(path: str):
    try:
        return load_model(Path(path).read_bytes())
    except OSError as exc:
        raise InputError(f"cannot read model {path}: {exc}") from exc


def _glossary(args) -> list:
    if getattr(args, "glossary", None):
        try:
            return parse_glossary(Path(args.glossary).read_text())
        except OSError as exc:
            raise InputError(f"cannot read glossary {args.glossary}: {exc}") from exc
    return []


def _curated_text(args) -> str | None:
    if getattr(args, "curated_map", None):
        try:
            return Path(args.curated_map).read_text()
        except OSError as exc:
            raise InputError(f"cannot read curated map {args.curated_map}: {exc}") from exc
    return None


def _training_config(args) -> TrainingConfig:
    config = TrainingConfig()
    if getattr(args, "config", None):
        try:
            config = TrainingConfig.from_dict(json.loads(Path(args.config).read_text()))
        except OSError as exc:
            raise UserConfigError(f"cannot read training config {args.config}: {exc}") from exc
        except (ValueError, TypeError) as exc:
            raise UserConfigError(f"bad training config: {exc}") from exc
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "threshold", None) is not None:
        config.threshold = args.threshold
    if getattr(args, "min_samples", None) is not None:
        config.min_samples = args.min_samples
    if getattr(args, "tune_threshold", False):
        config.tune_threshold = True
    return config


def _emit(args, human: str, machine_rows: list[list]) -> None:
    if args.format == "machine":
        for row in machine_rows:
            print("\t".join(str(x) for x in row))
    else:
        print(human)


# ---------------------------------------------------------------- commands

def cmd_ingest(args) -> int:
    sources = {
        "nvd": args.nvd,
        "cwe": args.cwe,
        "capec": args.capec,
        "attack": args.attack,
    }
    for name, path in sources.items():
        if not path or not Path(path).exists():
            raise InputError(f"missing {name} source file: {path}")

    cves = parse_nvd_feed(_read_source(args.nvd, "nvd"))
    try:
        cwes = parse_cwe_catalog(_read_source(args.cwe, "cwe"))
    except CatalogConfigurationError as exc:
        raise UserConfigError(str(exc)) from exc
    capecs = parse_capec_catalog(_read_source(args.capec, "capec"))
    report: dict = {}
    techniques, actors = parse_attack_bundle(_read_source(args.attack, "attack"), report=report)

    manifest = [
        (name, "file", hashlib.sha256(Path(path).read_bytes()).hexdigest())
        for name, path in sources.items()
    ]
    snapshot = build_snapshot(cves, cwes, capecs, techniques, actors, source_manifest=manifest)
    save_snapshot(snapshot, args.out)

    rows = [["snapshot_id", snapshot.snapshot_id]]
    rows += [["count", name, len(getattr(snapshot, name))] for name in ("cves", "cwes", "capecs", "techniques", "actors")]
    rows.append(["unresolved_references", len(snapshot.unresolved)])
    rows.append(["excluded_stix_objects", report.get("excluded_objects", 0)])
    human = (
        f"snapshot {snapshot.snapshot_id[:16]}... written to {args.out}\n"
        + "\n".join(f"  {name}: {len(getattr(snapshot, name))}" for name in ("cves", "cwes", "capecs", "techniques", "actors"))
        + f"\n  unresolved references: {len(snapshot.unresolved)}"
        + f"\n  excluded STIX objects: {report.get('excluded_objects', 0)}"
    )
    _emit(args, human, rows)
    return EXIT_OK


def cmd_train(args) -> int:
    snapshot = _load_snapshot(args.snapshot)
    config = _training_config(args)
    glossary = _glossary(args)
    if args.sample_size:
        split = desk_sample_and_split(snapshot, args.sample_size, seed=config.seed)
        model = train_hierarchy(snapshot, config, cve_ids=split.train, glossary=glossary)
        if config.tune_threshold and split.validation:
            model.threshold = tune_threshold(model, snapshot, split.validation, config.threshold_grid)
    else:
        model = train_hierarchy(snapshot, config, glossary=glossary)
    blob = save_model(model)
    Path(args.out).write_bytes(blob)
    model_hash = hashlib.sha256(blob).hexdigest()
    rows = [
        ["model_hash", model_hash],
        ["snapshot_id", model.trained_on],
        ["classifiers", len(model.classifiers)],
        ["threshold", model.threshold],
    ]
    _emit(
        args,
        f"model written to {args.out}\n  hash: {model_hash}\n  node classifiers: "
        f"{len(model.classifiers)}\n  threshold: {model.threshold}",
        rows,
    )
    return EXIT_OK


def _chain_rows(chain, table) -> list[list]:
    rows = [["cve", chain.cve, len(chain.cwe_links), len(chain.techniques), len(chain.actors)]]
    for link in chain.cwe_links:
        rows.append(["cwe", chain.cve, link.cwe, link.origin, "" if link.score is None else f"{link.score:.4f}"])
    for edge in chain.technique_links:
        rows.append(["technique", chain.cve, edge.from_id, edge.to_id, edge.source, edge.evidence])
    for actor, support in rank_actors(chain):
        rows.append(["actor", chain.cve, actor, support])
    return rows


def _chain_human(chain, snapshot) -> str:
    names = {c.id: c.name for c in snapshot.cwes}
    lines = [f"{chain.cve}: {len(chain.cwe_links)} CWEs -> {len(chain.techniques)} techniques -> {len(chain.actors)} actors"]
    for link in chain.cwe_links:
        score = "" if link.score is None else f" (score {link.score:.3f}{', fallback' if link.fallback else ''})"
        lines.append(f"  CWE-{link.cwe} {names.get(link.cwe, '?')} [{link.origin}]{score}")
    lines.append(f"  techniques: {', '.join(chain.techniques)}")
    actors = rank_actors(chain)
    shown = ", ".join(f"{a}({n})" for a, n in actors[:12])
    suffix = f" and {len(actors) - 12} more" if len(actors) > 12 else ""
    lines.append(f"  actors by supporting techniques: {shown}{suffix}")
    return "\n".join(lines)


def cmd_predict(args) -> int:
    snapshot = _load_snapshot(args.snapshot)
    model = _load_model_file(args.model) if args.model else None
    if model is not None and model.trained_on != snapshot.snapshot_id:
        print(
            f"warning: model trained on {model.trained_on[:12]}, snapshot is {snapshot.snapshot_id[:12]}",
            file=sys.stderr,
        )
    table = build_mapping_table(snapshot, _curated_text(args))
    query = args.cve or args.text
    if not query:
        raise InputError("provide --cve or --text")
    try:
        chain = analyze_cve(query, model, table, snapshot)
    except CveNotFoundError as exc:
        raise InputError(str(exc)) from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(args, _chain_human(chain, snapshot), _chain_rows(chain, table))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    snapshot = _load_snapshot(args.snapshot)
    model = _load_model_file(args.model)
    cutoffs = [int(c) for c in args.cutoffs.split(",")] if args.cutoffs else [500, 200, 100, 50]
    if args.iterations > 1:
        reports = iterated_evaluation(
            snapshot,
            model.config,
            cutoffs=cutoffs,
            iterations=args.iterations,
            sample_size=args.sample_size or 10_000,
            glossary=_glossary(args),
            coverage_any=args.coverage_any,
        )
    else:
        split = desk_sample_and_split(snapshot, args.sample_size or 10_000, seed=model.config.seed)
        reports = evaluate_split(model, snapshot, split.test, cutoffs=cutoffs, coverage_any=args.coverage_any)

    rows = [["cutoff", "labels", "micro_p", "micro_r", "micro_f", "macro_p", "macro_r", "macro_f", "coverage"]]
    lines = ["cutoff  labels  micro-P/R/F          macro-P/R/F          coverage"]
    for r in reports:
        rows.append([
            r.sample_threshold, r.label_universe_size,
            f"{r.micro_precision:.4f}", f"{r.micro_recall:.4f}", f"{r.micro_f:.4f}",
            f"{r.macro_precision:.4f}", f"{r.macro_recall:.4f}", f"{r.macro_f:.4f}",
            f"{r.coverage:.4f}",
        ])
        lines.append(
            f"{r.sample_threshold:>6}  {r.label_universe_size:>6}  "
            f"{r.micro_precision:.3f}/{r.micro_recall:.3f}/{r.micro_f:.3f}  "
            f"{r.macro_precision:.3f}/{r.macro_recall:.3f}/{r.macro_f:.3f}  {r.coverage:.3f}"
        )

    if args.ground_truth:
        try:
            gt_text = Path(args.ground_truth).read_text()
        except OSError as exc:
            raise InputError(f"cannot read ground truth {args.ground_truth}: {exc}") from exc
        entries = load_ground_truth(gt_text)
        table = build_mapping_table(snapshot, _curated_text(args))
        glossary = _glossary(args)
        pipeline = ground_truth_mrr_pipeline(entries, model, table, snapshot)
        codebook = build_codebook(snapshot.cwes, glossary=glossary)
        index = TechniqueSimilarityIndex(codebook=codebook).fit(snapshot.techniques)
        base = ground_truth_mrr_baseline(entries, index, snapshot)
        coverage = lookup_coverage(snapshot)
        combined = combined_mrr(coverage, pipeline)
        rows.append(["mrr", "pipeline", f"{pipeline:.4f}"])
        rows.append(["mrr", "baseline_cosine", f"{base:.4f}"])
        rows.append(["mrr", "lookup_coverage", f"{coverage:.4f}"])
        rows.append(["mrr", "combined", f"{combined:.4f}"])
        lines.append(
            f"MRR: pipeline {pipeline:.3f}, cosine baseline {base:.3f}, "
            f"lookup coverage {coverage:.3f}, combined {combined:.3f}"
        )

    output = "\n".join(lines)
    if args.out:
        Path(args.out).write_text(
            output + "\n" if args.format == "human"
            else "\n".join("\t".join(str(x) for x in r) for r in rows) + "\n"
        )
    _emit(args, output, rows)
    return EXIT_OK


def cmd_report(args) -> int:
    snapshot = _load_snapshot(args.snapshot)
    model = _load_model_file(args.model) if args.model else None
    table = build_mapping_table(snapshot, _curated_text(args))

    cve_ids: list[str] = []
    if args.cve_list and Path(args.cve_list).exists():
        for line in Path(args.cve_list).read_text().splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                cve_ids.append(line)
    elif args.cve_list:
        cve_ids = [c.strip() for c in args.cve_list.split(",") if c.strip()]

    seen = set()
    deduped = [c for c in cve_ids if not (c in seen or seen.add(c))]

    names = {c.id: c.name for c in snapshot.cwes}
    header = f"{'Vulnerability':<18} {'CWEs':<34} {'Techniques':>10} {'Actors':>7}"
    lines = [header, "-" * len(header)]
    rows = [["header", "cve", "cwes", "techniques", "actors"]]
    chains = []
    skipped = []
    for cve_id in deduped:
        try:
            chain = analyze_cve(cve_id, model, table, snapshot)
        except (CveNotFoundError, ValueError):
            skipped.append(cve_id)
            continue
        chains.append(chain)
        cwe_text = "; ".join(f"{l.cwe}: {names.get(l.cwe, '?')}" for l in chain.cwe_links)
        lines.append(f"{chain.cve:<18} {cwe_text[:34]:<34} {len(chain.techniques):>10} {len(chain.actors):>7}")
        rows.append(["row", chain.cve, ",".join(str(c) for c in chain.cwes), len(chain.techniques), len(chain.actors)])

    if skipped:
        lines.append("")
        lines.append("skipped (unknown CVEs): " + ", ".join(skipped))
        rows.append(["skipped", *skipped])

    lines.append("")
    lines.append("appendix: full chains")
    for chain in chains:
        lines.append("")
        lines.append(_chain_human(chain, snapshot))
        rows.extend(_chain_rows(chain, table)[1:])

    output = "\n".join(lines)
    if args.out:
        Path(args.out).write_text(output + "\n")
    _emit(args, output, rows)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_config
    from .service.config import ConfigError

    try:
        config = load_config(args.config)
    except ConfigError as exc:
        raise UserConfigError(str(exc)) from exc
    app = create_app(config)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threatpath", description=__doc__)
    parser.add_argument("--version", action="version", version=f"threatpath {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("human", "machine"), default="human")

    p = sub.add_parser("ingest", help="parse the four catalog sources into a snapshot archive")
    p.add_argument("--nvd", required=True)
    p.add_argument("--cwe", required=True)
    p.add_argument("--capec", required=True)
    p.add_argument("--attack", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train the hierarchical CWE classifier")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="training config JSON file")
    p.add_argument("--seed", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--min-samples", type=int, dest="min_samples")
    p.add_argument("--sample-size", type=int, dest="sample_size",
                   help="stratified sample size; omit to train on every labeled CVE")
    p.add_argument("--tune-threshold", action="store_true", dest="tune_threshold")
    p.add_argument("--glossary")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="analyze one CVE id or free-text description")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--model")
    p.add_argument("--cve")
    p.add_argument("--text")
    p.add_argument("--curated-map", dest="curated_map")
    common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a model with sample-threshold sweeps and MRR")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--cutoffs", help="comma separated sample-count cutoffs (default 500,200,100,50)")
    p.add_argument("--sample-size", type=int, dest="sample_size")
    p.add_argument("--ground-truth", dest="ground_truth")
    p.add_argument("--curated-map", dest="curated_map")
    p.add_argument("--glossary")
    p.add_argument("--iterations", type=int, default=1,
                   help="average scores over k seeded re-splits (retrains per iteration)")
    p.add_argument("--coverage-any", action="store_true", dest="coverage_any",
                   help="count a CVE as covered when ANY of its CWEs qualifies (default: all)")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="log4j-style analysis table for a CVE list")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--model")
    p.add_argument("--cve-list", dest="cve_list", required=True,
                   help="file with one CVE per line, or a comma separated list")
    p.add_argument("--curated-map", dest="curated_map")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UserConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
