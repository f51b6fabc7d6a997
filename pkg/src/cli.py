"""Command line entry point: simulate, preprocess, extract, train, eval, pipeline, qa, report.

Exit codes: 0 ok, 1 runtime failure, 2 usage or configuration error.
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from domain.config_models import PipelineConfig
from errors import ConfigError, DyadError
from evaluation.cv import design_matrix
from evaluation.grid import MODALITY_SETS, TARGETS, resolve_modality_sets
from evaluation.reporting import hash_inputs, render_table, write_grid_report, write_manifest
from evaluation.tuning import expand_grid, fit_weighted, inner_tune
from infrastructure.config_loader import LoadedConfig, load_config
from infrastructure.corpus_repository import CorpusRepository
from learning.models import save_model
from logging_config import StageCounts, build_run_log, get_logger, set_level, write_run_log
from qa.icc import ICC_VARIANTS
from services.pipeline_service import (
    GENDER_CHOICES,
    PipelineService,
    attach_feature_tables,
    write_check_report,
    write_feature_tables,
)
from services.qa_service import QaService, load_ratings, write_qa_report
from selection import split_by_gender
from settings import load_settings
from simulation.world import generate_world

LOGGER = get_logger("cli")


def _csv(value: Optional[str]) -> List[str]:
    return [v.strip() for v in (value or "").split(",") if v.strip()]


def _genders(value: str) -> Sequence[str]:
    return GENDER_CHOICES if value == "both" else (value,)


def _targets(value: str) -> Sequence[str]:
    return TARGETS if value == "both" else (value,)


def _pipeline_config(args: argparse.Namespace, loaded: LoadedConfig) -> PipelineConfig:
    overrides: Dict[str, Any] = {}
    if getattr(args, "acoustic", None):
        overrides["acoustic"] = args.acoustic
    if getattr(args, "linguistic", None):
        overrides["linguistic"] = args.linguistic
    if getattr(args, "models", None):
        overrides["models"] = tuple(_csv(args.models))
    return replace(loaded.pipeline, **overrides) if overrides else loaded.pipeline


def _finish(
    args: argparse.Namespace,
    out: Path,
    stage: str,
    inputs: Sequence[Path],
    seed: int,
    counts: StageCounts,
    metadata: Optional[Dict[str, Any]] = None,
) -> None:
    flags = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k not in ("handler", "out")}
    hashes = hash_inputs(p for p in inputs if p is not None)
    write_manifest(out, hashes, seed, flags)
    write_run_log(out, build_run_log(stage, counts, seed, hashes, flags, metadata))


# -- subcommands ------------------------------------------------------------
def cmd_simulate(args: argparse.Namespace, loaded: LoadedConfig) -> int:
    sim = loaded.sim
    overrides = {}
    if args.couples is not None:
        overrides["n_couples"] = args.couples
    if args.days is not None:
        overrides["days"] = args.days
    if overrides:
        sim = replace(sim, **overrides)
    out = Path(args.out)
    summary = generate_world(sim, out, jobs=args.jobs)
    _finish(
        args,
        out,
        "simulate",
        [loaded.source],
        sim.seed,
        StageCounts(sim.n_couples, summary.sessions, 0, unit="couples"),
        {"retained_audio": summary.retained_audio, "reports": summary.reports, "events": summary.events},
    )
    print(f"{summary.sessions} sessions ({summary.retained_audio} with audio) written to {out}")
    return 0


def _service(args: argparse.Namespace, loaded: LoadedConfig) -> PipelineService:
    return PipelineService(CorpusRepository(Path(args.corpus)), _pipeline_config(args, loaded), jobs=args.jobs)


def cmd_preprocess(args: argparse.Namespace, loaded: LoadedConfig) -> int:
    service = _service(args, loaded)
    corpus = service.repository.load_corpus()
    selection = service.select(corpus)
    outcomes = service.preprocess(corpus, selection)
    out = Path(args.out)
    write_check_report(out / "preprocess_report.csv", outcomes)
    _finish(args, out, "preprocess", [Path(args.corpus)], loaded.sim.seed, StageCounts(len(corpus.sessions), len(selection.samples), len(selection.rejections)))
    print(f"preprocessed {len(selection.samples)} of {len(corpus.sessions)} sessions")
    return 0


def cmd_extract(args: argparse.Namespace, loaded: LoadedConfig) -> int:
    service = _service(args, loaded)
    corpus = service.repository.load_corpus()
    selection = service.select(corpus)
    extraction = service.extract(corpus, selection)
    out = Path(args.out)
    write_check_report(out / "preprocess_report.csv", extraction.outcomes)
    write_feature_tables(out, extraction.samples)
    _finish(args, out, "extract", [Path(args.corpus)], loaded.sim.seed, StageCounts(len(selection.samples), len(extraction.samples), len(extraction.unusable), unit="samples"))
    print(f"extracted features for {len(extraction.samples)} samples ({len(extraction.unusable)} unusable)")
    return 0


def _stored_samples(args: argparse.Namespace, service: PipelineService):
    corpus = service.repository.load_corpus()
    selection = service.select(corpus)
    return attach_feature_tables(Path(args.features or args.out), selection.samples)


def cmd_train(args: argparse.Namespace, loaded: LoadedConfig) -> int:
    service = _service(args, loaded)
    config = service.config
    samples = _stored_samples(args, service)
    male, female = split_by_gender(samples)
    group = male if args.gender == "male" else female
    set_name = resolve_modality_sets(_csv(args.modalities) or ["all"])[0]
    X = design_matrix(group, MODALITY_SETS[set_name][0])
    y = np.array([s.label.binary(args.target) for s in group], dtype=np.int64)
    couples = [s.couple_id for s in group]
    out = Path(args.out)
    written = []
    for kind in config.models:
        best, _ = inner_tune(X, y, couples, kind, expand_grid(kind, config), config.seed, config.inner_folds)
        model = fit_weighted(kind, best, X, y, config.seed)
        path = out / "models" / f"{args.gender}_{args.target}_{set_name}_{kind}.json"
        save_model(path, model)
        written.append(path)
        LOGGER.info("trained %s on %d samples with %s", kind, len(group), best)
    _finish(args, out, "train", [Path(args.corpus), Path(args.features or args.out) / "features"], config.seed, StageCounts(len(group), len(written), 0, unit="samples"))
    for path in written:
        print(path)
    return 0


def cmd_eval(args: argparse.Namespace, loaded: LoadedConfig) -> int:
    service = _service(args, loaded)
    samples = _stored_samples(args, service)
    cells = service.evaluate(samples, _genders(args.gender), _targets(args.target), _csv(args.modalities) or None)
    out = Path(args.out)
    write_grid_report(out, cells, samples)
    _finish(args, out, "eval", [Path(args.corpus), Path(args.features or args.out) / "features"], service.config.seed, StageCounts(len(samples), len(cells), sum(1 for c in cells if c.best is None), unit="samples"))
    print((out / "table.txt").read_text(encoding="utf-8"), end="")
    return 0


def cmd_pipeline(args: argparse.Namespace, loaded: LoadedConfig) -> int:
    service = _service(args, loaded)
    out = Path(args.out)
    result = service.run(out, _genders(args.gender), _targets(args.target), _csv(args.modalities) or None)
    _finish(
        args,
        out,
        "pipeline",
        [Path(args.corpus), loaded.source],
        service.config.seed,
        StageCounts(
            service.metrics_collector.sessions_seen,
            len(result.extraction.samples),
            service.metrics_collector.rejected + len(result.extraction.unusable),
        ),
        service.metrics_collector.as_dict(),
    )
    print((out / "table.txt").read_text(encoding="utf-8"), end="")
    return 0


def cmd_qa(args: argparse.Namespace, loaded: LoadedConfig) -> int:
    repo = CorpusRepository(Path(args.corpus))
    ratings = load_ratings(Path(args.icc)) if args.icc else None
    report = QaService(repo, jobs=args.jobs, icc_variant=args.icc_variant).run(repo.load_corpus(), ratings)
    out = Path(args.out)
    write_qa_report(out / "qa_report.csv", report)
    inputs = [Path(args.corpus)] + ([Path(args.icc)] if args.icc else [])
    _finish(args, out, "qa", inputs, loaded.sim.seed, StageCounts(len(report.rows), len(report.flagged_sessions), len(report.violations), unit="qa_rows"))
    if report.icc_value is not None:
        print(f"{report.icc_variant} = {report.icc_value:.4f}")
    print(f"{len(report.violations)} violations in {len(report.flagged_sessions)} sessions")
    return 0


def cmd_report(args: argparse.Namespace, loaded: LoadedConfig) -> int:
    metrics = Path(args.metrics) if args.metrics else Path(args.out) / "metrics.json"
    try:
        payload = json.loads(metrics.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DyadError(f"cannot read {metrics}: {exc}") from exc
    table = render_table(payload)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "table.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


# -- parser -----------------------------------------------------------------
def build_parser(settings) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", required=True, help="Output root directory")
    common.add_argument("--config", default=str(settings.config_dir / "sim.yml"), help="Flat YAML config path")
    common.add_argument("--seed", type=int, default=None, help="Override the config seed (beats DYAD_SEED)")
    common.add_argument("--jobs", type=int, default=settings.jobs, help="Worker threads for per-session work")

    corpus = argparse.ArgumentParser(add_help=False)
    corpus.add_argument("--corpus", required=True, help="Corpus directory written by simulate")

    features = argparse.ArgumentParser(add_help=False)
    features.add_argument("--acoustic", default=None, help="lite | ingest:<file>")
    features.add_argument("--linguistic", default=None, help="hash:<dim> | ingest:<file>")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--gender", choices=("male", "female", "both"), default="both")
    grid.add_argument("--target", choices=("arousal", "valence", "both"), default="both")
    grid.add_argument("--modalities", default=None, help=f"Comma list from {','.join(MODALITY_SETS)}")
    grid.add_argument("--models", default=None, help="Comma list of linear_svm,random_forest,rbf_svm")

    stored = argparse.ArgumentParser(add_help=False)
    stored.add_argument("--features", default=None, help="Directory holding features/ from extract (default --out)")

    parser = argparse.ArgumentParser(prog="dyad", description="Dyadic smartwatch emotion recognition toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="Generate a synthetic study corpus")
    p.add_argument("--couples", type=int, default=None)
    p.add_argument("--days", type=int, default=None)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("preprocess", parents=[common, corpus], help="Select sessions and write preprocess_report.csv")
    p.set_defaults(handler=cmd_preprocess)

    p = sub.add_parser("extract", parents=[common, corpus, features], help="Write features_<modality>.csv")
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("train", parents=[common, corpus, stored], help="Fit models on stored features")
    p.add_argument("--gender", choices=("male", "female"), required=True)
    p.add_argument("--target", choices=TARGETS, required=True)
    p.add_argument("--modalities", default=None, help="One modality set name (default all)")
    p.add_argument("--models", default=None)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("eval", parents=[common, corpus, stored, grid], help="Cross-validate stored features")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("pipeline", parents=[common, corpus, features, grid], help="Select, extract and evaluate")
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("qa", parents=[common, corpus], help="Annotation/transcript/code checks and ICC")
    p.add_argument("--icc", default=None, help="Ratings CSV (items x raters)")
    p.add_argument("--icc-variant", choices=ICC_VARIANTS, default="ICC(2,1)")
    p.set_defaults(handler=cmd_qa)

    p = sub.add_parser("report", parents=[common], help="Render table.txt from metrics.json")
    p.add_argument("--metrics", default=None, help="metrics.json path (default <out>/metrics.json)")
    p.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = load_settings()
    set_level(settings.log_level)
    args = build_parser(settings).parse_args(argv)
    seed = args.seed if args.seed is not None else settings.seed_override
    try:
        loaded = load_config(Path(args.config), seed_override=seed)
        return args.handler(args, loaded)
    except ConfigError as exc:
        LOGGER.error("configuration error: %s", exc)
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DyadError as exc:
        LOGGER.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
