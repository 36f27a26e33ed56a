"""Command-line pipeline: source maps -> theory -> conclusions -> bulletin.

Subcommands mirror the stage boundaries so each stage can be pinned and
inspected on its own:

    fusecast tournament  --source gfs.json --source ecmwf.json --obs obs.json \
                         --kb kb.json --now h0 --out theory.dfl
    fusecast reason      theory.dfl --out conclusions.json
    fusecast bulletin    conclusions.json --format text --out bulletin.txt
    fusecast pipeline    --source ... --obs ... --kb ... --now h0 --out bulletin.txt
    fusecast validate    --kb kb.json --source gfs.json

`pipeline` is byte-equivalent to the three stages composed through dump files.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import bulletin as bulletin_mod
from . import ingest, kb as kb_mod, lexicon as lexicon_mod, reasoner, theory as theory_mod
from . import tournament
from .errors import ForecastError
from .model import TimeRef, parse_timeref


@dataclass
class PipelineConfig:
    sources: list[Path]
    kb_path: Path
    now: TimeRef
    obs_path: Optional[Path] = None
    lexicon_path: Optional[Path] = None
    templates_path: Optional[Path] = None
    out_format: str = "text"
    out_path: Optional[Path] = None
    emit_theory: Optional[Path] = None
    emit_conclusions: Optional[Path] = None
    min_accuracy: Optional[Fraction] = None
    timings: bool = False

    def __post_init__(self):
        if not self.sources:
            raise ForecastError("at least one --source map is required")


class _StageError(Exception):
    def __init__(self, stage: str, path: Optional[Path], cause: Exception):
        self.stage = stage
        self.path = path
        self.cause = cause
        where = f" ({path})" if path else ""
        super().__init__(f"[{stage}]{where}: {cause}")


def _stage(stage: str, path: Optional[Path] = None):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, (ForecastError, OSError)):
                raise _StageError(stage, path, exc) from exc
            return False

    return _Ctx()


def _read(path: Path) -> bytes:
    return Path(path).read_bytes()


def _write(path: Optional[Path], data: bytes) -> None:
    if path is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        Path(path).write_bytes(data)


def _load_kb(config: PipelineConfig) -> kb_mod.KnowledgeBase:
    with _stage("kb", config.kb_path):
        knowledge = kb_mod.load_kb(_read(config.kb_path))
    if config.min_accuracy is not None:
        knowledge = kb_mod.KnowledgeBase(
            knowledge.accuracies, knowledge.overrides, config.min_accuracy)
    return knowledge


def _load_lams(config: PipelineConfig):
    lams = []
    for path in config.sources:
        with _stage("source", path):
            lams.extend(ingest.parse_source_map(_read(path)))
    if config.obs_path is not None:
        with _stage("obs", config.obs_path):
            lams.extend(ingest.parse_source_map(_read(config.obs_path)))
    return lams


def _conclusion_sources(conclusions: reasoner.ConclusionSet) -> tuple[str, ...]:
    """Source tags present in the conclusions; lets the bulletin stage name
    its inputs identically whether run standalone or inside the pipeline."""
    tags = set()
    for lit in conclusions.plus_defeasible:
        try:
            decoded = theory_mod.decode_atom(lit.atom)
        except theory_mod.OpaqueAtomError:
            continue
        if decoded.source:
            tags.add(decoded.source)
    return tuple(sorted(tags))


def _render_bulletin(
    conclusions: reasoner.ConclusionSet,
    now: Optional[TimeRef],
    lexicon_path: Optional[Path],
    templates_path: Optional[Path],
    out_format: str,
) -> bytes:
    lex = lexicon_mod.DEFAULT_LEXICON
    if lexicon_path is not None:
        with _stage("lexicon", lexicon_path):
            lex = lexicon_mod.load_lexicon(_read(lexicon_path))
    templates = bulletin_mod.DEFAULT_TEMPLATES
    if templates_path is not None:
        with _stage("templates", templates_path):
            templates = bulletin_mod.load_templates(_read(templates_path))
    with _stage("bulletin"):
        scenario = bulletin_mod.extract_scenario(conclusions)
        header = bulletin_mod.BulletinHeader(
            generated_at=None if now is None else str(now),
            sources=_conclusion_sources(conclusions),
        )
        doc = bulletin_mod.render_sharp(scenario, lex, header)
        return bulletin_mod.render_document(doc, out_format, templates)


def run_pipeline(config: PipelineConfig) -> int:
    """All stages; returns the process exit status."""
    timings: list[tuple[str, float]] = []

    def timed(stage, fn):
        start = time.perf_counter()
        result = fn()
        timings.append((stage, time.perf_counter() - start))
        return result

    knowledge = timed("kb", lambda: _load_kb(config))
    lams = timed("ingest", lambda: _load_lams(config))
    with _stage("tournament"):
        built = timed("tournament",
                      lambda: tournament.build_theory(lams, knowledge, config.now))
    if config.emit_theory is not None:
        _write(config.emit_theory, theory_mod.serialize_theory(built).encode("utf-8"))
    with _stage("reason"):
        concls = timed("reason", lambda: reasoner.conclusions(built))
    if config.emit_conclusions is not None:
        _write(config.emit_conclusions, reasoner.conclusions_to_json(concls))
    rendered = timed("bulletin", lambda: _render_bulletin(
        concls, config.now, config.lexicon_path, config.templates_path,
        config.out_format))
    _write(config.out_path, rendered)
    if config.timings:
        for stage, seconds in timings:
            print(f"{stage:>12}: {seconds * 1000:8.2f} ms", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# argparse wiring
# ---------------------------------------------------------------------------

def _add_source_args(p: argparse.ArgumentParser, need_sources: bool = True):
    p.add_argument("--source", action="append", default=[], type=Path,
                   metavar="PATH", help="model source map (repeatable)",
                   required=need_sources)
    p.add_argument("--obs", type=Path, metavar="PATH",
                   help="observation map (method O)")
    p.add_argument("--kb", type=Path, metavar="PATH", required=True,
                   help="knowledge base document")
    p.add_argument("--now", type=str, default=None,
                   help="reference time (ISO-8601 or h0); default: current UTC")
    p.add_argument("--min-accuracy", type=str, default=None, metavar="NUM",
                   help="override the KB reliability threshold")


def _add_bulletin_args(p: argparse.ArgumentParser):
    p.add_argument("--lexicon", type=Path, metavar="PATH",
                   help="lexicon override document")
    p.add_argument("--templates", type=Path, metavar="PATH",
                   help="smooth-template override document")
    p.add_argument("--format", choices=("text", "html", "json"), default="text")


def _parse_now(text: Optional[str]) -> TimeRef:
    if text is None:
        from datetime import datetime, timezone

        return TimeRef.absolute(datetime.now(timezone.utc))
    return parse_timeref(text)


def _parse_fraction(text: Optional[str]) -> Optional[Fraction]:
    if text is None:
        return None
    try:
        return Fraction(Decimal(text))
    except (InvalidOperation, ValueError) as exc:
        raise ForecastError(f"bad number {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusecast",
        description="Fuse multi-model weather forecasts through defeasible reasoning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tournament", help="source maps -> defeasible theory")
    _add_source_args(p)
    p.add_argument("--out", type=Path, default=None, help="theory output path")

    p = sub.add_parser("reason", help="theory -> proof-tag conclusions")
    p.add_argument("theory", type=Path, help="theory file")
    p.add_argument("--out", type=Path, default=None, help="conclusions JSON path")

    p = sub.add_parser("bulletin", help="conclusions -> rendered bulletin")
    p.add_argument("conclusions", type=Path, help="conclusions JSON file")
    _add_bulletin_args(p)
    p.add_argument("--now", type=str, default=None,
                   help="generated-at stamp for the bulletin header")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("pipeline", help="all stages end to end")
    _add_source_args(p)
    _add_bulletin_args(p)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--emit-theory", type=Path, default=None, metavar="PATH",
                   help="also dump the generated theory")
    p.add_argument("--emit-conclusions", type=Path, default=None, metavar="PATH",
                   help="also dump the reasoner conclusions")
    p.add_argument("--timings", action="store_true",
                   help="print a stage timing summary to stderr")

    p = sub.add_parser("validate", help="lint source maps and the KB")
    _add_source_args(p, need_sources=False)

    return parser


def _cmd_tournament(args) -> int:
    config = PipelineConfig(
        sources=list(args.source), kb_path=args.kb, now=_parse_now(args.now),
        obs_path=args.obs, min_accuracy=_parse_fraction(args.min_accuracy),
    )
    knowledge = _load_kb(config)
    lams = _load_lams(config)
    with _stage("tournament"):
        built = tournament.build_theory(lams, knowledge, config.now)
    _write(args.out, theory_mod.serialize_theory(built).encode("utf-8"))
    return 0


def _cmd_reason(args) -> int:
    with _stage("reason", args.theory):
        parsed = theory_mod.parse_theory(_read(args.theory).decode("utf-8"))
        concls = reasoner.conclusions(parsed)
    _write(args.out, reasoner.conclusions_to_json(concls))
    return 0


def _cmd_bulletin(args) -> int:
    with _stage("bulletin", args.conclusions):
        concls = reasoner.conclusions_from_json(_read(args.conclusions))
    rendered = _render_bulletin(
        concls, parse_timeref(args.now) if args.now else None,
        args.lexicon, args.templates, args.format)
    _write(args.out, rendered)
    return 0


def _cmd_pipeline(args) -> int:
    config = PipelineConfig(
        sources=list(args.source), kb_path=args.kb, now=_parse_now(args.now),
        obs_path=args.obs, lexicon_path=args.lexicon,
        templates_path=args.templates, out_format=args.format,
        out_path=args.out, emit_theory=args.emit_theory,
        emit_conclusions=args.emit_conclusions,
        min_accuracy=_parse_fraction(args.min_accuracy),
        timings=args.timings,
    )
    return run_pipeline(config)


def _cmd_validate(args) -> int:
    status = 0
    if args.kb is not None:
        try:
            kb_mod.load_kb(_read(args.kb))
            print(f"{args.kb}: ok")
        except (ForecastError, OSError) as exc:
            print(f"{args.kb}: error: {exc}")
            status = 1
    paths = list(args.source) + ([args.obs] if args.obs else [])
    for path in paths:
        try:
            diags = ingest.validate_source_map(_read(path))
        except OSError as exc:
            print(f"{path}: error: {exc}")
            status = 1
            continue
        if not diags:
            print(f"{path}: ok")
        for diag in diags:
            print(f"{path}: {diag}")
            if diag.severity == "error":
                status = 1
    return status


_COMMANDS = {
    "tournament": _cmd_tournament,
    "reason": _cmd_reason,
    "bulletin": _cmd_bulletin,
    "pipeline": _cmd_pipeline,
    "validate": _cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _StageError as exc:
        print(f"fusecast: error {exc}", file=sys.stderr)
        return 1
    except (ForecastError, OSError) as exc:
        print(f"fusecast: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
