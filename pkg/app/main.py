import logging
import sys
from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import List, Optional

import structlog

from app.config import settings
from app.exceptions import (
    BudgetExhausted,
    IndexOutOfRange,
    InvalidDictionary,
    StepFailure,
    TorusRelationsError,
)
from app.models.factorization import Factorization, MoveStep
from app.schemas.report import CheckStatus, Report, ReportFormat
from app.services.catalog_service import CatalogService
from app.services.symmetry_service import SymmetryService
from app.utils.file_formats import format_factorization, format_script

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_INCONCLUSIVE = 3


def configure_logging(
    level: Optional[str] = None, log_format: Optional[str] = None
) -> None:
    """Logs estructurados a stderr; los reportes van a stdout"""
    log_level = getattr(logging, (level or settings.log_level).upper(), logging.WARNING)
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=log_level)
    logging.getLogger().setLevel(log_level)
    renderer = (
        structlog.dev.ConsoleRenderer()
        if (log_format or settings.log_format) == "console"
        else structlog.processors.JSONRenderer()
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="torus-relations",
        description="Verification of positive Dehn twist factorizations on holed tori",
    )
    parser.add_argument(
        "--format",
        choices=[f.value for f in ReportFormat],
        default=ReportFormat.TEXT.value,
    )
    parser.add_argument(
        "--catalog-dir", help="Catalog directory (overrides CATALOG_DIR)"
    )
    parser.add_argument("--log-level", help="Log level (overrides LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="Verify catalog entries or an atlas")
    selection = verify.add_mutually_exclusive_group(required=True)
    selection.add_argument("--entry", help="Catalog entry name")
    selection.add_argument("--all", action="store_true", help="Every catalog entry")
    selection.add_argument("--atlas", help="Atlas file to load and validate")
    verify.add_argument("--parallel", action="store_true", help="Run checks in threads")

    replay = commands.add_parser("replay", help="Replay a script on a factorization")
    replay.add_argument(
        "--input", required=True, help="Factorization file or catalog name"
    )
    replay.add_argument("--script", required=True, help="Script file or catalog name")
    replay.add_argument("--expect", help="Expected factorization file or catalog name")

    search = commands.add_parser("search", help="Search a Hurwitz equivalence")
    search.add_argument("--a", dest="first", required=True)
    search.add_argument("--b", dest="second", required=True)
    search.add_argument("--budget", type=int, default=None)

    cap = commands.add_parser("cap", help="Cap a boundary component with a disk")
    cap.add_argument("--input", required=True)
    cap.add_argument("--hole", type=int, required=True)
    cap.add_argument(
        "--dict", dest="dictionary", help="Post-cap dictionary (default cap:k:j)"
    )
    cap.add_argument("--output", help="Output file (default stdout)")

    lemmas = commands.add_parser("lemmas", help="Run the common-techniques lemma suite")
    lemmas.add_argument("--min-holes", type=int, default=None)
    lemmas.add_argument("--max-holes", type=int, default=None)

    atlas = commands.add_parser("atlas", help="Write or validate a curve atlas")
    atlas_mode = atlas.add_mutually_exclusive_group(required=True)
    atlas_mode.add_argument(
        "--holes", type=int, help="Write the standard atlas of Σ_1^k"
    )
    atlas_mode.add_argument("--validate", help="Atlas file to validate")
    atlas.add_argument("--output", help="Output file (default stdout)")
    return parser


def _emit(text: str, output: Optional[str] = None) -> None:
    if output:
        if not text.endswith("\n"):
            text += "\n"
        Path(output).write_text(text, encoding="utf-8")
        logger.info("Output written", path=output)
    else:
        print(text)


def _report_exit(report: Report, output_format: ReportFormat) -> int:
    print(report.render(output_format))
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_verify(catalog: CatalogService, args: Namespace, fmt: ReportFormat) -> int:
    if args.atlas:
        atlas = catalog.atlas_service.load_atlas_file(Path(args.atlas))
        report = catalog.atlas_service.mapping_classes_for(atlas).validate_model()
    elif args.entry:
        report = catalog.verify_entry(args.entry)
    else:
        report = catalog.verify_all(parallel=args.parallel or None)
    return _report_exit(report, fmt)


def cmd_replay(catalog: CatalogService, args: Namespace, fmt: ReportFormat) -> int:
    source = catalog.resolve_factorization(args.input)
    script = catalog.resolve_script(args.script)
    report = Report(title=f"replay {script.name}")
    report.add("step:0", CheckStatus.PASS, witness=source.labels)

    def observe(index: int, step: MoveStep, current: Factorization) -> None:
        report.add(
            f"step:{index} {step.format()}", CheckStatus.PASS, witness=current.labels
        )

    try:
        final = catalog.hurwitz_service.replay(source, script, observer=observe)
    except StepFailure as e:
        report.add(f"step:{e.step_index}", CheckStatus.FAIL, detail=e.reason)
        return _report_exit(report, fmt)
    if args.expect:
        expected = catalog.resolve_factorization(args.expect)
        report.record(
            f"expect:{args.expect}",
            catalog.hurwitz_service.factorwise_equal(final, expected),
            None,
            final.labels,
        )
    return _report_exit(report, fmt)


def cmd_search(catalog: CatalogService, args: Namespace) -> int:
    first = catalog.resolve_factorization(args.first)
    second = catalog.resolve_factorization(args.second)
    script = catalog.hurwitz_service.search_equivalence(
        first, second, budget=args.budget
    )
    print(format_script(script))
    return EXIT_OK


def cmd_cap(catalog: CatalogService, args: Namespace) -> int:
    source = catalog.resolve_factorization(args.input)
    holes = source.surface.holes
    if not 1 <= args.hole <= holes:
        raise IndexOutOfRange("hole index out of range", hole=args.hole, holes=holes)
    symmetries: SymmetryService = catalog.hurwitz_service.symmetry_service
    relabel = symmetries.get(args.dictionary or f"cap:{holes}:{args.hole}")
    capped = catalog.hurwitz_service.cap(source, args.hole, relabel)
    _emit(format_factorization(capped), args.output)
    return EXIT_OK


def cmd_lemmas(catalog: CatalogService, args: Namespace, fmt: ReportFormat) -> int:
    return _report_exit(catalog.verify_lemmas(args.min_holes, args.max_holes), fmt)


def cmd_atlas(catalog: CatalogService, args: Namespace, fmt: ReportFormat) -> int:
    atlas_service = catalog.atlas_service
    if args.validate:
        atlas = atlas_service.load_atlas_file(Path(args.validate))
        report = atlas_service.mapping_classes_for(atlas).validate_model()
        return _report_exit(report, fmt)
    atlas = atlas_service.standard_atlas(args.holes)
    _emit(atlas_service.save_atlas(atlas), args.output)
    return EXIT_OK


def run(args: Namespace) -> int:
    fmt = ReportFormat(args.format)
    data_dir = Path(args.catalog_dir) if args.catalog_dir else None
    catalog = CatalogService(data_dir=data_dir)
    if args.command == "verify":
        return cmd_verify(catalog, args, fmt)
    if args.command == "replay":
        return cmd_replay(catalog, args, fmt)
    if args.command == "search":
        return cmd_search(catalog, args)
    if args.command == "cap":
        return cmd_cap(catalog, args)
    if args.command == "lemmas":
        return cmd_lemmas(catalog, args, fmt)
    return cmd_atlas(catalog, args, fmt)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return run(args)
    except BudgetExhausted as e:
        logger.warning("Search inconclusive", error=str(e))
        print(f"INCONCLUSIVE {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (StepFailure, InvalidDictionary, IndexOutOfRange) as e:
        logger.error("Check failed", error=str(e))
        print(f"FAIL {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except TorusRelationsError as e:
        logger.error("Input error", error=str(e))
        print(f"ERROR {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error("I/O error", error=str(e))
        print(f"ERROR {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
