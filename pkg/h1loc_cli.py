#!/usr/bin/env python3
"""
h1loc command-line tool
Compute H1 and H1_loc of finite matrix groups, re-check the bundled
constructions, search quaternionic discriminant data and run the brute-force
oracle.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn

from colorama import Fore, Style
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from cohomology import (
    CocycleError,
    GModule,
    cocycle_from_generators,
    h1,
    h1_loc,
    is_coboundary,
    satisfies_local_conditions,
)
from config import Config
from eichler import QuaternionInput, embedding_conditions, find_discriminant_d, split_type
from matgroup import closure
from oracle import run_oracle
from paper_checks import ClaimResult, PaperVerifier
from report import CocycleVerdict, Report, render_structured, render_text
from utils import ColorPrinter, setup_logging, stopwatch
from zmod_linalg import ResidueMatrix

RED = Fore.RED
GREEN = Fore.GREEN
BLUE = Fore.BLUE
YELLOW = Fore.YELLOW
NC = Style.RESET_ALL

_cli_logger = logging.getLogger("h1loc.cli")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def print_error(message: str):
    print(f"{RED}[✗] {message}{NC}", file=sys.stderr)
    _cli_logger.error(message)


def print_success(message: str):
    print(f"{GREEN}[✓] {message}{NC}", file=sys.stderr)
    _cli_logger.info(message)


def print_info(message: str):
    print(f"{BLUE}[i] {message}{NC}", file=sys.stderr)
    _cli_logger.info(message)


# ---------------------------------------------------------------------------
# Spec files
# ---------------------------------------------------------------------------


class GroupSpecFile(BaseModel):
    """A group acting naturally on (Z/modulus)^rank, with an optional cocycle.

    ``cocycle`` gives one module vector per generator, either as a list in
    generator order or as a map from generator index to vector.
    """

    model_config = ConfigDict(extra="forbid", strict=True)

    modulus: int = Field(ge=2)
    rank: int = Field(ge=1)
    module_rank: int | None = Field(default=None, ge=1)
    generators: list[list[list[int]]] = Field(min_length=1)
    cocycle: list[list[int]] | dict[str, list[int]] | None = None

    @model_validator(mode="after")
    def _check_shapes(self) -> "GroupSpecFile":
        for idx, matrix in enumerate(self.generators):
            if len(matrix) != self.rank or any(len(row) != self.rank for row in matrix):
                raise ValueError(f"generators[{idx}] is not a {self.rank}x{self.rank} matrix")
        if self.module_rank is not None and self.module_rank != self.rank:
            raise ValueError(f"module_rank {self.module_rank} must equal rank {self.rank} for the natural action")
        if self.cocycle is not None:
            values = self.cocycle_values()
            if len(values) != len(self.generators):
                raise ValueError(f"cocycle needs one value per generator ({len(self.generators)})")
            for idx, value in enumerate(values):
                if len(value) != self.rank:
                    raise ValueError(f"cocycle[{idx}] has length {len(value)}, expected {self.rank}")
        return self

    def cocycle_values(self) -> list[list[int]]:
        if self.cocycle is None:
            return []
        if isinstance(self.cocycle, list):
            return self.cocycle
        try:
            keyed = {int(key): value for key, value in self.cocycle.items()}
        except ValueError:
            raise ValueError("cocycle keys must be generator indices") from None
        if sorted(keyed) != list(range(len(keyed))):
            raise ValueError(f"cocycle keys {sorted(keyed)} are not 0..{len(keyed) - 1}")
        return [keyed[i] for i in range(len(keyed))]

    def matrices(self) -> list[ResidueMatrix]:
        return [ResidueMatrix.from_rows(g, self.modulus) for g in self.generators]


def load_spec(path: str | Path) -> GroupSpecFile:
    """Parse a spec file; raises ValidationError or OSError."""
    text = Path(path).read_text(encoding="utf-8")
    return GroupSpecFile.model_validate_json(text)


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = ".".join(str(x) for x in error["loc"]) or "spec"
        parts.append(f"{location}: {error['msg']}")
    return "; ".join(parts)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _emit(report: Report, fmt: str, timing: bool) -> None:
    renderer = render_structured if fmt == "structured" else render_text
    sys.stdout.write(renderer(report, timing=timing))


def cmd_h1loc(path: str, fmt: str = "text", timing: bool = True) -> int:
    """Compute H1 and H1_loc for the group described in a spec file."""
    try:
        spec = load_spec(path)
    except OSError as exc:
        print_error(f"cannot read {path}: {exc}")
        return EXIT_USAGE
    except ValidationError as exc:
        print_error(f"{path}: {_validation_message(exc)}")
        return EXIT_USAGE

    with stopwatch() as elapsed:
        group = closure(spec.matrices())
        module = GModule.natural(group)
        report = Report.from_cohomology(Path(path).name, module, h1(module), h1_loc(module))
        if spec.cocycle is not None:
            try:
                cocycle = cocycle_from_generators(module, spec.cocycle_values())
            except CocycleError as exc:
                report.verdict = CocycleVerdict(is_cocycle=False, detail=str(exc))
            else:
                check = satisfies_local_conditions(cocycle)
                report.verdict = CocycleVerdict(
                    is_cocycle=True,
                    locally_trivial=check.holds,
                    is_coboundary=is_coboundary(cocycle) is not None,
                    detail=f"fails at elements {list(check.failures)}" if check.failures else "",
                )
    report.duration = elapsed[0]
    _emit(report, fmt, timing)
    return EXIT_OK


def cmd_verify_paper(scenario: str, p: int | None, n: int | None, fmt: str = "text", timing: bool = True) -> int:
    """Run the scenario claims and report PASS/FAIL per claim."""
    verifier = PaperVerifier(ColorPrinter())
    with stopwatch() as elapsed:
        claims = verifier.run(scenario, p, n)
    report = Report(name=f"verify-paper {scenario}", claims=claims, duration=elapsed[0])
    passed = sum(c.passed for c in claims)
    report.extra["claims_passed"] = f"{passed}/{len(claims)}"
    _emit(report, fmt, timing)
    if report.passed:
        print_success(f"all {len(claims)} claims passed")
        return EXIT_OK
    print_error(f"{len(claims) - passed} of {len(claims)} claims failed")
    return EXIT_FAILURE


def cmd_quat_d(disc: int, index: int, prime: int, bound: int | None, fmt: str = "text", timing: bool = True) -> int:
    """Search for the auxiliary discriminant d and list its conditions."""
    data = QuaternionInput(disc, index, prime)
    with stopwatch() as elapsed:
        d = find_discriminant_d(data, bound)
        conditions = embedding_conditions(data, d)
    report = Report(
        name="quat-d",
        claims=[ClaimResult(c.name, "pass" if c.holds else "fail", c.detail) for c in conditions],
        extra={"D": disc, "M": index, "p": prime, "d": d, "split_type_at_p": split_type(d, prime).value},
        duration=elapsed[0],
    )
    _emit(report, fmt, timing)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_oracle(max_group: int | None, max_module: int | None, fmt: str = "text", timing: bool = True) -> int:
    """Compare the linear-algebra pipeline with brute force on the corpus."""
    with stopwatch() as elapsed:
        summary = run_oracle(max_group, max_module)
    report = Report(
        name="oracle",
        claims=[
            ClaimResult(o.instance.name, "pass" if o.agreed else "fail", "; ".join(o.mismatches))
            for o in summary.checked
        ],
        extra={
            "instances_checked": len(summary.checked),
            "instances_skipped": len(summary.skipped),
            "agreement": f"{len(summary.checked) - len(summary.failures)}/{len(summary.checked)}",
        },
        duration=elapsed[0],
    )
    _emit(report, fmt, timing)
    minimal = summary.minimal_failure()
    if minimal is not None:
        print_error(f"oracle disagreement on {minimal.instance.name}; minimal failing instance:")
        sys.stdout.write(json.dumps(minimal.instance.to_spec(), sort_keys=True) + "\n")
        return EXIT_FAILURE
    print_success(f"brute force agrees on {len(summary.checked)} instances")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with the usage code on bad input."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    """Build the public CLI grammar without executing a command."""
    parser = _Parser(prog="h1loc", description="First local cohomology of finite matrix groups")
    parser.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level to stderr")
    parser.add_argument("--log-file", help="write a debug log to this file")
    parser.add_argument("--config", help="YAML file with numeric overrides (default: $H1LOC_CONFIG)")

    output = _Parser(add_help=False)
    output.add_argument("--format", choices=("text", "structured"), default="text", dest="fmt")
    output.add_argument("--no-timing", action="store_true", help="omit the duration field")

    subparsers = parser.add_subparsers(dest="command", parser_class=_Parser)

    h1loc_parser = subparsers.add_parser("h1loc", parents=[output], help="H1 and H1_loc of a group spec file")
    h1loc_parser.add_argument("file")

    verify_parser = subparsers.add_parser("verify-paper", parents=[output], help="re-check the bundled constructions")
    verify_parser.add_argument("--scenario", choices=[*Config().scenario_names, "all"], default="all")
    verify_parser.add_argument("--p", type=int)
    verify_parser.add_argument("--n", type=int)

    quat_parser = subparsers.add_parser("quat-d", parents=[output], help="smallest admissible d for (D, M, p)")
    quat_parser.add_argument("--disc", type=int, required=True)
    quat_parser.add_argument("--index", type=int, required=True)
    quat_parser.add_argument("--prime", type=int, required=True)
    quat_parser.add_argument("--bound", type=int)

    oracle_parser = subparsers.add_parser("oracle", parents=[output], help="compare against brute force")
    oracle_parser.add_argument("--max-group", type=int)
    oracle_parser.add_argument("--max-module", type=int)
    return parser


def main(argv: Sequence[str] | None = None):
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)

    setup_logging(logging.DEBUG if args.verbose else logging.INFO, args.log_file, console=args.verbose)
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    try:
        applied = Config.load_overrides(args.config)
    except (OSError, ValueError) as exc:
        print_error(f"configuration: {exc}")
        return EXIT_USAGE
    if applied:
        print_info(f"configuration overrides: {applied}")

    timing = not args.no_timing
    try:
        if args.command == "h1loc":
            return cmd_h1loc(args.file, args.fmt, timing)
        if args.command == "verify-paper":
            return cmd_verify_paper(args.scenario, args.p, args.n, args.fmt, timing)
        if args.command == "quat-d":
            return cmd_quat_d(args.disc, args.index, args.prime, args.bound, args.fmt, timing)
        if args.command == "oracle":
            return cmd_oracle(args.max_group, args.max_module, args.fmt, timing)
    except ValueError as exc:
        print_error(str(exc))
        return EXIT_USAGE
    except (AssertionError, RuntimeError) as exc:
        _cli_logger.exception("internal invariant failure")
        print_error(f"internal error: {exc}")
        return EXIT_FAILURE
    return EXIT_USAGE  # pragma: no cover - argparse restricts commands


if __name__ == "__main__":
    sys.exit(main())
