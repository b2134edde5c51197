from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Sequence

import typer

from birkhoff_fss import (
    AnySpec,
    ConvergenceError,
    FSSError,
    RhoThresholdError,
    SectorError,
    SingularMatrixError,
    SpecError,
    VerificationError,
)
from birkhoff_fss.verify import ClaimResult
from fss_tools.commands import log
from fss_tools.core import load_spec, parse_rho

EXIT_OTHER = 1
EXIT_SPEC = 2
EXIT_SOLVER = 3
EXIT_VERIFICATION = 4


@dataclass
class Settings:
    workers: int = 1


def fail(msg: str, code: int = EXIT_OTHER) -> None:
    typer.echo(f"FAILED: {msg}", err=True)
    raise typer.Exit(code)


def spec_fail(msg: str) -> None:
    fail(msg, EXIT_SPEC)


def exit_code(exc: FSSError) -> int:
    if isinstance(exc, (SpecError, SectorError)):
        return EXIT_SPEC
    if isinstance(exc, (ConvergenceError, RhoThresholdError, SingularMatrixError)):
        return EXIT_SOLVER
    if isinstance(exc, VerificationError):
        return EXIT_VERIFICATION
    return EXIT_OTHER


@contextmanager
def reporting_failures() -> Iterator[None]:
    """Turn library and I/O errors into 'FAILED: ...' and the matching exit code"""
    try:
        yield
    except FSSError as exc:
        log.debug("%s: %s", type(exc).__name__, exc)
        fail(str(exc), exit_code(exc))
    except OSError as exc:
        fail(f"I/O error: {exc}", EXIT_OTHER)


def get_settings(ctx: typer.Context) -> Settings:
    settings = ctx.find_object(Settings)
    if settings is None:
        return Settings()
    return settings


def load(spec_file: Path) -> AnySpec:
    return load_spec(spec_file, spec_fail)


def rho_option(value: Optional[str]) -> Optional[complex]:
    if value is None:
        return None
    try:
        return parse_rho(value)
    except SpecError as exc:
        fail(str(exc), EXIT_SPEC)
    return None


def output_path(value: str) -> Optional[Path]:
    return None if value in ("", "-") else Path(value)


def print_claims(results: Sequence[ClaimResult]) -> List[ClaimResult]:
    width = max(len(r.claim) for r in results)
    failed = []
    for r in results:
        verdict = "PASS" if r.passed else "FAIL"
        typer.echo(f"{r.claim:<{width}}  {verdict}  {r.detail}")
        if not r.passed:
            failed.append(r)
    typer.echo(f"{len(results) - len(failed)}/{len(results)} claims passed")
    return failed
