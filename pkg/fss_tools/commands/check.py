from enum import Enum
from pathlib import Path
from typing import List, Optional

import typer

from birkhoff_fss import ParamSpec, ProblemSpecN, companion_reduce
from birkhoff_fss.verify import (
    SweepReport,
    first_order_sweep,
    run_suite,
    sharpened_sweep,
    system_remainder_sweep,
    wronskian_sweep,
)
from fss_tools.commands import log
from fss_tools.commands.utils import (
    EXIT_SPEC,
    EXIT_VERIFICATION,
    fail,
    get_settings,
    load,
    output_path,
    print_claims,
    reporting_failures,
)
from fss_tools.core import SWEEP_COLUMNS, RunConfig, emit_csv, sweep_rows


class SweepClaim(Enum):
    first_order = "first_order"
    sharpened = "sharpened"
    wronskian = "wronskian"
    system_remainder = "system_remainder"


NTH_ORDER_CLAIMS = (SweepClaim.first_order, SweepClaim.sharpened, SweepClaim.wronskian)


def sweep(
    ctx: typer.Context,
    spec_file: Path = typer.Argument(..., help="Path to problem specification (YAML or JSON)"),
    claim: List[SweepClaim] = typer.Option(
        [], "-c", "--claim", help="Remainder to sweep (repeatable; default: first_order or system_remainder)"
    ),
    sector: int = typer.Option(0, "-s", "--sector", help="Sector index mu (0 .. 2n-1)"),
    rho_min: Optional[float] = typer.Option(None, help="First |rho| of the sweep (default: per claim)"),
    factor: float = typer.Option(2.0, help="Ratio of consecutive |rho|"),
    count: int = typer.Option(6, help="Number of sweep points"),
    angle_offset: float = typer.Option(0.0, help="Offset of arg(rho) from the mid ray"),
    cells: int = typer.Option(512, help="Number of grid cells"),
    output: str = typer.Option("-", "-o", "--output", help="CSV output file ('-' for stdout)"),
) -> None:
    """
    Tabulate remainder norms over a dyadic |rho| sweep on the sector's ray
    """
    spec = load(spec_file)
    settings = get_settings(ctx)
    with reporting_failures():
        cfg = RunConfig(
            sector=sector,
            rho_min=rho_min,
            factor=factor,
            count=count,
            angle_offset=angle_offset,
            cells=cells,
            workers=settings.workers,
        )
        sweep_cfg = cfg.sweep_config()
        nth = isinstance(spec, ProblemSpecN)
        claims = claim or [SweepClaim.first_order if nth else SweepClaim.system_remainder]
        reports: List[SweepReport] = []
        for c in claims:
            if nth != (c in NTH_ORDER_CLAIMS):
                fail(f"claim {c.value} does not apply to a {spec.kind.value} spec", EXIT_SPEC)
            log.info("sweeping %s", c.value)
            if c == SweepClaim.first_order:
                reports.append(first_order_sweep(spec, cfg.sector, sweep_cfg))
            elif c == SweepClaim.sharpened:
                reports.append(sharpened_sweep(spec, cfg.sector, sweep_cfg))
            elif c == SweepClaim.wronskian:
                reports.append(wronskian_sweep(spec, cfg.sector, sweep_cfg))
            else:
                system = companion_reduce(spec) if isinstance(spec, ParamSpec) else spec
                result = system_remainder_sweep(system, cfg.sector, sweep_cfg)
                if result.report is not None:
                    reports.append(result.report)
        emit_csv(SWEEP_COLUMNS, sweep_rows(reports), output_path(output))


def verify(
    ctx: typer.Context,
    spec_file: Path = typer.Argument(..., help="Path to problem specification (YAML or JSON)"),
    sector: int = typer.Option(0, "-s", "--sector", help="Sector index mu (0 .. 2n-1)"),
    rho_min: Optional[float] = typer.Option(None, help="First |rho| of the sweeps (default: per claim)"),
    factor: float = typer.Option(2.0, help="Ratio of consecutive |rho|"),
    count: int = typer.Option(6, help="Number of sweep points"),
    cells: int = typer.Option(512, help="Number of grid cells"),
    sweep_out: str = typer.Option("", "--csv", help="CSV file for the sweep data"),
) -> None:
    """
    Check every asymptotic claim that applies to the problem and print a pass/fail table
    """
    spec = load(spec_file)
    settings = get_settings(ctx)
    with reporting_failures():
        cfg = RunConfig(
            sector=sector, rho_min=rho_min, factor=factor, count=count, cells=cells, workers=settings.workers
        )
        results = run_suite(spec, cfg.sector, cfg.sweep_config())
        failed = print_claims(results)
        reports = [r.report for r in results if r.report is not None]
        path = output_path(sweep_out)
        if path is not None and reports:
            emit_csv(SWEEP_COLUMNS, sweep_rows(reports), path)
    if failed:
        names = ", ".join(r.claim for r in failed)
        fail(f"{len(failed)} of {len(results)} claims failed: {names}", EXIT_VERIFICATION)
