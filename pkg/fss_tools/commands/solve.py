from pathlib import Path
from typing import List, Optional

import typer

from birkhoff_fss import (
    AnchorConfig,
    AnchorMode,
    Grid,
    ProblemSpecN,
    SystemSpec,
    certify_rho,
    companion_reduce,
    diagonalize,
    embed_nth_order,
    extend_to_origin,
    rho_threshold,
    roots_of_unity,
    sector_ordering,
    solve_general_A0,
    solve_z,
    wronskian,
)
from fss_tools.commands import log
from fss_tools.commands.utils import (
    EXIT_SPEC,
    fail,
    get_settings,
    load,
    output_path,
    reporting_failures,
    rho_option,
)
from fss_tools.core import SOLVE_COLUMNS, SYSTEM_COLUMNS, RunConfig, emit_csv, map_workers, solve_rows, system_rows


def default_modulus(spec: ProblemSpecN) -> float:
    return max(8.0, 4.0 * rho_threshold(spec))


def solve(
    ctx: typer.Context,
    spec_file: Path = typer.Argument(..., help="Path to an n-th order problem specification (YAML or JSON)"),
    sector: int = typer.Option(0, "-s", "--sector", help="Sector index mu (0 .. 2n-1)"),
    rho: Optional[str] = typer.Option(None, help="Spectral parameter as 're,im'"),
    modulus: Optional[float] = typer.Option(
        None, help="|rho| on the sector's mid ray (default: max(8, 4 rho_alpha))"
    ),
    angle_offset: float = typer.Option(0.0, help="Offset of arg(rho) from the mid ray"),
    cells: int = typer.Option(512, "--cells", "--grid", help="Number of grid cells"),
    anchor: AnchorMode = typer.Option(AnchorMode.plain, help="Constants of the integral equation"),
    anchored: bool = typer.Option(False, "--anchored", help="Same as --anchor anchored"),
    branch: List[int] = typer.Option(
        [], "-k", "--k", "--branch", help="Branch to solve (1-based, repeatable; default: all)"
    ),
    force: bool = typer.Option(False, help="Solve below rho_alpha if the measured contraction allows it"),
    extend: bool = typer.Option(False, help="Continue the solutions from alpha down to 0"),
    output: str = typer.Option("-", "-o", "--output", help="CSV output file ('-' for stdout)"),
) -> None:
    """
    Compute the Birkhoff-type fundamental system of an n-th order equation at one rho
    """
    spec = load(spec_file)
    if not isinstance(spec, ProblemSpecN):
        fail(f"'{spec_file.as_posix()}' is a {spec.kind.value} spec; use solve-system", EXIT_SPEC)
    settings = get_settings(ctx)
    with reporting_failures():
        cfg = RunConfig(
            sector=sector,
            rho=rho_option(rho),
            modulus=modulus,
            angle_offset=angle_offset,
            cells=cells,
            anchor=AnchorMode.anchored if anchored else anchor,
            branches=branch,
            workers=settings.workers,
        )
        frame = sector_ordering(roots_of_unity(spec.n), cfg.sector)
        value = cfg.rho if cfg.rho is not None else frame.ray(cfg.modulus or default_modulus(spec), cfg.angle_offset)
        grid = Grid.uniform(spec.alpha, spec.T, cfg.cells)
        anchors = AnchorConfig(cfg.anchor)
        ks = cfg.branch_indices(spec.n)
        log.info("solving %d branches at rho=%s", len(ks), value)
        results = map_workers(lambda k: solve_z(spec, frame, k, value, grid, anchors, force=force), ks, cfg.workers)
        if extend:
            results = [extend_to_origin(r, spec) for r in results]
        if len(results) == spec.n:
            w = wronskian(results)
            log.info("Wronskian ratio at x=%.6g: %s", results[0].x[0], w.ratio)
        emit_csv(SOLVE_COLUMNS, solve_rows(results), output_path(output))


def solve_system(
    ctx: typer.Context,
    spec_file: Path = typer.Argument(..., help="Path to a system or n-th order problem specification"),
    sector: int = typer.Option(0, "-s", "--sector", help="Sector index mu (0 .. 2n-1)"),
    rho: Optional[str] = typer.Option(None, help="Spectral parameter as 're,im'"),
    modulus: Optional[float] = typer.Option(None, help="|rho| on the sector's mid ray (default: certified rho_*)"),
    angle_offset: float = typer.Option(0.0, help="Offset of arg(rho) from the mid ray"),
    cells: int = typer.Option(512, "--cells", "--grid", help="Number of grid cells"),
    order: Optional[int] = typer.Option(
        None, "-N", "--order", help="Expansion order N (default: from the problem file)"
    ),
    branch: List[int] = typer.Option(
        [], "-k", "--k", "--branch", help="Branch to solve (1-based, repeatable; default: all)"
    ),
    force: bool = typer.Option(False, help="Accept kernel norms up to 0.95"),
    output: str = typer.Option("-", "-o", "--output", help="CSV output file ('-' for stdout)"),
) -> None:
    """
    Compute the Birkhoff-type fundamental system of a first-order system (n-th order specs are reduced first)
    """
    spec = load(spec_file)
    settings = get_settings(ctx)
    with reporting_failures():
        if isinstance(spec, SystemSpec):
            system = spec
        else:
            ell = embed_nth_order(spec) if isinstance(spec, ProblemSpecN) else spec
            system = companion_reduce(ell)
            log.info("reduced %s spec to a %dx%d system", spec.kind.value, system.n, system.n)
        cfg = RunConfig(
            sector=sector,
            rho=rho_option(rho),
            modulus=modulus,
            angle_offset=angle_offset,
            cells=cells,
            N=order,
            branches=branch,
            workers=settings.workers,
        )
        N = system.N if cfg.N is None else cfg.N
        if N < 0:
            fail(f"N must be non-negative, got {N}", EXIT_SPEC)
        grid = Grid.uniform(0.0, system.T, cfg.cells)
        _, _, rs = diagonalize(system)
        frame = sector_ordering(rs.roots, cfg.sector)
        if cfg.rho is not None:
            value = cfg.rho
        else:
            mod = cfg.modulus
            if mod is None:
                mod, _ = certify_rho(system, cfg.sector, 1.0, N=N, grid=grid)
            value = frame.ray(mod, cfg.angle_offset)
        ks = cfg.branch_indices(system.n)
        log.info("solving %d system branches at rho=%s (N=%d)", len(ks), value, N)
        results = map_workers(
            lambda k: solve_general_A0(system, cfg.sector, k, value, N=N, grid=grid, force=force), ks, cfg.workers
        )
        emit_csv(SYSTEM_COLUMNS, system_rows(results), output_path(output))
