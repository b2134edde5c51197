from pathlib import Path
from typing import Any, List, Optional, Tuple

import numpy as np
import typer

from birkhoff_fss import (
    ParamSpec,
    ProblemSpecN,
    SystemSpec,
    beta_table,
    companion_reduce,
    diagonalize,
    embed_nth_order,
    g_table,
    param_coeffs,
    sector_ordering,
)
from fss_tools.commands import log
from fss_tools.commands.utils import EXIT_SPEC, fail, load, output_path, reporting_failures
from fss_tools.core import COEFF_COLUMNS, ROOT_COLUMNS, dump_spec, emit_csv, split_complex

Row = Tuple[Any, ...]


def roots(
    spec_file: Path = typer.Argument(..., help="Path to problem specification (YAML or JSON)"),
    sector: int = typer.Option(0, "-s", "--sector", help="Sector index mu (0 .. 2n-1)"),
    output: str = typer.Option("-", "-o", "--output", help="CSV output file ('-' for stdout)"),
) -> None:
    """
    Print characteristic roots, F'(R_k), eigenvectors and the ordering on the sector ray
    """
    spec = load(spec_file)
    with reporting_failures():
        rs = spec.roots()
        frame = sector_ordering(rs.roots, sector)
        rows: List[Row] = [("root", k + 1, None, *split_complex(r)) for k, r in enumerate(rs.roots)]
        if rs.derivative_values is not None:
            rows += [("derivative", k + 1, None, *split_complex(v)) for k, v in enumerate(rs.derivative_values)]
        rows += [("sector", i + 1, j + 1, *split_complex(rs.roots[j])) for i, j in enumerate(frame.ordering)]
        if rs.eigenvectors is not None:
            n = rs.n
            rows += [
                ("eigenvector", i + 1, j + 1, *split_complex(rs.eigenvectors[i, j])) for i in range(n) for j in range(n)
            ]
        log.info("sector %d: ray angle %.6g", sector, frame.ray_angle)
        emit_csv(ROOT_COLUMNS, rows, output_path(output))


def _nth_rows(spec: ProblemSpecN, levels: Optional[int], x: np.ndarray) -> List[Row]:
    tables = beta_table(spec, levels)
    rows: List[Row] = []
    for s, beta in enumerate(tables.beta):
        rows += [("beta", xi, s, None, None, *split_complex(v)) for xi, v in zip(x, beta.eval(x))]
    for s, per_nu in enumerate(tables.beta_nu):
        for nu, f in enumerate(per_nu):
            rows += [("beta_nu", xi, s, None, nu, *split_complex(v)) for xi, v in zip(x, f.eval(x))]
    if tables.beta2_anchored is not None:
        rows += [
            ("beta2_anchored", xi, 2, None, None, *split_complex(v))
            for xi, v in zip(x, tables.beta2_anchored.eval(x))
        ]
    return rows


def _system_rows(spec: SystemSpec, levels: Optional[int], x: np.ndarray) -> List[Row]:
    diag, omega, _ = diagonalize(spec)
    tables = g_table(diag, levels)
    rows: List[Row] = []
    for k in range(diag.n):
        for mu in range(tables.levels + 1):
            # g in the input coordinates: omega g~
            values = tables.g_values(k, mu, x) @ omega.T
            for i, xi in enumerate(x):
                rows += [("g", xi, mu, k + 1, b, *split_complex(values[i, b])) for b in range(diag.n)]
    return rows


def _param_rows(ell: ParamSpec, levels: Optional[int], x: np.ndarray) -> List[Row]:
    tables = param_coeffs(ell, levels)
    rows: List[Row] = []
    for k in range(ell.n):
        rows += [("omega", xi, None, k + 1, None, *split_complex(v)) for xi, v in zip(x, tables.omega[k].eval(x))]
        for mu in range(tables.levels + 1):
            for nu in range(ell.n):
                rows += [
                    ("G", xi, mu, k + 1, nu, *split_complex(v)) for xi, v in zip(x, tables.G_values(k, mu, nu, x))
                ]
    return rows


def coeffs(
    spec_file: Path = typer.Argument(..., help="Path to problem specification (YAML or JSON)"),
    levels: Optional[int] = typer.Option(
        None, "-l", "--levels", help="Expansion levels (default: N+1 for n-th order, N otherwise)"
    ),
    points: int = typer.Option(64, help="Number of uniform sampling intervals on [0, T]"),
    output: str = typer.Option("-", "-o", "--output", help="CSV output file ('-' for stdout)"),
) -> None:
    """
    Tabulate asymptotic expansion coefficients (beta_s, g_(mu)k or omega_k and G_(mu)nu k)
    """
    if points < 1:
        fail(f"points must be positive, got {points}", EXIT_SPEC)
    spec = load(spec_file)
    with reporting_failures():
        x = np.linspace(0.0, spec.T, points + 1)
        if isinstance(spec, ProblemSpecN):
            rows = _nth_rows(spec, levels, x)
        elif isinstance(spec, SystemSpec):
            rows = _system_rows(spec, levels, x)
        else:
            rows = _param_rows(spec, levels, x)
        emit_csv(COEFF_COLUMNS, rows, output_path(output))


def reduce_spec(
    spec_file: Path = typer.Argument(..., help="Path to an n-th order problem specification (YAML or JSON)"),
    output: str = typer.Option("-", "-o", "--output", help="JSON output file ('-' for stdout)"),
) -> None:
    """
    Rewrite an n-th order equation as the equivalent first-order system
    """
    spec = load(spec_file)
    with reporting_failures():
        if isinstance(spec, SystemSpec):
            log.info("'%s' is already a system", spec_file.as_posix())
            system = spec
        else:
            ell = embed_nth_order(spec) if isinstance(spec, ProblemSpecN) else spec
            system = companion_reduce(ell)
        dump_spec(system, output_path(output))
