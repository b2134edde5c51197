import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from birkhoff_fss import AnySpec, FSSError, FSSResult, SpecError, SystemFSSResult, spec_from_dict
from birkhoff_fss.types import AnchorMode
from birkhoff_fss.verify import SweepConfig, SweepReport, map_workers

log = logging.getLogger("core")

SOLVE_COLUMNS = ("x", "k", "nu", "z_re", "z_im", "y_re", "y_im")
SYSTEM_COLUMNS = ("x", "k", "nu", "w_re", "w_im", "y_re", "y_im", "remainder_re", "remainder_im")
COEFF_COLUMNS = ("quantity", "x", "order", "k", "nu", "re", "im")
ROOT_COLUMNS = ("table", "i", "j", "re", "im")
SWEEP_COLUMNS = ("rho_mod", "claim", "error", "slope_partial")


def _fail(msg: str) -> None:
    raise SpecError(msg)


@dataclass
class RunConfig:
    """Options shared by the solving and checking commands"""

    sector: int = 0
    rho: Optional[complex] = None
    modulus: Optional[float] = None
    rho_min: Optional[float] = None
    factor: float = 2.0
    count: int = 6
    angle_offset: float = 0.0
    cells: int = 512
    anchor: AnchorMode = AnchorMode.plain
    N: Optional[int] = None
    branches: List[int] = field(default_factory=list)
    workers: int = 1

    def __post_init__(self) -> None:
        if self.rho is not None and self.modulus is not None:
            raise SpecError("give either rho or modulus, not both")
        if self.modulus is not None and not self.modulus > 0:
            raise SpecError(f"modulus must be positive, got {self.modulus}", "modulus")
        if self.workers < 1:
            raise SpecError(f"worker count must be positive, got {self.workers}", "workers")
        self.sweep_config()

    def sweep_config(self) -> SweepConfig:
        return SweepConfig(
            rho_min=self.rho_min,
            factor=self.factor,
            count=self.count,
            angle_offset=self.angle_offset,
            cells=self.cells,
            workers=self.workers,
        )

    def branch_indices(self, n: int) -> List[int]:
        """0-based branch indices from the 1-based ones given on the command line"""
        if not self.branches:
            return list(range(n))
        for k in self.branches:
            if not 1 <= k <= n:
                raise SpecError(f"branch must be in [1, {n}], got {k}", "branch")
        return sorted({k - 1 for k in self.branches})


def parse_rho(text: str) -> complex:
    """'re,im' or a bare real"""
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise SpecError(f"invalid rho '{text}' (expected 're,im')", "rho")


def load_spec(file: Path, fail: Callable[[str], None] = _fail) -> AnySpec:
    if file.exists():
        if not file.is_file():
            fail(f"Problem specification '{file.as_posix()}' is not a file")
    else:
        fail(f"Problem specification file '{file.as_posix()}' does not exist")
    log.info("Loading problem specification from '%s'", file.as_posix())
    try:
        with file.open() as f:
            cfg = yaml.safe_load(f)
    except Exception as ex:
        fail(f"Failed to load problem specification: {ex}")
    try:
        spec = spec_from_dict(cfg)
    except SpecError as ex:
        fail(f"Invalid problem specification '{file.as_posix()}': {ex}")
    log.debug("loaded spec: '%s'", ", ".join(f"{k}:{v}" for k, v in spec.to_dict().items() if k != "p"))
    return spec


def dump_spec(spec: AnySpec, path: Optional[Path] = None) -> None:
    text = json.dumps(spec.to_dict(), indent=2)
    if path is None:
        sys.stdout.write(text + "\n")
        return
    log.info("Writing problem specification to '%s'", path.as_posix())
    path.write_text(text + "\n")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def split_complex(value: complex) -> Tuple[float, float]:
    c = complex(value)
    return c.real, c.imag


def emit_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], path: Optional[Path] = None) -> int:
    """
    Write rows under the given header, floats with 17 significant digits. Nothing is written for an empty
    result set. Returns the number of rows.
    """
    data = [[_cell(v) for v in row] for row in rows]
    if not data:
        raise FSSError("no results to write")
    for i, row in enumerate(data):
        if len(row) != len(columns):
            raise FSSError(f"row {i} has {len(row)} values for {len(columns)} columns")
    if path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(data)
    else:
        log.info("Writing %d rows to '%s'", len(data), path.as_posix())
        with path.open("w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows(data)
    return len(data)


def solve_rows(results: Sequence[FSSResult]) -> List[Tuple[Any, ...]]:
    """Rows of SOLVE_COLUMNS for n-th order branch results (k printed 1-based)"""
    rows = []
    for r in results:
        y = r.y
        for nu in range(r.n):
            for i, x in enumerate(r.x):
                rows.append((x, r.k + 1, nu, *split_complex(r.z[nu, i]), *split_complex(y[nu, i])))
    return rows


def system_rows(results: Sequence[SystemFSSResult]) -> List[Tuple[Any, ...]]:
    rows = []
    for r in results:
        Y, rem = r.Y, r.remainder
        for nu in range(r.W.shape[1]):
            for i, x in enumerate(r.x):
                rows.append(
                    (
                        x,
                        r.k + 1,
                        nu,
                        *split_complex(r.W[i, nu]),
                        *split_complex(Y[i, nu]),
                        *split_complex(rem[i, nu]),
                    )
                )
    return rows


def sweep_rows(reports: Sequence[SweepReport]) -> List[Tuple[Any, ...]]:
    rows = []
    for rep in reports:
        for rho_mod, error, slope in zip(rep.rho_moduli, rep.errors, rep.partial_slopes()):
            rows.append((rho_mod, rep.claim, error, None if np.isnan(slope) else slope))
    return rows
