from .asymptotic_coeffs import ExpansionTables, beta_table, g_table, param_coeffs
from .birkhoff_nth import (
    AnchorConfig,
    FSSResult,
    assemble_fss,
    extend_to_origin,
    rho_threshold,
    solve_branches,
    solve_z,
    wronskian,
)
from .birkhoff_system import SystemFSSResult, certify_rho, solve_general_A0, solve_system_fss
from .errors import *
from .funcspace import Grid, PiecewisePoly
from .problems import AnySpec, ParamSpec, ProblemSpecN, SystemSpec, spec_from_dict
from .reduction import companion_reduce, diagonalize, embed_nth_order
from .spectra import RootSystem, SectorFrame, roots_of_unity, sector_ordering
from .types import AnchorMode, SpecKind, SweepDirection
