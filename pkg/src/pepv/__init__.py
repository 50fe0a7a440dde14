"""Contour-integration eigensolver for polynomial eigenvalue problems with
eigenvector nonlinearities.

Eigenpairs (x, z) of T(x, z) x = 0 with z inside a prescribed contour are
found by tracking the solution paths of randomly shifted square systems
around the contour, summing their coordinates into trace samples, and
extracting the poles of the resulting rational matrix from trapezoidal
moment matrices via a block Hankel pencil.
"""

__version__ = "0.1.0"

from .contour import Contour, NodeGrid, circle, contour_from_config, ellipse, make_grid
from .counts import CountReport, dense_counts, pyramid_count, repv_count
from .extraction import (
    Eigenpair,
    HankelPair,
    extract,
    extract_detailed,
    hankel_pair,
    normalize_eigenvector,
    refine_eigenpair,
    residual,
)
from .beyn import beyn_solve, beyn_solve_detailed
from .poly import (
    PolyMatrixT,
    ShiftVector,
    SquareSystem,
    XTerm,
    ZPoly,
    assemble_pepv,
)
from .problems import load_problem, parse_problem, save_problem
from .repv import REPvProblem, lift, solve_repv
from .solver import SolveConfig, SolveReport, solve
from .trace import (
    MomentSet,
    TraceColumn,
    USamples,
    columns_to_samples,
    evaluate_column,
    make_shifts,
    moments,
    samples_from_function,
)
from .tracker import (
    SolutionSet,
    TrackOptions,
    continue_node,
    newton_refine,
    solve_start,
    toric_policy,
)

__all__ = [
    "Contour", "NodeGrid", "circle", "ellipse", "contour_from_config",
    "make_grid",
    "CountReport", "dense_counts", "pyramid_count", "repv_count",
    "Eigenpair", "HankelPair", "extract", "extract_detailed", "hankel_pair",
    "normalize_eigenvector", "refine_eigenpair", "residual",
    "beyn_solve", "beyn_solve_detailed",
    "PolyMatrixT", "ShiftVector", "SquareSystem", "XTerm", "ZPoly",
    "assemble_pepv",
    "load_problem", "parse_problem", "save_problem",
    "REPvProblem", "lift", "solve_repv",
    "SolveConfig", "SolveReport", "solve",
    "MomentSet", "TraceColumn", "USamples", "columns_to_samples",
    "evaluate_column", "make_shifts", "moments", "samples_from_function",
    "SolutionSet", "TrackOptions", "continue_node", "newton_refine",
    "solve_start", "toric_policy",
    "__version__",
]
