"""Trace columns along the contour and trapezoidal moment matrices.

Each shift vector a^(j) turns the eigenproblem into a square system whose
solution coordinates, summed over all tracked paths, sample the j-th column
of the rational matrix U(z) at the quadrature nodes.  U is never formed
symbolically; only its node samples exist.  Moments are plain trapezoidal
sums, optionally computed in the centered/scaled variable
w = (z - center)/scale to keep the Hankel matrices well conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contour import NodeGrid
from .errors import MixedDegrees, TrackingFailed, ValidationError
from .poly import PolyMatrixT, ShiftVector, SquareSystem, XTerm, assemble_pepv, monomial_exponents
from .rng import stream
from .tracker import SolutionSet, TrackOptions, continue_node, solve_start


def make_shifts(T: PolyMatrixT, style: str = "dense", seed: int = 0):
    """Draw the n shift vectors a^(1)..a^(n) for an n x n problem.

    dense: every monomial of degree d_i with a unit-modulus coefficient.
    monomial: one shared exponent of degree d per vector, unit-modulus
    coefficients; requires equal row degrees.

    Column seeds derive from the master seed, so adding consumers elsewhere
    never changes the draws here.
    """
    if style not in ("dense", "monomial"):
        raise ValidationError(f"unknown shift style {style!r}")
    n = T.n
    degrees = T.row_degrees
    if style == "monomial" and len(set(degrees)) > 1:
        raise MixedDegrees(degrees)
    shifts = []
    for j in range(n):
        rng = stream(seed, "shift", j)
        polys = []
        if style == "monomial":
            choices = monomial_exponents(n, degrees[0])
            beta = choices[rng.integer(len(choices))]
            for _ in range(n):
                polys.append([XTerm(beta, rng.unit_complex())])
        else:
            for i in range(n):
                polys.append([
                    XTerm(exp, rng.unit_complex())
                    for exp in monomial_exponents(n, degrees[i])
                ])
        shifts.append(ShiftVector(polys, style=style,
                                  seed=stream(seed, "column", j).next_u64()))
    return shifts


@dataclass
class TraceColumn:
    """Per-node trace vectors for one shift column."""

    shift_index: int
    values: np.ndarray  # (N, n) complex
    path_count: int
    start_info: dict = field(default_factory=dict)
    node_diagnostics: list = field(default_factory=list)
    final_set: SolutionSet | None = None


def column_from_system(system: SquareSystem, grid: NodeGrid,
                       opts: TrackOptions | None = None, seed: int = 0,
                       shift_index: int = 0, coords=None, keep=None,
                       expected_delta=None, node_check=None) -> TraceColumn:
    """Track one shifted system around the grid and sum coordinates per node.

    ``coords`` restricts the summed coordinates (the lifted rational solver
    sums only the eigenvector block).  ``node_check`` is an optional hook
    called with every per-node solution set (degeneracy monitoring).
    Tracker errors propagate with column and node context attached.
    """
    opts = opts or TrackOptions()
    try:
        sols = solve_start(system, grid, seed=seed, opts=opts, keep=keep,
                           expected_delta=expected_delta)
    except TrackingFailed as exc:
        exc.column = shift_index
        raise
    if node_check is not None:
        node_check(sols)
    nvals = len(coords) if coords is not None else system.nvars
    values = np.zeros((grid.N, nvals), dtype=np.complex128)
    values[0] = sols.trace_vector(coords)
    jump_flags = []
    for node in range(1, grid.N):
        try:
            sols = continue_node(system, sols, grid, node, opts)
        except TrackingFailed as exc:
            exc.column = shift_index
            raise
        if node_check is not None:
            node_check(sols)
        values[node] = sols.trace_vector(coords)
        jump_flags.extend(
            d.path_id for d in sols.diagnostics if d.status == "jumped")
    return TraceColumn(shift_index=shift_index, values=values,
                       path_count=sols.count, start_info=sols.start_info,
                       node_diagnostics=sorted(set(jump_flags)),
                       final_set=sols)


def evaluate_column(T: PolyMatrixT, shift: ShiftVector, grid: NodeGrid,
                    opts: TrackOptions | None = None, shift_index: int = 0,
                    expected_delta=None) -> TraceColumn:
    """Assemble T(x,z)x - a and evaluate its trace column on the grid."""
    system = assemble_pepv(T, shift)
    return column_from_system(system, grid, opts=opts, seed=shift.seed,
                              shift_index=shift_index,
                              expected_delta=expected_delta)


@dataclass
class USamples:
    """Node samples of the n x q matrix whose poles carry the eigenvalues."""

    matrices: np.ndarray  # (N, n, q) complex

    @property
    def N(self):
        return self.matrices.shape[0]


def columns_to_samples(columns) -> USamples:
    """Stack trace columns (ordered by shift index) into U(phi(t_l)) samples."""
    ordered = sorted(columns, key=lambda c: c.shift_index)
    mats = np.stack([c.values for c in ordered], axis=2)
    return USamples(matrices=mats)


def samples_from_function(fun, grid: NodeGrid) -> USamples:
    """Sample an explicit matrix function on the grid (tests and oracles)."""
    mats = np.stack([np.atleast_2d(np.asarray(fun(z), dtype=np.complex128))
                     for z in grid.phi])
    return USamples(matrices=mats)


@dataclass
class MomentSet:
    """Trapezoidal moments A_0..A_{2M-1}, optionally in scaled coordinates."""

    matrices: np.ndarray  # (2M, n, q)
    N: int
    M: int
    center: complex = 0.0 + 0.0j
    scale: float = 1.0

    def norms(self):
        return [float(np.max(np.abs(m))) for m in self.matrices]


def moments(U: USamples, grid: NodeGrid, M: int, center=0.0,
            scale=1.0) -> MomentSet:
    """A_k = (1 / (i N)) sum_l U(phi_l) phi'_l w_l^k for k < 2M.

    With the default center/scale this is the plain trapezoidal moment
    formula; nonzero center and scale compute moments of the affinely
    transformed variable w = (z - center)/scale (eigenvalues are mapped back
    after extraction).  Summation is in ascending node order.
    """
    if M < 1:
        raise ValidationError("need at least one Hankel block (M >= 1)")
    if U.N != grid.N:
        raise ValidationError("sample count does not match the grid")
    w = (grid.phi - center) / scale
    dw = grid.dphi / scale
    mats = np.empty((2 * M,) + U.matrices.shape[1:], dtype=np.complex128)
    wk = np.ones_like(w)
    for k in range(2 * M):
        weights = dw * wk / (1j * grid.N)
        mats[k] = np.tensordot(weights, U.matrices, axes=1)
        wk = wk * w
    return MomentSet(matrices=mats, N=grid.N, M=M, center=complex(center),
                     scale=float(scale))
