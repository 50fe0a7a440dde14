"""Path tracking: start solutions and node-to-node continuation.

Start solutions at the first quadrature node come from a total-degree
homotopy H(x, s) = gamma (1-s) G(x) + s F(x, z0) with start system
G_i = x_i^{D_i} - 1 and a random unit-modulus gamma.  All Bezout paths are
tracked; endpoints that diverge, stall on singular limits, or leave the
algebraic torus are discarded and counted.

Continuation between nodes integrates the implicit-function ODE
J_F dx/dt = -dF/dt with a first-order Euler predictor and Newton correction
at each substep target.  Steps halve on corrector failure and double after
five consecutive successes, clamped to the node interval.  Endpoint
collisions are detected at every node barrier and re-tracked once before
being flagged.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .contour import NodeGrid
from .errors import (
    CountMismatchWarning,
    NoConvergence,
    PathJumpWarning,
    Singular,
    SingularJacobian,
    StartSystemDegenerate,
    TrackingFailed,
)
from .linalg import lu_solve
from .poly import SquareSystem
from .rng import stream


def _norm(v) -> float:
    return float(np.sqrt(np.vdot(v, v).real))


@dataclass(frozen=True)
class TrackOptions:
    newton_tol: float = 1e-12
    newton_maxit: int = 6
    max_substeps: int = 2**14
    divergence_norm: float = 1e8
    min_step: float = 1e-10
    jump_tol: float = 1e-8

    def __post_init__(self):
        if min(self.newton_tol, self.max_substeps, self.divergence_norm,
               self.min_step, self.jump_tol) <= 0:
            raise ValueError("track options must be positive")
        if self.newton_maxit < 2:
            raise ValueError("newton_maxit must be at least 2")


@dataclass
class PathDiagnostics:
    path_id: int
    start_index: int
    substeps: int
    newton_residual: float
    status: str  # tracked | diverged | jumped | underflow


@dataclass
class SolutionSet:
    """Tracked points at one node, ordered by stable path id."""

    points: np.ndarray
    path_ids: tuple
    node_index: int
    diagnostics: list
    start_info: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def trace_vector(self, coords=None) -> np.ndarray:
        """Sum of the tracked coordinates; the per-node trace sample."""
        pts = self.points if coords is None else self.points[:, coords]
        return pts.sum(axis=0)


# ---------------------------------------------------------------------------
# Track families: a frozen snapshot exposes residual_vector / jacobian /
# tangent_rhs, matching the FrozenZ interface of SquareSystem.


class ContourTrack:
    """F(x, t) = S(x, phi(t)) along the contour parameter t."""

    def __init__(self, system: SquareSystem, grid: NodeGrid):
        self.system = system
        self.contour = grid.contour

    def make(self, t: float):
        return _ContourFrozen(self.system.at_z(self.contour.phi(t)),
                              self.contour.dphi(t))


class _ContourFrozen:
    __slots__ = ("fz", "dphi")

    def __init__(self, fz, dphi):
        self.fz = fz
        self.dphi = dphi

    def residual_vector(self, x):
        return self.fz.residual_vector(x)

    def jacobian(self, x):
        return self.fz.jacobian(x)

    def tangent_rhs(self, x):
        return self.fz.z_derivative(x) * self.dphi


class HomotopyTrack:
    """H(x, s) = gamma (1-s) G(x) + s F(x, z0), tracked over s in [0, 1]."""

    def __init__(self, system: SquareSystem, z0: complex, gamma: complex):
        self.fz = system.at_z(z0)
        self.gamma = complex(gamma)
        self.degrees = np.array(system.total_degrees, dtype=np.int64)

    def start_points(self) -> np.ndarray:
        """All Bezout-count combinations of roots of G_i = x_i^{D_i} - 1."""
        axes = [np.exp(2j * np.pi * np.arange(d) / d) for d in self.degrees]
        combos = list(itertools.product(*axes))
        return np.array(combos, dtype=np.complex128)

    def make(self, s: float):
        return _HomotopyFrozen(self, s)


class _HomotopyFrozen:
    __slots__ = ("track", "s")

    def __init__(self, track, s):
        self.track = track
        self.s = float(s)

    def _start_system(self, x):
        return x ** self.track.degrees - 1.0

    def residual_vector(self, x):
        t = self.track
        return (t.gamma * (1.0 - self.s)) * self._start_system(x) \
            + self.s * t.fz.residual_vector(x)

    def jacobian(self, x):
        t = self.track
        J = self.s * t.fz.jacobian(x)
        diag = (t.gamma * (1.0 - self.s)) * t.degrees * x ** (t.degrees - 1)
        J[np.arange(len(x)), np.arange(len(x))] += diag
        return J

    def tangent_rhs(self, x):
        t = self.track
        return t.fz.residual_vector(x) - t.gamma * self._start_system(x)


# ---------------------------------------------------------------------------
# Newton correction


def _newton(frozen, x, tol, maxit):
    """Newton iteration at a frozen target.  Returns (x, residual, converged)."""
    res = _norm(frozen.residual_vector(x))
    if res <= tol * (1.0 + _norm(x)):
        return x, res, True
    for _ in range(maxit):
        J = frozen.jacobian(x)
        try:
            dx = lu_solve(J, frozen.residual_vector(x))
        except Singular:
            return x, res, False
        x = x - dx
        res = _norm(frozen.residual_vector(x))
        if not np.isfinite(res):
            return x, np.inf, False
        if res <= tol * (1.0 + _norm(x)):
            return x, res, True
    return x, res, False


def newton_refine(system: SquareSystem, x, z, tol=1e-12, maxit=25):
    """Refine a root of F(x, z) = 0 at fixed z by plain Newton iteration."""
    frozen = system.at_z(z)
    x = np.asarray(x, dtype=np.complex128)
    res = _norm(frozen.residual_vector(x))
    for _ in range(maxit):
        if res <= tol * (1.0 + _norm(x)):
            return x
        J = frozen.jacobian(x)
        try:
            dx = lu_solve(J, frozen.residual_vector(x))
        except Singular:
            raise SingularJacobian() from None
        x = x - dx
        res = _norm(frozen.residual_vector(x))
    if res <= tol * (1.0 + _norm(x)):
        return x
    raise NoConvergence("newton_refine", maxit, res)


# ---------------------------------------------------------------------------
# Adaptive predictor-corrector over one parameter interval


def _track_interval(family, x, t0, t1, opts: TrackOptions, h0=None):
    """Advance one path from t0 to t1.  Returns (x, status, substeps, res)."""
    length = t1 - t0
    if length <= 0:
        raise ValueError("empty tracking interval")
    t = t0
    h = min(h0, length) if h0 else length
    substeps = 0
    consecutive = 0
    frozen_now = family.make(t)
    res = np.nan
    end_guard = 1e-14 * max(1.0, abs(t1))
    while t < t1 - end_guard:
        if substeps >= opts.max_substeps:
            return x, "underflow", substeps, res
        substeps += 1
        h = min(h, t1 - t)
        t_next = t1 if (t1 - t) - h <= end_guard else t + h
        # Euler predictor on J dx/dt = -dF/dt.
        pred_disp = None
        try:
            J = frozen_now.jacobian(x)
            dxdt = lu_solve(J, frozen_now.tangent_rhs(x))
            xp = x - dxdt * (t_next - t)
            pred_disp = _norm(dxdt) * (t_next - t)
            predictor_ok = np.isfinite(xp.view(np.float64)).all()
            if not predictor_ok:
                xp, pred_disp = x, None
                predictor_ok = True
        except Singular:
            xp = x  # corrector from the old point; no displacement guard
            predictor_ok = True
        frozen_next = family.make(t_next)
        xc, res, ok = _newton(frozen_next, xp, opts.newton_tol,
                              opts.newton_maxit)
        if ok and pred_disp is not None:
            # Anti-jump guard: a correction much larger than the predictor
            # displacement means Newton likely converged to a different path.
            correction = _norm(xc - xp)
            if correction > 0.5 * pred_disp \
                    + 1e3 * opts.newton_tol * (1.0 + _norm(xc)):
                ok = False
        if ok:
            x = xc
            t = t_next
            frozen_now = frozen_next
            consecutive += 1
            if _norm(x) > opts.divergence_norm:
                return x, "diverged", substeps, res
            if consecutive >= 5:
                h = min(2.0 * h, length)
                consecutive = 0
        else:
            h *= 0.5
            consecutive = 0
            if h < opts.min_step:
                return x, "underflow", substeps, res
    return x, "tracked", substeps, res


# ---------------------------------------------------------------------------
# Retain policies for start-solution endpoints


def toric_policy(rel_tol=1e-8, origin_tol=1e-12):
    """Keep endpoints whose coordinate ratios are bounded away from zero.

    An endpoint that collapsed onto the exact origin is retained as well: for
    homogeneous shifted systems it is a regular affine root and contributes
    zero to every trace sum.
    """

    def keep(x):
        mags = np.abs(x)
        top = float(mags.max())
        if top <= origin_tol:
            return True
        return float(mags.min()) / top > rel_tol

    return keep


def _run_start_homotopy(system, z0, gamma, opts, keep):
    """Track all Bezout paths for one gamma.  Returns (deduped, counts,
    collided) where ``collided`` flags an unresolved endpoint collision."""
    fam = HomotopyTrack(system, z0, gamma)
    roots = fam.start_points()

    # Sanity check of the start system itself: its roots must already satisfy
    # H(x, 0) = 0 to Newton accuracy.
    s0 = fam.make(0.0)
    bad = sum(
        0 if _newton(s0, r.copy(), opts.newton_tol, opts.newton_maxit)[2] else 1
        for r in roots
    )
    if bad > max(1, len(roots) // 100):
        raise StartSystemDegenerate(bad, len(roots))

    target = fam.make(1.0)
    counts = {"diverged": 0, "underflow": 0, "nontoric": 0,
              "bezout_paths": len(roots)}
    retained = []
    for b_idx, x0 in enumerate(roots):
        x, status, nsub, res = _track_interval(fam, x0.copy(), 0.0, 1.0, opts,
                                               h0=0.25)
        if status != "tracked":
            counts[status] += 1
            continue
        # Sharpen the endpoint: two extra Newton steps at the exact target so
        # regular roots (including the origin) land at machine precision.
        x_sharp, res_sharp, _ = _newton(target, x, opts.newton_tol * 1e-3, 2)
        if res_sharp <= res or res_sharp <= opts.newton_tol * (1 + _norm(x_sharp)):
            x, res = x_sharp, res_sharp
        if not np.isfinite(x.view(np.float64)).all() \
                or _norm(x) > opts.divergence_norm:
            counts["diverged"] += 1
            continue
        if not keep(x):
            counts["nontoric"] += 1
            continue
        retained.append((b_idx, x, nsub, res))

    # Duplicate endpoints mean two paths merged; re-track them gently once.
    deduped = []
    seen = []
    collided = False
    fine = replace(opts, max_substeps=opts.max_substeps * 4)
    for b_idx, x, nsub, res in retained:
        clash = any(_norm(x - y) < opts.jump_tol for y in seen)
        if clash:
            x2, status, nsub2, res2 = _track_interval(
                fam, roots[b_idx].copy(), 0.0, 1.0, fine, h0=0.25 / 16)
            if status == "tracked" and keep(x2) and not any(
                    _norm(x2 - y) < opts.jump_tol for y in seen):
                x, nsub, res = x2, nsub + nsub2, res2
            else:
                collided = True
                counts["nontoric"] += 1
                continue
        seen.append(x)
        deduped.append((b_idx, x, nsub, res))
    return deduped, counts, collided


def solve_start(system: SquareSystem, grid: NodeGrid, seed: int,
                opts: TrackOptions | None = None, node_index: int = 0,
                expected_delta=None, keep=None) -> SolutionSet:
    """Solve F(x, t_node) = 0 by a total-degree homotopy and filter endpoints.

    All prod(D_i) Bezout paths are tracked from the roots of the start system;
    finite endpoints passing the retain policy become the tracked solution
    set, ordered by start-root index.  Divergent, stalled and filtered
    endpoints are discarded and counted in ``start_info``.

    An unresolved endpoint collision means two paths merged and a true
    solution was probably lost, which would silently corrupt every trace sum.
    Since collisions are an artifact of the path geometry for one gamma, the
    start is retried with fresh gamma draws before giving up.
    """
    opts = opts or TrackOptions()
    keep = keep or toric_policy(origin_tol=1e-10)
    z0 = grid.phi[node_index]
    deduped, counts, collided = None, None, True
    for attempt in range(4):
        gamma = stream(seed, "gamma", node_index, attempt).unit_complex()
        deduped, counts, collided = _run_start_homotopy(
            system, z0, gamma, opts, keep)
        if not collided:
            break
    if collided:
        warnings.warn(
            f"start paths still collided at node {node_index} after retries",
            PathJumpWarning)

    points = np.array([x for _, x, _, _ in deduped],
                      dtype=np.complex128).reshape(len(deduped), system.nvars)
    diags = [
        PathDiagnostics(path_id=i, start_index=b_idx, substeps=nsub,
                        newton_residual=res, status="tracked")
        for i, (b_idx, x, nsub, res) in enumerate(deduped)
    ]
    info = {"retained": len(deduped), **counts}
    if expected_delta is not None and len(deduped) != expected_delta:
        warnings.warn(
            f"retained {len(deduped)} solutions, expected {expected_delta}",
            CountMismatchWarning)
    return SolutionSet(points=points, path_ids=tuple(range(len(deduped))),
                       node_index=node_index, diagnostics=diags,
                       start_info=info)


def continue_node(system: SquareSystem, sols: SolutionSet, grid: NodeGrid,
                  to_node: int, opts: TrackOptions | None = None) -> SolutionSet:
    """Advance every path from node ``to_node - 1`` to node ``to_node``.

    ``to_node == grid.N`` wraps to the closing parameter t = 2 pi for loop
    closure checks.  Tracking failures raise TrackingFailed with per-path
    context; endpoint collisions are re-tracked once and flagged if they
    persist.
    """
    opts = opts or TrackOptions()
    if to_node != sols.node_index + 1:
        raise ValueError(
            f"cannot continue from node {sols.node_index} to {to_node}")
    if to_node > grid.N:
        raise ValueError("to_node beyond the closing node")
    t0 = grid.t[sols.node_index]
    t1 = 2.0 * np.pi if to_node == grid.N else grid.t[to_node]
    fam = ContourTrack(system, grid)

    pts = np.empty_like(sols.points)
    diags = []
    failures = []
    for i in range(sols.count):
        x, status, nsub, res = _track_interval(fam, sols.points[i].copy(),
                                               t0, t1, opts)
        pts[i] = x
        diags.append(PathDiagnostics(
            path_id=sols.path_ids[i], start_index=sols.diagnostics[i].start_index,
            substeps=nsub, newton_residual=res, status=status))
        if status != "tracked":
            failures.append((sols.path_ids[i], status))
    if failures:
        pid, status = failures[0]
        raise TrackingFailed(f"path {pid} {status} "
                             f"({len(failures)} path(s) failed)",
                             node=to_node, path=pid)

    # Node barrier: check for collided endpoints and re-track once.
    fine = replace(opts, max_substeps=opts.max_substeps * 4)
    for i in range(sols.count):
        for j in range(i + 1, sols.count):
            if _norm(pts[i] - pts[j]) < opts.jump_tol:
                x2, status, nsub2, res2 = _track_interval(
                    fam, sols.points[j].copy(), t0, t1, fine,
                    h0=(t1 - t0) / 16)
                if status == "tracked" and _norm(pts[i] - x2) >= opts.jump_tol:
                    pts[j] = x2
                    diags[j].substeps += nsub2
                    diags[j].newton_residual = res2
                else:
                    diags[i].status = diags[j].status = "jumped"
                    warnings.warn(
                        f"paths {sols.path_ids[i]} and {sols.path_ids[j]} "
                        f"collided at node {to_node}", PathJumpWarning)
    return SolutionSet(points=pts, path_ids=sols.path_ids, node_index=to_node,
                       diagnostics=diags, start_info=sols.start_info)
