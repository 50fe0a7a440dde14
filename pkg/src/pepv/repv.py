"""Rational eigenproblems with eigenvector nonlinearities, by lifting.

T(x, z) = A + z B + sum_i (r_i(x)/s_i(x)) T_i with linear forms r_i, s_i.
Clearing denominators would create spurious eigenvectors, so the solver
introduces one auxiliary variable per rational term and tracks the lifted
polynomial system

    (A + z B + lambda_1 T_1 + ... + lambda_m T_m) x = a,
    s_i(x) lambda_i - r_i(x) = 0,

with a generic constant shift a.  Trace columns sum only the x block;
eigenvector recovery, residuals and refinement all act on the original
rational matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .contour import Contour, make_grid
from .counts import repv_count
from .errors import Singular, ValidationError, ZeroDenominator
from .extraction import (
    Eigenpair,
    extract_detailed,
    hankel_pair,
    normalize_eigenvector,
)
from .linalg import lu_solve
from .poly import SquareSystem, XTerm, ZPoly
from .rng import derive_seed, stream
from .trace import columns_to_samples, column_from_system, moments
from .tracker import TrackOptions


class DenominatorDegenerateWarning(UserWarning):
    """A tracked path came too close to the denominator variety."""


@dataclass
class REPvProblem:
    A: np.ndarray
    B: np.ndarray
    Ts: tuple   # m matrices, each n x n
    r: tuple    # m coefficient vectors of the numerator linear forms
    s: tuple    # m coefficient vectors of the denominator linear forms

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=np.complex128)
        self.B = np.asarray(self.B, dtype=np.complex128)
        self.Ts = tuple(np.asarray(t, dtype=np.complex128) for t in self.Ts)
        self.r = tuple(np.asarray(v, dtype=np.complex128) for v in self.r)
        self.s = tuple(np.asarray(v, dtype=np.complex128) for v in self.s)
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.B.shape != (n, n):
            raise ValidationError("A and B must be square of equal size")
        for k, t in enumerate(self.Ts):
            if t.shape != (n, n):
                raise ValidationError(f"T[{k}] has wrong shape")
        if not (len(self.Ts) == len(self.r) == len(self.s)):
            raise ValidationError("need equally many T, r and s entries")
        for k, v in enumerate(self.s):
            if v.shape != (n,) or not np.any(v):
                raise ZeroDenominator(k + 1)
        for k, v in enumerate(self.r):
            if v.shape != (n,):
                raise ValidationError(f"r[{k}] has wrong length")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return len(self.Ts)

    def t_matrix(self, x, z):
        """The rational matrix T(x, z); requires s_i(x) != 0."""
        x = np.asarray(x, dtype=np.complex128)
        T = self.A + z * self.B
        for Tk, rk, sk in zip(self.Ts, self.r, self.s):
            T = T + ((rk @ x) / (sk @ x)) * Tk
        return T

    def residual(self, x, z) -> float:
        x = np.asarray(x, dtype=np.complex128)
        w = self.t_matrix(x, z) @ x
        return float(np.sqrt(np.vdot(w, w).real)
                     / np.sqrt(np.vdot(x, x).real))


@dataclass
class LiftedSystem:
    system: SquareSystem
    problem: REPvProblem
    shift: np.ndarray


def lift(R: REPvProblem, a) -> LiftedSystem:
    """Exact polynomial lift in the n + m variables (x, lambda)."""
    a = np.asarray(a, dtype=np.complex128)
    n, m = R.n, R.m
    if a.shape != (n,):
        raise ValidationError("shift vector must have length n")
    nv = n + m

    def unit(j):
        e = [0] * nv
        e[j] = 1
        return tuple(e)

    def pair(j, k):
        e = [0] * nv
        e[j] += 1
        e[n + k] += 1
        return tuple(e)

    rows = []
    for i in range(n):
        terms = [XTerm(unit(j), ZPoly([R.A[i, j], R.B[i, j]]))
                 for j in range(n)]
        for k in range(m):
            terms.extend(
                XTerm(pair(j, k), ZPoly([R.Ts[k][i, j]])) for j in range(n))
        terms.append(XTerm((0,) * nv, ZPoly([-a[i]])))
        rows.append(terms)
    for k in range(m):
        terms = [XTerm(pair(j, k), ZPoly([R.s[k][j]])) for j in range(n)]
        terms.extend(XTerm(unit(j), ZPoly([-R.r[k][j]])) for j in range(n))
        rows.append(terms)
    return LiftedSystem(system=SquareSystem(rows, nvars=nv), problem=R,
                        shift=a)


def denominator_policy(R: REPvProblem, tol: float = 1e-8):
    """Retain finite lifted endpoints with all denominators bounded away
    from zero (relative to the eigenvector block norm)."""

    def keep(xfull):
        x = xfull[: R.n]
        xnorm = float(np.sqrt(np.vdot(x, x).real))
        if xnorm == 0.0:
            return False
        return all(abs(sk @ x) > tol * xnorm for sk in R.s)

    return keep


def denominator_check(R: REPvProblem, tol: float = 1e-8):
    """Per-node hook warning when a path drifts near the denominator variety."""

    def check(sols):
        for i in range(sols.count):
            x = sols.points[i, : R.n]
            xnorm = float(np.sqrt(np.vdot(x, x).real))
            for k, sk in enumerate(R.s):
                if abs(sk @ x) < tol * xnorm:
                    warnings.warn(
                        f"DenominatorDegenerate({sols.path_ids[i]}): "
                        f"s_{k + 1} nearly vanished at node {sols.node_index}",
                        DenominatorDegenerateWarning)
        return None

    return check


def refine_repv(R: REPvProblem, pair: Eigenpair, tol: float = 1e-12,
                maxit: int = 30) -> Eigenpair:
    """Newton-polish (x, z) on {T(x,z) x = 0, e_k^T x = 1} for the rational T."""
    from dataclasses import replace

    n = R.n
    x = np.asarray(pair.x, dtype=np.complex128)
    k = int(np.argmax(np.abs(x)))
    if x[k] == 0:
        return replace(pair, flags=pair.flags + ("refine-failed",))
    x = x / x[k]
    z = complex(pair.z)
    ok = False
    for _ in range(maxit):
        T = R.t_matrix(x, z)
        F = T @ x
        res = float(np.sqrt(np.vdot(F, F).real))
        if res <= tol * (1.0 + float(np.max(np.abs(x)))):
            ok = True
            break
        # d(T x)/dx = T + sum_k (T_k x) grad(r_k/s_k)^T, d(T x)/dz = B x.
        J = np.zeros((n + 1, n + 1), dtype=np.complex128)
        J[:n, :n] = T
        for Tk, rk, sk in zip(R.Ts, R.r, R.s):
            sv, rv = sk @ x, rk @ x
            grad = (rk * sv - rv * sk) / sv**2
            J[:n, :n] += np.outer(Tk @ x, grad)
        J[:n, n] = R.B @ x
        J[n, k] = 1.0
        rhs = np.concatenate([F, [x[k] - 1.0]])
        try:
            step = lu_solve(J, rhs)
        except Singular:
            break
        x = x - step[:n]
        z = z - step[n]
        if not np.isfinite(x.view(np.float64)).all() or not np.isfinite(z) \
                or float(np.max(np.abs(x))) > 1e8:
            break
    if not ok:
        return replace(pair, flags=pair.flags + ("refine-failed",))
    x = normalize_eigenvector(x)
    return replace(pair, z=z, x=x, residual=R.residual(x, z),
                   flags=pair.flags + ("refined",))


def solve_repv(R: REPvProblem, c: Contour, N: int, M: int, seed: int = 0,
               opts: TrackOptions | None = None, tol_rank: float = 1e-8,
               keep_outside: bool = False, refine: bool = True,
               node_check: bool = True):
    """Full contour pipeline on the lifted system.  Returns (pairs, info)."""
    opts = opts or TrackOptions()
    grid = make_grid(c, N)
    n = R.n
    delta = repv_count(n, R.m).delta
    policy = denominator_policy(R)
    check = denominator_check(R) if node_check else None
    columns = []
    for j in range(n):
        rng = stream(seed, "repv-shift", j)
        a = np.array([rng.unit_complex() for _ in range(n)],
                     dtype=np.complex128)
        lifted = lift(R, a)
        col = column_from_system(
            lifted.system, grid, opts=opts,
            seed=derive_seed(seed, "column", j), shift_index=j,
            coords=list(range(n)), keep=policy, expected_delta=delta,
            node_check=check)
        columns.append(col)
    moms = moments(columns_to_samples(columns), grid, M, center=c.center,
                   scale=c.scale)
    pairs, info = extract_detailed(hankel_pair(moms), c, tol_rank,
                                   keep_outside)
    out = []
    for pair in pairs:
        pair.residual = R.residual(pair.x, pair.z)
        if refine:
            pair = refine_repv(R, pair)
        out.append(pair)
    return out, {"columns": columns, "extraction": info, "delta": delta}
