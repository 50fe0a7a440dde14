"""Classical contour solver for eigenvector-independent problems T(z) x = 0.

This is the degree-zero specialization of the trace pipeline: instead of
tracking paths, each quadrature node contributes one LU solve
T(phi(t_l))^{-1} V against a random probe matrix V.  Moments, Hankel
matrices and extraction are shared with the general solver, so the two
pipelines produce identical moment matrices on problems expressible both
ways.
"""

from __future__ import annotations

import numpy as np

from .contour import Contour, make_grid
from .errors import Singular, SingularNode, ValidationError
from .extraction import ExtractionInfo, extract_detailed, hankel_pair
from .linalg import lu_solve, svd
from .poly import PolyMatrixT
from .rng import stream
from .trace import USamples, moments


def random_probe(n: int, q: int, seed: int) -> np.ndarray:
    """Reproducible full-rank n x q probe matrix."""
    rng = stream(seed, "probe")
    for _ in range(5):
        V = np.array(
            [[rng.complex_normal() for _ in range(q)] for _ in range(n)],
            dtype=np.complex128,
        )
        _, s, _ = svd(V)
        if s[-1] > 1e-8 * s[0]:
            return V
    raise ValidationError("could not draw a full-rank probe matrix")


def nep_samples(Tz: PolyMatrixT, grid, probe: np.ndarray) -> USamples:
    """Node samples T(phi(t_l))^{-1} V for a degree-zero problem."""
    ones = np.ones(Tz.n, dtype=np.complex128)
    mats = np.empty((grid.N, Tz.n, probe.shape[1]), dtype=np.complex128)
    for ell, z in enumerate(grid.phi):
        try:
            mats[ell] = lu_solve(Tz.evaluate(ones, z), probe)
        except Singular:
            raise SingularNode(ell) from None
    return USamples(matrices=mats)


def beyn_solve_detailed(Tz: PolyMatrixT, c: Contour, N: int, M: int = 1,
                        q: int | None = None, seed: int = 0,
                        tol_rank: float = 1e-8, keep_outside: bool = False,
                        probe: np.ndarray | None = None):
    """Full solve returning (pairs, info); residuals are filled in."""
    if any(d != 0 for d in Tz.row_degrees):
        raise ValidationError(
            "beyn_solve needs all row degrees zero (entries constant in x)")
    n = Tz.n
    q = n if q is None else int(q)
    if q > n or q < 1:
        raise ValidationError("probe width must satisfy 1 <= q <= n")
    if probe is None:
        probe = random_probe(n, q, seed)
    grid = make_grid(c, N)
    U = nep_samples(Tz, grid, probe)
    moms = moments(U, grid, M, center=c.center, scale=c.scale)
    pairs, info = extract_detailed(hankel_pair(moms), c, tol_rank,
                                   keep_outside)
    ones = np.ones(n, dtype=np.complex128)
    for pair in pairs:
        r = Tz.evaluate(ones, pair.z) @ pair.x
        pair.residual = float(np.sqrt(np.vdot(r, r).real)
                              / np.sqrt(np.vdot(pair.x, pair.x).real))
    return pairs, info


def beyn_solve(Tz: PolyMatrixT, c: Contour, N: int, M: int = 1,
               q: int | None = None, seed: int = 0, tol_rank: float = 1e-8,
               keep_outside: bool = False, probe: np.ndarray | None = None):
    pairs, _ = beyn_solve_detailed(Tz, c, N, M=M, q=q, seed=seed,
                                   tol_rank=tol_rank,
                                   keep_outside=keep_outside, probe=probe)
    return pairs
