"""Eigenpair extraction from moment matrices.

The moments are arranged into two block Hankel matrices; a rank-revealing SVD
of the first gives the eigenvalue count inside the contour, and the reduced
pencil V0^H B1 W0 Sigma0^-1 carries the eigenvalues on its spectrum.
Eigenvectors are read from the first n rows of V0 S.  Residuals are always
recomputed against the original matrix function, never the reduced problem.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .contour import Contour
from .errors import (
    RankSaturatedWarning,
    RankZero,
    Singular,
    ValidationError,
    ZeroVector,
)
from .linalg import eig_dense, lu_solve, svd
from .poly import PolyMatrixT, assemble_pepv
from .trace import MomentSet


@dataclass
class HankelPair:
    """Block Hankel matrices B0 (blocks A_{i+j}) and B1 (blocks A_{i+j+1})."""

    B0: np.ndarray
    B1: np.ndarray
    n: int
    q: int
    M: int
    center: complex = 0.0 + 0.0j
    scale: float = 1.0


def hankel_pair(moms: MomentSet) -> HankelPair:
    mats = moms.matrices
    if len(mats) < 2 or len(mats) % 2:
        raise ValidationError("need an even number >= 2 of moment matrices")
    M = len(mats) // 2
    n, q = mats.shape[1], mats.shape[2]
    B0 = np.block([[mats[i + j] for j in range(M)] for i in range(M)])
    B1 = np.block([[mats[i + j + 1] for j in range(M)] for i in range(M)])
    return HankelPair(B0=B0, B1=B1, n=n, q=q, M=M, center=moms.center,
                      scale=moms.scale)


@dataclass
class Eigenpair:
    """An extracted eigenvalue with its normalized eigenvector.

    ``x`` has infinity norm one with its first max-modulus entry real
    positive.  ``residual`` is ||T(x,z) x|| / ||x|| against the original
    problem.  ``sigma_gap`` reports the SVD gap at the rank cut of the run
    that produced the pair.
    """

    z: complex
    x: np.ndarray
    residual: float
    inside: bool
    sigma_gap: float = np.inf
    flags: tuple = ()


@dataclass
class ExtractionInfo:
    singular_values: np.ndarray
    rank: int
    sigma_gap: float
    saturated: bool
    dropped_degenerate: int = 0


def normalize_eigenvector(x):
    """Scale to infinity norm 1 and rotate the leading entry real positive."""
    x = np.asarray(x, dtype=np.complex128)
    mags = np.abs(x)
    top = float(mags.max(initial=0.0))
    if top == 0.0:
        raise ZeroVector()
    x = x / top
    k = int(np.argmax(np.abs(x)))
    phase = x[k] / abs(x[k])
    return x * np.conj(phase)


def extract_detailed(hp: HankelPair, c: Contour, tol_rank: float = 1e-8,
                     keep_outside: bool = False):
    """Rank cut, reduced eigenproblem, eigenvector recovery, classification.

    Returns (pairs, info).  Raises RankZero when B0 is numerically zero;
    warns RankSaturatedWarning when the rank cut hits the Hankel size.
    """
    if hp.B0.size == 0:
        raise RankZero()
    V_, s, W_ = svd(hp.B0)
    if s.size == 0 or s[0] <= 1e-14:
        raise RankZero()
    rank = int(np.sum(s / s[0] > tol_rank))
    gap = float(s[rank - 1] / s[rank]) if rank < s.size and s[rank] > 0 \
        else np.inf
    saturated = rank == min(hp.B0.shape)
    if saturated:
        warnings.warn(
            f"numerical rank {rank} saturated the Hankel size; "
            "increase the number of moment matrices", RankSaturatedWarning)
    V0 = V_[:, :rank]
    W0 = W_[:, :rank]
    reduced = (V0.conj().T @ hp.B1 @ W0) / s[:rank][None, :]
    vals, S = eig_dense(reduced)
    X = (V0 @ S)[:hp.n, :]
    info = ExtractionInfo(singular_values=s, rank=rank, sigma_gap=gap,
                          saturated=saturated)
    pairs = []
    for i in range(rank):
        z = hp.center + hp.scale * vals[i]
        try:
            x = normalize_eigenvector(X[:, i])
        except ZeroVector:
            info.dropped_degenerate += 1
            continue
        inside = c.contains(z)
        if not inside and not keep_outside:
            continue
        pairs.append(Eigenpair(z=complex(z), x=x, residual=np.nan,
                               inside=inside, sigma_gap=gap))
    pairs.sort(key=lambda p: (p.z.real, p.z.imag))
    return pairs, info


def extract(hp: HankelPair, c: Contour, tol_rank: float = 1e-8,
            keep_outside: bool = False):
    pairs, _ = extract_detailed(hp, c, tol_rank, keep_outside)
    return pairs


def residual(T: PolyMatrixT, x, z) -> float:
    """||T(x, z) x||_2 / ||x||_2 against the original matrix function."""
    x = np.asarray(x, dtype=np.complex128)
    xnorm = float(np.sqrt(np.vdot(x, x).real))
    if xnorm == 0.0:
        raise ZeroVector()
    r = T.evaluate(x, z) @ x
    return float(np.sqrt(np.vdot(r, r).real)) / xnorm


def refine_eigenpair(T: PolyMatrixT, pair: Eigenpair, tol: float = 1e-12,
                     maxit: int = 30) -> Eigenpair:
    """Newton-polish an eigenpair on the square augmented system.

    Solves {T(x,z) x = 0, e_k^T x = 1} in (x, z), where k indexes the
    max-modulus entry of the input eigenvector.  Best effort: if the
    iteration diverges the input pair is returned with a ``refine-failed``
    flag instead of raising.
    """
    n = T.n
    system = assemble_pepv(T, None)
    x = np.asarray(pair.x, dtype=np.complex128)
    k = int(np.argmax(np.abs(x)))
    if x[k] == 0:
        return replace(pair, flags=pair.flags + ("refine-failed",))
    x = x / x[k]
    z = complex(pair.z)
    ok = False
    for _ in range(maxit):
        frozen = system.at_z(z)
        F = frozen.residual_vector(x)
        res = float(np.sqrt(np.vdot(F, F).real))
        if res <= tol * (1.0 + float(np.max(np.abs(x)))) and abs(x[k] - 1) < 1e-13:
            ok = True
            break
        J = np.zeros((n + 1, n + 1), dtype=np.complex128)
        J[:n, :n] = frozen.jacobian(x)
        J[:n, n] = frozen.z_derivative(x)
        J[n, k] = 1.0
        rhs = np.concatenate([F, [x[k] - 1.0]])
        try:
            step = lu_solve(J, rhs)
        except Singular:
            break
        x = x - step[:n]
        z = z - step[n]
        if not np.isfinite(x.view(np.float64)).all() or not np.isfinite(z):
            break
        if float(np.max(np.abs(x))) > 1e8:
            break
    if not ok:
        return replace(pair, flags=pair.flags + ("refine-failed",))
    x = normalize_eigenvector(x)
    return replace(pair, z=z, x=x, residual=residual(T, x, z),
                   flags=pair.flags + ("refined",))
