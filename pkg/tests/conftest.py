"""Shared fixtures: reference problems and small random-problem builders."""

import math

import numpy as np
import pytest

from pepv.poly import PolyMatrixT, XTerm, ZPoly, monomial_exponents
from pepv.rng import SplitMix64, stream


def zp(*coef):
    return ZPoly(coef)


E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def conics_problem() -> PolyMatrixT:
    """The 3 x 3 reference problem whose rows are three conics in x.

    Entries are linear in x with z-degree up to 2; its twelve eigenvalues are
    the roots of the degree-12 polynomial CONICS_RESULTANT.
    """
    return PolyMatrixT([
        [[(E1, zp(1)), (E2, zp(0, 1))],
         [(E2, zp(0, 1)), (E3, zp(1))],
         [(E1, zp(1)), (E3, zp(-1))]],
        [[(E1, zp(1)), (E2, zp(1, 1))],
         [(E2, zp(1, 0, -1)), (E3, zp(0, -1))],
         [(E1, zp(1)), (E3, zp(1))]],
        [[(E1, zp(1, 1)), (E2, zp(1))],
         [(E2, zp(1)), (E3, zp(-1))],
         [(E1, zp(0, 1)), (E3, zp(1, -1))]],
    ])


# Ascending coefficients of the degree-12 resultant polynomial of the conics
# problem; its roots are the problem's twelve eigenvalues.
CONICS_RESULTANT = [3, -4, 8, 22, 14, -23, -78, -108, -100, -53, -1, 12, 4]

# The isolated real eigenvalue selected by the reference ellipse, with its
# projectively normalized eigenvector (four printed digits).
CONICS_EIG = 0.5919305292430951
CONICS_VEC = (1.0, -1.9218, -1.9646)
CONICS_EIG_OUT = 2.384515485243024


def random_problem(n, d, e, seed) -> PolyMatrixT:
    """Dense random problem: all degree-d monomials, unit-modulus z-coeffs."""
    rs = stream(seed, "problem")
    exps = monomial_exponents(n, d)
    entries = []
    for _ in range(n):
        row = []
        for _ in range(n):
            row.append([
                XTerm(exp, ZPoly([rs.unit_complex() for _ in range(e + 1)]))
                for exp in exps
            ])
        entries.append(row)
    return PolyMatrixT(entries)


def series_problem(n, d, e, seed, rho=2.5) -> PolyMatrixT:
    """Random problem with truncated-series z-coefficients (rho^k / k!)."""
    rs = stream(seed, "series")
    exps = monomial_exponents(n, d)
    entries = []
    for _ in range(n):
        row = []
        for _ in range(n):
            row.append([
                XTerm(exp, ZPoly([rs.unit_complex() * rho**k / math.factorial(k)
                                  for k in range(e + 1)]))
                for exp in exps
            ])
        entries.append(row)
    return PolyMatrixT(entries)


def random_cmatrix(rs: SplitMix64, rows, cols=None):
    cols = rows if cols is None else cols
    return np.array(
        [[rs.complex_normal() for _ in range(cols)] for _ in range(rows)],
        dtype=np.complex128,
    )


def random_cvector(rs: SplitMix64, n):
    return np.array([rs.complex_normal() for _ in range(n)],
                    dtype=np.complex128)


def match_sets(got, expected):
    """Greedy optimal matching distance between two point multisets."""
    got = list(got)
    pool = list(expected)
    assert len(got) == len(pool), f"count {len(got)} != {len(pool)}"
    worst = 0.0
    for g in got:
        i = int(np.argmin([abs(g - p) for p in pool]))
        worst = max(worst, abs(g - pool.pop(i)))
    return worst


def match_rows(got, expected):
    """Greedy matching of row vectors under the 2-norm."""
    got = [np.asarray(g) for g in got]
    pool = [np.asarray(p) for p in expected]
    assert len(got) == len(pool)
    worst = 0.0
    for g in got:
        dists = [float(np.sqrt(np.vdot(g - p, g - p).real)) for p in pool]
        i = int(np.argmin(dists))
        worst = max(worst, dists[i])
        pool.pop(i)
    return worst


@pytest.fixture(scope="session")
def conics():
    return conics_problem()
