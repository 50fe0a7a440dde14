"""Polynomial core: assembly, evaluation, derivatives, invariants."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pepv.errors import DegreeMismatch, InhomogeneousRow, ValidationError
from pepv.poly import (
    PolyMatrixT,
    ShiftVector,
    SquareSystem,
    XTerm,
    ZPoly,
    assemble_pepv,
    monomial_exponents,
    supports_span_standard_lattice,
)
from pepv.rng import stream
from pepv.trace import make_shifts

from conftest import conics_problem, random_problem, random_cvector, zp


# ---------------------------------------------------------------------------
# Oracle: independent dict-based term expansion of T(x,z) * x - a.

def _expand_oracle(T, a=None):
    rows = []
    for i in range(T.n):
        acc = {}
        for j in range(T.n):
            for term in T.entries[i][j]:
                exp = list(term.exp)
                exp[j] += 1
                key = tuple(exp)
                cur = acc.get(key, ())
                coef = list(cur) + [0j] * (len(term.coeff.coef) - len(cur))
                for k, c in enumerate(term.coeff.coef):
                    coef[k] += c
                acc[key] = tuple(coef)
        if a is not None:
            for term in a.polys[i]:
                cur = acc.get(term.exp, ())
                coef = list(cur) + [0j] * (len(term.coeff.coef) - len(cur))
                for k, c in enumerate(term.coeff.coef):
                    coef[k] -= c
                acc[term.exp] = tuple(coef)
        rows.append({k: v for k, v in acc.items()
                     if any(c != 0 for c in v)})
    return rows


def _eval_oracle(rows, x, z):
    out = []
    for row in rows:
        acc = 0j
        for exp, coef in row.items():
            mono = 1.0 + 0j
            for xi, e in zip(x, exp):
                mono *= xi**e
            acc += sum(c * z**k for k, c in enumerate(coef)) * mono
        out.append(acc)
    return np.array(out)


def test_zpoly_basics():
    p = ZPoly([1, 2, 3])
    assert p.degree == 2
    assert p(2.0) == 1 + 4 + 12
    assert p.deriv().coef == (2, 6)
    assert ZPoly([0, 0]).is_zero()
    assert ZPoly().degree == 0
    q = p + ZPoly([0, -2, -3])
    assert q.coef == (1,)


def test_assemble_conics_row1(conics):
    S = assemble_pepv(conics, None)
    # x1^2 + z x1 x2 + z x2^2 + x2 x3 + x1 x3 - x3^2
    expected = {
        (2, 0, 0): (1,),
        (1, 1, 0): (0, 1),
        (0, 2, 0): (0, 1),
        (0, 1, 1): (1,),
        (1, 0, 1): (1,),
        (0, 0, 2): (-1,),
    }
    got = {t.exp: t.coeff.coef for t in S.rows[0]}
    assert got.keys() == expected.keys()
    for key in expected:
        assert_allclose(got[key], [complex(c) for c in expected[key]])


def test_assemble_identity_row():
    T = PolyMatrixT([[[((0,), zp(1))]]])
    S = assemble_pepv(T, None)
    assert S.rows[0] == (XTerm((1,), ZPoly([1])),)


def test_assemble_matches_expansion_oracle():
    T = random_problem(3, 1, 2, seed=404)
    a = make_shifts(T, "dense", seed=404)[0]
    S = assemble_pepv(T, a)
    oracle = _expand_oracle(T, a)
    assert len(S.rows) == 3
    for row, orow in zip(S.rows, oracle):
        got = {t.exp: np.array(t.coeff.coef) for t in row}
        assert got.keys() == orow.keys()
        for key in orow:
            ref = np.array(list(orow[key]) + [0j] * (len(got[key]) - len(orow[key])))
            assert_allclose(got[key], ref[: len(got[key])], atol=1e-15)


def test_assemble_degree_mismatch(conics):
    bad = ShiftVector([[((2, 0, 0), 1.0)]] * 3)
    with pytest.raises(DegreeMismatch, match=r"DegreeMismatch\(1\)"):
        assemble_pepv(conics, bad)


def test_inhomogeneous_row_rejected():
    with pytest.raises(InhomogeneousRow, match=r"InhomogeneousRow\(1\)"):
        PolyMatrixT([[[((0,), zp(1)), ((1,), zp(1))]]])


def test_evaluate_at_printed_eigenpair(conics):
    S = assemble_pepv(conics, None)
    x = np.array([1.0, -1.9218, -1.9646], dtype=complex)
    val = S.evaluate(x, 0.5919)
    assert np.linalg.norm(val) <= 5e-4  # inputs are 4-digit roundings


def test_evaluate_zero_vector_is_zero():
    T = random_problem(3, 2, 1, seed=7)
    a = make_shifts(T, "dense", seed=7)[0]
    S = assemble_pepv(T, a)
    assert_allclose(S.evaluate(np.zeros(3, complex), 0.3 + 0.1j),
                    np.zeros(3), atol=0)


def test_evaluate_matches_naive_oracle():
    rs = stream(99, "pts")
    T = random_problem(3, 1, 3, seed=99)
    a = make_shifts(T, "dense", seed=99)[0]
    S = assemble_pepv(T, a)
    oracle_rows = _expand_oracle(T, a)
    for _ in range(20):
        x = random_cvector(rs, 3)
        z = rs.complex_normal()
        got = S.evaluate(x, z)
        ref = _eval_oracle(oracle_rows, x, z)
        assert_allclose(got, ref, rtol=1e-13, atol=1e-14)


def test_jacobian_monomial_power_rule():
    S = SquareSystem([[((2,), zp(1)), ((0,), zp(0, -1))]], nvars=1)
    J = S.jacobian_x(np.array([3.0 + 0j]), 0.7)
    assert_allclose(J, [[6.0]], rtol=1e-15)


def test_jacobian_conics_row1_hand_value(conics):
    S = assemble_pepv(conics, None)
    J = S.jacobian_x(np.ones(3, complex), 0.0)
    assert_allclose(J[0], [3.0, 1.0, 0.0], atol=1e-15)


def test_derivative_z_hand_values(conics):
    S1 = SquareSystem([[((2,), zp(1)), ((0,), zp(0, -1))]], nvars=1)
    assert_allclose(S1.derivative_z(np.array([5.0 + 0j]), 1.3), [-1.0])
    S = assemble_pepv(conics, None)
    assert_allclose(S.derivative_z(np.ones(3, complex), 0.0)[0], 2.0)


@pytest.mark.parametrize("seed", [11, 12])
def test_derivatives_match_finite_differences(seed):
    T = random_problem(3, 2, 2, seed=seed)
    a = make_shifts(T, "dense", seed=seed)[0]
    S = assemble_pepv(T, a)
    rs = stream(seed, "fd")
    x = random_cvector(rs, 3)
    z = rs.complex_normal()
    h = 1e-6
    J = S.jacobian_x(x, z)
    for k in range(3):
        dx = np.zeros(3, complex)
        dx[k] = h
        col = (S.evaluate(x + dx, z) - S.evaluate(x - dx, z)) / (2 * h)
        assert_allclose(J[:, k], col, atol=1e-6)
    dz = (S.evaluate(x, z + h) - S.evaluate(x, z - h)) / (2 * h)
    assert_allclose(S.derivative_z(x, z), dz, atol=1e-6)


def test_finite_difference_error_scales_quadratically():
    T = random_problem(2, 2, 2, seed=21)
    S = assemble_pepv(T, make_shifts(T, "dense", seed=21)[0])
    rs = stream(21, "fd2")
    x = random_cvector(rs, 2)
    z = rs.complex_normal()
    exact = S.derivative_z(x, z)

    def fd_err(h):
        approx = (S.evaluate(x, z + h) - S.evaluate(x, z - h)) / (2 * h)
        return np.max(np.abs(approx - exact))

    e1, e2 = fd_err(1e-3), fd_err(5e-4)
    assert 2.0 < e1 / e2 < 8.0  # O(h^2) central differences


def test_euler_identity_homogeneous_rows():
    rs = stream(31, "euler")
    for seed in range(5):
        T = random_problem(3, 2, 1, seed=seed)
        S = assemble_pepv(T, None)  # rows homogeneous of degree d + 1 = 3
        x = random_cvector(rs, 3)
        z = rs.complex_normal()
        F = S.evaluate(x, z)
        J = S.jacobian_x(x, z)
        assert_allclose(J @ x, 3.0 * F, rtol=1e-12)


def test_unshifted_system_equals_matrix_vector_product():
    rs = stream(41, "mv")
    for seed in range(100):
        n = 2 + seed % 2
        T = random_problem(n, 1 + seed % 2, 1 + seed % 3, seed=seed)
        S = assemble_pepv(T, None)
        x = random_cvector(rs, n)
        z = rs.complex_normal()
        lhs = S.evaluate(x, z)
        rhs = T.evaluate(x, z) @ x
        assert_allclose(lhs, rhs, rtol=1e-13, atol=1e-13)


def test_merge_terms_sorted_and_merged():
    S = SquareSystem(
        [[((1, 0), zp(2)), ((0, 1), zp(1)), ((1, 0), zp(-1))]], nvars=2)
    assert [t.exp for t in S.rows[0]] == [(0, 1), (1, 0)]
    assert S.rows[0][1].coeff.coef == (1,)


def test_zero_row_rejected():
    with pytest.raises(ValidationError):
        SquareSystem([[((1,), zp(1)), ((1,), zp(-1))]], nvars=1)


def test_monomial_exponents_deterministic_order():
    exps = monomial_exponents(3, 2)
    assert len(exps) == 6
    assert exps[0] == (2, 0, 0)
    assert all(sum(e) == 2 for e in exps)
    assert len(set(exps)) == 6


def test_support_lattice_check(conics):
    assert supports_span_standard_lattice(conics)
    # A univariate-style degenerate support: every row only uses x1^2 and
    # x2^2, so differences generate an index-2 sublattice.
    T = PolyMatrixT([
        [[((1, 0), zp(1))], [((0, 1), zp(1, 1))]],
        [[((1, 0), zp(1, 2))], [((0, 1), zp(3))]],
    ])
    assert not supports_span_standard_lattice(T)
