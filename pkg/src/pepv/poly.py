"""Sparse polynomials in the eigenvector variables with z-polynomial coefficients.

The central object is the matrix function T(x, z): entries are homogeneous in
x per row, polynomial in z.  Subtracting shift polynomials from T(x,z)*x gives
a square system F(x, z) that the path tracker evaluates millions of times, so
SquareSystem compiles its terms to flat numpy arrays once and evaluation of
F, the x-Jacobian and dF/dz are a handful of vectorized operations.

Terms are stored as sorted sparse lists keyed by exponent vector, with
duplicate exponents merged at construction; evaluation order is therefore
deterministic and runs are bit-reproducible under a fixed seed.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DegreeMismatch, InhomogeneousRow, ValidationError


class ZPoly:
    """Polynomial in z, ascending coefficients; the zero polynomial is empty."""

    __slots__ = ("coef",)

    def __init__(self, coef=()):
        if isinstance(coef, ZPoly):
            self.coef = coef.coef
            return
        if np.isscalar(coef):
            coef = (coef,)
        arr = [complex(c) for c in coef]
        while arr and arr[-1] == 0:
            arr.pop()
        self.coef = tuple(arr)

    @property
    def degree(self) -> int:
        return max(len(self.coef) - 1, 0)

    def is_zero(self) -> bool:
        return not self.coef

    def __call__(self, z: complex) -> complex:
        acc = 0.0 + 0.0j
        for c in reversed(self.coef):
            acc = acc * z + c
        return acc

    def deriv(self) -> "ZPoly":
        return ZPoly([k * c for k, c in enumerate(self.coef)][1:])

    def __add__(self, other: "ZPoly") -> "ZPoly":
        a, b = self.coef, ZPoly(other).coef
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return ZPoly(out)

    def __neg__(self) -> "ZPoly":
        return ZPoly([-c for c in self.coef])

    def __mul__(self, other):
        if np.isscalar(other):
            return ZPoly([other * c for c in self.coef])
        b = ZPoly(other).coef
        if not self.coef or not b:
            return ZPoly()
        out = [0.0 + 0.0j] * (len(self.coef) + len(b) - 1)
        for i, ci in enumerate(self.coef):
            for j, cj in enumerate(b):
                out[i + j] += ci * cj
        return ZPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ZPoly) and self.coef == other.coef

    def __hash__(self):
        return hash(self.coef)

    def __repr__(self):
        return f"ZPoly({list(self.coef)!r})"


class XTerm(NamedTuple):
    """A monomial x^exp with a z-polynomial coefficient."""

    exp: tuple
    coeff: ZPoly


def _as_term(item) -> XTerm:
    exp, coeff = item
    return XTerm(tuple(int(e) for e in exp), ZPoly(coeff))


def merge_terms(terms) -> tuple:
    """Merge duplicate exponents, drop zero coefficients, sort by exponent."""
    acc = {}
    for item in terms:
        t = _as_term(item)
        if any(e < 0 for e in t.exp):
            raise ValidationError(f"negative exponent in term {t.exp}")
        if t.exp in acc:
            acc[t.exp] = acc[t.exp] + t.coeff
        else:
            acc[t.exp] = t.coeff
    return tuple(
        XTerm(exp, coeff)
        for exp, coeff in sorted(acc.items())
        if not coeff.is_zero()
    )


def term_list_degree(terms):
    """Common total x-degree of a merged term list; None if empty.

    Raises ValidationError when degrees are mixed (the caller wraps this in a
    row-anchored InhomogeneousRow).
    """
    degs = {sum(t.exp) for t in terms}
    if not degs:
        return None
    if len(degs) > 1:
        raise ValidationError(f"mixed x-degrees {sorted(degs)}")
    return degs.pop()


def eval_terms(terms, x, z) -> complex:
    acc = 0.0 + 0.0j
    for t in terms:
        mono = 1.0 + 0.0j
        for xi, e in zip(x, t.exp):
            if e:
                mono *= xi**e
        acc += t.coeff(z) * mono
    return acc


def monomial_exponents(nvars: int, degree: int):
    """All exponent tuples of the given total degree, in deterministic order."""
    if degree == 0:
        return [(0,) * nvars]
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for k in range(remaining, -1, -1):
            rec(prefix + (k,), remaining - k, slots - 1)

    rec((), degree, nvars)
    return out


class PolyMatrixT:
    """The n x n matrix function T(x, z).

    ``entries[i][j]`` is a merged term list, homogeneous of degree
    ``row_degrees[i]`` in x.  Immutable after construction.
    """

    def __init__(self, entries, z_degree=None):
        n = len(entries)
        if n == 0 or any(len(row) != n for row in entries):
            raise ValidationError("entries must form a square grid")
        self.n = n
        self.entries = tuple(
            tuple(merge_terms(entry) for entry in row) for row in entries
        )
        self.row_degrees = []
        for i, row in enumerate(self.entries):
            degs = set()
            for entry in row:
                try:
                    d = term_list_degree(entry)
                except ValidationError as exc:
                    raise InhomogeneousRow(i + 1, str(exc)) from None
                if d is not None:
                    degs.add(d)
            if len(degs) > 1:
                raise InhomogeneousRow(
                    i + 1, f"entries of row {i + 1} have degrees {sorted(degs)}"
                )
            if not degs:
                raise ValidationError(f"row {i + 1} of T is identically zero")
            self.row_degrees.append(degs.pop())
        self.row_degrees = tuple(self.row_degrees)
        zmax = max(
            (t.coeff.degree for row in self.entries for e in row for t in e),
            default=0,
        )
        if z_degree is None:
            z_degree = zmax
        elif zmax > z_degree:
            raise ValidationError(
                f"declared z_degree {z_degree} below actual degree {zmax}"
            )
        self.z_degree = z_degree

    def evaluate(self, x, z):
        """T(x, z) as a dense complex matrix (slow path, per-entry Horner)."""
        x = np.asarray(x, dtype=np.complex128)
        out = np.zeros((self.n, self.n), dtype=np.complex128)
        for i in range(self.n):
            for j in range(self.n):
                out[i, j] = eval_terms(self.entries[i][j], x, z)
        return out

    def row_polys(self):
        """Rows of T(x,z) * x as merged term lists (degree d_i + 1 each)."""
        rows = []
        for i in range(self.n):
            terms = []
            for j in range(self.n):
                for t in self.entries[i][j]:
                    exp = list(t.exp)
                    exp[j] += 1
                    terms.append(XTerm(tuple(exp), t.coeff))
            rows.append(merge_terms(terms))
        return rows


class ShiftVector:
    """Shift polynomials a_1..a_n, homogeneous of degree d_i = deg(f_i) - 1."""

    def __init__(self, polys, style="dense", seed=0):
        self.polys = tuple(merge_terms(p) for p in polys)
        self.style = style
        self.seed = seed
        self.degrees = tuple(
            term_list_degree(p) if p else 0 for p in self.polys
        )

    @property
    def n(self):
        return len(self.polys)

    def constants(self):
        """The shift as a plain vector; requires all degrees zero."""
        if any(d != 0 for d in self.degrees):
            raise ValidationError("constants() requires degree-0 shifts")
        return np.array(
            [p[0].coeff(0.0) if p else 0.0 for p in self.polys],
            dtype=np.complex128,
        )

    def linear_matrix(self):
        """Coefficient matrix b with a_i = sum_j b[i, j] x_j (degree-1 shifts)."""
        if any(d != 1 for d in self.degrees):
            raise ValidationError("linear_matrix() requires degree-1 shifts")
        n = self.n
        nv = len(self.polys[0][0].exp)
        b = np.zeros((n, nv), dtype=np.complex128)
        for i, p in enumerate(self.polys):
            for t in p:
                j = max(range(nv), key=lambda k: t.exp[k])
                b[i, j] = t.coeff(0.0)
        return b


def _bincomplex(idx, w, size):
    return np.bincount(idx, w.real, minlength=size) + 1j * np.bincount(
        idx, w.imag, minlength=size
    )


class SquareSystem:
    """A square polynomial system F(x, z) compiled for fast evaluation.

    Rows are merged term lists over ``nvars`` variables; coefficients are
    polynomials in z of degree at most ``z_degree``.  Immutable and safe to
    share across parallel workers; all evaluation methods are pure.
    """

    def __init__(self, rows, nvars):
        self.nvars = int(nvars)
        self.rows = tuple(merge_terms(r) for r in rows)
        self.n = len(self.rows)
        for i, row in enumerate(self.rows):
            if not row:
                raise ValidationError(f"row {i + 1} is identically zero")
            if any(len(t.exp) != self.nvars for t in row):
                raise ValidationError(f"row {i + 1} has terms of wrong arity")
        self.total_degrees = tuple(
            max(sum(t.exp) for t in row) for row in self.rows
        )
        self.z_degree = max(
            (t.coeff.degree for row in self.rows for t in row), default=0
        )
        self._compile()

    def _compile(self):
        e = self.z_degree
        exps, zc, ridx = [], [], []
        for i, row in enumerate(self.rows):
            for t in row:
                exps.append(t.exp)
                padded = list(t.coeff.coef) + [0.0] * (e + 1 - len(t.coeff.coef))
                zc.append(padded)
                ridx.append(i)
        self._exps = np.array(exps, dtype=np.int64).reshape(len(exps), self.nvars)
        self._zc = np.array(zc, dtype=np.complex128).reshape(len(zc), e + 1)
        self._row = np.array(ridx, dtype=np.intp)
        if e >= 1:
            self._zcd = self._zc[:, 1:] * np.arange(1, e + 1)
        else:
            self._zcd = None
        dsrc, dmul, dexps, dflat = [], [], [], []
        for t_index, (exp, i) in enumerate(zip(exps, ridx)):
            for k, ek in enumerate(exp):
                if ek:
                    dsrc.append(t_index)
                    dmul.append(float(ek))
                    dexp = list(exp)
                    dexp[k] -= 1
                    dexps.append(dexp)
                    dflat.append(i * self.nvars + k)
        self._dsrc = np.array(dsrc, dtype=np.intp)
        self._dmul = np.array(dmul)
        self._dexps = np.array(dexps, dtype=np.int64).reshape(
            len(dexps), self.nvars
        )
        self._dflat = np.array(dflat, dtype=np.intp)

    def at_z(self, z):
        """Freeze z for repeated evaluation (Newton loops at one node)."""
        return FrozenZ(self, z)

    def evaluate(self, x, z):
        return self.at_z(z).residual_vector(np.asarray(x, dtype=np.complex128))

    def jacobian_x(self, x, z):
        return self.at_z(z).jacobian(np.asarray(x, dtype=np.complex128))

    def derivative_z(self, x, z):
        return self.at_z(z).z_derivative(np.asarray(x, dtype=np.complex128))


class FrozenZ:
    """System evaluation with the z coefficients collapsed at a fixed z."""

    __slots__ = ("system", "z", "_cz", "_czd")

    def __init__(self, system: SquareSystem, z):
        self.system = system
        self.z = complex(z)
        zpows = self.z ** np.arange(system.z_degree + 1)
        self._cz = system._zc @ zpows
        if system._zcd is not None:
            self._czd = system._zcd @ zpows[:-1]
        else:
            self._czd = None

    def residual_vector(self, x):
        s = self.system
        mono = np.prod(np.power(x[None, :], s._exps), axis=1)
        return _bincomplex(s._row, self._cz * mono, s.n)

    def jacobian(self, x):
        s = self.system
        if len(s._dsrc) == 0:
            return np.zeros((s.n, s.nvars), dtype=np.complex128)
        dmono = np.prod(np.power(x[None, :], s._dexps), axis=1)
        w = self._cz[s._dsrc] * s._dmul * dmono
        return _bincomplex(s._dflat, w, s.n * s.nvars).reshape(s.n, s.nvars)

    def z_derivative(self, x):
        s = self.system
        if self._czd is None:
            return np.zeros(s.n, dtype=np.complex128)
        mono = np.prod(np.power(x[None, :], s._exps), axis=1)
        return _bincomplex(s._row, self._czd * mono, s.n)


def assemble_pepv(T: PolyMatrixT, a: ShiftVector | None = None) -> SquareSystem:
    """Assemble the shifted system F = T(x,z) * x - a.

    Row i becomes sum_j T_ij * x_j - a_i with like terms merged.  Passing
    ``a=None`` assembles the unshifted rows f_i.  Raises DegreeMismatch when
    deg(a_i) != d_i (1-based row index in the message).
    """
    rows = T.row_polys()
    if a is not None:
        if a.n != T.n:
            raise ValidationError(
                f"shift vector has {a.n} entries, problem has {T.n} rows"
            )
        shifted = []
        for i, row in enumerate(rows):
            ai = a.polys[i]
            if ai:
                deg = term_list_degree(ai)
                if deg != T.row_degrees[i]:
                    raise DegreeMismatch(i + 1, T.row_degrees[i], deg)
            shifted.append(
                merge_terms(list(row) + [XTerm(t.exp, -t.coeff) for t in ai])
            )
        rows = shifted
    return SquareSystem(rows, nvars=T.n)


# ---------------------------------------------------------------------------
# Support-lattice sanity check


def _lattice_rank_index(vectors, dim):
    """Rank and index of the sublattice of Z^dim spanned by integer vectors."""
    rows = [list(v) for v in vectors if any(v)]
    rank = 0
    index = 1
    for col in range(dim):
        active = [r for r in rows if r[col] != 0]
        if not active:
            continue
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            base = active[0]
            for r in active[1:]:
                q = r[col] // base[col]
                for k in range(dim):
                    r[k] -= q * base[k]
            active = [r for r in active if r[col] != 0]
        pivot = active[0]
        index *= abs(pivot[col])
        rank += 1
        rows = [r for r in rows if r is not pivot]
        for r in rows:
            if r[col] % pivot[col] == 0:
                q = r[col] // pivot[col]
                for k in range(dim):
                    r[k] -= q * pivot[k]
        rows = [r for r in rows if any(r)]
    return rank, index


def supports_span_standard_lattice(T: PolyMatrixT) -> bool:
    """True when the row supports affinely generate the full degree-0 sublattice.

    This is the combinatorial hypothesis under which the trace machinery is
    valid; the orchestrator warns when it fails.
    """
    n = T.n
    diffs = []
    for row in T.row_polys():
        base = row[0].exp
        for t in row[1:]:
            diffs.append(tuple(a - b for a, b in zip(t.exp, base)))
    # Coordinates in the basis e_i - e_n of the hyperplane sum(alpha) = 0.
    reduced = [d[: n - 1] for d in diffs]
    rank, index = _lattice_rank_index(reduced, n - 1)
    return rank == n - 1 and index == 1


def binomial(n, k):
    return math.comb(n, k)
