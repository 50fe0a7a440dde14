"""Problem-file parsing and serialization.

Polynomial problems (JSON):

    {
      "n": 3, "z_degree": 1,
      "rows": [
        {"degree_x": 1,
         "entries": [[{"xexp": [1,0,0], "zcoeffs": [[1,0],[0,0]]}, ...],
                     ... n term lists, one per matrix column ...]},
        ...
      ]
    }

Rational problems carry "kind": "repv" with dense matrices stored row-major
as [re, im] pairs.  Parse errors are anchored: syntax errors report the JSON
line/column, semantic errors report the offending JSON path.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InhomogeneousRow, ValidationError
from .poly import PolyMatrixT, XTerm, ZPoly
from .repv import REPvProblem


def _cplx(value, where):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValidationError(f"{where}: expected a number or [re, im] pair")


def _cvector(values, where):
    return np.array([_cplx(v, f"{where}[{i}]") for i, v in enumerate(values)],
                    dtype=np.complex128)


def _cmatrix(values, where):
    return np.array([_cvector(row, f"{where}[{i}]")
                     for i, row in enumerate(values)], dtype=np.complex128)


def parse_pepv(obj, source="<problem>") -> PolyMatrixT:
    try:
        n = int(obj["n"])
        rows = obj["rows"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{source}: missing or bad field ({exc})") from exc
    if len(rows) != n:
        raise ValidationError(f"{source}: expected {n} rows, found {len(rows)}")
    entries = []
    for i, row in enumerate(rows):
        where = f"{source}: rows[{i + 1}]"
        row_entries = row.get("entries")
        if row_entries is None or len(row_entries) != n:
            raise ValidationError(f"{where}: needs {n} entry lists")
        degree_x = row.get("degree_x")
        parsed_row = []
        for j, terms in enumerate(row_entries):
            parsed = []
            for k, term in enumerate(terms):
                twhere = f"{where}.entries[{j + 1}][{k + 1}]"
                try:
                    xexp = tuple(int(e) for e in term["xexp"])
                    zcoeffs = term["zcoeffs"]
                except (KeyError, TypeError, ValueError) as exc:
                    raise ValidationError(f"{twhere}: bad term ({exc})") from exc
                if len(xexp) != n:
                    raise ValidationError(
                        f"{twhere}: xexp must have {n} entries")
                if degree_x is not None and sum(xexp) != int(degree_x):
                    raise InhomogeneousRow(
                        i + 1,
                        f"{twhere}: term degree {sum(xexp)} != declared "
                        f"degree_x {degree_x}")
                coeff = ZPoly([_cplx(cc, f"{twhere}.zcoeffs[{idx}]")
                               for idx, cc in enumerate(zcoeffs)])
                parsed.append(XTerm(xexp, coeff))
            parsed_row.append(parsed)
        entries.append(parsed_row)
    try:
        return PolyMatrixT(entries, z_degree=obj.get("z_degree"))
    except InhomogeneousRow as exc:
        raise InhomogeneousRow(exc.row, f"{source}: see rows[{exc.row}]") from None


def parse_repv(obj, source="<problem>") -> REPvProblem:
    try:
        n = int(obj["n"])
        m = int(obj["m"])
        A = _cmatrix(obj["A"], f"{source}: A")
        B = _cmatrix(obj["B"], f"{source}: B")
        Ts = [_cmatrix(t, f"{source}: T[{k}]")
              for k, t in enumerate(obj.get("T", []))]
        r = [_cvector(v, f"{source}: r[{k}]")
             for k, v in enumerate(obj.get("r", []))]
        s = [_cvector(v, f"{source}: s[{k}]")
             for k, v in enumerate(obj.get("s", []))]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{source}: missing or bad field ({exc})") from exc
    if A.shape != (n, n):
        raise ValidationError(f"{source}: A must be {n} x {n}")
    if len(Ts) != m or len(r) != m or len(s) != m:
        raise ValidationError(f"{source}: need m = {m} entries in T, r and s")
    return REPvProblem(A=A, B=B, Ts=tuple(Ts), r=tuple(r), s=tuple(s))


def parse_problem(obj, source="<problem>"):
    kind = obj.get("kind", "pepv")
    if kind == "repv":
        return parse_repv(obj, source)
    if kind == "pepv":
        return parse_pepv(obj, source)
    raise ValidationError(f"{source}: unknown problem kind {kind!r}")


def load_problem(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_problem(obj, source=str(path))


# ---------------------------------------------------------------------------
# Serialization (fixture generation and manifests)


def _to_pair(c):
    c = complex(c)
    return [c.real, c.imag]


def pepv_to_obj(T: PolyMatrixT) -> dict:
    rows = []
    for i in range(T.n):
        entries = []
        for j in range(T.n):
            entries.append([
                {"xexp": list(t.exp),
                 "zcoeffs": [_to_pair(cc) for cc in t.coeff.coef]}
                for t in T.entries[i][j]
            ])
        rows.append({"degree_x": T.row_degrees[i], "entries": entries})
    return {"kind": "pepv", "n": T.n, "z_degree": T.z_degree, "rows": rows}


def repv_to_obj(R: REPvProblem) -> dict:
    def mat(M):
        return [[_to_pair(c) for c in row] for row in np.asarray(M)]

    def vec(v):
        return [_to_pair(c) for c in np.asarray(v)]

    return {
        "kind": "repv", "n": R.n, "m": R.m,
        "A": mat(R.A), "B": mat(R.B),
        "T": [mat(t) for t in R.Ts],
        "r": [vec(v) for v in R.r],
        "s": [vec(v) for v in R.s],
    }


def save_problem(problem, path):
    if isinstance(problem, PolyMatrixT):
        obj = pepv_to_obj(problem)
    elif isinstance(problem, REPvProblem):
        obj = repv_to_obj(problem)
    else:
        raise ValidationError("unknown problem type")
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")
