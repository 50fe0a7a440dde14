"""Closed-form path and eigenvalue counts for planning and validation.

Exact integer arithmetic throughout (Python integers never overflow).  The
``delta`` field is the generic number of torus solutions of one shifted
system, i.e. the number of paths tracked per shift column; ``total_eigs`` is
the eigenvalue count of the full problem, i.e. the path count of the naive
solve-everything approach.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, prod

from .errors import ValidationError


@dataclass(frozen=True)
class CountReport:
    family: str
    n: int
    d: int | None
    e: int | None
    m: int | None
    delta: int
    total_paths: int
    total_eigs: int | None

    def to_dict(self):
        return {
            "family": self.family,
            "n": self.n,
            "d": self.d,
            "e": self.e,
            "m": self.m,
            "delta": self.delta,
            "total_paths": self.total_paths,
            "total_eigs": self.total_eigs,
        }


def dense_counts(n: int, d: int, e: int) -> CountReport:
    """Counts for rows of equal degree d with dense degree-d shifts."""
    if n < 1 or d < 0 or e < 1:
        raise ValidationError("dense_counts needs n >= 1, d >= 0, e >= 1")
    delta = (d + 1) ** n - d**n
    return CountReport(family="dense", n=n, d=d, e=e, m=None, delta=delta,
                       total_paths=n * delta,
                       total_eigs=e * n * (d + 1) ** (n - 1))


def pyramid_count(n: int, d: int, e: int | None = None) -> CountReport:
    """Counts for equal-degree rows with single-monomial shifts.

    The eigenvalue total depends on the z-degree e and is reported only when
    e is supplied.
    """
    if n < 1 or d < 0:
        raise ValidationError("pyramid_count needs n >= 1, d >= 0")
    if e is not None and e < 1:
        raise ValidationError("z-degree e must be >= 1")
    delta = (d + 1) ** (n - 1)
    eigs = e * n * (d + 1) ** (n - 1) if e is not None else None
    return CountReport(family="pyramid", n=n, d=d, e=e, m=None, delta=delta,
                       total_paths=n * delta, total_eigs=eigs)


def repv_count(n: int, m: int) -> CountReport:
    """Counts for rational problems with m rational terms and constant shifts."""
    if n < 1 or m < 0:
        raise ValidationError("repv_count needs n >= 1, m >= 0")
    delta = sum(comb(n - 1, k) * comb(m, k) for k in range(min(n - 1, m) + 1))
    return CountReport(family="repv", n=n, d=0, e=1, m=m, delta=delta,
                       total_paths=n * delta, total_eigs=comb(n + m, m + 1))


def predicted_delta(row_degrees, style: str) -> int:
    """Generic torus-solution count per shift column for the given shifts.

    dense shifts: prod(d_i + 1) - prod(d_i) (the equal-degree case reduces to
    the closed form of the dense family); monomial shifts: (d+1)^(n-1).
    """
    degs = list(row_degrees)
    n = len(degs)
    if style == "monomial":
        if len(set(degs)) > 1:
            raise ValidationError("monomial shifts need equal row degrees")
        return (degs[0] + 1) ** (n - 1)
    return prod(d + 1 for d in degs) - prod(degs)
