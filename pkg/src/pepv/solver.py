"""End-to-end solve: shifts, trace columns, moments, extraction, refinement.

The whole solve is a deterministic function of (problem, config): column
order, path order and summation order are fixed, and every random draw flows
from the master seed.  Columns are independent and may run on a thread pool;
results are merged by column index.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .contour import Contour, make_grid
from .counts import predicted_delta
from .errors import ValidationError
from .extraction import extract_detailed, hankel_pair, refine_eigenpair, residual
from .poly import PolyMatrixT, supports_span_standard_lattice
from .trace import columns_to_samples, evaluate_column, make_shifts, moments
from .tracker import TrackOptions


@dataclass(frozen=True)
class SolveConfig:
    N: int = 200
    M: int = 2
    seed: int = 0
    shift_style: str = "dense"
    tol_rank: float = 1e-8
    residual_threshold: float | None = 1e-6
    keep_outside: bool = False
    refine: bool = True
    expected_delta: int | None = None
    threads: int = 1
    track: TrackOptions = field(default_factory=TrackOptions)

    def __post_init__(self):
        if self.N < 4:
            raise ValidationError("need N >= 4 quadrature nodes")
        if self.M < 1:
            raise ValidationError("need M >= 1 Hankel blocks")
        if self.shift_style not in ("dense", "monomial"):
            raise ValidationError(f"unknown shift style {self.shift_style!r}")

    def to_dict(self):
        return {
            "N": self.N, "M": self.M, "seed": self.seed,
            "shift_style": self.shift_style, "tol_rank": self.tol_rank,
            "residual_threshold": self.residual_threshold,
            "keep_outside": self.keep_outside, "refine": self.refine,
            "expected_delta": self.expected_delta, "threads": self.threads,
        }


@dataclass
class ColumnSummary:
    shift_index: int
    path_count: int
    bezout_paths: int
    discarded: dict
    jumped_paths: list

    def to_dict(self):
        return {
            "shift_index": self.shift_index,
            "path_count": self.path_count,
            "bezout_paths": self.bezout_paths,
            "discarded": self.discarded,
            "jumped_paths": self.jumped_paths,
        }


@dataclass
class SolveReport:
    eigenpairs: list
    columns: list
    moment_norms: list
    singular_values: np.ndarray
    rank: int
    sigma_gap: float
    warnings: list
    timings: dict
    config: SolveConfig
    contour: Contour
    delta_expected: int | None

    def to_dict(self):
        return {
            "eigenpairs": [
                {
                    "z": [p.z.real, p.z.imag],
                    "x": [[c.real, c.imag] for c in p.x],
                    "residual": p.residual,
                    "inside": p.inside,
                    "flags": list(p.flags),
                }
                for p in self.eigenpairs
            ],
            "columns": [c.to_dict() for c in self.columns],
            "moment_norms": self.moment_norms,
            "singular_values": [float(s) for s in self.singular_values],
            "rank": self.rank,
            "sigma_gap": (None if np.isinf(self.sigma_gap)
                          else float(self.sigma_gap)),
            "warnings": self.warnings,
            "timings": self.timings,
            "config": self.config.to_dict(),
            "contour": self.contour.to_config(),
            "delta_expected": self.delta_expected,
        }


def expected_retained(T: PolyMatrixT, shifts, style: str) -> int:
    """Predicted per-column endpoint count, including the origin root.

    The formulas of the planning module count torus solutions.  When every
    row degree is 1 the shifted system additionally has the origin as a
    regular root (its Jacobian there is the negated shift coefficient
    matrix), and the tracker legitimately retains it; it contributes zero to
    every trace.  Rows of degree >= 2 make the origin a singular multiple
    point whose incoming paths stall and are discarded, and degree-0 rows
    remove it altogether.
    """
    base = predicted_delta(T.row_degrees, style)
    if all(d == 1 for d in T.row_degrees):
        b = shifts[0].linear_matrix()
        scale = float(np.max(np.abs(b)))
        from .linalg import det

        if scale > 0 and abs(det(b / scale)) > 1e-10:
            return base + 1
    return base


def solve(T: PolyMatrixT, c: Contour, cfg: SolveConfig) -> SolveReport:
    """Run the full contour pipeline on a polynomial problem."""
    timings = {}
    captured = []
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as wrec:
        warnings.simplefilter("always")
        grid = make_grid(c, cfg.N)
        shifts = make_shifts(T, cfg.shift_style, cfg.seed)
        if not supports_span_standard_lattice(T):
            warnings.warn("row supports do not span the standard lattice; "
                          "trace poles may misbehave", UserWarning)
        delta_hint = cfg.expected_delta
        if delta_hint is None:
            delta_hint = expected_retained(T, shifts, cfg.shift_style)
        timings["setup"] = time.perf_counter() - t0

        t1 = time.perf_counter()

        def run_column(j):
            return evaluate_column(T, shifts[j], grid, opts=cfg.track,
                                   shift_index=j, expected_delta=delta_hint)

        if cfg.threads == 1:
            columns = [run_column(j) for j in range(T.n)]
        else:
            workers = cfg.threads if cfg.threads > 0 else None
            with ThreadPoolExecutor(max_workers=workers) as pool:
                columns = list(pool.map(run_column, range(T.n)))
        timings["tracking"] = time.perf_counter() - t1

        t2 = time.perf_counter()
        moms = moments(columns_to_samples(columns), grid, cfg.M,
                       center=c.center, scale=c.scale)
        pairs, info = extract_detailed(hankel_pair(moms), c, cfg.tol_rank,
                                       keep_outside=True)
        timings["extraction"] = time.perf_counter() - t2

        t3 = time.perf_counter()
        final = []
        dropped_residual = 0
        for pair in pairs:
            pair.residual = residual(T, pair.x, pair.z)
            if cfg.refine:
                refined = refine_eigenpair(T, pair)
                if "refined" in refined.flags:
                    if abs(refined.z - pair.z) > 10.0 * np.sqrt(
                            max(pair.residual, 0.0)):
                        refined = replace(
                            refined, flags=refined.flags + ("unstable",))
                    refined = replace(refined,
                                      inside=c.contains(refined.z))
                pair = refined
            if not pair.inside:
                if not cfg.keep_outside:
                    continue
                pair = replace(pair, flags=pair.flags + ("outside",))
            if cfg.residual_threshold is not None \
                    and pair.residual > cfg.residual_threshold:
                if pair.inside:
                    dropped_residual += 1
                    continue
                pair = replace(pair, flags=pair.flags + ("high-residual",))
            final.append(pair)
        timings["refine"] = time.perf_counter() - t3
        if dropped_residual:
            warnings.warn(
                f"dropped {dropped_residual} inside pair(s) above the "
                f"residual threshold", UserWarning)
        inside_count = sum(1 for p in final if p.inside)
        if not info.saturated and cfg.residual_threshold is not None \
                and inside_count != info.rank:
            warnings.warn(
                f"inside count {inside_count} != numerical rank {info.rank}",
                UserWarning)
        captured = [f"{w.category.__name__}: {w.message}" for w in wrec]

    timings["total"] = time.perf_counter() - t0
    summaries = [
        ColumnSummary(
            shift_index=col.shift_index,
            path_count=col.path_count,
            bezout_paths=col.start_info.get("bezout_paths", 0),
            discarded={k: v for k, v in col.start_info.items()
                       if k in ("diverged", "underflow", "nontoric")},
            jumped_paths=list(col.node_diagnostics),
        )
        for col in columns
    ]
    return SolveReport(
        eigenpairs=final, columns=summaries, moment_norms=moms.norms(),
        singular_values=info.singular_values, rank=info.rank,
        sigma_gap=info.sigma_gap, warnings=captured, timings=timings,
        config=cfg, contour=c, delta_expected=delta_hint)
