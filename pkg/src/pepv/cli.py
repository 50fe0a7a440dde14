"""Command-line interface.

Subcommands:
  solve   full pipeline on a polynomial problem file
  beyn    contour solver for eigenvector-independent problems (degree 0)
  repv    lifted pipeline for rational problems
  count   closed-form path/eigenvalue counts
  roots   univariate polynomial roots (companion matrix)

Every solve writes eigenpairs.json, eigenvalues.csv, a replayable
manifest.json and (unless --no-plot) an eigenvalues.png scatter into
--out-dir.  Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from .beyn import beyn_solve_detailed
from .contour import Contour, circle, contour_from_config, ellipse
from .counts import dense_counts, pyramid_count, repv_count
from .errors import NumericalError, RankZero, ValidationError
from .extraction import refine_eigenpair, residual
from .linalg import poly_roots
from .poly import PolyMatrixT
from .problems import load_problem
from .repv import REPvProblem, solve_repv
from . import report as rep
from .solver import SolveConfig, solve
from .tracker import TrackOptions


def _parse_residual_tol(text):
    if text.lower() in ("none", "off", "inf"):
        return None
    return float(text)


def _add_contour_flags(p):
    p.add_argument("--contour-kind", choices=["circle", "ellipse"],
                   default=None)
    p.add_argument("--contour-center", nargs=2, type=float, default=None,
                   metavar=("RE", "IM"))
    p.add_argument("--contour-radius", type=float, default=None)
    p.add_argument("--contour-radii", nargs=2, type=float, default=None,
                   metavar=("RX", "RY"))
    p.add_argument("--contour-rotation", type=float, default=None)


def _add_solve_flags(p, shift=True):
    p.add_argument("--problem", type=str, default=None,
                   help="problem JSON file")
    p.add_argument("--config", type=str, default=None,
                   help="JSON config with contour/N/M/... fields")
    p.add_argument("--replay", type=str, default=None,
                   help="re-run from a previously written manifest.json")
    _add_contour_flags(p)
    p.add_argument("--nodes", "-N", type=int, default=None,
                   help="quadrature node count N")
    p.add_argument("--moments", "-M", type=int, default=None,
                   help="Hankel block count M (2M moment matrices)")
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default 0, never entropy)")
    if shift:
        p.add_argument("--shift", choices=["dense", "monomial"], default=None)
    p.add_argument("--rank-tol", type=float, default=None)
    p.add_argument("--residual-tol", type=_parse_residual_tol, default="keep",
                   help="residual filter threshold, or 'none' to disable")
    p.add_argument("--keep-outside", action="store_true", default=None)
    p.add_argument("--refine", action=argparse.BooleanOptionalAction,
                   default=None)
    p.add_argument("--expected-delta", type=int, default=None)
    p.add_argument("--threads", type=int, default=None,
                   help="column workers; 0 = all cores")
    p.add_argument("--out-dir", type=str, default="pepv-out")
    p.add_argument("--no-plot", action="store_true",
                   help="skip figure rendering")


_CONFIG_KEYS = ("N", "M", "seed", "shift_style", "tol_rank",
                "residual_threshold", "keep_outside", "refine",
                "expected_delta", "threads")


def _resolve(args, command):
    """Merge manifest < config file < command-line flags."""
    cfg = {
        "N": 200, "M": 2, "seed": 0, "shift_style": "dense",
        "tol_rank": 1e-8, "residual_threshold": 1e-6, "keep_outside": False,
        "refine": True, "expected_delta": None, "threads": 1,
    }
    contour_cfg = None
    problem_path = args.problem
    if args.replay:
        manifest = rep.load_manifest(args.replay)
        if manifest.get("command") != command:
            raise ValidationError(
                f"manifest was written by '{manifest.get('command')}', "
                f"not '{command}'")
        problem_path = problem_path or manifest.get("problem")
        contour_cfg = manifest.get("contour")
        for key in _CONFIG_KEYS:
            if key in manifest.get("config", {}):
                cfg[key] = manifest["config"][key]
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"{args.config}: {exc}") from exc
        contour_cfg = file_cfg.get("contour", contour_cfg)
        problem_path = problem_path or file_cfg.get("problem")
        for key in _CONFIG_KEYS:
            if key in file_cfg:
                cfg[key] = file_cfg[key]
        if "shift" in file_cfg:
            cfg["shift_style"] = file_cfg["shift"]
    if args.contour_kind or args.contour_center or args.contour_radius \
            or args.contour_radii:
        center = complex(*(args.contour_center or (0.0, 0.0)))
        if args.contour_radii:
            contour = ellipse(center, args.contour_radii[0],
                              args.contour_radii[1],
                              args.contour_rotation or 0.0)
        elif args.contour_radius is not None:
            contour = circle(center, args.contour_radius)
        else:
            raise ValidationError(
                "contour flags need --contour-radius or --contour-radii")
        contour_cfg = contour.to_config()
    if contour_cfg is None:
        raise ValidationError("no contour given (flags, --config or --replay)")
    flag_map = {
        "N": args.nodes, "M": args.moments, "seed": args.seed,
        "tol_rank": args.rank_tol, "keep_outside": args.keep_outside,
        "refine": args.refine, "expected_delta": args.expected_delta,
        "threads": args.threads,
        "shift_style": getattr(args, "shift", None),
    }
    for key, val in flag_map.items():
        if val is not None:
            cfg[key] = val
    if args.residual_tol != "keep":
        cfg["residual_threshold"] = args.residual_tol
    if problem_path is None:
        raise ValidationError("no problem file given (--problem)")
    return problem_path, contour_from_config(contour_cfg), cfg


def _write_run(args, command, problem_path, contour, cfg, pairs, notes,
               timings, extra=None, reference=None):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "eigenpairs": str(out / "eigenpairs.json"),
        "csv": str(out / "eigenvalues.csv"),
        "manifest": str(out / "manifest.json"),
    }
    rep.write_eigenpairs(paths["eigenpairs"], pairs)
    rep.write_csv(paths["csv"], pairs)
    if not args.no_plot:
        from .plots import render_eigenvalues

        paths["plot"] = str(out / "eigenvalues.png")
        render_eigenvalues(paths["plot"], contour, pairs,
                           title=f"{command}: {Path(problem_path).name}",
                           reference=reference)
    manifest = rep.build_manifest(
        command=command, problem_path=problem_path,
        contour_cfg=contour.to_config(), config=cfg, seed=cfg.get("seed", 0),
        timings=timings, outputs=paths, notes=notes, extra=extra)
    rep.write_manifest(paths["manifest"], manifest)
    print(rep.summary_table(pairs))
    for note in notes:
        print(f"note: {note}")
    print(f"wrote {', '.join(sorted(paths.values()))}")
    return 0


def _postprocess(pairs, contour, cfg, refine_fun, residual_fun):
    """Shared refine/classify/filter stage for the beyn and repv commands."""
    final = []
    notes = []
    dropped = 0
    for pair in pairs:
        if np.isnan(pair.residual):
            pair = replace(pair, residual=residual_fun(pair))
        if cfg["refine"] and "refined" not in pair.flags:
            refined = refine_fun(pair)
            if "refined" in refined.flags:
                refined = replace(refined,
                                  inside=contour.contains(refined.z))
            pair = refined
        if not pair.inside:
            if not cfg["keep_outside"]:
                continue
            if "outside" not in pair.flags:
                pair = replace(pair, flags=pair.flags + ("outside",))
        thr = cfg["residual_threshold"]
        if thr is not None and pair.residual > thr:
            if pair.inside:
                dropped += 1
                continue
            pair = replace(pair, flags=pair.flags + ("high-residual",))
        final.append(pair)
    if dropped:
        notes.append(f"dropped {dropped} inside pair(s) above the residual "
                     f"threshold")
    return final, notes


def cmd_solve(args):
    problem_path, contour, cfg = _resolve(args, "solve")
    problem = load_problem(problem_path)
    if not isinstance(problem, PolyMatrixT):
        raise ValidationError("not a polynomial problem; use the repv "
                              "subcommand")
    config = SolveConfig(**cfg, track=TrackOptions())
    try:
        result = solve(problem, contour, config)
        pairs, notes, timings = result.eigenpairs, list(result.warnings), \
            result.timings
        extra = {
            "columns": [c.to_dict() for c in result.columns],
            "rank": result.rank,
            "moment_norms": result.moment_norms,
            "delta_expected": result.delta_expected,
        }
    except RankZero as exc:
        pairs, notes, timings, extra = [], [str(exc)], {}, None
    return _write_run(args, "solve", problem_path, contour, cfg, pairs,
                      notes, timings, extra=extra)


def cmd_beyn(args):
    problem_path, contour, cfg = _resolve(args, "beyn")
    problem = load_problem(problem_path)
    if not isinstance(problem, PolyMatrixT):
        raise ValidationError("beyn needs a polynomial problem file")
    notes = []
    extra = None
    try:
        with warnings.catch_warnings(record=True) as wrec:
            warnings.simplefilter("always")
            pairs, info = beyn_solve_detailed(
                problem, contour, N=cfg["N"], M=cfg["M"], q=args.probe_width,
                seed=cfg["seed"], tol_rank=cfg["tol_rank"], keep_outside=True)
            final, extra_notes = _postprocess(
                pairs, contour, cfg,
                refine_fun=lambda p: refine_eigenpair(problem, p),
                residual_fun=lambda p: residual(problem, p.x, p.z))
        notes = [f"{w.category.__name__}: {w.message}" for w in wrec] \
            + extra_notes
        extra = {"rank": info.rank}
    except RankZero as exc:
        final, notes = [], [str(exc)]
    return _write_run(args, "beyn", problem_path, contour, cfg, final, notes,
                      {})


def cmd_repv(args):
    problem_path, contour, cfg = _resolve(args, "repv")
    problem = load_problem(problem_path)
    if not isinstance(problem, REPvProblem):
        raise ValidationError("repv needs a rational problem file "
                              "(\"kind\": \"repv\")")
    notes = []
    extra = None
    try:
        with warnings.catch_warnings(record=True) as wrec:
            warnings.simplefilter("always")
            pairs, info = solve_repv(
                problem, contour, N=cfg["N"], M=cfg["M"], seed=cfg["seed"],
                tol_rank=cfg["tol_rank"], keep_outside=True,
                refine=cfg["refine"])
            final, extra_notes = _postprocess(
                pairs, contour, {**cfg, "refine": False},
                refine_fun=lambda p: p,
                residual_fun=lambda p: problem.residual(p.x, p.z))
        notes = [f"{w.category.__name__}: {w.message}" for w in wrec] \
            + extra_notes
        extra = {
            "delta": info["delta"],
            "columns": [
                {"shift_index": c.shift_index, "path_count": c.path_count,
                 **c.start_info}
                for c in info["columns"]
            ],
        }
    except RankZero as exc:
        final, notes = [], [str(exc)]
    return _write_run(args, "repv", problem_path, contour, cfg, final, notes,
                      {}, extra=extra)


def cmd_count(args):
    if args.family == "dense":
        if args.d is None or args.e is None:
            raise ValidationError("dense counts need -d and -e")
        report = dense_counts(args.n, args.d, args.e)
    elif args.family == "pyramid":
        if args.d is None:
            raise ValidationError("pyramid counts need -d")
        report = pyramid_count(args.n, args.d, e=args.e)
    elif args.family == "repv":
        if args.m is None:
            raise ValidationError("repv counts need -m")
        report = repv_count(args.n, args.m)
    else:
        raise ValidationError(f"invalid family {args.family!r}")
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_roots(args):
    try:
        obj = json.loads(Path(args.coeffs).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"{args.coeffs}: {exc}") from exc
    coeffs = []
    for i, c in enumerate(obj):
        if isinstance(c, (int, float)):
            coeffs.append(complex(c))
        elif isinstance(c, (list, tuple)) and len(c) == 2:
            coeffs.append(complex(c[0], c[1]))
        else:
            raise ValidationError(f"coefficient {i} must be a number or "
                                  f"[re, im] pair")
    roots = poly_roots(coeffs)
    print("re,im")
    for r in roots:
        print(f"{r.real!r},{r.imag!r}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pepv",
        description="Contour-integration eigensolver for polynomial "
                    "eigenvalue problems with eigenvector nonlinearities")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a polynomial problem")
    _add_solve_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("beyn", help="solve a degree-0 problem by LU sampling")
    _add_solve_flags(p, shift=False)
    p.add_argument("--probe-width", type=int, default=None,
                   help="probe column count q (default n)")
    p.set_defaults(func=cmd_beyn)

    p = sub.add_parser("repv", help="solve a rational problem by lifting")
    _add_solve_flags(p, shift=False)
    p.set_defaults(func=cmd_repv)

    p = sub.add_parser("count", help="closed-form path counts")
    p.add_argument("--family", required=True,
                   choices=["dense", "pyramid", "repv"])
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-d", type=int, default=None)
    p.add_argument("-e", type=int, default=None)
    p.add_argument("-m", type=int, default=None)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("roots", help="univariate polynomial roots")
    p.add_argument("--coeffs", required=True,
                   help="JSON file with ascending coefficients")
    p.set_defaults(func=cmd_roots)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
