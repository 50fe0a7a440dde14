"""Machine-readable outputs: eigenpair JSON, CSV plot data, run manifests."""

from __future__ import annotations

import json
import platform
import sys
import time
from pathlib import Path

import numpy as np


def eigenpairs_obj(pairs):
    return [
        {
            "z": [p.z.real, p.z.imag],
            "x": [[c.real, c.imag] for c in np.asarray(p.x)],
            "residual": (None if p.residual is None or np.isnan(p.residual)
                         else float(p.residual)),
            "inside": bool(p.inside),
            "flags": list(p.flags),
        }
        for p in pairs
    ]


def write_eigenpairs(path, pairs):
    Path(path).write_text(
        json.dumps(eigenpairs_obj(pairs), indent=2, sort_keys=True) + "\n")


def write_csv(path, pairs):
    lines = ["re,im,residual,inside"]
    for p in pairs:
        res = "" if p.residual is None or np.isnan(p.residual) \
            else repr(float(p.residual))
        lines.append(f"{p.z.real!r},{p.z.imag!r},{res},{1 if p.inside else 0}")
    Path(path).write_text("\n".join(lines) + "\n")


def versions() -> dict:
    from . import __version__

    return {
        "pepv": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


def build_manifest(command, problem_path, contour_cfg, config, seed,
                   timings=None, outputs=None, notes=None,
                   extra=None) -> dict:
    manifest = {
        "command": command,
        "problem": str(problem_path),
        "contour": contour_cfg,
        "config": config,
        "seed": seed,
        "versions": versions(),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "timings": timings or {},
        "outputs": outputs or {},
        "notes": notes or [],
    }
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(path, manifest):
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_manifest(path):
    return json.loads(Path(path).read_text())


def summary_table(pairs) -> str:
    """Human-readable eigenpair table for the terminal."""
    if not pairs:
        return "no eigenvalues detected inside the contour"
    header = f"{'Re(z)':>22} {'Im(z)':>22} {'residual':>12} {'inside':>7}  flags"
    lines = [header, "-" * len(header)]
    for p in pairs:
        res = "-" if p.residual is None or np.isnan(p.residual) \
            else f"{p.residual:.3e}"
        flags = ",".join(p.flags) if p.flags else "-"
        lines.append(
            f"{p.z.real:>22.15g} {p.z.imag:>22.15g} {res:>12} "
            f"{str(bool(p.inside)).lower():>7}  {flags}")
    return "\n".join(lines)
