"""Figure rendering for solve reports.

Scatter of extracted eigenvalues against the integration contour, written to
a file next to the delimited output.  Inside eigenvalues are colored by the
log10 of their residual; outside detections are drawn as open squares.
"""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_eigenvalues(path, contour, pairs, title=None, reference=None):
    """Write a contour/eigenvalue scatter plot to ``path``.

    ``reference`` may hold extra complex points to draw as crosses (e.g. an
    independent root oracle).
    """
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    t = np.linspace(0.0, 2.0 * np.pi, 400)
    boundary = contour.phi(t)
    ax.plot(boundary.real, boundary.imag, color="tab:orange", lw=1.2,
            label="contour")

    if reference is not None and len(reference):
        ref = np.asarray(reference, dtype=np.complex128)
        ax.plot(ref.real, ref.imag, "x", color="0.45", ms=6.0,
                label="reference")

    inside = [p for p in pairs if p.inside]
    outside = [p for p in pairs if not p.inside]
    if inside:
        z = np.array([p.z for p in inside])
        res = np.array([max(p.residual, 1e-17) if np.isfinite(p.residual)
                        else 1e-17 for p in inside])
        sc = ax.scatter(z.real, z.imag, c=np.log10(res), cmap="viridis",
                        s=36, zorder=3, label="inside")
        fig.colorbar(sc, ax=ax, label="log10 residual")
    if outside:
        z = np.array([p.z for p in outside])
        ax.plot(z.real, z.imag, "s", mfc="none", color="tab:red", ms=6.0,
                label="outside")

    ax.set_xlabel("Re(z)")
    ax.set_ylabel("Im(z)")
    if title:
        ax.set_title(title)
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_residual_profile(path, n_values, residual_rows, title=None):
    """Residual statistics (min/median/max) against node counts."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    stats = {
        "min": [float(np.min(r)) for r in residual_rows],
        "median": [float(np.median(r)) for r in residual_rows],
        "max": [float(np.max(r)) for r in residual_rows],
    }
    for name, vals in stats.items():
        ax.semilogy(n_values, vals, marker="o", label=name)
    ax.set_xlabel("quadrature nodes")
    ax.set_ylabel("residual")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
