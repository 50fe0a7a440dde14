"""Contours in the complex plane and their quadrature grids.

Supported shapes are circles and rotated ellipses:
``phi(t) = center + exp(i rot) * (rx cos t + i ry sin t)``.  That covers
every experiment we run and keeps the derivative analytic.  Boundary points
classify as outside, so membership is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TooFewNodes, ValidationError


@dataclass(frozen=True)
class Contour:
    center: complex = 0.0 + 0.0j
    rx: float = 1.0
    ry: float = 1.0
    rotation: float = 0.0

    def __post_init__(self):
        if self.rx <= 0 or self.ry <= 0:
            raise ValidationError("contour radii must be positive")

    @property
    def kind(self) -> str:
        return "circle" if self.rx == self.ry and self.rotation == 0.0 else "ellipse"

    @property
    def scale(self) -> float:
        """Length scale used to center/scale moments for conditioning."""
        return max(self.rx, self.ry)

    def phi(self, t):
        rot = np.exp(1j * self.rotation)
        return self.center + rot * (self.rx * np.cos(t) + 1j * self.ry * np.sin(t))

    def dphi(self, t):
        rot = np.exp(1j * self.rotation)
        return rot * (-self.rx * np.sin(t) + 1j * self.ry * np.cos(t))

    def contains(self, z) -> bool:
        """Strict interior test; boundary points report False."""
        w = (complex(z) - self.center) * np.exp(-1j * self.rotation)
        return (w.real / self.rx) ** 2 + (w.imag / self.ry) ** 2 < 1.0

    def to_config(self) -> dict:
        if self.kind == "circle":
            return {
                "kind": "circle",
                "center": [self.center.real, self.center.imag],
                "radius": self.rx,
            }
        return {
            "kind": "ellipse",
            "center": [self.center.real, self.center.imag],
            "radii": [self.rx, self.ry],
            "rotation": self.rotation,
        }


def circle(center=0.0, radius=1.0) -> Contour:
    return Contour(center=complex(center), rx=float(radius), ry=float(radius))


def ellipse(center, rx, ry, rotation=0.0) -> Contour:
    return Contour(center=complex(center), rx=float(rx), ry=float(ry),
                   rotation=float(rotation))


@dataclass(frozen=True)
class NodeGrid:
    """Equidistant parameters t_l = 2 pi l / N with phi and phi' samples."""

    contour: Contour
    N: int
    t: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    dphi: np.ndarray = field(repr=False)


def make_grid(c: Contour, N: int) -> NodeGrid:
    if N < 4:
        raise TooFewNodes(N)
    t = 2.0 * np.pi * np.arange(N) / N
    return NodeGrid(contour=c, N=int(N), t=t, phi=c.phi(t), dphi=c.dphi(t))


def contour_from_config(cfg: dict) -> Contour:
    try:
        kind = cfg["kind"]
        cr, ci = cfg["center"]
        center = complex(cr, ci)
        if kind == "circle":
            return circle(center, float(cfg["radius"]))
        if kind == "ellipse":
            rx, ry = cfg["radii"]
            return ellipse(center, float(rx), float(ry),
                           float(cfg.get("rotation", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad contour config: {exc}") from exc
    raise ValidationError(f"bad contour config: unknown kind {kind!r}")
