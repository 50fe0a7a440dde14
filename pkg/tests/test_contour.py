"""Contours, quadrature grids, membership."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pepv.contour import circle, contour_from_config, ellipse, make_grid
from pepv.errors import TooFewNodes, ValidationError


def test_unit_circle_grid_nodes():
    grid = make_grid(circle(0.0, 1.0), 4)
    assert grid.t[0] == 0.0
    assert_allclose(grid.phi[0], 1.0)
    assert_allclose(grid.dphi[0], 1j)
    assert_allclose(grid.t[1], np.pi / 2)
    assert_allclose(grid.phi[1], 1j, atol=1e-16)
    assert_allclose(grid.dphi[1], -1.0, atol=1e-16)


def test_reference_ellipse_first_node():
    grid = make_grid(ellipse(0.6, 0.4, 0.3), 50)
    assert_allclose(grid.phi[0], 1.0 + 0.0j)


def test_too_few_nodes():
    with pytest.raises(TooFewNodes):
        make_grid(circle(0.0, 1.0), 3)


def test_contains_basic():
    c = circle(0.0, 1.0)
    assert c.contains(0.0)
    assert not c.contains(2.0)
    assert not c.contains(1.0)  # boundary counts as outside


def test_contains_reference_eigenvalues():
    c = ellipse(0.6, 0.4, 0.3)
    assert c.contains(0.5919)
    assert not c.contains(2.3845)


def test_contains_rotated_ellipse():
    c = ellipse(1.0 + 1.0j, 0.5, 0.1, rotation=np.pi / 4)
    along = 1.0 + 1.0j + 0.4 * np.exp(1j * np.pi / 4)
    across = 1.0 + 1.0j + 0.4j * np.exp(1j * np.pi / 4)
    assert c.contains(along)
    assert not c.contains(across)


def test_discrete_residue_identities():
    # (1 / 2 pi i) contour integral of z^m equals [m == -1] exactly on the
    # discretized unit circle for -N < m < N - 1.
    N = 32
    grid = make_grid(circle(0.0, 1.0), N)
    for m in range(-N + 1, N - 1):
        val = np.sum(grid.phi**m * grid.dphi) / (1j * N)
        want = 1.0 if m == -1 else 0.0
        assert abs(val - want) < 1e-14, m


def test_boundary_scaling_membership():
    c = ellipse(0.3 - 0.2j, 0.7, 0.4, rotation=0.3)
    grid = make_grid(c, 16)
    for p in grid.phi:
        inner = c.center + 0.999 * (p - c.center)
        outer = c.center + 1.001 * (p - c.center)
        assert c.contains(inner)
        assert not c.contains(outer)


def test_config_round_trip():
    for c in (circle(1.0 + 2.0j, 0.5), ellipse(0.1j, 0.4, 0.3, 0.2)):
        again = contour_from_config(c.to_config())
        assert again == c


def test_bad_config_rejected():
    with pytest.raises(ValidationError):
        contour_from_config({"kind": "square", "center": [0, 0]})
    with pytest.raises(ValidationError):
        contour_from_config({"kind": "circle", "center": [0, 0]})
