import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapestress import errors
from shapestress.tps import (
    grid_to_csv,
    grid_to_svg,
    tps_eval,
    tps_fit,
    tps_grid,
    tps_kernel,
)

from oracles import rotations, tps_quadrature_energy


def random_landmarks(rng, k):
    # rejection-free spread points: jittered circle avoids near-duplicates and collinearity
    theta = np.sort(rng.uniform(0, 2 * np.pi, k))
    theta += np.arange(k) * 0.05
    r = rng.uniform(0.5, 1.5, k)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def test_kernel_values():
    assert tps_kernel(np.zeros(2)) == 0.0
    assert tps_kernel(np.array([1.0, 0.0])) == 0.0
    assert tps_kernel(np.array([0.0, 2.0])) == pytest.approx(4 * math.log(2))


def test_identity_fit_is_affine_identity():
    T = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.3, 0.6]], float)
    d = tps_fit(T, T)
    assert np.allclose(d.weights, 0, atol=1e-10)
    assert np.allclose(d.affine, np.eye(2))
    assert d.bending_energy < 1e-12


def test_interpolates_landmarks():
    rng = np.random.default_rng(0)
    T = random_landmarks(rng, 8)
    Y = T + 0.2 * rng.standard_normal(T.shape)
    d = tps_fit(T, Y)
    assert np.max(np.abs(tps_eval(d, T) - Y)) < 1e-8
    assert np.allclose(d(T[0]), Y[0])


def test_side_conditions():
    rng = np.random.default_rng(1)
    T = random_landmarks(rng, 10)
    d = tps_fit(T, T + 0.3 * rng.standard_normal(T.shape))
    assert np.max(np.abs(d.weights.sum(axis=0))) < 1e-8
    assert np.max(np.abs(T.T @ d.weights)) < 1e-8
    assert d.bending_energy > 0


def test_affine_target_has_no_bending():
    rng = np.random.default_rng(2)
    T = random_landmarks(rng, 7)
    B = np.array([[1.3, 0.4], [-0.2, 0.8]])
    d = tps_fit(T, T @ B.T + [2.0, -1.0])
    assert np.max(np.abs(d.weights)) < 1e-8
    assert d.bending_energy < 1e-10
    assert np.allclose(d.affine, B)


def test_errors():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    with pytest.raises(errors.InsufficientLandmarks):
        tps_fit(sq[:3], sq[:3])
    with pytest.raises(errors.DuplicateLandmarks):
        tps_fit(np.vstack([sq, sq[:1]]), np.vstack([sq, sq[:1]]))
    line = np.column_stack([np.arange(5.0), 2 * np.arange(5.0)])
    with pytest.raises(errors.CollinearLandmarks):
        tps_fit(line, line + 1)
    with pytest.raises(errors.DimensionMismatch):
        tps_fit(sq, np.vstack([sq, [[2, 2]]]))


def test_quadrature_matches_reported_energy():
    rng = np.random.default_rng(3)
    T = random_landmarks(rng, 6)
    d = tps_fit(T, T + 0.2 * rng.standard_normal(T.shape))
    J = tps_quadrature_energy(d)
    assert J / (8 * np.pi * d.bending_energy) == pytest.approx(1.0, rel=0.05)


def test_grid_structure_and_exports():
    T = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.4]], float)
    Y = T.copy()
    Y[4] = [0.6, 0.5]
    d = tps_fit(T, Y)
    g = tps_grid(d, rows=2, cols=2)
    assert g.shape == (2, 2) and len(g.edges) == 4
    g = tps_grid(d, rows=5, cols=4, margin=0.0)
    assert g.nodes.reshape(-1, 2).min(axis=0) == pytest.approx(T.min(axis=0))
    assert np.allclose(g.mapped.reshape(-1, 2), d(g.nodes.reshape(-1, 2)))
    csv_text = grid_to_csv(g)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "i,j,x,y"
    assert len(lines) == 1 + 20
    root = ET.fromstring(grid_to_svg(g))
    assert root.tag.endswith("svg")
    circles = [e for e in root.iter() if e.tag.endswith("circle")]
    assert len(circles) == 2 * len(T)
    fills = {c.get("fill") for c in circles}
    assert "none" in fills and len(fills) == 2


def test_grid_needs_two_rows():
    T = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    with pytest.raises(ValueError):
        tps_grid(tps_fit(T, T), rows=1, cols=5)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * np.pi), st.floats(0.2, 5.0))
def test_bending_energy_similarity_behaviour(seed, theta, s):
    # rotating both clouds together leaves J unchanged; scaling source and
    # target together by s leaves J unchanged as well (J is scale free in 2-D)
    rng = np.random.default_rng(seed)
    T = random_landmarks(rng, 6)
    Y = T + 0.2 * rng.standard_normal(T.shape)
    R = rotations(np.asarray(theta))
    J0 = tps_fit(T, Y).bending_energy
    J1 = tps_fit(T @ R, Y @ R).bending_energy
    assert J1 == pytest.approx(J0, rel=1e-7, abs=1e-9)
    J2 = tps_fit(s * T, s * Y).bending_energy
    assert J2 == pytest.approx(J0, rel=1e-6, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(4, 12))
def test_interpolation_property(seed, k):
    rng = np.random.default_rng(seed)
    T = random_landmarks(rng, k)
    Y = T + 0.3 * rng.standard_normal(T.shape)
    d = tps_fit(T, Y)
    assert np.max(np.abs(d(T) - Y)) < 1e-8
