"""Discrete operators: interpolation, Gauss gradient, stream-function
fluxes, and the indicator function."""

import numpy as np
import pytest

from qgfv import (CellField, DirichletBC, build_mesh, cell_flux_divergence,
                  face_interpolate, gauss_gradient, indicator_face_values,
                  indicator_function, planetary_bc, streamfunction_fluxes)

from _dense_reference import Grid, dense_gradient, dense_indicator, vertex_values


def test_face_interpolate_constant():
    m = build_mesh(3, 4, (0, 1, -1, 1))
    f = CellField.constant(m, 2.5, DirichletBC(2.5))
    assert np.all(face_interpolate(f) == 2.5)


def test_face_interpolate_affine_exact():
    m = build_mesh(4, 6, (0, 1, -1, 1))
    f = CellField.from_function(m, lambda x, y: y, planetary_bc())
    vals = face_interpolate(f)
    assert np.abs(vals - m.face_centroid[:, 1]).max() < 1e-14


def test_face_interpolate_two_cell_example():
    # cells at x = 0.25, 0.75: interior face value (0.0625 + 0.5625) / 2
    m = build_mesh(2, 1, (0, 1, 0, 1))
    f = CellField.from_function(m, lambda x, y: x ** 2, DirichletBC(lambda x, y: x ** 2))
    vals = face_interpolate(f)
    interior = m.interior_faces
    assert interior.size == 1
    assert vals[interior[0]] == pytest.approx(0.3125, abs=1e-15)


def test_gradient_requires_bc():
    m = build_mesh(2, 2, (0, 1, 0, 1))
    f = CellField.constant(m, 1.0)
    with pytest.raises(ValueError):
        gauss_gradient(f)


def test_gradient_of_matching_constant_is_zero():
    m = build_mesh(5, 3, (0, 1, -1, 1))
    f = CellField.constant(m, 3.25, DirichletBC(3.25))
    assert np.abs(gauss_gradient(f)).max() == 0.0


def test_gradient_affine_exact():
    m = build_mesh(4, 8, (0, 1, -1, 1))
    f = CellField.from_function(m, lambda x, y: y, planetary_bc())
    g = gauss_gradient(f)
    assert np.abs(g - np.array([0.0, 1.0])).max() < 1e-14

    f = CellField.from_function(m, lambda x, y: 2 * x - 3 * y,
                                DirichletBC(lambda x, y: 2 * x - 3 * y))
    g = gauss_gradient(f)
    assert np.abs(g - np.array([2.0, -3.0])).max() < 1e-13


def test_gradient_quadratic_matches_reference():
    # independent evaluation of the Gauss face-sum on the 16-cell mesh
    m = build_mesh(4, 4, (0, 1, 0, 1))
    fn = lambda x, y: x ** 2
    f = CellField.from_function(m, fn, DirichletBC(fn))
    g = gauss_gradient(f)
    ref = dense_gradient(Grid(4, 4, (0, 1, 0, 1)), f.values, fn)
    assert np.abs(g - ref).max() < 1e-14


def test_fluxes_zero_for_zero_psi():
    m = build_mesh(4, 4, (0, 1, -1, 1))
    psi = CellField.constant(m, 0.0, DirichletBC(0.0))
    assert np.all(streamfunction_fluxes(psi).values == 0.0)


def test_fluxes_telescope_per_cell():
    m = build_mesh(16, 32, (0, 1, -1, 1))
    rng = np.random.default_rng(7)
    psi = CellField(m, rng.standard_normal(m.n_cells), DirichletBC(0.0))
    div = cell_flux_divergence(streamfunction_fluxes(psi))
    assert np.abs(div).max() < 1e-13


def test_fluxes_match_vertex_difference_table():
    # psi = x sampled at cell centers on a 3x3 mesh; the whole flux table
    # is reproduced from an independent vertex-difference evaluation
    m = build_mesh(3, 3, (0, 1, 0, 1))
    psi = CellField.from_function(m, lambda x, y: x, DirichletBC(0.0))
    fluxes = streamfunction_fluxes(psi)

    g = Grid(3, 3, (0, 1, 0, 1))
    v = vertex_values(g, psi.values, lambda x, y: 0.0)
    for f in m.faces():
        (x1, y1), (x2, y2) = f.v1, f.v2
        i1, j1 = round((x1 - m.x_min) / m.dx), round((y1 - m.y_min) / m.dy)
        i2, j2 = round((x2 - m.x_min) / m.dx), round((y2 - m.y_min) / m.dy)
        if f.area[0] != 0:  # x-normal: top minus bottom, times orientation
            expected = np.sign(f.area[0]) * (v[max(j1, j2), i1] - v[min(j1, j2), i1])
        else:  # y-normal: left minus right, times orientation
            expected = np.sign(f.area[1]) * (v[j1, min(i1, i2)] - v[j1, max(i1, i2)])
        assert fluxes.values[f.index] == pytest.approx(expected, abs=1e-15)

    # interior y-normal faces whose both endpoints are interior vertices
    # carry exactly -dx for this field
    inner = [f for f in m.faces()
             if f.area[1] > 0 and not f.is_boundary
             and 0 < f.v1[0] < 1 and 0 < f.v2[0] < 1]
    assert inner, "expected interior y-normal faces away from the boundary"
    for f in inner:
        assert fluxes.values[f.index] == pytest.approx(-m.dx, abs=1e-15)


def test_indicator_constant_field():
    m = build_mesh(6, 6, (0, 1, -1, 1))
    q = CellField.constant(m, 4.0, DirichletBC(4.0))
    assert np.all(indicator_function(q).values == 0.0)


def test_indicator_unit_gradient():
    m = build_mesh(8, 8, (0, 1, -1, 1))
    q = CellField.from_function(m, lambda x, y: y, planetary_bc())
    assert np.abs(indicator_function(q).values - 1.0).max() < 1e-14


def test_indicator_small_gradient_keeps_magnitude():
    # |grad q| = 0.5 < 1 everywhere, so the max(1, .) branch leaves it as is
    m = build_mesh(8, 8, (0, 1, -1, 1))
    q = CellField.from_function(m, lambda x, y: 0.5 * y,
                                DirichletBC(lambda x, y: 0.5 * y))
    a = indicator_function(q)
    assert np.abs(a.values - 0.5).max() < 1e-14


def test_indicator_bounds_random_fields():
    rng = np.random.default_rng(42)
    m = build_mesh(12, 10, (0, 1, -1, 1))
    for _ in range(50):
        q = CellField(m, 10 * rng.standard_normal(m.n_cells), planetary_bc())
        a = indicator_function(q).values
        assert a.min() >= 0.0 and a.max() <= 1.0 + 1e-15


def test_indicator_matches_reference():
    rng = np.random.default_rng(3)
    m = build_mesh(5, 4, (0, 1, -1, 1))
    vals = rng.standard_normal(m.n_cells)
    a = indicator_function(CellField(m, vals, planetary_bc()))
    ref = dense_indicator(Grid(5, 4, (0, 1, -1, 1)), vals)
    assert np.abs(a.values - ref).max() < 1e-14


def test_indicator_scale_invariance_above_unit_norm():
    # once the gradient's sup norm exceeds 1, both q and c*q (c >= 1)
    # normalize by their own sup norm, giving identical indicators
    rng = np.random.default_rng(11)
    m = build_mesh(8, 8, (0, 1, -1, 1))
    vals = rng.standard_normal(m.n_cells)
    q = CellField(m, vals, DirichletBC(0.0))
    grad_mag = np.hypot(*gauss_gradient(q).T)
    scale = 2.0 / grad_mag.max()  # force sup norm 2 >= 1
    q = CellField(m, scale * vals, DirichletBC(0.0))
    base = indicator_function(q).values
    for c in (1.0, 2.0, 17.5):
        scaled = indicator_function(CellField(m, c * scale * vals, DirichletBC(0.0)))
        assert np.abs(scaled.values - base).max() < 1e-13


def test_indicator_face_values_mean_and_owner():
    m = build_mesh(3, 2, (0, 1, 0, 1))
    rng = np.random.default_rng(5)
    a = CellField(m, rng.uniform(0, 1, m.n_cells))
    fv = indicator_face_values(a)
    for f in m.faces():
        if f.is_boundary:
            assert fv[f.index] == a.values[f.owner]
        else:
            assert fv[f.index] == pytest.approx(
                0.5 * (a.values[f.owner] + a.values[f.neighbor]), abs=1e-15)


def test_cellfield_rejects_nonfinite_and_bad_shape():
    m = build_mesh(2, 2, (0, 1, 0, 1))
    with pytest.raises(ValueError):
        CellField(m, [1.0, np.nan, 0.0, 2.0])
    with pytest.raises(ValueError):
        CellField(m, [1.0, 2.0])
