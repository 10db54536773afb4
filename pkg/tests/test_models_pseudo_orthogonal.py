"""Group manifolds SO+(p, q) rolled inside the full matrix space."""

import numpy as np
import pytest
from scipy.linalg import expm

from semiroll.homogeneous import ControlCurve, TimeGrid, model_residual_report
from semiroll.models.pseudo_orthogonal import (
    description,
    j_symmetric_basis,
    make_pseudo_orthogonal_model,
    roll_pseudo_orthogonal,
    so_pq_basis,
)


@pytest.mark.parametrize("p,q", [(2, 1), (3, 0), (2, 2)])
def test_algebra_bases_split_the_form(p, q):
    n = p + q
    J = np.diag([1.0] * p + [-1.0] * q)
    skew = so_pq_basis(p, q)
    assert len(skew) == n * (n - 1) // 2
    for M in skew:
        assert np.max(np.abs(J @ M + M.T @ J)) <= 1e-14
    sym = j_symmetric_basis(p, q)
    assert len(sym) == n * (n + 1) // 2
    for M in sym:
        assert np.max(np.abs(J @ M - M.T @ J)) <= 1e-14
    # together they span gl(n)
    stacked = np.stack([M.reshape(-1) for M in list(skew) + list(sym)])
    assert np.linalg.matrix_rank(stacked) == n * n


def test_description_rejects_tiny_or_negative_signatures():
    with pytest.raises(ValueError):
        description(1, 0)
    with pytest.raises(ValueError):
        description(-1, 3)


def test_description_rejects_off_group_base_point():
    with pytest.raises(ValueError):
        description(2, 1, base_point=np.diag([2.0, 1.0, 1.0]))


def test_model_dimensions():
    model = make_pseudo_orthogonal_model(2, 1)
    assert model.p_dim == 3
    assert model.ambient_dim == 9
    assert model.symmetric_space


def test_constant_control_rolls_along_a_one_parameter_subgroup():
    grid = TimeGrid(0.0, 1.0, 250)
    coef = np.array([0.3, -0.2, 0.4])
    ctrl = ControlCurve.from_function(grid, lambda t: coef)
    path = roll_pseudo_orthogonal(2, 1, ctrl, grid)
    U = sum(c * B for c, B in zip(coef, so_pq_basis(2, 1)))
    expected = np.array([expm(2 * t * U).reshape(-1, order="F") for t in grid.ts])
    assert np.max(np.abs(path.alpha - expected)) <= 1e-10
    assert np.max(np.abs(path.s[-1] - (2.0 * U).reshape(-1, order="F"))) <= 1e-12


@pytest.mark.parametrize("p,q", [(2, 1), (3, 0), (2, 2)])
def test_random_control_passes_the_condition_suite(p, q):
    model = make_pseudo_orthogonal_model(p, q)
    grid = TimeGrid(0.0, 1.0, 200)
    rng = np.random.default_rng(10 * p + q)
    amp = rng.standard_normal(model.p_dim) * 0.4
    frq = rng.uniform(0.5, 2.0, model.p_dim)
    ctrl = ControlCurve.from_function(grid, lambda t: amp * np.sin(frq * t))
    path = roll_pseudo_orthogonal(p, q, ctrl, grid)
    report = model_residual_report(model, path)
    assert report.passed(50 * grid.h**2)


def test_roll_from_nonidentity_base_point():
    model = make_pseudo_orthogonal_model(2, 1)
    rng = np.random.default_rng(7)
    base = model.random_point(rng).reshape(3, 3, order="F")
    grid = TimeGrid(0.0, 1.0, 200)
    ctrl = ControlCurve.from_function(grid, lambda t: np.array([0.2, 0.5 * np.sin(t), -0.3]))
    path = roll_pseudo_orthogonal(2, 1, ctrl, grid, base_point=base)
    moved = make_pseudo_orthogonal_model(2, 1, base_point=base)
    report = model_residual_report(moved, path)
    assert report.passed(50 * grid.h**2)
    assert np.max(np.abs(path.alpha[0] - base.reshape(-1, order="F"))) <= 1e-12
