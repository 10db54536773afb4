"""Lifting, developing, transporting, and rolling through the group machinery.

The sphere and hyperboloid models double as fixtures here; anything
model-specific beyond construction lives in the per-model test files.
"""

import numpy as np
import pytest

from semiroll.homogeneous import (
    ControlCurve,
    EmbeddedCurve,
    TimeGrid,
    develop_intrinsic,
    extrinsic_roll,
    horizontal_lift,
    horizontality_residual,
    intrinsic_roll,
    isometry_chain_A,
    model_residual_report,
    normal_extension_by_frames,
    transport_homogeneous,
)
from semiroll.models import build_model, get_model
from semiroll.models.sphere import description as sphere_description
from semiroll.rolling import (
    parallel_transport_embedded,
    triple_gram_residual,
    triple_velocity_residual,
)


def _wobble(t):
    return np.array([np.sin(t), 0.4 * np.cos(2 * t)])


def _embedded(model, lift):
    return np.array([model.embed(model.action(g, model.base_point)) for g in lift.samples])


@pytest.fixture(scope="module", params=["sphere", "hyperboloid"])
def surface(request):
    return get_model(request.param)


def test_control_lift_is_horizontal(surface):
    grid = TimeGrid(0.0, 1.5, 300)
    lift = horizontal_lift(surface, ControlCurve.from_function(grid, _wobble))
    assert np.max(horizontality_residual(surface, lift)) <= 1e-8
    assert lift.control is not None


def test_sample_lift_recovers_control(surface):
    grid = TimeGrid(0.0, 1.5, 300)
    ctrl = ControlCurve.from_function(grid, _wobble)
    lift = horizontal_lift(surface, ctrl)
    relift = horizontal_lift(surface, EmbeddedCurve(grid, _embedded(surface, lift)))
    assert np.max(np.abs(relift.samples - lift.samples)) <= 1e-7
    assert np.max(np.abs(relift.control.coords - ctrl.coords)) <= 1e-7


def test_lift_rejects_curve_leaving_the_manifold(surface):
    grid = TimeGrid(0.0, 1.0, 100)
    lift = horizontal_lift(surface, ControlCurve.from_function(grid, _wobble))
    points = _embedded(surface, lift)
    points[30:] *= 1.02
    with pytest.raises(ValueError, match="not tangent|drifted from the curve"):
        horizontal_lift(surface, EmbeddedCurve(grid, points))


def test_lift_rejects_mismatched_start(surface):
    grid = TimeGrid(0.0, 1.0, 100)
    lift = horizontal_lift(surface, ControlCurve.from_function(grid, _wobble))
    points = _embedded(surface, lift)
    q_far = surface.random_group_element(np.random.default_rng(3))
    with pytest.raises(ValueError, match="does not start at the projection"):
        horizontal_lift(surface, EmbeddedCurve(grid, points), q0=q_far)


def test_transport_agrees_with_projection_scheme(surface):
    grid = TimeGrid(0.0, 1.5, 300)
    lift = horizontal_lift(surface, ControlCurve.from_function(grid, _wobble))
    points = _embedded(surface, lift)
    field = transport_homogeneous(surface, lift, np.array([0.3, -0.7]))
    frames = surface.pointwise_tangent_frames(grid, points)
    reference = parallel_transport_embedded(points, frames.frames, field[0], surface.form)
    assert np.max(np.linalg.norm(field - reference, axis=1)) <= 1e-6


def test_transport_preserves_ambient_ip(surface):
    grid = TimeGrid(0.0, 2.0, 400)
    lift = horizontal_lift(surface, ControlCurve.from_function(grid, _wobble))
    u = transport_homogeneous(surface, lift, np.array([1.0, 0.0]))
    v = transport_homogeneous(surface, lift, np.array([0.2, 0.9]))
    ips = np.einsum("ki,i,ki->k", u, surface.form.signs, v)
    assert np.max(np.abs(ips - ips[0])) <= 1e-10


def test_intrinsic_triple_satisfies_both_laws(surface):
    grid = TimeGrid(0.0, 1.0, 200)
    triple = intrinsic_roll(surface, ControlCurve.from_function(grid, _wobble))
    bound = 50 * grid.h**2
    assert np.max(triple_velocity_residual(triple)) <= bound
    assert np.max(triple_gram_residual(triple)) <= 1e-10


def test_development_is_an_arc_length_shadow(surface):
    # the development must traverse the same p-metric length as the control
    grid = TimeGrid(0.0, 1.0, 400)
    ctrl = ControlCurve.from_function(grid, _wobble)
    dev = develop_intrinsic(surface, ctrl)
    assert dev.shape == (grid.n_nodes, surface.p_dim)
    from semiroll.integrate import fd_derivative

    dev_dot = fd_derivative(dev, grid.h)
    back = dev_dot @ np.linalg.inv(surface.d_e_pi).T
    speed_dev = np.einsum("ka,ab,kb->k", back, surface.ip_p, back)
    speed_ctrl = np.einsum("ka,ab,kb->k", ctrl.coords, surface.ip_p, ctrl.coords)
    assert np.max(np.abs(speed_dev - speed_ctrl)) <= 1e-7


def test_extrinsic_report_scales_with_grid(surface):
    for n in (100, 200):
        grid = TimeGrid(0.0, 1.0, n)
        path = extrinsic_roll(surface, ControlCurve.from_function(grid, _wobble))
        report = model_residual_report(surface, path)
        assert report.passed(50 * grid.h**2)


def test_normal_strategies_agree(surface):
    grid = TimeGrid(0.0, 1.0, 100)
    ctrl = ControlCurve.from_function(grid, _wobble)
    closed = extrinsic_roll(surface, ctrl, normal_strategy="closed_form")
    matched = extrinsic_roll(surface, ctrl, normal_strategy="frame_matching")
    assert np.max(np.abs(closed.R - matched.R)) <= 1e-6
    assert np.max(np.abs(closed.s - matched.s)) <= 1e-6


def test_intrinsic_maps_ride_on_the_extrinsic_rotation(surface):
    grid = TimeGrid(0.0, 1.0, 150)
    ctrl = ControlCurve.from_function(grid, _wobble)
    lift = horizontal_lift(surface, ctrl)
    path = extrinsic_roll(surface, ctrl)
    head = surface.d_e_pi @ surface.cf0
    chained = isometry_chain_A(surface, lift)
    extracted = np.einsum("ab,kbj->kaj", head, path.R)
    assert np.max(np.abs(extracted - chained)) <= 1e-7


def test_flat_frames_anchor_the_projection(surface):
    head = surface.d_e_pi @ surface.cf0
    assert np.max(np.abs(head @ surface.frame0 - surface.d_e_pi)) <= 1e-14


def test_normal_extension_requires_isometric_frames():
    m = get_model("sphere")
    nodes = 11
    ops = np.broadcast_to(np.eye(2, 3), (nodes, 2, 3)).copy()
    tangent = np.broadcast_to(np.eye(3)[:, :2], (nodes, 3, 2)).copy()
    normal = np.broadcast_to(np.eye(3)[:, 2:], (nodes, 3, 1)).copy()
    with pytest.raises(ValueError, match="Gram mismatch"):
        normal_extension_by_frames(ops, tangent, normal, 2.0 * normal, m.form)


def test_validate_catches_tampered_subalgebra_split():
    desc = sphere_description()
    desc["h_indices"] = [1]
    desc["p_indices"] = [0, 2]
    with pytest.raises(ValueError):
        build_model(desc, validate=True)


def test_validate_passes_for_shipped_models(surface):
    surface.validate(rng=np.random.default_rng(0))
