"""Group laws and form bookkeeping for rigid motions of an indefinite space."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiroll.linalg import (
    RigidMotion,
    SignatureForm,
    indefinite_ip,
    is_oriented_isometry,
    j_orthogonality_residual,
    random_motion,
    random_oriented_isometry,
    se_act,
    se_compose,
    se_inverse,
)

ALGEBRA_TOL = 1e-12


def _motion(rng, form):
    return random_motion(form, rng)


signatures = st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(
    lambda pq: 2 <= pq[0] + pq[1] <= 6
)


@settings(max_examples=60, deadline=None)
@given(signatures, st.integers(0, 2**31 - 1))
def test_compose_is_associative(pq, seed):
    form = SignatureForm.from_pq(*pq)
    rng = np.random.default_rng(seed)
    g1, g2, g3 = (_motion(rng, form) for _ in range(3))
    left = se_compose(se_compose(g3, g2), g1)
    right = se_compose(g3, se_compose(g2, g1))
    assert np.max(np.abs(left.R - right.R)) <= ALGEBRA_TOL
    assert np.max(np.abs(left.s - right.s)) <= ALGEBRA_TOL


@settings(max_examples=60, deadline=None)
@given(signatures, st.integers(0, 2**31 - 1))
def test_inverse_cancels(pq, seed):
    form = SignatureForm.from_pq(*pq)
    rng = np.random.default_rng(seed)
    g = _motion(rng, form)
    e = se_compose(g, se_inverse(g))
    assert np.max(np.abs(e.R - np.eye(form.dim))) <= ALGEBRA_TOL
    assert np.max(np.abs(e.s)) <= ALGEBRA_TOL


@settings(max_examples=60, deadline=None)
@given(signatures, st.integers(0, 2**31 - 1))
def test_action_respects_composition(pq, seed):
    form = SignatureForm.from_pq(*pq)
    rng = np.random.default_rng(seed)
    g1, g2 = _motion(rng, form), _motion(rng, form)
    v = rng.standard_normal(form.dim)
    assert np.max(np.abs(se_act(se_compose(g2, g1), v) - se_act(g2, se_act(g1, v)))) <= ALGEBRA_TOL


@settings(max_examples=60, deadline=None)
@given(signatures, st.integers(0, 2**31 - 1))
def test_motions_preserve_interval(pq, seed):
    """The quadratic form of a difference vector is a joint invariant."""
    form = SignatureForm.from_pq(*pq)
    rng = np.random.default_rng(seed)
    g = _motion(rng, form)
    x = rng.standard_normal(form.dim)
    y = rng.standard_normal(form.dim)
    before = form.ip(x - y, x - y)
    after = form.ip(se_act(g, x) - se_act(g, y), se_act(g, x) - se_act(g, y))
    assert abs(before - after) <= 1e-10 * max(1.0, abs(before))


def test_se_act_batches_points():
    form = SignatureForm.from_pq(2, 1)
    rng = np.random.default_rng(11)
    g = _motion(rng, form)
    pts = rng.standard_normal((7, 3))
    batch = se_act(g, pts)
    assert batch.shape == (7, 3)
    for i in range(7):
        assert np.allclose(batch[i], se_act(g, pts[i]))


def test_signature_form_basics():
    form = SignatureForm.from_pq(2, 1)
    assert form.dim == 3 and form.p == 2 and form.q == 1
    e = np.eye(3)
    assert indefinite_ip(e[0], e[0], form) == 1.0
    assert indefinite_ip(e[2], e[2], form) == -1.0
    assert indefinite_ip(e[0], e[2], form) == 0.0
    assert np.allclose(form.matrix, np.diag([1.0, 1.0, -1.0]))


def test_orientation_accepts_lorentz_boost():
    form = SignatureForm(np.array([1.0, -1.0]))
    t = 0.7
    boost = np.array([[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]])
    ok, res = is_oriented_isometry(boost, form)
    assert ok and res <= 1e-12


def test_orientation_rejects_space_reflection():
    form = SignatureForm(np.array([1.0, 1.0, -1.0]))
    refl = np.diag([-1.0, 1.0, 1.0])
    ok, _ = is_oriented_isometry(refl, form)
    assert not ok


def test_orientation_rejects_time_reversal():
    form = SignatureForm(np.array([1.0, 1.0, -1.0]))
    rev = np.diag([1.0, 1.0, -1.0])
    ok, _ = is_oriented_isometry(rev, form)
    assert not ok


def test_orientation_accepts_double_reflection():
    # minus on two spatial axes is a rotation by pi, still oriented
    form = SignatureForm(np.array([1.0, 1.0, -1.0]))
    rot = np.diag([-1.0, -1.0, 1.0])
    ok, res = is_oriented_isometry(rot, form)
    assert ok and res <= 1e-12


def test_orientation_rejects_non_isometry():
    form = SignatureForm.from_pq(3, 0)
    ok, res = is_oriented_isometry(1.1 * np.eye(3), form)
    assert not ok and res > 1e-3


def test_j_orthogonality_residual_complex_group():
    # SU(1,1) elements are J-unitary for J = diag(1, -1)
    form = SignatureForm(np.array([1.0, -1.0]))
    a, b = np.cosh(0.4) * np.exp(0.3j), np.sinh(0.4) * np.exp(-0.1j)
    g = np.array([[a, b], [np.conj(b), np.conj(a)]])
    assert j_orthogonality_residual(g, form) <= 1e-12


def test_random_oriented_isometry_lands_in_group():
    rng = np.random.default_rng(5)
    form = SignatureForm.from_pq(2, 2)
    for _ in range(20):
        R = random_oriented_isometry(form, rng, scale=0.6)
        ok, res = is_oriented_isometry(R, form)
        assert ok and res <= 1e-9


def test_rigid_motion_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        RigidMotion(R=np.eye(3), s=np.zeros(2))
