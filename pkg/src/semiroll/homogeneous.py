"""Homogeneous-space engine: models, horizontal lifts, developments, rolling.

A curved space enters as a ``CartanModel``: a matrix realization of a Lie
algebra with a declared h/p splitting, an equivariant isometric embedding of
M = G/H into a flat ambient space V, and the linearization of the G-action
on V.  Everything downstream is sampled on uniform grids: horizontal lifts
integrate ``qdot = q U(t)`` with U(t) in p, developments are quadratures of
the projected control, and extrinsic rolling maps are assembled by inverting
the ambient representation along the lift.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import expm, null_space

from .integrate import (
    TimeGrid,
    dense_from_samples,
    derivative_interpolant,
    fd_derivative,
    flow_matrix_ode,
    integrate_vector,
    reproject,
)
from .linalg import j_orthogonality_residual
from .rolling import (
    RollingMapPath,
    RollingTriple,
    TangentFramePath,
    parallel_transport_embedded,
    rolling_condition_residuals,
)

__all__ = [
    "ControlCurve",
    "EmbeddedCurve",
    "GroupPath",
    "CartanModel",
    "horizontal_lift",
    "horizontality_residual",
    "develop_intrinsic",
    "transport_homogeneous",
    "isometry_chain_A",
    "intrinsic_roll",
    "extrinsic_develop",
    "extrinsic_roll",
    "normal_extension_by_frames",
    "model_residual_report",
]

LIFT_TRACK_TOL = 1e-8
TANGENT_FIT_TOL = 1e-8
MODEL_CHECK_TOL = 1e-10


@dataclass
class ControlCurve:
    """Sampled control coordinates in the p-part of the algebra.

    ``coords[k]`` are the coefficients at node k; ``func`` (optional at
    construction) is the dense version used by the integrators and defaults
    to a cubic interpolant through the samples.
    """

    grid: TimeGrid
    coords: np.ndarray
    func: Optional[Callable] = None

    def __post_init__(self):
        self.coords = np.atleast_2d(np.asarray(self.coords, dtype=float))
        if self.coords.shape[0] != self.grid.n_nodes:
            raise ValueError("control sample count does not match the grid")
        if self.func is None:
            self.func = dense_from_samples(self.grid.ts, self.coords)

    @classmethod
    def from_function(cls, grid, func):
        coords = np.array([np.atleast_1d(func(t)) for t in grid.ts], dtype=float)
        return cls(grid=grid, coords=coords, func=lambda t: np.atleast_1d(func(t)))

    @property
    def dim(self):
        return self.coords.shape[1]


@dataclass
class EmbeddedCurve:
    """Curve on the embedded model manifold, sampled in ambient coordinates."""

    grid: TimeGrid
    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] != self.grid.n_nodes:
            raise ValueError("curve samples must be (n_nodes, N) matching the grid")


@dataclass
class GroupPath:
    """Sampled path in the structure group, optionally with its control."""

    grid: TimeGrid
    samples: np.ndarray
    control: Optional[ControlCurve] = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.samples.ndim != 3 or self.samples.shape[0] != self.grid.n_nodes:
            raise ValueError("group samples must be (n_nodes, d, d) matching the grid")

    @property
    def q0(self):
        return self.samples[0]


class CartanModel:
    """Matrix realization of a reductive homogeneous space with an embedding.

    Parameters
    ----------
    name : str
    basis : (m, d, d) array
        Lie algebra basis in the matrix realization (possibly complex).
    h_indices, p_indices : sequences of int
        Index split of the basis into isotropy part and its reductive
        complement.
    form : SignatureForm
        Scalar product of the flat ambient space V.
    group_form : SignatureForm
        Form preserved by the group matrices themselves (used to reproject
        integrated group paths).
    base_point : object
        Chart representation of the base point o (model specific).
    obar : (N,) array
        Embedded base point.
    d_e_pi : (k, k) array
        Matrix of the submersion differential from p-coefficients to the
        model's tangent coordinates at o.
    rho : callable
        Group matrix -> (N, N) ambient representation matrix.
    d_e_rho : callable
        Algebra matrix -> (N, N) linearized representation.
    action : callable
        (group matrix, chart point) -> chart point.
    embed : callable
        chart point -> (N,) ambient vector.

    The scalar product on p is *derived*, not declared: ``ip_p = F0^T J F0``
    with ``F0[:, i] = d_e_rho(p_i) obar``, which is exactly the choice that
    makes d_e_pi an isometry onto the embedded tangent space.
    """

    def __init__(self, name, basis, h_indices, p_indices, form, group_form,
                 base_point, obar, d_e_pi, rho, d_e_rho, action, embed,
                 random_group_element=None, random_point=None,
                 tangent_frame_at=None, normal_frame_at=None,
                 closed_form_normal=False, symmetric_space=True,
                 extrinsic_override=None, tangential_correction=None,
                 params=None, description=None):
        self.name = name
        self.basis = np.asarray(basis)
        if self.basis.ndim != 3 or self.basis.shape[1] != self.basis.shape[2]:
            raise ValueError("basis must be a stack of square matrices")
        self.h_indices = tuple(int(i) for i in h_indices)
        self.p_indices = tuple(int(i) for i in p_indices)
        if sorted(self.h_indices + self.p_indices) != list(range(self.basis.shape[0])):
            raise ValueError("h_indices and p_indices must partition the basis")
        self.form = form
        self.group_form = group_form
        self.base_point = base_point
        self.obar = np.asarray(obar, dtype=float)
        self.d_e_pi = np.asarray(d_e_pi, dtype=float)
        self.rho = rho
        self.d_e_rho = d_e_rho
        self.action = action
        self.embed = embed
        self.tangent_frame_at = tangent_frame_at
        self.normal_frame_at = normal_frame_at
        self.closed_form_normal = bool(closed_form_normal)
        self.symmetric_space = bool(symmetric_space)
        self.extrinsic_override = extrinsic_override
        self.tangential_correction = tangential_correction
        self.params = dict(params or {})
        self.description = description
        self._random_group_element = random_group_element
        self._random_point = random_point

        k = len(self.p_indices)
        if self.d_e_pi.shape != (k, k):
            raise ValueError("d_e_pi must be square of size len(p_indices)")
        self.frame0 = np.column_stack(
            [np.asarray(self.d_e_rho(self.basis[i]), dtype=float) @ self.obar
             for i in self.p_indices]
        )
        self.ip_p = self.frame0.T @ (self.form.signs[:, None] * self.frame0)
        if abs(np.linalg.det(self.ip_p)) < 1e-12:
            raise ValueError("embedded tangent frame is degenerate under the ambient form")
        d_inv = np.linalg.inv(self.d_e_pi)
        self.target_gram = d_inv.T @ self.ip_p @ d_inv
        # coefficient extractor at the base point: cf0 @ v = p-coefficients of v
        self.cf0 = np.linalg.solve(self.ip_p, self.frame0.T * self.form.signs[None, :])
        self.normal0 = null_space(self.frame0.T * self.form.signs[None, :])
        if self.normal0.shape[1] != self.form.dim - k:
            raise ValueError("normal complement has unexpected dimension")
        if self.normal0.size:
            gram_n = self.normal0.T @ (self.form.signs[:, None] * self.normal0)
            if abs(np.linalg.det(gram_n)) < 1e-12:
                raise ValueError("normal complement is degenerate under the ambient form")

        flat = self.basis.reshape(self.basis.shape[0], -1).T
        self._basis_flat = np.vstack([flat.real, flat.imag])

    # -- algebra helpers -------------------------------------------------

    @property
    def p_dim(self):
        return len(self.p_indices)

    @property
    def group_dim(self):
        return self.basis.shape[1]

    @property
    def ambient_dim(self):
        return self.form.dim

    def p_element(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.p_dim,):
            raise ValueError(f"expected {self.p_dim} p-coefficients, got {coeffs.shape}")
        return np.tensordot(coeffs, self.basis[list(self.p_indices)], axes=(0, 0))

    def h_element(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        return np.tensordot(coeffs, self.basis[list(self.h_indices)], axes=(0, 0))

    def algebra_coords(self, X):
        """Coefficients of X in the basis plus the off-span residual norm."""
        X = np.asarray(X)
        target = np.concatenate([X.real.ravel(), X.imag.ravel()])
        coeffs, _, _, _ = np.linalg.lstsq(self._basis_flat, target, rcond=None)
        resid = float(np.linalg.norm(self._basis_flat @ coeffs - target))
        return coeffs, resid

    def random_group_element(self, rng, scale=0.5):
        if self._random_group_element is not None:
            return self._random_group_element(rng)
        coeffs = scale * rng.standard_normal(self.basis.shape[0])
        X = np.tensordot(coeffs, self.basis, axes=(0, 0))
        return reproject(expm(X), self.group_form)

    def random_point(self, rng):
        if self._random_point is not None:
            return self._random_point(rng)
        return self.action(self.random_group_element(rng), self.base_point)

    # -- paths along group samples ---------------------------------------

    def rho_path(self, qs):
        return np.array([np.asarray(self.rho(q), dtype=float) for q in qs])

    def rho_inverse_path(self, rhos):
        """Per-node rho^{-1} via the J-transpose."""
        signs = self.form.signs
        return signs[None, :, None] * np.swapaxes(rhos, 1, 2) * signs[None, None, :]

    def frames_along(self, rhos):
        return np.einsum("kij,ja->kia", rhos, self.frame0)

    def normals_along(self, rhos):
        return np.einsum("kij,ja->kia", rhos, self.normal0)

    def flat_tangent_frames(self, grid):
        frames = np.broadcast_to(self.frame0, (grid.n_nodes,) + self.frame0.shape).copy()
        return TangentFramePath(grid.ts, frames)

    def flat_normal_frames(self, grid):
        frames = np.broadcast_to(self.normal0, (grid.n_nodes,) + self.normal0.shape).copy()
        return TangentFramePath(grid.ts, frames)

    def pointwise_tangent_frames(self, grid, points):
        if self.tangent_frame_at is None:
            raise ValueError(f"model {self.name} provides no pointwise tangent frames")
        frames = np.array([self.tangent_frame_at(x) for x in points])
        return TangentFramePath(grid.ts, frames)

    # -- consistency checks ------------------------------------------------

    def validate(self, rng=None, n_samples=4, tol=MODEL_CHECK_TOL):
        """Check the structural invariants; raises ValueError on violation.

        Bracket closures of the h/p splitting, h perpendicular to p, isotropy
        of the base point, J-orthogonality and equivariance of the ambient
        representation (on random samples), the homomorphism property of
        d_e_rho, and Ad_H-invariance of the derived p-metric.  A broken
        [p,p] subset h only warns when the model declares itself
        non-symmetric.  Returns the measured defects.
        """
        rng = rng or np.random.default_rng(2357)
        defects = {}
        scale = float(np.max(np.abs(self.basis)))

        def bracket(X, Y):
            return X @ Y - Y @ X

        worst = {"hh": 0.0, "hp": 0.0, "pp": 0.0, "span": 0.0, "orth": 0.0}
        for i in self.h_indices:
            for j in self.h_indices:
                c, r = self.algebra_coords(bracket(self.basis[i], self.basis[j]))
                worst["span"] = max(worst["span"], r)
                worst["hh"] = max(worst["hh"], float(np.max(np.abs(c[list(self.p_indices)]), initial=0.0)))
            for j in self.p_indices:
                c, r = self.algebra_coords(bracket(self.basis[i], self.basis[j]))
                worst["span"] = max(worst["span"], r)
                worst["hp"] = max(worst["hp"], float(np.max(np.abs(c[list(self.h_indices)]), initial=0.0)))
        for i in self.p_indices:
            for j in self.p_indices:
                c, r = self.algebra_coords(bracket(self.basis[i], self.basis[j]))
                worst["span"] = max(worst["span"], r)
                worst["pp"] = max(worst["pp"], float(np.max(np.abs(c[list(self.p_indices)]), initial=0.0)))
            for j in self.h_indices:
                ip = -np.trace(self.basis[i] @ self.basis[j]).real
                worst["orth"] = max(worst["orth"], abs(float(ip)))
        defects.update(worst)
        lim = tol * max(1.0, scale) ** 2
        if worst["span"] > lim:
            raise ValueError(f"brackets leave the algebra span (defect {worst['span']:.3e})")
        if worst["hh"] > lim:
            raise ValueError("[h,h] is not contained in h")
        if worst["hp"] > lim:
            raise ValueError("[h,p] is not contained in p")
        if worst["pp"] > lim:
            if self.symmetric_space:
                raise ValueError("[p,p] is not contained in h but the model claims symmetry")
            warnings.warn(
                f"model {self.name}: [p,p] not contained in h (reductive, non-symmetric)",
                stacklevel=2,
            )
        if worst["orth"] > lim:
            raise ValueError("h and p are not orthogonal under -Re tr(XY)")

        iso = max(
            float(np.max(np.abs(np.asarray(self.d_e_rho(self.basis[i]), dtype=float) @ self.obar)))
            for i in self.h_indices
        ) if self.h_indices else 0.0
        defects["isotropy"] = iso
        if iso > lim:
            raise ValueError(f"isotropy algebra does not fix the base point (defect {iso:.3e})")

        emb0 = np.asarray(self.embed(self.base_point), dtype=float)
        defects["base_embed"] = float(np.max(np.abs(emb0 - self.obar)))
        if defects["base_embed"] > 1e-12:
            raise ValueError("embed(base_point) differs from the declared obar")

        equiv = 0.0
        jorth = 0.0
        hom = 0.0
        for _ in range(n_samples):
            q = self.random_group_element(rng)
            pt = self.random_point(rng)
            lhs = np.asarray(self.embed(self.action(q, pt)), dtype=float)
            rhs = np.asarray(self.rho(q), dtype=float) @ np.asarray(self.embed(pt), dtype=float)
            norm = max(1.0, float(np.linalg.norm(rhs)))
            equiv = max(equiv, float(np.linalg.norm(lhs - rhs)) / norm)
            jorth = max(jorth, j_orthogonality_residual(np.asarray(self.rho(q), dtype=float), self.form))
            cx = rng.standard_normal(self.basis.shape[0])
            cy = rng.standard_normal(self.basis.shape[0])
            X = np.tensordot(cx, self.basis, axes=(0, 0))
            Y = np.tensordot(cy, self.basis, axes=(0, 0))
            lhs_h = np.asarray(self.d_e_rho(bracket(X, Y)), dtype=float)
            rhs_h = bracket(np.asarray(self.d_e_rho(X), dtype=float),
                            np.asarray(self.d_e_rho(Y), dtype=float))
            hom = max(hom, float(np.max(np.abs(lhs_h - rhs_h))) / max(1.0, float(np.max(np.abs(rhs_h)))))
        defects["equivariance"] = equiv
        defects["rho_orthogonality"] = jorth
        defects["d_e_rho_homomorphism"] = hom
        if equiv > 1e-10:
            raise ValueError(f"embedding is not equivariant (defect {equiv:.3e})")
        if jorth > 1e-9:
            raise ValueError("ambient representation does not preserve the form")
        if hom > 1e-8:
            raise ValueError("d_e_rho is not a Lie algebra homomorphism")

        adh = 0.0
        if self.h_indices:
            ch = 0.5 * rng.standard_normal(len(self.h_indices))
            hmat = expm(self.h_element(ch))
            hinv = np.linalg.inv(hmat)
            cols = []
            for i in self.p_indices:
                c, r = self.algebra_coords(hmat @ self.basis[i] @ hinv)
                adh = max(adh, r, float(np.max(np.abs(c[list(self.h_indices)]), initial=0.0)))
                cols.append(c[list(self.p_indices)])
            C = np.column_stack(cols)
            adh = max(adh, float(np.max(np.abs(C.T @ self.ip_p @ C - self.ip_p))))
        defects["ad_h_invariance"] = adh
        if adh > 1e-8:
            raise ValueError("p-metric is not Ad_H-invariant")
        return defects


# -- lifts ----------------------------------------------------------------


def _lift_from_control(model, control, q0):
    def U(t):
        return model.p_element(control.func(t))

    qs = flow_matrix_ode(U, q0, control.grid, side="right", reproject_form=model.group_form)
    return GroupPath(grid=control.grid, samples=qs, control=control)


def _lift_from_samples(model, curve, q0, track_tol):
    grid = curve.grid
    pts = curve.points
    scale = max(1.0, float(np.max(np.abs(pts))))
    start = np.asarray(model.rho(q0), dtype=float) @ model.obar
    if np.linalg.norm(start - pts[0]) > track_tol * scale:
        raise ValueError("curve does not start at the projection of q0")

    adot = derivative_interpolant(grid, pts)

    def fit(q, t):
        F = np.asarray(model.rho(q), dtype=float) @ model.frame0
        target = adot(t)
        coeffs, _, _, _ = np.linalg.lstsq(F, target, rcond=None)
        resid = float(np.linalg.norm(F @ coeffs - target))
        return coeffs, resid

    def rhs(q, t):
        coeffs, _ = fit(q, t)
        return q @ model.p_element(coeffs)

    h = grid.h
    ts = grid.ts
    q = np.asarray(q0, dtype=model.basis.dtype if np.iscomplexobj(model.basis) else float)
    qs = np.empty((grid.n_nodes,) + q.shape, dtype=q.dtype)
    qs[0] = q
    for k in range(grid.n_steps):
        t = ts[k]
        k1 = rhs(q, t)
        k2 = rhs(q + 0.5 * h * k1, t + 0.5 * h)
        k3 = rhs(q + 0.5 * h * k2, t + 0.5 * h)
        k4 = rhs(q + h * k3, t + h)
        q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        q = reproject(q, model.group_form)
        qs[k + 1] = q

    coords = np.empty((grid.n_nodes, model.p_dim))
    speed = max(1.0, float(np.max(np.linalg.norm(fd_derivative(pts, h), axis=1))))
    for k in range(grid.n_nodes):
        coords[k], resid = fit(qs[k], ts[k])
        if resid > TANGENT_FIT_TOL * speed:
            raise ValueError(
                f"curve velocity at t={ts[k]:.6g} is not tangent to the model "
                f"manifold (defect {resid:.3e}); input must be smooth and tangent"
            )
        track = np.linalg.norm(np.asarray(model.rho(qs[k]), dtype=float) @ model.obar - pts[k])
        if track > track_tol * scale:
            raise ValueError(f"lift drifted from the curve (defect {track:.3e} at t={ts[k]:.6g})")
    return GroupPath(grid=grid, samples=qs, control=ControlCurve(grid=grid, coords=coords))


def horizontal_lift(model, data, q0=None, track_tol=LIFT_TRACK_TOL):
    """Horizontal lift of a control or of a sampled curve on the manifold.

    With a ControlCurve the lift integrates qdot = q U(t) directly.  With an
    EmbeddedCurve the control is recovered on the fly by expressing the curve
    velocity in the moving tangent frame (rejecting inputs whose velocity
    leaves the tangent space), and the recovered control is attached to the
    returned path.  ``q0`` defaults to the group identity and must project
    onto the first curve point.
    """
    if q0 is None:
        q0 = np.eye(model.group_dim, dtype=model.basis.dtype)
    else:
        q0 = np.asarray(q0)
    if isinstance(data, ControlCurve):
        if data.dim != model.p_dim:
            raise ValueError(
                f"control has {data.dim} components, model p-dimension is {model.p_dim}"
            )
        return _lift_from_control(model, data, q0)
    if isinstance(data, EmbeddedCurve):
        if data.points.shape[1] != model.ambient_dim:
            raise ValueError("curve ambient dimension does not match the model")
        return _lift_from_samples(model, data, q0, track_tol)
    raise TypeError("data must be a ControlCurve or an EmbeddedCurve")


def horizontality_residual(model, path):
    """max over nodes of the h-component (and off-span part) of q^{-1} qdot."""
    qdot = fd_derivative(path.samples, path.grid.h)
    worst = 0.0
    hsel = list(model.h_indices)
    for k in range(path.grid.n_nodes):
        xi = np.linalg.solve(path.samples[k], qdot[k])
        coeffs, resid = model.algebra_coords(xi)
        part = float(np.max(np.abs(coeffs[hsel]), initial=0.0)) if hsel else 0.0
        worst = max(worst, part, resid)
    return worst


# -- developments and intrinsic rolling ------------------------------------


def develop_intrinsic(model, control):
    """Development of a control into the tangent coordinates at the base point.

    Solves ``alpha_hat' = d_e_pi c(t)`` from zero; this is the flat-space
    shadow of the curve for symmetric models (non-symmetric models build
    their development through the extrinsic route instead).
    """
    d = model.d_e_pi

    def rhs(t):
        return d @ np.atleast_1d(control.func(t))

    return integrate_vector(rhs, np.zeros(model.p_dim), control.grid)


def transport_homogeneous(model, lift, y0):
    """Parallel field along the lifted curve from p-coordinates y0 at the start.

    Returns embedded ambient vectors rho(q(t)) (d_e_rho(W) obar) with
    W = sum_i y0_i p_i; along horizontal lifts this is the parallel transport
    of the corresponding tangent vector.
    """
    W = model.p_element(y0)
    v0 = np.asarray(model.d_e_rho(W), dtype=float) @ model.obar
    rhos = model.rho_path(lift.samples)
    return np.einsum("kij,j->ki", rhos, v0)


def isometry_chain_A(model, lift, correction=None):
    """Per-node tangential maps A(t) from the submersion chain.

    ``A(t) = d_e_pi ∘ coeffs_p ∘ q(t)^{-1}`` acting on ambient tangent
    vectors at alpha(t), returned as (n_nodes, k, N) matrices.  ``correction``
    (optional, (n_nodes, N, N)) inserts extra per-node operators between the
    coefficient extraction and the representation inverse; non-symmetric
    models use it for their tangential twist factor.
    """
    rhos = model.rho_path(lift.samples)
    ops = model.rho_inverse_path(rhos)
    if correction is not None:
        correction = np.asarray(correction, dtype=float)
        ops = np.einsum("kij,kjl->kil", correction, ops)
    head = model.d_e_pi @ model.cf0
    return np.einsum("ai,kij->kaj", head, ops)


def intrinsic_roll(model, data, q0=None):
    """Intrinsic rolling along a control or sampled curve: returns a RollingTriple."""
    lift = horizontal_lift(model, data, q0=q0)
    rhos = model.rho_path(lift.samples)
    alpha = np.einsum("kij,j->ki", rhos, model.obar)
    frames = model.frames_along(rhos)
    head = model.d_e_pi @ model.cf0
    if model.extrinsic_override is not None:
        epath = model.extrinsic_override(model, lift)
        S = model.tangential_correction(model, lift)
        A = isometry_chain_A(model, lift, correction=np.swapaxes(S, 1, 2))
        alpha_hat = np.einsum("ai,ki->ka", head, epath.alpha_hat - model.obar)
    else:
        A = isometry_chain_A(model, lift)
        alpha_hat = develop_intrinsic(model, lift.control)
    return RollingTriple(
        grid=lift.grid,
        alpha=alpha,
        alpha_hat=alpha_hat,
        maps=A,
        tangent_frames=frames,
        form=model.form,
        target_gram=model.target_gram,
    )


# -- extrinsic rolling ------------------------------------------------------


def extrinsic_develop(model, lift, curve):
    """Flat development: quadrature of rho(q)^{-1} alpha' from zero."""
    rhos = model.rho_path(lift.samples)
    rinv = model.rho_inverse_path(rhos)
    vel = fd_derivative(curve.points, curve.grid.h)
    rhs_nodes = np.einsum("kij,kj->ki", rinv, vel)
    dense = dense_from_samples(curve.grid.ts, rhs_nodes)
    return integrate_vector(dense, np.zeros(model.ambient_dim), curve.grid)


def normal_extension_by_frames(tangential_ops, tangent_frames, normal_frames,
                               normal_frames_dev, form, gram_tol=1e-6):
    """Extend per-node tangential actions to full rotations via matched normal frames.

    The returned R(t) agrees with ``tangential_ops`` on the tangent frames and
    maps the transported normal frame onto the development-side normal frame.
    Both normal frames must have matching J-Gram matrices nodewise; otherwise
    no isometric extension exists and a ValueError is raised.
    """
    tangent_frames = np.asarray(tangent_frames, dtype=float)
    normal_frames = np.asarray(normal_frames, dtype=float)
    normal_frames_dev = np.asarray(normal_frames_dev, dtype=float)
    signs = form.signs
    g_a = np.einsum("kia,i,kib->kab", normal_frames, signs, normal_frames)
    g_b = np.einsum("kia,i,kib->kab", normal_frames_dev, signs, normal_frames_dev)
    worst = float(np.max(np.abs(g_a - g_b)))
    if worst > gram_tol:
        raise ValueError(
            f"normal frames are not isometric (Gram mismatch {worst:.3e}); "
            "cannot extend the tangential action"
        )
    moved_tan = np.einsum("kij,kja->kia", np.asarray(tangential_ops, dtype=float), tangent_frames)
    src = np.concatenate([tangent_frames, normal_frames], axis=2)
    dst = np.concatenate([moved_tan, normal_frames_dev], axis=2)
    return np.einsum("kij,kjl->kil", dst, np.linalg.inv(src))


def extrinsic_roll(model, data, q0=None, normal_strategy="auto"):
    """Extrinsic rolling map along a control or sampled curve.

    ``normal_strategy`` selects how the rotation acts on the normal bundle:
    "closed_form" inverts the ambient representation wholesale (valid when
    the model declares ``closed_form_normal``), "frame_matching" transports a
    normal frame along the curve and matches it to the constant development
    frame, and "auto" picks the former when available.
    """
    lift = horizontal_lift(model, data, q0=q0)
    if model.extrinsic_override is not None:
        if normal_strategy in ("auto", "closed_form"):
            return model.extrinsic_override(model, lift)
        raise ValueError(
            f"normal strategy '{normal_strategy}' is unavailable for model {model.name}"
        )
    grid = lift.grid
    rhos = model.rho_path(lift.samples)
    alpha = np.einsum("kij,j->ki", rhos, model.obar)
    s_dev = extrinsic_develop(model, lift, EmbeddedCurve(grid=grid, points=alpha))
    alpha_hat = model.obar[None, :] + s_dev

    if normal_strategy == "auto":
        normal_strategy = "closed_form" if model.closed_form_normal else "frame_matching"
    if normal_strategy == "closed_form":
        if not model.closed_form_normal:
            raise ValueError(
                f"normal strategy 'closed_form' is unavailable for model {model.name}"
            )
        rots = model.rho_inverse_path(rhos)
    elif normal_strategy == "frame_matching":
        frames = model.frames_along(rhos)
        normals = model.normals_along(rhos)
        cols = [
            parallel_transport_embedded(alpha, normals, normals[0][:, j], model.form,
                                        which="normal")
            for j in range(normals.shape[2])
        ]
        transported = np.stack(cols, axis=2)
        dev_normals = np.broadcast_to(
            model.normal0, (grid.n_nodes,) + model.normal0.shape
        ).copy()
        rots = normal_extension_by_frames(
            model.rho_inverse_path(rhos), frames, transported, dev_normals, model.form
        )
    else:
        raise ValueError(f"unknown normal strategy '{normal_strategy}'")

    s = alpha_hat - np.einsum("kij,kj->ki", rots, alpha)
    return RollingMapPath(
        grid=grid, R=rots, s=s, alpha=alpha, alpha_hat=alpha_hat, form=model.form
    )


def model_residual_report(model, path):
    """Residual suite for a model-generated extrinsic rolling path.

    Tangent frames along alpha come from the model's pointwise frame
    builders (independent of how the path was produced); the development
    side uses the constant base-point frames.
    """
    grid = path.grid
    tangent_m = model.pointwise_tangent_frames(grid, path.alpha)
    return rolling_condition_residuals(
        path,
        tangent_m,
        model.flat_tangent_frames(grid),
        model.flat_normal_frames(grid),
    )
