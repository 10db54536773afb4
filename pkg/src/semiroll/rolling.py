"""Rolling maps and their defining kinematic conditions.

A rolling of M on M_hat (both sitting in the same flat ambient space V) is a
path of motions g(t) = (R(t), s(t)) together with the contact curves alpha on
M and alpha_hat on M_hat.  This module stores such paths, measures the
defining conditions as per-node residuals (contact, tangency, no-slip and
the two no-twist conditions), and provides the algebraic operations on
rolling maps: inversion, composition, and a controlled fault injection that
perturbs the normal part of the rotation generator.  A projection-based
parallel transport along sampled frame paths serves as an independent
cross-check for the homogeneous-space machinery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from .integrate import TimeGrid, dense_from_samples, fd_derivative, flow_matrix_ode
from .linalg import RigidMotion, SignatureForm

__all__ = [
    "FRAME_COND_MAX",
    "TangentFramePath",
    "RollingMapPath",
    "RollingTriple",
    "ResidualReport",
    "rolling_point_residual",
    "tangency_residual",
    "no_slip_residual",
    "no_twist_residuals",
    "rolling_condition_residuals",
    "invert_rolling",
    "compose_rolling",
    "perturb_normal_generator",
    "parallel_transport_embedded",
    "triple_velocity_residual",
    "triple_gram_residual",
    "triple_orientation_flips",
]

FRAME_COND_MAX = 1e6


@dataclass
class TangentFramePath:
    """Per-node bases of a distribution along a curve: frames[k] is N x r."""

    ts: np.ndarray
    frames: np.ndarray

    def __post_init__(self):
        self.ts = np.asarray(self.ts, dtype=float)
        self.frames = np.asarray(self.frames, dtype=float)
        if self.frames.ndim != 3 or self.frames.shape[0] != self.ts.size:
            raise ValueError("frames must be (n_nodes, N, r) matching ts")

    @property
    def rank(self):
        return self.frames.shape[2]


@dataclass
class RollingMapPath:
    """Sampled extrinsic rolling: motions (R, s) plus both contact curves."""

    grid: TimeGrid
    R: np.ndarray
    s: np.ndarray
    alpha: np.ndarray
    alpha_hat: np.ndarray
    form: SignatureForm

    def __post_init__(self):
        m = self.grid.n_nodes
        n = self.form.dim
        self.R = np.asarray(self.R, dtype=float)
        self.s = np.asarray(self.s, dtype=float)
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.alpha_hat = np.asarray(self.alpha_hat, dtype=float)
        if self.R.shape != (m, n, n):
            raise ValueError(f"R must have shape {(m, n, n)}, got {self.R.shape}")
        for name, arr in (("s", self.s), ("alpha", self.alpha), ("alpha_hat", self.alpha_hat)):
            if arr.shape != (m, n):
                raise ValueError(f"{name} must have shape {(m, n)}, got {arr.shape}")

    @property
    def n_nodes(self):
        return self.grid.n_nodes

    def motion(self, k):
        return RigidMotion(self.R[k], self.s[k])

    def rotations_inverse(self):
        """Per-node R^{-1} via the J-transpose (exact on J-orthogonal rotations)."""
        signs = self.form.signs
        return signs[None, :, None] * np.swapaxes(self.R, 1, 2) * signs[None, None, :]


@dataclass
class RollingTriple:
    """Sampled intrinsic rolling: contact curve, development, tangential maps.

    ``maps[k]`` is the k_dim x N matrix of A(t_k) acting on ambient tangent
    vectors at alpha(t_k) and returning coordinates of the model tangent
    space at the base point; ``tangent_frames[k]`` spans that domain.
    ``target_gram`` is the scalar product on the coordinate codomain.
    """

    grid: TimeGrid
    alpha: np.ndarray
    alpha_hat: np.ndarray
    maps: np.ndarray
    tangent_frames: np.ndarray
    form: SignatureForm
    target_gram: np.ndarray

    def __post_init__(self):
        m = self.grid.n_nodes
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.alpha_hat = np.asarray(self.alpha_hat, dtype=float)
        self.maps = np.asarray(self.maps, dtype=float)
        self.tangent_frames = np.asarray(self.tangent_frames, dtype=float)
        self.target_gram = np.asarray(self.target_gram, dtype=float)
        if self.alpha.shape[0] != m or self.alpha_hat.shape[0] != m or self.maps.shape[0] != m:
            raise ValueError("node counts of triple arrays must match the grid")
        k = self.maps.shape[1]
        if self.alpha_hat.shape[1] != k or self.target_gram.shape != (k, k):
            raise ValueError("development / Gram dimensions do not match the maps")


@dataclass
class ResidualReport:
    """Per-condition residual maxima with the underlying per-node arrays."""

    grid: TimeGrid
    rolling_point: float
    tangency: float
    no_slip: float
    no_twist_tan: float
    no_twist_norm: float
    per_node: dict = field(default_factory=dict)

    _FIELDS = ("rolling_point", "tangency", "no_slip", "no_twist_tan", "no_twist_norm")

    def max_residual(self):
        return max(getattr(self, name) for name in self._FIELDS)

    def passed(self, tol):
        return self.max_residual() <= tol

    def to_dict(self):
        return {
            "grid": {"t0": self.grid.t0, "t1": self.grid.t1, "n_steps": self.grid.n_steps},
            "max": {name: getattr(self, name) for name in self._FIELDS},
            "per_node": {key: np.asarray(val).tolist() for key, val in self.per_node.items()},
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data):
        grid = TimeGrid(**data["grid"])
        per_node = {key: np.asarray(val) for key, val in data["per_node"].items()}
        return cls(grid=grid, per_node=per_node, **{k: float(v) for k, v in data["max"].items()})


def _check_frames(frames, what="frame"):
    conds = np.linalg.cond(frames)
    worst = float(np.max(conds))
    if not np.isfinite(worst) or worst > FRAME_COND_MAX:
        raise ValueError(f"{what} condition number {worst:.3e} exceeds {FRAME_COND_MAX:.0e}")


def _frame_grams(frames, form):
    return np.einsum("kia,i,kib->kab", frames, form.signs, frames)


def _coeff_operators(frames, form):
    """Per-node operators C with C v = coefficients of v in the frame (J-orthogonal)."""
    _check_frames(frames)
    grams = _frame_grams(frames, form)
    ft_j = np.swapaxes(frames, 1, 2) * form.signs[None, None, :]
    try:
        return np.linalg.solve(grams, ft_j)
    except np.linalg.LinAlgError as exc:
        raise ValueError("frame Gram matrix is singular under the ambient form") from exc


def _projectors(frames, form):
    return np.einsum("kia,kaj->kij", frames, _coeff_operators(frames, form))


def _node_norms(vectors):
    return np.linalg.norm(vectors, axis=-1)


def rolling_point_residual(path):
    """Per-node ||g(t).alpha(t) - alpha_hat(t)||."""
    moved = np.einsum("kij,kj->ki", path.R, path.alpha) + path.s
    return _node_norms(moved - path.alpha_hat)


def tangency_residual(path, tangent_m, tangent_mhat):
    """Per-node largest principal angle between R(t) T_alpha M and T_alphahat M_hat."""
    out = np.empty(path.n_nodes)
    for k in range(path.n_nodes):
        mapped = path.R[k] @ tangent_m.frames[k]
        angles = subspace_angles(mapped, tangent_mhat.frames[k])
        out[k] = float(np.max(angles)) if angles.size else 0.0
    return out


def no_slip_residual(path):
    """Per-node slip defect.

    Two formulations of the same condition are evaluated and the larger one
    is kept: the velocity of the affine motion field at the development
    point, ``Rdot R^{-1} (alpha_hat - s) + sdot``, and the velocity-matching
    form ``alpha_hat' - R alpha'``.  They coincide on genuine rolling maps;
    taking the max keeps faults visible that park one of the two quantities.
    """
    h = path.grid.h
    Rdot = fd_derivative(path.R, h)
    sdot = fd_derivative(path.s, h)
    adot = fd_derivative(path.alpha, h)
    ahatdot = fd_derivative(path.alpha_hat, h)
    Rinv = path.rotations_inverse()
    W = np.einsum("kij,kjl->kil", Rdot, Rinv)
    w1 = np.einsum("kij,kj->ki", W, path.alpha_hat - path.s) + sdot
    w2 = ahatdot - np.einsum("kij,kj->ki", path.R, adot)
    return np.maximum(_node_norms(w1), _node_norms(w2))


def no_twist_residuals(path, tangent_mhat, normal_mhat):
    """Per-node tangential and normal twist defects.

    The generator W = Rdot R^{-1} of a twist-free rolling exchanges the
    tangent and normal spaces of the development: W T_hat must have no
    tangential component and W N_hat no normal component.  Residuals are
    measured on Euclidean-normalized frame columns through the J-orthogonal
    projectors of the respective subspaces.
    """
    h = path.grid.h
    Rdot = fd_derivative(path.R, h)
    Rinv = path.rotations_inverse()
    W = np.einsum("kij,kjl->kil", Rdot, Rinv)

    p_tan = _projectors(tangent_mhat.frames, path.form)
    p_nor = _projectors(normal_mhat.frames, path.form)

    def _defect(frames, projector):
        scale = np.linalg.norm(frames, axis=1, keepdims=True)
        cols = frames / scale
        moved = np.einsum("kij,kja->kia", W, cols)
        comp = np.einsum("kij,kja->kia", projector, moved)
        return np.max(np.linalg.norm(comp, axis=1), axis=-1)

    tan = _defect(tangent_mhat.frames, p_tan)
    nor = _defect(normal_mhat.frames, p_nor)
    return tan, nor


def rolling_condition_residuals(path, tangent_m, tangent_mhat, normal_mhat):
    """Bundle all defining-condition residuals into a ResidualReport."""
    point = rolling_point_residual(path)
    tang = tangency_residual(path, tangent_m, tangent_mhat)
    slip = no_slip_residual(path)
    twist_t, twist_n = no_twist_residuals(path, tangent_mhat, normal_mhat)
    return ResidualReport(
        grid=path.grid,
        rolling_point=float(np.max(point)),
        tangency=float(np.max(tang)),
        no_slip=float(np.max(slip)),
        no_twist_tan=float(np.max(twist_t)),
        no_twist_norm=float(np.max(twist_n)),
        per_node={
            "rolling_point": point,
            "tangency": tang,
            "no_slip": slip,
            "no_twist_tan": twist_t,
            "no_twist_norm": twist_n,
        },
    )


def invert_rolling(path):
    """Roll M_hat on M: motions g^{-1}, contact curves swapped.

    Inverts the rotations through the J-transpose, so inverting twice
    reproduces the input path exactly.
    """
    Rinv = path.rotations_inverse()
    s_inv = -np.einsum("kij,kj->ki", Rinv, path.s)
    return RollingMapPath(
        grid=path.grid,
        R=Rinv,
        s=s_inv,
        alpha=path.alpha_hat.copy(),
        alpha_hat=path.alpha.copy(),
        form=path.form,
    )


def compose_rolling(path01, path12, curve_tol=1e-8):
    """Chain a rolling of M0 on M1 with a rolling of M1 on M2.

    The intermediate curves must agree: path01 develops onto the same curve
    path12 rolls along.  The composite motion applies path01 first, so the
    rotations multiply as R12 R01.
    """
    if path01.grid != path12.grid:
        raise ValueError("rolling paths live on different grids")
    if path01.form != path12.form:
        raise ValueError("rolling paths use different ambient forms")
    mismatch = float(np.max(_node_norms(path01.alpha_hat - path12.alpha)))
    if mismatch > curve_tol:
        raise ValueError(
            f"intermediate contact curves disagree by {mismatch:.3e} "
            f"(tolerance {curve_tol:.1e})"
        )
    R = np.einsum("kij,kjl->kil", path12.R, path01.R)
    s = path12.s + np.einsum("kij,kj->ki", path12.R, path01.s)
    return RollingMapPath(
        grid=path01.grid,
        R=R,
        s=s,
        alpha=path01.alpha.copy(),
        alpha_hat=path12.alpha_hat.copy(),
        form=path01.form,
    )


def perturb_normal_generator(path, omega0, tangent_mhat, normal_mhat, admissibility_tol=1e-8):
    """Left-multiply the rotation path by a normal-bundle twist factor.

    ``omega0`` (a constant matrix, a callable of t, or per-node samples) must
    be J-skew, annihilate the development tangent frames and preserve the
    normal space; the perturbed rotations are Lambda(t) R(t) where Lambda
    solves Lambda' = omega0 Lambda from the identity, and the translations
    are recomputed so the contact condition is preserved.  Because Lambda
    fixes the development tangent space pointwise, contact, tangency,
    no-slip and tangential no-twist are untouched and only the normal
    no-twist condition breaks.
    """
    grid = path.grid
    m = grid.n_nodes
    n = path.form.dim

    if callable(omega0):
        omega_fn = omega0
        omega_nodes = np.array([np.asarray(omega0(t), dtype=float) for t in grid.ts])
    else:
        omega_arr = np.asarray(omega0, dtype=float)
        if omega_arr.shape == (n, n):
            omega_nodes = np.broadcast_to(omega_arr, (m, n, n)).copy()
            omega_fn = lambda t: omega_arr
        elif omega_arr.shape == (m, n, n):
            omega_nodes = omega_arr
            omega_fn = dense_from_samples(grid.ts, omega_arr)
        else:
            raise ValueError("omega0 must be (N,N), (n_nodes,N,N) or callable")

    signs = path.form.signs
    p_tan = _projectors(tangent_mhat.frames, path.form)
    scale = max(1.0, float(np.max(np.abs(omega_nodes))))
    skew = omega_nodes.transpose(0, 2, 1) * signs[None, None, :] \
        + signs[None, :, None] * omega_nodes
    worst_skew = float(np.max(np.abs(skew)))
    kills_tan = float(np.max(np.abs(np.einsum("kij,kja->kia", omega_nodes, tangent_mhat.frames))))
    moved_nor = np.einsum("kij,kja->kia", omega_nodes, normal_mhat.frames)
    leaks_tan = float(np.max(np.abs(np.einsum("kij,kja->kia", p_tan, moved_nor))))
    for label, value in (
        ("not J-skew", worst_skew),
        ("does not annihilate the development tangent space", kills_tan),
        ("does not preserve the development normal space", leaks_tan),
    ):
        if value > admissibility_tol * scale:
            raise ValueError(f"inadmissible normal generator: {label} (defect {value:.3e})")

    lam = flow_matrix_ode(lambda t: np.asarray(omega_fn(t), dtype=float),
                          np.eye(n), grid, side="left", reproject_form=path.form)
    R_new = np.einsum("kij,kjl->kil", lam, path.R)
    s_new = path.alpha_hat - np.einsum("kij,kj->ki", R_new, path.alpha)
    return RollingMapPath(
        grid=grid,
        R=R_new,
        s=s_new,
        alpha=path.alpha.copy(),
        alpha_hat=path.alpha_hat.copy(),
        form=path.form,
    )


def parallel_transport_embedded(curve, frames, v0, form, which="tangent", refine=2):
    """Transport v0 along a sampled curve by step-and-project in the ambient space.

    Parameters
    ----------
    curve : (n_nodes, N) array
        Sampled points of the base curve (used for validation; the scheme
        itself only needs the subspaces).
    frames : (n_nodes, N, r) array
        Per-node bases of the subspace the transported vector lives in
        (tangent bundle for ``which="tangent"``, normal bundle for
        ``which="normal"``).
    v0 : (N,) array
        Start vector, must lie in the span of ``frames[0]``.
    form : SignatureForm
        Ambient scalar product; projections are J-orthogonal and the step
        rescaling preserves the (indefinite) squared norm of v0 unless v0 is
        numerically null, in which case rescaling is skipped.
    refine : int
        Richardson levels over stride-2/4/8 coarsenings of the node path
        (each level needs the node count to be divisible by the stride);
        the base scheme is first order, each level buys one more order.

    Returns the transported vectors at every node, shape (n_nodes, N).
    """
    if which not in ("tangent", "normal"):
        raise ValueError("which must be 'tangent' or 'normal'")
    curve = np.asarray(curve, dtype=float)
    frames = np.asarray(frames, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if curve.ndim != 2 or frames.shape[:2] != curve.shape:
        raise ValueError("curve and frames disagree on node count or ambient dimension")
    m = curve.shape[0]

    coeffs, res, _, _ = np.linalg.lstsq(frames[0], v0, rcond=None)
    recon = frames[0] @ coeffs
    if np.linalg.norm(recon - v0) > 1e-8 * max(1.0, np.linalg.norm(v0)):
        raise ValueError(f"v0 does not lie in the initial {which} space")

    n0 = float(form.ip(v0, v0))
    null_like = abs(n0) <= 1e-10 * float(v0 @ v0)

    def _raw(stride):
        sub = frames[::stride]
        projectors = _projectors(sub, form)
        out = np.empty((sub.shape[0], curve.shape[1]))
        v = v0.copy()
        out[0] = v
        for k in range(1, sub.shape[0]):
            w = projectors[k] @ v
            if not null_like:
                nw = float(form.ip(w, w))
                if nw * n0 <= 0.0:
                    raise ValueError(
                        "transport step lost the causal type of the vector; refine the grid"
                    )
                w = w * np.sqrt(n0 / nw)
            v = w
            out[k] = v
        return out

    def _usable(stride):
        return (m - 1) % stride == 0 and (m - 1) // stride >= 2

    ts = np.linspace(0.0, 1.0, m)
    path1 = _raw(1)
    result = path1
    if refine >= 1 and _usable(2):
        path2 = _raw(2)
        e1_fine = 2.0 * path1[::2] - path2
        corr1 = dense_from_samples(ts[::2], e1_fine - path1[::2])
        result = path1 + corr1(ts)
        if refine >= 2 and _usable(4):
            path4 = _raw(4)
            e1_coarse = 2.0 * path2[::2] - path4
            e2 = (4.0 * e1_fine[::2] - e1_coarse) / 3.0
            corr2 = dense_from_samples(ts[::4], e2 - e1_fine[::2])
            result = result + corr2(ts)
            if refine >= 3 and _usable(8):
                path8 = _raw(8)
                e1_c2 = 2.0 * path4[::2] - path8
                e2_coarse = (4.0 * e1_coarse[::2] - e1_c2) / 3.0
                e3 = (8.0 * e2[::2] - e2_coarse) / 7.0
                corr3 = dense_from_samples(ts[::8], e3 - e2[::2])
                result = result + corr3(ts)
    return result


def triple_velocity_residual(triple):
    """Per-node ||d/dt alpha_hat - A(t) d/dt alpha||: the intrinsic no-slip law."""
    h = triple.grid.h
    adot = fd_derivative(triple.alpha, h)
    ahatdot = fd_derivative(triple.alpha_hat, h)
    mapped = np.einsum("kai,ki->ka", triple.maps, adot)
    return _node_norms(ahatdot - mapped)


def triple_gram_residual(triple):
    """Per-node isometry defect of A(t) on the moving tangent frame."""
    mapped = np.einsum("kai,kib->kab", triple.maps, triple.tangent_frames)
    target = np.einsum("kab,ac,kcd->kbd", mapped, triple.target_gram, mapped)
    source = _frame_grams(triple.tangent_frames, triple.form)
    return np.max(np.abs(target - source), axis=(1, 2))


def triple_orientation_flips(triple):
    """Number of sign changes of det(A(t) F(t)) along the path (0 = oriented)."""
    dets = np.linalg.det(np.einsum("kai,kib->kab", triple.maps, triple.tangent_frames))
    if np.any(dets == 0.0):
        raise ValueError("tangential map is singular at some node")
    return int(np.sum(np.sign(dets[1:]) != np.sign(dets[:-1])))
