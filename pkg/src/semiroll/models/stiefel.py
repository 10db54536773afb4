"""Stiefel manifolds V_k(R^n) = SO(n)/SO(n-k) rolling inside R^{n x k}.

Points are n x k orthonormal frames, flattened column-major; SO(n) acts by
left multiplication, rho(Q) = kron(I_k, Q).  At the base frame E (first k
columns of the identity) the tangent space holds matrices (A; B) with A
skew and the normal space (S; 0) with S symmetric.  This is a reductive
but NOT symmetric splitting: [p, p] leaks into p, so the rolling rotation
is the lift composed with an interpolating-frame correction S(t) solving

    S' = Omega(t) S,   Omega = -(Pi M_U Pi + Pi_perp M_U Pi_perp),

with M_U = kron(I_k, U(t)) for the horizontal control U and Pi the
orthogonal projector onto the base tangent space.  For k = 1 (the sphere)
Omega vanishes identically and the correction is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import null_space

from ..homogeneous import EmbeddedCurve, horizontal_lift
from ..integrate import flow_matrix_ode, integrate_vector, dense_from_samples
from ..linalg import SignatureForm
from ..rolling import RollingMapPath

__all__ = [
    "StiefelSubspaces",
    "stiefel_subspaces",
    "stiefel_omega",
    "description",
    "bundle",
    "make_stiefel_model",
    "roll_stiefel",
]

PBLOCK_TOL = 1e-10


@dataclass(frozen=True)
class StiefelSubspaces:
    """Orthonormal bases and projectors of the splitting at the base frame."""

    tangent: np.ndarray
    normal: np.ndarray
    span_base: np.ndarray
    traceless_sym: np.ndarray
    proj_tangent: np.ndarray
    proj_normal: np.ndarray


def _vec(M):
    return np.asarray(M).flatten(order="F")


def _unvec(v, n, k):
    return np.asarray(v).reshape((n, k), order="F")


@lru_cache(maxsize=None)
def stiefel_subspaces(n, k):
    n = int(n)
    k = int(k)
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    tangent = []
    for i in range(k):
        for j in range(i + 1, k):
            W = np.zeros((n, k))
            W[i, j] = 1.0 / np.sqrt(2.0)
            W[j, i] = -1.0 / np.sqrt(2.0)
            tangent.append(_vec(W))
    for r in range(n - k):
        for c in range(k):
            W = np.zeros((n, k))
            W[k + r, c] = 1.0
            tangent.append(_vec(W))
    tangent = np.column_stack(tangent)

    normal = []
    for i in range(k):
        W = np.zeros((n, k))
        W[i, i] = 1.0
        normal.append(_vec(W))
    for i in range(k):
        for j in range(i + 1, k):
            W = np.zeros((n, k))
            W[i, j] = 1.0 / np.sqrt(2.0)
            W[j, i] = 1.0 / np.sqrt(2.0)
            normal.append(_vec(W))
    normal = np.column_stack(normal)

    span_base = _vec(np.eye(n, k)) / np.sqrt(k)

    # Helmert rows give an orthonormal basis of diagonals summing to zero.
    traceless = []
    for m in range(1, k):
        d = np.zeros(k)
        d[:m] = 1.0
        d[m] = -float(m)
        d /= np.sqrt(m * (m + 1.0))
        W = np.zeros((n, k))
        W[:k, :k] = np.diag(d)
        traceless.append(_vec(W))
    traceless.extend(normal[:, k + i] for i in range(normal.shape[1] - k))
    traceless_sym = (
        np.column_stack(traceless) if traceless else np.zeros((n * k, 0))
    )

    return StiefelSubspaces(
        tangent=tangent,
        normal=normal,
        span_base=span_base,
        traceless_sym=traceless_sym,
        proj_tangent=tangent @ tangent.T,
        proj_normal=normal @ normal.T,
    )


def stiefel_omega(n, k, qdot):
    """Correction generator for a horizontal group velocity qdot in p."""
    U = np.asarray(qdot, dtype=float)
    scale = max(1.0, float(np.max(np.abs(U))))
    if np.max(np.abs(U + U.T)) > PBLOCK_TOL * scale:
        raise ValueError("group velocity must be skew-symmetric")
    if np.max(np.abs(U[k:, k:])) > PBLOCK_TOL * scale:
        raise ValueError("group velocity must lie in the horizontal subalgebra")
    sub = stiefel_subspaces(n, k)
    M = np.kron(np.eye(k), U)
    Pt = sub.proj_tangent
    Pn = sub.proj_normal
    return -(Pt @ M @ Pt + Pn @ M @ Pn)


def description(n, k):
    """Declarative model data (JSON-serializable)."""
    n = int(n)
    k = int(k)
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    basis = []
    for i in range(k):
        for j in range(i + 1, k):
            M = np.zeros((n, n))
            M[i, j] = 1.0
            M[j, i] = -1.0
            basis.append(M.tolist())
    for r in range(n - k):
        for c in range(k):
            M = np.zeros((n, n))
            M[k + r, c] = 1.0
            M[c, k + r] = -1.0
            basis.append(M.tolist())
    dp = len(basis)
    for i in range(k, n):
        for j in range(i + 1, n):
            M = np.zeros((n, n))
            M[i, j] = 1.0
            M[j, i] = -1.0
            basis.append(M.tolist())
    dh = len(basis) - dp
    return {
        "format_version": 1,
        "name": f"stiefel_{n}_{k}",
        "dtype": "real",
        "J_signs": [1] * (n * k),
        "group_signs": [1] * n,
        "basis": basis,
        "h_indices": list(range(dp, dp + dh)),
        "p_indices": list(range(dp)),
        "d_e_pi": np.eye(dp).tolist(),
        "base_point": np.eye(n, k).tolist(),
        "embedding": "builtin:stiefel",
        "params": {"n": n, "k": k},
    }


def _correction_path(model, lift):
    """Interpolating-frame correction S(t) along a horizontal lift."""
    n = int(model.params["n"])
    k = int(model.params["k"])
    grid = lift.grid
    control = lift.control
    if control is None:
        raise ValueError("lift carries no control curve")

    def omega(t):
        U = model.p_element(control.func(t))
        return stiefel_omega(n, k, U)

    form = SignatureForm(np.ones(n * k))
    return flow_matrix_ode(omega, np.eye(n * k), grid, side="left",
                           reproject_form=form)


def _roll_from_lift(model, lift):
    n = int(model.params["n"])
    k = int(model.params["k"])
    grid = lift.grid
    S = _correction_path(model, lift)
    rhos = model.rho_path(lift.samples)
    alpha = np.einsum("kij,j->ki", rhos, model.obar)
    rots = np.array([(rhos[m] @ S[m]).T for m in range(grid.n_nodes)])

    E = np.eye(n, k)
    sdot = np.array([
        S[m].T @ _vec(model.p_element(lift.control.coords[m]) @ E)
        for m in range(grid.n_nodes)
    ])
    dense = dense_from_samples(grid.ts, sdot)
    s = integrate_vector(dense, np.zeros(n * k), grid)
    alpha_hat = model.obar[None, :] + s
    return RollingMapPath(grid=grid, R=rots, s=s, alpha=alpha,
                          alpha_hat=alpha_hat, form=model.form)


def _tangential_correction(model, lift):
    return _correction_path(model, lift)


def bundle(desc):
    n = int(desc["params"]["n"])
    k = int(desc["params"]["k"])

    def rho(Q):
        return np.kron(np.eye(k), np.asarray(Q))

    def d_e_rho(X):
        return np.kron(np.eye(k), np.asarray(X))

    def action(Q, X):
        return np.asarray(Q) @ np.asarray(X)

    def embed(X):
        return _vec(np.asarray(X, dtype=float))

    def tangent_frame_at(x):
        P = _unvec(np.asarray(x, dtype=float), n, k)
        Pperp = null_space(P.T)
        cols = []
        for i in range(k):
            for j in range(i + 1, k):
                A = np.zeros((k, k))
                A[i, j] = 1.0
                A[j, i] = -1.0
                cols.append(_vec(P @ A))
        for r in range(n - k):
            for c in range(k):
                W = np.outer(Pperp[:, r], np.eye(k)[c])
                cols.append(_vec(W))
        return np.column_stack(cols)

    def normal_frame_at(x):
        P = _unvec(np.asarray(x, dtype=float), n, k)
        cols = []
        for i in range(k):
            for j in range(i, k):
                Sm = np.zeros((k, k))
                Sm[i, j] = 1.0
                Sm[j, i] = 1.0
                cols.append(_vec(P @ Sm))
        return np.column_stack(cols)

    def random_point(rng):
        G = rng.standard_normal((n, k))
        Q, _ = np.linalg.qr(G)
        return Q

    return {
        "rho": rho,
        "d_e_rho": d_e_rho,
        "action": action,
        "embed": embed,
        "base_point": np.eye(n, k),
        "obar": _vec(np.eye(n, k)),
        "tangent_frame_at": tangent_frame_at,
        "normal_frame_at": normal_frame_at,
        "random_point": random_point,
        "closed_form_normal": False,
        "symmetric_space": False,
        "extrinsic_override": _roll_from_lift,
        "tangential_correction": _tangential_correction,
    }


@lru_cache(maxsize=None)
def make_stiefel_model(n, k):
    from . import build_model

    return build_model(description(n, k))


def roll_stiefel(n, k, data, grid=None, q0=None):
    """Extrinsic rolling of V_k(R^n) on its affine tangent space at the base.

    ``data`` is a ControlCurve (p-coordinates: skew pairs of the top block
    first, then the lower block row-major), an EmbeddedCurve of flattened
    frames, or an (m, n, k) array of frames with an explicit grid.
    """
    model = make_stiefel_model(int(n), int(k))
    if isinstance(data, np.ndarray):
        if grid is None:
            raise ValueError("need a grid when data is a raw array")
        arr = np.asarray(data, dtype=float)
        pts = np.array([_vec(M) for M in arr]) if arr.ndim == 3 else arr
        data = EmbeddedCurve(grid=grid, points=pts)
    lift = horizontal_lift(model, data, q0=q0)
    return _roll_from_lift(model, lift)
