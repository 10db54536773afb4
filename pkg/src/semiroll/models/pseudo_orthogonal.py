"""Pseudo-orthogonal groups SO+(p, q) as symmetric spaces of G = SO+ x SO+.

A point is an n x n matrix X in the identity component of the J-orthogonal
group (J = diag(I_p, -I_q)); the symmetry group acts by (Q1, Q2).X =
Q1 X Q2^{-1} and is realized as 2n x 2n block-diagonal matrices diag(Q1, Q2).
The embedding flattens X column-major into R^{n^2}, where the invariant form

    <A, B> = tr(J A^T J B)

has sign pattern kron(j, j) for j the diagonal of J.  With base point P0 the
isotropy algebra is {diag(B, P0^{-1} B P0)} and its complement
{diag(B, -P0^{-1} B P0)} maps onto tangent vectors 2 B P0.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..homogeneous import ControlCurve
from ..integrate import flow_matrix_ode, integrate_vector
from ..linalg import SignatureForm, is_oriented_isometry, random_oriented_isometry
from ..rolling import RollingMapPath

__all__ = [
    "so_pq_basis",
    "j_symmetric_basis",
    "description",
    "bundle",
    "make_pseudo_orthogonal_model",
    "roll_pseudo_orthogonal",
]


def so_pq_basis(p, q):
    """Basis of so(p, q): pairs (i, j), i < j, lexicographic.

    Same-block pairs give E_ij - E_ji, cross-block pairs E_ij + E_ji.
    """
    n = p + q
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            B = np.zeros((n, n))
            B[i, j] = 1.0
            B[j, i] = 1.0 if (i < p) != (j < p) else -1.0
            out.append(B)
    return np.array(out)


def j_symmetric_basis(p, q):
    """Basis of the J-symmetric complement {C : J C^T J = C} in gl(n)."""
    n = p + q
    out = []
    for i in range(n):
        E = np.zeros((n, n))
        E[i, i] = 1.0
        out.append(E)
    for i in range(n):
        for j in range(i + 1, n):
            C = np.zeros((n, n))
            C[i, j] = 1.0
            C[j, i] = -1.0 if (i < p) != (j < p) else 1.0
            out.append(C)
    return np.array(out)


def _block_diag(A, B):
    n = A.shape[0]
    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = A
    out[n:, n:] = B
    return out


def description(p, q, base_point=None):
    """Declarative model data (JSON-serializable)."""
    p = int(p)
    q = int(q)
    if p < 0 or q < 0 or p + q < 2:
        raise ValueError("signature requires p, q >= 0 with p + q >= 2")
    n = p + q
    jd = np.concatenate([np.ones(p), -np.ones(q)])
    form_n = SignatureForm(jd)
    if base_point is None:
        P0 = np.eye(n)
    else:
        P0 = np.asarray(base_point, dtype=float)
        ok, res = is_oriented_isometry(P0, form_n)
        if not ok:
            raise ValueError(
                f"base point must lie in SO+({p},{q}) (residual {res:.3e})"
            )
    P0inv = np.linalg.inv(P0)
    small = so_pq_basis(p, q)
    d = small.shape[0]
    basis = [
        _block_diag(B, P0inv @ B @ P0).tolist() for B in small
    ] + [
        _block_diag(B, -(P0inv @ B @ P0)).tolist() for B in small
    ]
    return {
        "format_version": 1,
        "name": f"so_plus_{p}_{q}",
        "dtype": "real",
        "J_signs": np.kron(jd, jd).astype(int).tolist(),
        "group_signs": np.concatenate([jd, jd]).astype(int).tolist(),
        "basis": basis,
        "h_indices": list(range(d)),
        "p_indices": list(range(d, 2 * d)),
        "d_e_pi": (2.0 * np.eye(d)).tolist(),
        "base_point": P0.tolist(),
        "embedding": "builtin:pseudo_orth",
        "params": {"p": p, "q": q},
    }


def bundle(desc):
    p = int(desc["params"]["p"])
    q = int(desc["params"]["q"])
    n = p + q
    jd = np.concatenate([np.ones(p), -np.ones(q)])
    J = np.diag(jd)
    form_n = SignatureForm(jd)
    P0 = np.asarray(desc["base_point"], dtype=float)
    skew = so_pq_basis(p, q)
    sym = j_symmetric_basis(p, q)

    def rho(g):
        g = np.asarray(g)
        Q1 = g[:n, :n]
        Q2 = g[n:, n:]
        return np.kron(J @ Q2 @ J, Q1)

    def d_e_rho(X):
        X = np.asarray(X)
        U1 = X[:n, :n]
        U2 = X[n:, n:]
        return np.kron(np.eye(n), U1) - np.kron(U2.T, np.eye(n))

    def action(g, X):
        g = np.asarray(g)
        Q1 = g[:n, :n]
        Q2 = g[n:, n:]
        return Q1 @ X @ (J @ Q2.T @ J)

    def embed(X):
        return np.asarray(X, dtype=float).flatten(order="F")

    def tangent_frame_at(x):
        X = np.asarray(x, dtype=float).reshape((n, n), order="F")
        return np.column_stack([(B @ X).flatten(order="F") for B in skew])

    def normal_frame_at(x):
        X = np.asarray(x, dtype=float).reshape((n, n), order="F")
        return np.column_stack([(C @ X).flatten(order="F") for C in sym])

    def random_point(rng):
        return random_oriented_isometry(form_n, rng, scale=0.5) @ P0

    return {
        "rho": rho,
        "d_e_rho": d_e_rho,
        "action": action,
        "embed": embed,
        "base_point": P0,
        "obar": embed(P0),
        "tangent_frame_at": tangent_frame_at,
        "normal_frame_at": normal_frame_at,
        "random_point": random_point,
        "closed_form_normal": True,
        "symmetric_space": True,
    }


@lru_cache(maxsize=None)
def _cached_model(p, q):
    from . import build_model

    return build_model(description(p, q))


def make_pseudo_orthogonal_model(p, q, base_point=None):
    if base_point is None:
        return _cached_model(int(p), int(q))
    from . import build_model

    return build_model(description(p, q, base_point))


def roll_pseudo_orthogonal(p, q, control, grid=None, base_point=None):
    """Extrinsic rolling of SO+(p, q) inside the matrix space R^{n x n}.

    ``control`` carries coefficients in the so_pq_basis order; U(t) is the
    corresponding left angular velocity of the first factor.  The four group
    flows

        Q1' = Q1 U,   Q2' = -Q2 P0^{-1} U P0,
        R1' = -U R1,  R2' = P0^{-1} U P0 R2,

    are integrated separately (the rotation is not formed by inverting the
    point path), s' = vec(2 U(t) P0), and the rolling map acts on flattened
    matrices by X -> R1 X R2^{-1}.
    """
    if not isinstance(control, ControlCurve):
        if grid is None:
            raise ValueError("need a grid when control is a raw array")
        control = ControlCurve(grid=grid, coords=control)
    grid = control.grid
    p = int(p)
    q = int(q)
    n = p + q
    jd = np.concatenate([np.ones(p), -np.ones(q)])
    J = np.diag(jd)
    form_n = SignatureForm(jd)
    if base_point is None:
        P0 = np.eye(n)
    else:
        P0 = np.asarray(base_point, dtype=float)
    P0inv = np.linalg.inv(P0)
    skew = so_pq_basis(p, q)
    if control.dim != skew.shape[0]:
        raise ValueError(
            f"control must have {skew.shape[0]} components for so({p},{q})"
        )

    def U(t):
        return np.tensordot(control.func(t), skew, axes=(0, 0))

    def U_conj(t):
        return P0inv @ U(t) @ P0

    Q1 = flow_matrix_ode(U, np.eye(n), grid, side="right", reproject_form=form_n)
    Q2 = flow_matrix_ode(lambda t: -U_conj(t), np.eye(n), grid, side="right",
                         reproject_form=form_n)
    R1 = flow_matrix_ode(lambda t: -U(t), np.eye(n), grid, side="left",
                         reproject_form=form_n)
    R2 = flow_matrix_ode(U_conj, np.eye(n), grid, side="left",
                         reproject_form=form_n)

    s = integrate_vector(
        lambda t: (2.0 * U(t) @ P0).flatten(order="F"), np.zeros(n * n), grid
    )
    alpha = np.array([
        (Q1[k] @ P0 @ (J @ Q2[k].T @ J)).flatten(order="F")
        for k in range(grid.n_nodes)
    ])
    rots = np.array([np.kron(J @ R2[k] @ J, R1[k]) for k in range(grid.n_nodes)])
    obar = P0.flatten(order="F")
    alpha_hat = obar[None, :] + s
    return RollingMapPath(
        grid=grid, R=rots, s=s, alpha=alpha, alpha_hat=alpha_hat,
        form=SignatureForm(np.kron(jd, jd)),
    )
