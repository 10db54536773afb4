"""Hyperbolic plane: Poincare disc acted on by SU(1,1), hyperboloid embedding.

The algebra su(1,1) is realized by

    A1 = 1/2 [[i, 0], [0, -i]],  A2 = 1/2 [[0, 1], [1, 0]],  A3 = 1/2 [[0, i], [-i, 0]],

a general element ``X = 1/2 [[i v, u], [conj(u), -i v]]`` carrying coordinates
(v, u1, u2) with u = u1 + i u2.  In these coordinates the adjoint action on
the algebra preserves ``-v^2 + u1^2 + u2^2``, which realizes the hyperboloid
of one sheet... of two sheets' upper half as the orbit of (1, 0, 0); the
ambient form is diag(-1, 1, 1).  The disc coordinate z maps onto the
hyperboloid by

    iota(z) = ( (1+|z|^2)/(1-|z|^2), 2 Im z/(1-|z|^2), -2 Re z/(1-|z|^2) ).

Moebius transformations z -> (a z + b)/(conj(b) z + conj(a)) with
|a|^2 - |b|^2 = 1 act transitively; iota intertwines them with the adjoint
action.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import null_space

from ..homogeneous import GroupPath
from ..integrate import (
    dense_from_samples,
    fd_derivative,
    flow_matrix_ode,
    integrate_vector,
)
from ..rolling import RollingMapPath

__all__ = [
    "MoebiusElement",
    "SU11_BASIS",
    "su11_coords",
    "moebius_adjoint",
    "embed_hyperbolic",
    "ubar_matrix",
    "description",
    "bundle",
    "make_hyperbolic_model",
    "hyperbolic_lift",
    "roll_hyperboloid",
]

SU11_BASIS = 0.5 * np.array(
    [
        [[1j, 0.0], [0.0, -1j]],
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, 1j], [-1j, 0.0]],
    ]
)

HORIZONTALITY_TOL = 1e-5


@dataclass
class MoebiusElement:
    """Group element of SU(1,1) (branch "su11") or SU(2) (branch "su2")."""

    a: complex
    b: complex
    branch: str = "su11"

    def __post_init__(self):
        if self.branch not in ("su11", "su2"):
            raise ValueError("branch must be 'su11' or 'su2'")
        det = abs(self.a) ** 2 - abs(self.b) ** 2 if self.branch == "su11" \
            else abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(det - 1.0) > 1e-10:
            raise ValueError(f"(a, b) does not satisfy the {self.branch} determinant condition")

    @property
    def matrix(self):
        if self.branch == "su11":
            return np.array([[self.a, self.b], [np.conj(self.b), np.conj(self.a)]])
        return np.array([[self.a, self.b], [-np.conj(self.b), np.conj(self.a)]])

    @classmethod
    def from_matrix(cls, M, branch="su11", tol=1e-10):
        M = np.asarray(M)
        a, b = complex(M[0, 0]), complex(M[0, 1])
        expect = cls(a, b, branch).matrix
        if np.max(np.abs(expect - M)) > tol:
            raise ValueError(f"matrix does not have the {branch} structure")
        return cls(a, b, branch)

    def act(self, z):
        M = self.matrix
        return (M[0, 0] * z + M[0, 1]) / (M[1, 0] * z + M[1, 1])


def su11_coords(X):
    """Coordinates (v, u1, u2) of an su(1,1) matrix."""
    X = np.asarray(X)
    return np.array([2.0 * X[0, 0].imag, 2.0 * X[0, 1].real, 2.0 * X[0, 1].imag])


def moebius_adjoint(a, b):
    """Adjoint matrix of [[a, b], [conj b, conj a]] in (v, u1, u2) coordinates."""
    a = complex(a)
    b = complex(b)
    aa, bb = abs(a) ** 2, abs(b) ** 2
    ab = a * b
    abc = a * np.conj(b)
    a2 = a * a
    b2 = b * b
    return np.array(
        [
            [aa + bb, 2.0 * np.imag(np.conj(a) * b), -2.0 * np.real(abc)],
            [2.0 * np.imag(ab), np.real(a2 - b2), -np.imag(a2 + b2)],
            [-2.0 * np.real(ab), np.imag(a2 - b2), np.real(a2 + b2)],
        ]
    )


def _ad_from_coords(v, u1, u2):
    return np.array(
        [
            [0.0, u2, -u1],
            [u2, 0.0, -v],
            [-u1, v, 0.0],
        ]
    )


def embed_hyperbolic(z):
    """Map disc points onto the hyperboloid; accepts scalars or arrays."""
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    if np.any(r2 >= 1.0):
        raise ValueError("disc points must satisfy |z| < 1")
    den = 1.0 - r2
    out = np.stack(
        [(1.0 + r2) / den, 2.0 * z.imag / den, -2.0 * z.real / den], axis=-1
    )
    return out


def ubar_matrix(u):
    """Ambient control matrix [[0,u1,u2],[u1,0,0],[u2,0,0]] of the rolling kinematics."""
    u1, u2 = float(u[0]), float(u[1])
    return np.array([[0.0, u1, u2], [u1, 0.0, 0.0], [u2, 0.0, 0.0]])


def description():
    """Declarative model data (JSON-serializable)."""
    basis = [
        [[[x.real, x.imag] for x in row] for row in mat] for mat in SU11_BASIS
    ]
    return {
        "format_version": 1,
        "name": "hyperboloid",
        "dtype": "complex",
        "J_signs": [-1, 1, 1],
        "group_signs": [1, -1],
        "basis": basis,
        "h_indices": [0],
        "p_indices": [1, 2],
        "d_e_pi": [[0.5, 0.0], [0.0, 0.5]],
        "base_point": [0.0, 0.0],
        "embedding": "builtin:hyperboloid12",
        "params": {},
    }


def _rho(g):
    g = np.asarray(g)
    ginv = np.linalg.inv(g)
    return np.column_stack([su11_coords(g @ A @ ginv) for A in SU11_BASIS])


def _d_e_rho(X):
    v, u1, u2 = su11_coords(X)
    return _ad_from_coords(v, u1, u2)


def _action(g, z):
    g = np.asarray(g)
    return (g[0, 0] * z + g[0, 1]) / (g[1, 0] * z + g[1, 1])


def _tangent_frame_at(x):
    x = np.asarray(x, dtype=float)
    signs = np.array([-1.0, 1.0, 1.0])
    return null_space((signs * x)[None, :])


def _normal_frame_at(x):
    return np.asarray(x, dtype=float)[:, None]


def _random_point(rng):
    r = 0.85 * np.sqrt(rng.uniform())
    phi = rng.uniform(0.0, 2.0 * np.pi)
    return r * np.exp(1j * phi)


def bundle(desc):
    z0 = complex(desc["base_point"][0], desc["base_point"][1])
    return {
        "rho": _rho,
        "d_e_rho": _d_e_rho,
        "action": _action,
        "embed": lambda z: embed_hyperbolic(z),
        "base_point": z0,
        "obar": embed_hyperbolic(z0),
        "tangent_frame_at": _tangent_frame_at,
        "normal_frame_at": _normal_frame_at,
        "random_point": _random_point,
        "closed_form_normal": True,
        "symmetric_space": True,
    }


@lru_cache(maxsize=1)
def make_hyperbolic_model():
    from . import build_model

    return build_model(description())


def _node_horizontality(model, grid, samples):
    qdot = fd_derivative(samples, grid.h)
    out = np.empty(grid.n_nodes)
    hsel = list(model.h_indices)
    for k in range(grid.n_nodes):
        xi = np.linalg.solve(samples[k], qdot[k])
        coeffs, resid = model.algebra_coords(xi)
        out[k] = max(float(np.max(np.abs(coeffs[hsel]))), resid)
    return out


def hyperbolic_lift(z_samples, grid, theta0=0.0):
    """Horizontal lift g(t) = h(z(t)) exp(theta(t) A1) through explicit formulas.

    theta solves a scalar quadrature whose sign depends on orientation
    conventions, so both signs are integrated and the one with the smaller
    horizontality residual wins; the loser must be worse at every node or
    the input is rejected as ambiguous.  Serves as an independent
    cross-check of the generic frame-based lift.
    """
    z = np.asarray(z_samples, dtype=complex)
    if z.shape != (grid.n_nodes,):
        raise ValueError("z samples must match the grid nodes")
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("disc points must satisfy |z| < 1")
    model = make_hyperbolic_model()

    x = z.real
    y = z.imag
    xdot = fd_derivative(x, grid.h)
    ydot = fd_derivative(y, grid.h)
    rate = 2.0 * (x * ydot - xdot * y) / (1.0 - np.abs(z) ** 2)
    dense_rate = dense_from_samples(grid.ts, rate)
    theta_int = integrate_vector(lambda t: np.atleast_1d(dense_rate(t)), np.zeros(1), grid)[:, 0]

    factor = 1.0 / np.sqrt(1.0 - np.abs(z) ** 2)

    def assemble(theta):
        a = factor * np.exp(0.5j * theta)
        b = factor * z * np.exp(-0.5j * theta)
        g = np.empty((grid.n_nodes, 2, 2), dtype=complex)
        g[:, 0, 0] = a
        g[:, 0, 1] = b
        g[:, 1, 0] = np.conj(b)
        g[:, 1, 1] = np.conj(a)
        return g

    candidates = {}
    residuals = {}
    for sign in (+1.0, -1.0):
        samples = assemble(theta0 + sign * theta_int)
        candidates[sign] = samples
        residuals[sign] = _node_horizontality(model, grid, samples)
    totals = {sign: float(np.max(res)) for sign, res in residuals.items()}
    winner = min(totals, key=totals.get)
    loser = -winner
    if not np.all(residuals[winner] <= residuals[loser] + 1e-9):
        raise ValueError("theta sign is ambiguous along the curve")
    speed = float(np.max(np.abs(rate))) + float(np.max(np.abs(xdot))) + float(np.max(np.abs(ydot)))
    if totals[winner] > HORIZONTALITY_TOL * max(1.0, speed):
        raise ValueError(
            f"no horizontal lift found (best residual {totals[winner]:.3e})"
        )
    return GroupPath(grid=grid, samples=candidates[winner], control=None)


def roll_hyperboloid(control, grid=None):
    """Extrinsic rolling of the hyperboloid on its affine tangent plane.

    ``control`` is a ControlCurve with components (u1, u2): the ambient
    angular velocity is ubar_matrix(u(t)) and the kinematic equations

        alphabar' = qbar Ubar obar,   Rbar' = -Ubar Rbar,   sbar' = Ubar obar

    are integrated directly (independently of the lift-based assembly in the
    engine).  Returns a RollingMapPath.
    """
    from ..homogeneous import ControlCurve

    if not isinstance(control, ControlCurve):
        if grid is None:
            raise ValueError("need a grid when control is a raw array")
        control = ControlCurve(grid=grid, coords=control)
    grid = control.grid
    model = make_hyperbolic_model()
    form = model.form

    def ubar(t):
        return ubar_matrix(control.func(t))

    qbar = flow_matrix_ode(ubar, np.eye(3), grid, side="right", reproject_form=form)
    rots = flow_matrix_ode(lambda t: -ubar(t), np.eye(3), grid, side="left",
                           reproject_form=form)
    obar = model.obar
    s = integrate_vector(lambda t: ubar(t) @ obar, np.zeros(3), grid)
    alpha = np.einsum("kij,j->ki", qbar, obar)
    alpha_hat = obar[None, :] + s
    return RollingMapPath(grid=grid, R=rots, s=s, alpha=alpha, alpha_hat=alpha_hat,
                          form=form)
