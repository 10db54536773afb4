"""Fixed-step integration and differentiation on uniform time grids.

Matrix flows use the classical fourth-order Runge-Kutta scheme with optional
per-step Newton reprojection onto the J-orthogonal group.  Vector quadrature
reuses the RK4 stepping (Simpson weights for a pure-time integrand, exact for
cubic polynomials).  Grid differentiation is fourth order, with one-sided
stencils at the two nodes on each end of the grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_interp_spline

from .linalg import j_orthogonality_residual

__all__ = [
    "TimeGrid",
    "reproject",
    "reproject_info",
    "flow_matrix_ode",
    "integrate_vector",
    "fd_derivative",
    "dense_from_samples",
    "derivative_interpolant",
]

REPROJECT_TOL = 1e-12
REPROJECT_MAX_ITER = 50


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid with n_steps intervals on [t0, t1]."""

    t0: float
    t1: float
    n_steps: int

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError("need t1 > t0")
        if self.n_steps < 1:
            raise ValueError("need at least one step")

    @property
    def h(self):
        return (self.t1 - self.t0) / self.n_steps

    @property
    def n_nodes(self):
        return self.n_steps + 1

    @property
    def ts(self):
        return np.linspace(self.t0, self.t1, self.n_steps + 1)


def reproject_info(X, form, tol=REPROJECT_TOL, max_iter=REPROJECT_MAX_ITER):
    """Newton iteration X <- (X + J X^{-*} J)/2 onto the J-orthogonal group.

    Returns (projected matrix, iterations used, final residual).  Quadratic
    convergence near the group; raises if the iteration stalls or hits a
    singular iterate.
    """
    X = np.array(X, dtype=complex if np.iscomplexobj(X) else float)
    signs = form.signs
    if X.shape != (form.dim, form.dim):
        raise ValueError("matrix shape does not match the form")
    residual = j_orthogonality_residual(X, form)
    for it in range(max_iter):
        if residual <= tol:
            return X, it, residual
        try:
            Y = np.linalg.inv(X.conj().T)
        except np.linalg.LinAlgError as exc:
            raise ValueError("reprojection hit a singular iterate") from exc
        X = 0.5 * (X + signs[:, None] * Y * signs[None, :])
        residual = j_orthogonality_residual(X, form)
    if residual <= tol:
        return X, max_iter, residual
    raise ValueError(
        f"reprojection did not converge in {max_iter} iterations "
        f"(residual {residual:.3e})"
    )


def reproject(X, form, tol=REPROJECT_TOL, max_iter=REPROJECT_MAX_ITER):
    return reproject_info(X, form, tol=tol, max_iter=max_iter)[0]


def flow_matrix_ode(generator, X0, grid, side="left", reproject_form=None):
    """Integrate Xdot = L(t) X (side="left") or Xdot = X L(t) (side="right").

    ``generator`` maps t to the square matrix L(t).  Returns the full node
    path, shape (n_nodes, d, d).  With ``reproject_form`` set, every accepted
    step is polished back onto the corresponding J-orthogonal group, which
    keeps group-valued flows on the group without degrading the RK4 order.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    probe = np.asarray(generator(grid.t0))
    X0 = np.asarray(X0)
    if probe.shape != X0.shape or X0.ndim != 2 or X0.shape[0] != X0.shape[1]:
        raise ValueError("generator output and X0 must be square matrices of equal size")
    dtype = np.result_type(probe.dtype, X0.dtype, float)
    X = X0.astype(dtype)

    if side == "left":
        def apply(L, M):
            return L @ M
    else:
        def apply(L, M):
            return M @ L

    h = grid.h
    ts = grid.ts
    out = np.empty((grid.n_nodes,) + X.shape, dtype=dtype)
    out[0] = X
    for k in range(grid.n_steps):
        t = ts[k]
        L1 = generator(t)
        Lm = generator(t + 0.5 * h)
        L2 = generator(t + h)
        k1 = apply(L1, X)
        k2 = apply(Lm, X + 0.5 * h * k1)
        k3 = apply(Lm, X + 0.5 * h * k2)
        k4 = apply(L2, X + h * k3)
        X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if reproject_form is not None:
            X = reproject(X, reproject_form)
        out[k + 1] = X
    return out


def integrate_vector(rhs, x0, grid):
    """Cumulative quadrature of xdot = rhs(t): node values of the antiderivative.

    Simpson-weighted steps (RK4 collapses to Simpson for a pure-time right
    hand side); exact for polynomial integrands up to degree 3.
    """
    probe = np.asarray(rhs(grid.t0))
    x = np.asarray(x0, dtype=np.result_type(probe.dtype, np.asarray(x0).dtype, float))
    if probe.shape != x.shape:
        raise ValueError("rhs output shape does not match x0")
    h = grid.h
    ts = grid.ts
    out = np.empty((grid.n_nodes,) + x.shape, dtype=x.dtype)
    out[0] = x
    for k in range(grid.n_steps):
        t = ts[k]
        f1 = np.asarray(rhs(t))
        fm = np.asarray(rhs(t + 0.5 * h))
        f2 = np.asarray(rhs(t + h))
        x = x + (h / 6.0) * (f1 + 4.0 * fm + f2)
        out[k + 1] = x
    return out


def fd_derivative(samples, h):
    """Differentiate uniformly sampled data along axis 0.

    Fourth-order five-point stencils when the grid has at least five nodes
    (one-sided variants at the two nodes on each end), second-order fallback
    on shorter grids.
    """
    a = np.asarray(samples)
    m = a.shape[0]
    if m < 2:
        raise ValueError("need at least two samples to differentiate")
    d = np.empty_like(a, dtype=np.result_type(a.dtype, float))
    if m >= 5:
        d[2:-2] = (a[:-4] - 8.0 * a[1:-3] + 8.0 * a[3:-1] - a[4:]) / (12.0 * h)
        d[0] = (-25.0 * a[0] + 48.0 * a[1] - 36.0 * a[2] + 16.0 * a[3] - 3.0 * a[4]) / (12.0 * h)
        d[1] = (-3.0 * a[0] - 10.0 * a[1] + 18.0 * a[2] - 6.0 * a[3] + a[4]) / (12.0 * h)
        d[-2] = (3.0 * a[-1] + 10.0 * a[-2] - 18.0 * a[-3] + 6.0 * a[-4] - a[-5]) / (12.0 * h)
        d[-1] = (25.0 * a[-1] - 48.0 * a[-2] + 36.0 * a[-3] - 16.0 * a[-4] + 3.0 * a[-5]) / (12.0 * h)
    elif m >= 3:
        d[1:-1] = (a[2:] - a[:-2]) / (2.0 * h)
        d[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h)
        d[-1] = (3.0 * a[-1] - 4.0 * a[-2] + a[-3]) / (2.0 * h)
    else:
        d[0] = d[1] = (a[1] - a[0]) / h
    return d


def dense_from_samples(ts, samples):
    """Cubic interpolant through node samples, callable at any t.

    Works for arbitrary trailing shape and complex data; degree drops
    gracefully when the grid is too short for a cubic.
    """
    ts = np.asarray(ts, dtype=float)
    samples = np.asarray(samples)
    if samples.shape[0] != ts.size:
        raise ValueError("sample count does not match time nodes")
    k = min(3, ts.size - 1)
    if np.iscomplexobj(samples):
        re = make_interp_spline(ts, samples.real, k=k, axis=0)
        im = make_interp_spline(ts, samples.imag, k=k, axis=0)

        def func(t):
            return re(t) + 1j * im(t)

        return func
    spline = make_interp_spline(ts, samples, k=k, axis=0)

    def func(t):
        return spline(t)

    return func


def derivative_interpolant(grid, samples):
    """Dense derivative of node samples: 4th-order stencils + cubic interpolation."""
    return dense_from_samples(grid.ts, fd_derivative(samples, grid.h))
