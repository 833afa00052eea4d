"""Weighted closed-form similarity M-step."""

from __future__ import annotations

import numpy as np

from .core import RigidParams, Responsibilities, center, weighted_centroids
from .errors import DegenerateGeometryError

_RANK_TOL = 1e-12


def svd_2x2(G):
    """Closed-form SVD of a real 2x2 matrix.

    Returns ``U, S, Vt`` with ``U`` a rotation, ``S`` descending and
    nonnegative, so ``U @ diag(S) @ Vt == G``.
    """
    (a, b), (c, d) = G
    e, f = (a + d) / 2.0, (a - d) / 2.0
    g, h = (c + b) / 2.0, (c - b) / 2.0
    q, r = np.hypot(e, h), np.hypot(f, g)
    a1, a2 = np.arctan2(g, f), np.arctan2(h, e)
    theta, phi = (a2 - a1) / 2.0, (a2 + a1) / 2.0
    sx, sy = q + r, q - r
    U = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
    Vt = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    if sy < 0:
        Vt[1] = -Vt[1]
    return U, np.array([sx, abs(sy)]), Vt


def svd_small(G):
    G = np.asarray(G, dtype=float)
    if G.shape == (2, 2):
        return svd_2x2(G)
    return np.linalg.svd(G)


def solve_rotation(G) -> np.ndarray:
    """Rotation ``R`` maximizing ``trace(G.T @ R)``.

    ``R = U diag(1, ..., 1, det(U V^T)) V^T`` from the SVD of ``G``, which
    rules out reflections. Raises :class:`DegenerateGeometryError` when the
    maximizer is not unique.
    """
    G = np.asarray(G, dtype=float)
    if not np.all(np.isfinite(G)):
        raise DegenerateGeometryError("cross-covariance is not finite")
    D = G.shape[0]
    U, S, Vt = svd_small(G)
    det = np.sign(np.linalg.det(U @ Vt))
    tiny = S < _RANK_TOL * S[0]
    if S[0] == 0.0:
        raise DegenerateGeometryError("cross-covariance is zero")
    if D == 2 and tiny[-1] and det < 0:
        raise DegenerateGeometryError("rotation not determined: rank-1 cross-covariance with reflection")
    if D >= 3 and tiny[-1] and tiny[-2]:
        raise DegenerateGeometryError("rotation not determined: cross-covariance rank < D - 1")
    C = np.ones(D)
    C[-1] = det if det != 0 else 1.0
    return (U * C) @ Vt


def _cross_and_quadratic(X, Y, resp, omega):
    mu_x, mu_y, _ = weighted_centroids(X, Y, resp)
    cx, cy = center(X, mu_x), center(Y, mu_y)
    W = np.diag(omega)
    G = W @ (cx.T @ resp.P.T @ cy)
    # centered moving-set scatter weighted by each centroid's total mass
    scatter = (cy * resp.P.sum(axis=1)[:, None]).T @ cy
    return mu_x, mu_y, G, W, scatter


def _finish(R, mu_x, mu_y, G, W, scatter, estimate_scale):
    if estimate_scale:
        denom = float(np.trace(R.T @ W @ R @ scatter))
        if denom < 1e-300:
            raise DegenerateGeometryError("all moving mass sits at a single point")
        s = float(np.trace(G.T @ R)) / denom
        if not s > 0:
            raise DegenerateGeometryError(f"non-positive scale estimate {s}")
    else:
        s = 1.0
    return RigidParams(s, R, mu_x - s * R @ mu_y)


def solve_rigid(X, Y, resp: Responsibilities, omega=None, estimate_scale=True, max_refine=500) -> RigidParams:
    """Minimize ``sum P[m,n] sum_i omega_i (x_n - (s R y_m + d))_i**2`` for a similarity.

    Rotation from :func:`solve_rotation` on ``G = W CX^T P^T CY``, then the
    optimal scale for that rotation, then the translation matching the
    weighted centroids. That is exact when ``W`` is a multiple of the
    identity. Otherwise the quadratic term depends on ``R`` too, and the
    pair (R, s) is refined by majorize-minimize steps, each another
    :func:`solve_rotation` call on ``G + s (w_max I - W) R scatter``.
    """
    omega = np.ones(X.shape[1]) if omega is None else np.asarray(omega, dtype=float)
    mu_x, mu_y, G, W, scatter = _cross_and_quadratic(X, Y, resp, omega)
    R = solve_rotation(G)
    params = _finish(R, mu_x, mu_y, G, W, scatter, estimate_scale)
    if omega.max() - omega.min() <= 1e-12 * omega.max():
        return params

    A = omega.max() * np.eye(len(omega)) - W

    def loss(p):
        return p.s**2 * np.trace(p.R.T @ W @ p.R @ scatter) - 2.0 * p.s * np.trace(G.T @ p.R)

    f = loss(params)
    for _ in range(max_refine):
        try:
            R = solve_rotation(G + params.s * A @ params.R @ scatter)
            cand = _finish(R, mu_x, mu_y, G, W, scatter, estimate_scale)
        except DegenerateGeometryError:
            break
        f_new = loss(cand)
        if f_new > f:
            break
        # the loss is flat at the optimum, so stop on parameter movement instead
        done = np.abs(cand.R - params.R).max() <= 1e-15 and abs(cand.s - params.s) <= 1e-15 * params.s
        params, f = cand, f_new
        if done:
            break
    return params


def solve_scale_translation(X, Y, resp: Responsibilities, R, omega=None, estimate_scale=True) -> RigidParams:
    """Optimal scale and translation for a fixed rotation ``R``."""
    omega = np.ones(X.shape[1]) if omega is None else np.asarray(omega, dtype=float)
    mu_x, mu_y, G, W, scatter = _cross_and_quadratic(X, Y, resp, omega)
    return _finish(np.asarray(R, dtype=float), mu_x, mu_y, G, W, scatter, estimate_scale)
