"""Closed-form affine M-step."""

from __future__ import annotations

import numpy as np

from .core import AffineParams, Responsibilities, center, weighted_centroids
from .errors import SingularGeometryError

RIDGE = 1e-9
MAX_CONDITION = 1e12


def solve_affine(X, Y, resp: Responsibilities) -> AffineParams:
    """Weighted least-squares affine map from ``Y`` onto ``X``.

    Solves ``B (CY^T diag(P 1) CY + lam I) = CX^T P^T CY`` with a tiny ridge
    ``lam``. Diagonal per-dimension weights drop out of these normal
    equations, so none are taken.
    """
    mu_x, mu_y, _ = weighted_centroids(X, Y, resp)
    cx, cy = center(X, mu_x), center(Y, mu_y)
    D = X.shape[1]
    cross = cx.T @ resp.P.T @ cy
    gram = (cy * resp.P.sum(axis=1)[:, None]).T @ cy
    lam = RIDGE * np.trace(gram) / D
    gram = gram + lam * np.eye(D)
    if not np.all(np.isfinite(gram)) or np.linalg.cond(gram) > MAX_CONDITION:
        raise SingularGeometryError("moving-set scatter matrix is singular")
    # gram is symmetric, so B = cross @ inv(gram) solves gram @ B.T = cross.T
    B = np.linalg.solve(gram, cross.T).T
    return AffineParams(B, mu_x - B @ mu_y)
