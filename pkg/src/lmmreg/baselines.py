"""Comparison methods: Gaussian CPD and point-to-point ICP."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
from scipy.spatial.distance import cdist

from .core import RegConfig, RegistrationResult, Responsibilities, RigidParams, TraceEntry, check_points
from .em import register
from .errors import DegenerateGeometryError, InvalidInput
from .rigid import solve_rigid


def register_cpd(X, Y, config: RegConfig | None = None) -> RegistrationResult:
    """Coherent-point-drift style rigid/affine registration.

    Same EM driver as :func:`lmmreg.em.register` with an isotropic Gaussian
    kernel, unit dimension weights and the usual variance update.
    """
    config = replace(config or RegConfig(), kernel="gaussian")
    return register(X, Y, config)


def _nearest(X, TY):
    return np.argmin(cdist(TY, X, "sqeuclidean"), axis=1)


def _matching(assign, N):
    M = assign.shape[0]
    P = np.zeros((M, N))
    P[np.arange(M), assign] = 1.0
    return P


def _report_view(P):
    """Column-normalized copy of a hard matching; unclaimed columns go to the outlier slot."""
    counts = P.sum(axis=0)
    view = np.divide(P, counts, out=np.zeros_like(P), where=counts > 0)
    return Responsibilities(view, (counts == 0).astype(float))


def _sq_error(X, TY, P):
    return float(np.sum(P * cdist(TY, X, "sqeuclidean")))


def register_icp(X, Y, config: RegConfig | None = None) -> RegistrationResult:
    """Iterative closest point: each moving point is matched to its nearest fixed point.

    Stops when the nearest-neighbour assignment no longer changes. The
    ``resp`` of the result is the matching spread evenly over the moving
    points sharing a fixed point.
    """
    config = config or RegConfig()
    X = check_points(X, "fixed")
    Y = check_points(Y, "moving")
    N, D = X.shape
    if Y.shape[1] != D:
        raise InvalidInput(f"dimension mismatch: fixed D={D}, moving D={Y.shape[1]}")
    if N < D or Y.shape[0] < D:
        raise InvalidInput("ICP needs at least D points in each set")

    params = RigidParams.identity(D)
    assign = _nearest(X, Y)
    trace: list[TraceEntry] = []
    events: list[str] = []
    converged = False
    for it in range(1, config.max_iter + 1):
        P = _matching(assign, N)
        before = _sq_error(X, params.apply(Y), P)
        try:
            new = solve_rigid(X, Y, Responsibilities(P, np.zeros(N)), None, config.estimate_scale)
        except DegenerateGeometryError as exc:
            events.append(f"iteration {it}: {exc}")
            break
        TY = new.apply(Y)
        after = _sq_error(X, TY, P)
        params = new
        trace.append(TraceEntry(before, after, None, after / Y.shape[0]))
        new_assign = _nearest(X, TY)
        if np.array_equal(new_assign, assign):
            converged = True
            break
        assign = new_assign

    claimed = np.bincount(assign, minlength=N)
    if np.any(claimed > 1):
        events.append(
            f"non-injective final matching: {int(np.sum(claimed > 1))} fixed points claimed more than once"
        )
    return RegistrationResult(
        params=params,
        resp=_report_view(_matching(assign, N)),
        iterations=len(trace),
        converged=converged,
        objective_trace=trace,
        degenerate_events=events,
    )
