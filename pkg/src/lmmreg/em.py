"""EM registration driver.

Each sweep runs: posterior -> dimension weights -> closed-form M-step ->
scale update, and stops when the relative change of the mixture negative
log-likelihood drops below ``config.tol`` or the transformed moving set
stops moving (at a tiny scale the NLL can flip between two values at
rounding level forever).
"""

from __future__ import annotations

import logging
from dataclasses import replace

import numpy as np

from . import estep
from .affine import solve_affine
from .core import (
    AffineParams,
    Params,
    RegConfig,
    RegistrationResult,
    Responsibilities,
    RigidParams,
    TraceEntry,
    bbox_volume,
    check_points,
    planar_rotation,
    weighted_centroids,
)
from .errors import DegenerateGeometryError, InvalidInput, SingularGeometryError, ZeroMassError
from .rigid import solve_rigid, solve_scale_translation

log = logging.getLogger(__name__)

negative_log_likelihood = estep.negative_log_likelihood


def surrogate_objective(X, Y, resp: Responsibilities, omega, params: Params, b: float) -> float:
    """``(1/b) sum_{m,n} P[m,n] sum_i omega_i (x_{n,i} - T(y_m)_i)**2``."""
    TY = params.apply(Y)
    total = 0.0
    for i, w_i in enumerate(np.asarray(omega, dtype=float)):
        diff = X[None, :, i] - TY[:, i, None]
        total += w_i * float(np.sum(resp.P * diff * diff))
    return total / b


def _translation_only(X, Y, resp, params: Params) -> Params:
    mu_x, mu_y, _ = weighted_centroids(X, Y, resp)
    if isinstance(params, RigidParams):
        return RigidParams(params.s, params.R, mu_x - params.s * params.R @ mu_y)
    return AffineParams(params.B, mu_x - params.B @ mu_y)


def _keep_linear_part(X, Y, resp, omega, params, estimate_scale):
    """Best translation (and scale) with the current rotation / linear map held fixed."""
    if isinstance(params, RigidParams):
        try:
            return solve_scale_translation(X, Y, resp, params.R, omega, estimate_scale)
        except DegenerateGeometryError:
            pass
    return _translation_only(X, Y, resp, params)


def _m_step(X, Y, resp, omega, params, scale, config, events, it):
    q_before = surrogate_objective(X, Y, resp, omega, params, scale)
    try:
        if config.transform == "rigid":
            new = solve_rigid(X, Y, resp, omega, config.estimate_scale)
        else:
            new = solve_affine(X, Y, resp)
    except (DegenerateGeometryError, SingularGeometryError) as exc:
        events.append(f"iteration {it}: {exc}; keeping previous linear part")
        new = _keep_linear_part(X, Y, resp, omega, params, config.estimate_scale)
    q_after = surrogate_objective(X, Y, resp, omega, new, scale)
    if q_after > q_before:
        # the ridge (affine) or rounding near an exact fit can lose exact minimality
        alt = _keep_linear_part(X, Y, resp, omega, params, config.estimate_scale)
        q_alt = surrogate_objective(X, Y, resp, omega, alt, scale)
        new, q_after = min((new, q_after), (alt, q_alt), (params, q_before), key=lambda c: c[1])
    return new, q_before, q_after


def _log_kernel(X, TY, scale, config):
    if config.kernel == "laplacian":
        return estep.laplacian_log_kernel(X, TY, scale, config.legacy_half_exponent)
    return estep.gaussian_log_kernel(X, TY, scale)


def _run(X, Y, config: RegConfig, params: Params) -> RegistrationResult:
    D = X.shape[1]
    volume = bbox_volume(X)
    laplacian = config.kernel == "laplacian"
    TY = params.apply(Y)
    if laplacian:
        scale = estep.initial_laplacian_scale(X, TY)
    else:
        scale = estep.initial_gaussian_variance(X, TY)
    scale = max(scale, config.min_scale)
    # the kernel at (TY, scale) yields both the NLL and the next posterior
    resp, initial_nll = estep.posterior_and_nll(_log_kernel(X, TY, scale, config), config.w, volume)
    prev_nll = initial_nll
    trace: list[TraceEntry] = []
    events: list[str] = []
    converged = False
    # transform counts as stationary once the moved centroids shift less than this
    still = 1e-12 * max(1.0, float(np.ptp(X, axis=0).max()))

    for it in range(1, config.max_iter + 1):
        prev_TY = TY
        if resp.degenerate_columns:
            events.append(f"iteration {it}: {resp.degenerate_columns} columns with no kernel mass")
        try:
            omega = estep.update_dim_weights(X, TY, resp, config.irls_epsilon) if laplacian else np.ones(D)
            params, q_before, q_after = _m_step(X, Y, resp, omega, params, scale, config, events, it)
            TY = params.apply(Y)
            if laplacian:
                scale = estep.update_laplacian_scale(X, TY, resp, config.min_scale)
            else:
                scale = estep.update_gaussian_variance(X, TY, resp, config.min_scale)
        except ZeroMassError as exc:
            events.append(f"iteration {it}: {exc}")
            break
        resp, nll = estep.posterior_and_nll(_log_kernel(X, TY, scale, config), config.w, volume)
        trace.append(TraceEntry(q_before, q_after, nll, scale))
        if abs(nll - prev_nll) <= config.tol * max(abs(prev_nll), 1e-300) or np.abs(TY - prev_TY).max() <= still:
            converged = True
            break
        prev_nll = nll

    return RegistrationResult(
        params=params,
        resp=resp,
        iterations=len(trace),
        converged=converged,
        objective_trace=trace,
        initial_nll=initial_nll,
        degenerate_events=events,
    )


def _initial_params(X, Y, transform, k, n_starts) -> Params:
    D = X.shape[1]
    # centroid-aligned starts keep the whole run equivariant under translations of X
    R = planar_rotation(2.0 * np.pi * k / n_starts, D) if k else np.eye(D)
    d = X.mean(axis=0) - R @ Y.mean(axis=0)
    if transform == "rigid":
        return RigidParams(1.0, R, d)
    return AffineParams(R, d)


def register(X, Y, config: RegConfig | None = None) -> RegistrationResult:
    """Register moving set ``Y`` (mixture centroids) onto fixed set ``X``.

    The first start is a pure translation aligning the centroids of ``Y``
    and ``X``. With ``config.n_starts > 1`` further starts also rotate ``Y``
    about its centroid by evenly spaced angles in the plane of the first
    two axes. The run with the lowest final negative
    log-likelihood wins; the search stops early once a start fits the data
    exactly (vanishing scale). Deterministic for identical inputs.
    """
    config = config or RegConfig()
    X = check_points(X, "fixed")
    Y = check_points(Y, "moving")
    if X.shape[1] != Y.shape[1]:
        raise InvalidInput(f"dimension mismatch: fixed D={X.shape[1]}, moving D={Y.shape[1]}")

    # a start whose scale falls below this has fitted every data point exactly
    exact = max(config.min_scale, 1e-8 * float(np.ptp(X, axis=0).max()))
    if config.kernel == "gaussian":
        exact = max(config.min_scale, exact**2)
    best = None
    for k in range(config.n_starts):
        result = _run(X, Y, config, _initial_params(X, Y, config.transform, k, config.n_starts))
        log.debug("start %d: %d iterations, nll %s", k, result.iterations, result.final_nll)
        if best is None or result.final_nll < best.final_nll:
            best = replace(result, start_index=k)
        if best.converged and best.objective_trace and best.objective_trace[-1].scale <= exact:
            break
    return best
