"""Posterior responsibilities, mixture-scale updates and IRLS dimension weights."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .core import ZERO_MASS, Responsibilities
from .errors import ZeroMassError


def _log_masses(log_kernel, w):
    """Log of prior times density for every centroid, ``(M, N)``."""
    M = log_kernel.shape[0]
    if w > 0.0:
        log_u = np.log1p(-w) - np.log(M) + log_kernel
    else:
        log_u = log_kernel - np.log(M)
    return log_u


def posterior_and_nll(log_kernel, w, volume):
    """Column-normalized posteriors and the mixture NLL from one ``(M, N)`` log-kernel matrix."""
    log_u = _log_masses(log_kernel, w)
    log_o = _outlier_log_mass(w, volume)
    M, N = log_u.shape
    stacked = np.vstack([log_u, np.full((1, N), log_o)])
    mx = stacked.max(axis=0)
    degenerate = ~np.isfinite(mx)
    # normalize the shifted exponentials directly so columns sum to one at rounding level
    shifted = np.exp(stacked - np.where(degenerate, 0.0, mx))
    total = shifted.sum(axis=0)
    shifted /= np.where(degenerate, 1.0, total)
    P, outlier = shifted[:M], shifted[M].copy()
    if np.any(degenerate):
        P[:, degenerate] = 1.0 / M
        outlier[degenerate] = 0.0
    with np.errstate(divide="ignore"):
        lse = np.log(total) + mx
    return Responsibilities(P, outlier, int(degenerate.sum())), float(-lse.sum())


def laplacian_log_kernel(X, TY, b, half_exponent=False):
    """Log of the product Laplacian density with coordinate-wise L1 distance."""
    D = X.shape[1]
    l1 = cdist(TY, X, "cityblock")
    factor = 0.5 if half_exponent else 1.0
    return -D * np.log(2.0 * b) - factor * l1 / b


def gaussian_log_kernel(X, TY, sigma2):
    D = X.shape[1]
    sq = cdist(TY, X, "sqeuclidean")
    return -0.5 * D * np.log(2.0 * np.pi * sigma2) - sq / (2.0 * sigma2)


def _outlier_log_mass(w, volume):
    return np.log(w) - np.log(volume) if w > 0.0 else -np.inf


def laplacian_posterior(X, TY, b, w=0.0, volume=1.0, half_exponent=False) -> Responsibilities:
    """Posterior of each centroid (and the uniform outlier component) per data point.

    Centroids carry prior ``(1 - w) / M`` and a product Laplacian density of
    scale ``b``; the outlier component carries prior ``w`` and density
    ``1 / volume``. Evaluated in log space, so arbitrarily large
    distance-to-scale ratios are safe.
    """
    return posterior_and_nll(laplacian_log_kernel(X, TY, b, half_exponent), w, volume)[0]


def gaussian_posterior(X, TY, sigma2, w=0.0, volume=1.0) -> Responsibilities:
    """Same as :func:`laplacian_posterior` with an isotropic Gaussian kernel of variance ``sigma2``."""
    return posterior_and_nll(gaussian_log_kernel(X, TY, sigma2), w, volume)[0]


def negative_log_likelihood(X, TY, scale, w=0.0, volume=1.0, kernel="laplacian", half_exponent=False) -> float:
    """``-sum_n log p(x_n)`` under the mixture including the outlier component."""
    if kernel == "laplacian":
        log_k = laplacian_log_kernel(X, TY, scale, half_exponent)
    else:
        log_k = gaussian_log_kernel(X, TY, scale)
    return posterior_and_nll(log_k, w, volume)[1]


def _weighted_abs_residuals(X, TY, P):
    """``sum_{m,n} P[m,n] |x_{n,i} - TY_{m,i}|`` for every dimension ``i``."""
    D = X.shape[1]
    out = np.empty(D)
    for i in range(D):
        out[i] = np.sum(P * np.abs(TY[:, i, None] - X[None, :, i]))
    return out


def update_laplacian_scale(X, TY, resp: Responsibilities, min_scale=1e-12) -> float:
    """Weighted maximum-likelihood Laplacian scale, floored at ``min_scale``."""
    n_prime = _mass(resp)
    D = X.shape[1]
    total = float(np.sum(resp.P * cdist(TY, X, "cityblock")))
    return max(min_scale, total / (n_prime * D))


def update_gaussian_variance(X, TY, resp: Responsibilities, min_scale=1e-12) -> float:
    n_prime = _mass(resp)
    D = X.shape[1]
    total = float(np.sum(resp.P * cdist(TY, X, "sqeuclidean")))
    return max(min_scale, total / (n_prime * D))


def update_dim_weights(X, TY, resp: Responsibilities, epsilon=1e-6) -> np.ndarray:
    """IRLS weights ``1 / (mean |residual_i| + epsilon)`` per dimension.

    At the current residuals ``omega_i * r_i**2`` matches ``|r_i|``, which
    makes the weighted quadratic a local stand-in for the L1 loss.
    """
    n_prime = _mass(resp)
    rbar = _weighted_abs_residuals(X, TY, resp.P) / n_prime
    return 1.0 / (rbar + epsilon)


def _mass(resp):
    n_prime = resp.n_prime
    if not n_prime > ZERO_MASS:
        raise ZeroMassError("all posterior mass is on the outlier component")
    return n_prime


def initial_laplacian_scale(X, Y) -> float:
    M, D = Y.shape
    return float(cdist(Y, X, "cityblock").sum() / (D * M * X.shape[0]))


def initial_gaussian_variance(X, Y) -> float:
    M, D = Y.shape
    return float(cdist(Y, X, "sqeuclidean").sum() / (D * M * X.shape[0]))
