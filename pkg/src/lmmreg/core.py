"""Shared types and helpers.

Point sets are plain ``(N, D)`` float arrays. Responsibilities are stored
as an ``(M, N)`` matrix: rows index the moving centroids, columns the
fixed data points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np

from .errors import InvalidInput, ZeroMassError

ZERO_MASS = 1e-300


def check_points(points, name: str = "points") -> np.ndarray:
    """Validate and return ``points`` as a float ``(N, D)`` array with D in {2, 3}."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2:
        raise InvalidInput(f"{name} must be a 2-D array, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise InvalidInput(f"{name} is empty")
    if arr.shape[1] not in (2, 3):
        raise InvalidInput(f"{name} must have 2 or 3 columns, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains non-finite coordinates")
    return arr


def rotation_2d(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def planar_rotation(angle: float, dim: int) -> np.ndarray:
    """Rotation by ``angle`` in the plane of the first two axes."""
    R = np.eye(dim)
    R[:2, :2] = rotation_2d(angle)
    return R


@dataclass(frozen=True)
class RigidParams:
    """Similarity transform ``y -> s R y + d``."""

    s: float
    R: np.ndarray
    d: np.ndarray

    @classmethod
    def identity(cls, dim: int) -> "RigidParams":
        return cls(1.0, np.eye(dim), np.zeros(dim))

    def apply(self, Y: np.ndarray) -> np.ndarray:
        return self.s * Y @ self.R.T + self.d

    def inverse(self) -> "RigidParams":
        Rt = self.R.T
        return RigidParams(1.0 / self.s, Rt, -(Rt @ self.d) / self.s)

    def matrix(self) -> np.ndarray:
        return self.s * self.R

    def to_dict(self) -> dict:
        return {"kind": "rigid", "s": float(self.s), "R": self.R.tolist(), "d": self.d.tolist()}


@dataclass(frozen=True)
class AffineParams:
    """Affine transform ``y -> B y + d``."""

    B: np.ndarray
    d: np.ndarray

    @classmethod
    def identity(cls, dim: int) -> "AffineParams":
        return cls(np.eye(dim), np.zeros(dim))

    def apply(self, Y: np.ndarray) -> np.ndarray:
        return Y @ self.B.T + self.d

    def inverse(self) -> "AffineParams":
        Binv = np.linalg.inv(self.B)
        return AffineParams(Binv, -Binv @ self.d)

    def matrix(self) -> np.ndarray:
        return self.B

    def to_dict(self) -> dict:
        return {"kind": "affine", "B": self.B.tolist(), "d": self.d.tolist()}


Params = Union[RigidParams, AffineParams]


@dataclass(frozen=True)
class Responsibilities:
    """Posterior responsibilities.

    ``P[m, n]`` is the posterior of centroid ``m`` for data point ``n``;
    ``outlier[n]`` is the mass on the uniform outlier component, so each
    column of ``P`` plus ``outlier`` sums to one.
    """

    P: np.ndarray
    outlier: np.ndarray
    degenerate_columns: int = 0

    @property
    def n_prime(self) -> float:
        return float(self.P.sum())

    def column_error(self) -> float:
        """Largest deviation of a column sum from one."""
        return float(np.max(np.abs(self.P.sum(axis=0) + self.outlier - 1.0)))


@dataclass(frozen=True)
class RegConfig:
    kernel: Literal["laplacian", "gaussian"] = "laplacian"
    transform: Literal["rigid", "affine"] = "rigid"
    w: float = 0.1
    max_iter: int = 150
    tol: float = 1e-8
    irls_epsilon: float = 1e-6
    min_scale: float = 1e-12
    estimate_scale: bool = True
    legacy_half_exponent: bool = False
    # >1 runs EM from evenly spaced initial rotations and keeps the lowest NLL
    n_starts: int = 1

    def __post_init__(self):
        if self.kernel not in ("laplacian", "gaussian"):
            raise InvalidInput(f"unknown kernel {self.kernel!r}")
        if self.transform not in ("rigid", "affine"):
            raise InvalidInput(f"unknown transform {self.transform!r}")
        if not 0.0 <= self.w < 1.0:
            raise InvalidInput("outlier weight w must lie in [0, 1)")
        if self.max_iter < 1 or self.n_starts < 1:
            raise InvalidInput("max_iter and n_starts must be positive")
        if not (self.tol > 0 and self.irls_epsilon > 0 and self.min_scale > 0):
            raise InvalidInput("tol, irls_epsilon and min_scale must be positive")

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "transform": self.transform,
            "w": self.w,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "irls_epsilon": self.irls_epsilon,
            "min_scale": self.min_scale,
            "estimate_scale": self.estimate_scale,
            "legacy_half_exponent": self.legacy_half_exponent,
            "n_starts": self.n_starts,
        }


@dataclass(frozen=True)
class TraceEntry:
    """One EM sweep.

    ``surrogate_before``/``surrogate`` bracket the M-step with the posterior,
    dimension weights and scale held fixed. ``nll`` is ``None`` for ICP.
    """

    surrogate_before: float
    surrogate: float
    nll: float | None
    scale: float

    def to_dict(self) -> dict:
        return {
            "surrogate_before": self.surrogate_before,
            "surrogate": self.surrogate,
            "nll": self.nll,
            "scale": self.scale,
        }


@dataclass(frozen=True)
class RegistrationResult:
    params: Params
    resp: Responsibilities
    iterations: int
    converged: bool
    objective_trace: list[TraceEntry]
    initial_nll: float | None = None
    degenerate_events: list[str] = field(default_factory=list)
    start_index: int = 0

    @property
    def final_nll(self) -> float | None:
        if not self.objective_trace:
            return self.initial_nll
        return self.objective_trace[-1].nll


def weighted_centroids(X, Y, resp: Responsibilities):
    """Posterior-weighted means of both sets.

    Returns ``(mu_x, mu_y, n_prime)`` where ``n_prime`` is the total
    non-outlier posterior mass.
    """
    P = resp.P
    n_prime = float(P.sum())
    if not n_prime > ZERO_MASS:
        raise ZeroMassError("all posterior mass is on the outlier component")
    mu_x = X.T @ P.sum(axis=0) / n_prime
    mu_y = Y.T @ P.sum(axis=1) / n_prime
    return mu_x, mu_y, n_prime


def center(X, mu) -> np.ndarray:
    return np.asarray(X, dtype=float) - np.asarray(mu, dtype=float)


def bbox_volume(X: np.ndarray) -> float:
    """Axis-aligned bounding-box volume, each extent floored at 1e-12."""
    extent = X.max(axis=0) - X.min(axis=0)
    return float(np.prod(np.maximum(extent, 1e-12)))
