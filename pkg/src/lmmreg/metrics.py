"""Scoring registrations against scene ground truth."""

from __future__ import annotations

import numpy as np

from .core import AffineParams, Params, Responsibilities, RigidParams
from .errors import EmptyTruth
from .synthdata import Scene


def _matched(scene: Scene) -> np.ndarray:
    idx = np.flatnonzero(scene.truth_correspondence >= 0)
    if idx.size == 0:
        raise EmptyTruth("no moving point has a ground-truth counterpart")
    return idx


def correspondence_accuracy(resp: Responsibilities, scene: Scene) -> float:
    """Fraction of matched moving points whose most probable fixed point is the true one.

    Posterior columns are restricted to non-outlier fixed points and
    renormalized before taking the argmax over each row; ties go to the
    lowest index.
    """
    rows = _matched(scene)
    keep = np.flatnonzero(~scene.fixed_outlier_flags)
    P = resp.P[:, keep]
    col = P.sum(axis=0)
    P = np.divide(P, col, out=np.zeros_like(P), where=col > 0)
    best = keep[np.argmax(P[rows], axis=1)]
    return float(np.mean(best == scene.truth_correspondence[rows]))


def alignment_mse(params: Params, scene: Scene) -> float:
    """Mean squared distance from each transformed moving point to its clean counterpart."""
    rows = _matched(scene)
    moved = params.apply(scene.moving[rows])
    target = scene.clean_fixed[scene.truth_correspondence[rows]]
    return float(np.mean(np.sum((moved - target) ** 2, axis=1)))


def rotation_angle(R: np.ndarray) -> float:
    """Geodesic angle of a rotation matrix, in radians."""
    if R.shape == (2, 2):
        return float(abs(np.arctan2(R[1, 0], R[0, 0])))
    return float(np.arccos(np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)))


def rigid_param_error(found: RigidParams, truth: RigidParams):
    """``(angle_error, |log(s / s0)|, ||d - d0||)``."""
    angle = rotation_angle(found.R @ truth.R.T)
    return angle, float(abs(np.log(found.s / truth.s))), float(np.linalg.norm(found.d - truth.d))


def affine_param_error(found: AffineParams, truth: AffineParams):
    """``(||B - B0||_F / ||B0||_F, ||d - d0||)``."""
    rel = np.linalg.norm(found.B - truth.B) / np.linalg.norm(truth.B)
    return float(rel), float(np.linalg.norm(found.d - truth.d))
