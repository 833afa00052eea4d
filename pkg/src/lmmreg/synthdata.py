"""Synthetic 2-D registration scenes with ground truth."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import AffineParams, Params, RigidParams, check_points, rotation_2d
from .errors import InvalidInput

SHAPES = ("ellipse", "star", "spiral", "fish")

# closed outline: nose at +x, forked tail at -x, belly flatter than back
_FISH = np.array([
    [1.0, 0.0], [0.6, 0.3], [0.1, 0.42], [-0.4, 0.25], [-0.65, 0.05], [-1.0, 0.4],
    [-0.88, 0.0], [-1.0, -0.35], [-0.65, -0.05], [-0.4, -0.22], [0.1, -0.33], [0.6, -0.26],
])


def _polyline(vertices: np.ndarray, t: np.ndarray) -> np.ndarray:
    closed = np.vstack([vertices, vertices[:1]])
    cum = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(closed, axis=0), axis=1))])
    s = (t / (2 * np.pi)) % 1.0 * cum[-1]
    return np.column_stack([np.interp(s, cum, closed[:, 0]), np.interp(s, cum, closed[:, 1])])


def _curve(kind: str, t: np.ndarray) -> np.ndarray:
    if kind == "ellipse":
        # slightly egg-shaped so that a half turn is not a symmetry
        r = 1.0 + 0.15 * np.cos(t)
        return np.column_stack([r * np.cos(t), 0.6 * r * np.sin(t)])
    if kind == "star":
        r = 1.0 + 0.35 * np.cos(5 * t) + 0.1 * np.sin(2 * t)
        return np.column_stack([r * np.cos(t), r * np.sin(t)])
    if kind == "fish":
        return _polyline(_FISH, t)
    if kind == "spiral":
        u = t / (2 * np.pi)
        r = 0.2 + 0.8 * u
        ang = 3 * np.pi * u
        return np.column_stack([r * np.cos(ang), r * np.sin(ang)])
    raise InvalidInput(f"unknown shape {kind!r}")


def normalize_box(points: np.ndarray) -> np.ndarray:
    """Center the bounding box and scale uniformly into ``[-1, 1]^D``."""
    lo, hi = points.min(axis=0), points.max(axis=0)
    half = float(np.max(hi - lo)) / 2.0
    if half == 0.0:
        raise InvalidInput("shape has zero extent")
    return np.clip((points - (lo + hi) / 2.0) / half, -1.0, 1.0)


def load_points(path) -> np.ndarray:
    """Read a headerless point CSV: one point per row, comma or whitespace separated."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such point file: {path}")
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([float(v) for v in line.replace(",", " ").split()])
        except ValueError:
            raise InvalidInput(f"{path}:{lineno}: non-numeric value") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidInput(f"{path}: empty file or ragged rows")
    return check_points(np.array(rows), str(path))


def make_shape(kind: str, n: int, seed: int = 0) -> np.ndarray:
    """``n`` points on a parametric curve (or read from a CSV path), normalized into [-1, 1]^2.

    Curve parameters are evenly spaced with seeded jitter, so the output is
    a deterministic function of ``(kind, n, seed)``.
    """
    if kind not in SHAPES:
        points = load_points(kind)
        if points.shape[0] < 4:
            raise InvalidInput("need at least 4 points")
        return normalize_box(points)
    if n < 4:
        raise InvalidInput("need at least 4 points")
    rng = np.random.default_rng(seed)
    t = (np.arange(n) + rng.uniform(-0.3, 0.3, n)) * (2 * np.pi / n)
    return normalize_box(_curve(kind, t))


@dataclass(frozen=True)
class Scene:
    """A fixed/moving pair with ground truth.

    ``truth_correspondence[m]`` is the fixed index matching moving point
    ``m`` or ``-1``. ``clean_fixed`` holds the fixed points before noise
    (outliers included unchanged).
    """

    fixed: np.ndarray
    moving: np.ndarray
    truth_params: Params
    truth_correspondence: np.ndarray
    fixed_outlier_flags: np.ndarray
    clean_fixed: np.ndarray

    def content_hash(self) -> str:
        h = hashlib.sha256()
        for arr in (self.fixed, self.moving, self.truth_params.matrix(), self.truth_params.d,
                    self.truth_correspondence, self.fixed_outlier_flags):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]


def random_affine(rng, rot_range, scale_range, max_condition=5.0) -> np.ndarray:
    """``rotation(alpha) @ stretch`` with a symmetric positive stretch of bounded condition number."""
    lo, hi = scale_range
    for _ in range(1000):
        sig = rng.uniform(lo, hi, 2)
        if sig.max() / sig.min() <= max_condition:
            break
    else:
        raise InvalidInput("scale_range cannot satisfy the condition bound")
    alpha = rng.uniform(-rot_range, rot_range)
    beta = rng.uniform(-np.pi, np.pi)
    Rb = rotation_2d(beta)
    return rotation_2d(alpha) @ Rb @ np.diag(sig) @ Rb.T


def make_scene(
    shape: np.ndarray,
    transform_kind: str = "rigid",
    rot_range: float = np.pi / 4,
    scale_range: tuple[float, float] = (1.0, 1.0),
    noise_std: float = 0.0,
    noise_count: int | None = None,
    outlier_count: int = 0,
    seed: int = 0,
    noise_seed: int | None = None,
    noise_kind: str = "gaussian",
) -> Scene:
    """Build a scene whose fixed set is ``shape`` (plus noise and outliers).

    The moving set is the inverse ground-truth transform applied to the clean
    shape. ``seed`` draws the transform; noise and outliers come from
    ``noise_seed`` when given (otherwise from the same stream), so one
    transform can be paired with several noise draws.
    """
    shape = check_points(shape, "shape")
    N, D = shape.shape
    if D != 2:
        raise InvalidInput("scene generation is 2-D only")
    noise_count = N if noise_count is None else noise_count
    if not 0 <= noise_count <= N or outlier_count < 0 or noise_std < 0:
        raise InvalidInput("inconsistent noise/outlier counts")
    if scale_range[0] <= 0 or scale_range[0] > scale_range[1] or rot_range < 0:
        raise InvalidInput("invalid rotation or scale range")
    if noise_kind not in ("gaussian", "laplacian"):
        raise InvalidInput(f"unknown noise kind {noise_kind!r}")

    rng = np.random.default_rng(seed)
    if transform_kind == "rigid":
        truth: Params = RigidParams(
            float(rng.uniform(*scale_range)),
            rotation_2d(rng.uniform(-rot_range, rot_range)),
            rng.uniform(-0.5, 0.5, D),
        )
    elif transform_kind == "affine":
        B = random_affine(rng, rot_range, scale_range)
        truth = AffineParams(B, rng.uniform(-0.5, 0.5, D))
    else:
        raise InvalidInput(f"unknown transform kind {transform_kind!r}")
    moving = truth.inverse().apply(shape)

    nrng = rng if noise_seed is None else np.random.default_rng(noise_seed)
    fixed = shape.copy()
    idx = nrng.choice(N, size=noise_count, replace=False)
    if noise_kind == "gaussian":
        noise = nrng.normal(0.0, noise_std, (noise_count, D))
    else:
        noise = nrng.laplace(0.0, noise_std / np.sqrt(2.0), (noise_count, D))
    fixed[idx] += noise

    lo, hi = shape.min(axis=0), shape.max(axis=0)
    mid, half = (lo + hi) / 2.0, 1.5 * (hi - lo) / 2.0
    outliers = nrng.uniform(mid - half, mid + half, (outlier_count, D))
    fixed = np.vstack([fixed, outliers])
    clean = np.vstack([shape, outliers])
    flags = np.concatenate([np.zeros(N, bool), np.ones(outlier_count, bool)])
    return Scene(fixed, moving, truth, np.arange(N), flags, clean)
