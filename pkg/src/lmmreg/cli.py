"""Command-line interface: ``lmmreg {register,demo,sweep,plot}``.

Exit codes: 0 success, 1 bad input, 2 registration did not converge (the
result file is still written).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments, fileio, plotting
from .baselines import register_cpd, register_icp
from .core import RegConfig, RigidParams
from .em import register
from .errors import InvalidInput, RegistrationError
from .metrics import affine_param_error, alignment_mse, correspondence_accuracy, rigid_param_error
from .synthdata import load_points, make_scene, make_shape

log = logging.getLogger("lmmreg")

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED = 0, 1, 2


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _methods(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _add_solver_flags(p):
    p.add_argument("--method", choices=experiments.METHODS, default="lmm")
    p.add_argument("--transform", choices=("rigid", "affine"), default="rigid")
    p.add_argument("--w", type=float, default=0.1, help="outlier weight in [0, 1)")
    p.add_argument("--max-iter", type=int, default=150)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--starts", type=int, default=1, help="initial rotations to try")
    p.add_argument("--fixed-scale", action="store_true", help="freeze the similarity scale at 1")
    p.add_argument("--legacy-half-exponent", action="store_true")


def _config(args) -> RegConfig:
    return RegConfig(
        kernel="gaussian" if args.method == "cpd" else "laplacian",
        transform=args.transform,
        w=args.w,
        max_iter=args.max_iter,
        tol=args.tol,
        n_starts=args.starts,
        estimate_scale=not args.fixed_scale,
        legacy_half_exponent=args.legacy_half_exponent,
    )


def _solve(method, X, Y, config):
    if method == "icp":
        if config.transform != "rigid":
            raise InvalidInput("ICP supports rigid transforms only")
        return register_icp(X, Y, config)
    return (register_cpd if method == "cpd" else register)(X, Y, config)


def _finish(result, config, out, svg, X, Y, **extra):
    fileio.write_json(fileio.result_document(result, config, **extra), out)
    if svg:
        plotting.plot_overlay(X, result.params.apply(Y), result.resp.outlier > 0.5, svg)
    if not result.converged:
        print(f"warning: no convergence after {result.iterations} iterations", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_register(args) -> int:
    config = _config(args)
    X, Y = load_points(args.fixed), load_points(args.moving)
    if X.shape[1] != Y.shape[1]:
        raise InvalidInput(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    result = _solve(args.method, X, Y, config)
    return _finish(result, config, args.out, args.svg, X, Y, method=args.method)


def cmd_demo(args) -> int:
    config = _config(args)
    shape = make_shape(args.shape, args.n, seed=args.seed)
    scene = make_scene(
        shape, args.transform, args.rot_range, tuple(args.scale_range), args.noise_std,
        outlier_count=args.outliers, seed=args.seed, noise_kind=args.noise_kind,
    )
    result = _solve(args.method, scene.fixed, scene.moving, config)
    if isinstance(scene.truth_params, RigidParams):
        angle, log_scale, trans = rigid_param_error(result.params, scene.truth_params)
        errors = {"angle_error": angle, "scale_log_error": log_scale, "translation_error": trans}
    else:
        rel, trans = affine_param_error(result.params, scene.truth_params)
        errors = {"matrix_rel_error": rel, "translation_error": trans}
    errors["mse"] = alignment_mse(result.params, scene)
    errors["accuracy"] = correspondence_accuracy(result.resp, scene)
    if args.save_points:
        base = Path(args.save_points)
        fileio.write_points(scene.fixed, base.with_name(base.name + "_fixed.csv"))
        fileio.write_points(scene.moving, base.with_name(base.name + "_moving.csv"))
    return _finish(
        result, config, args.out, args.svg, scene.fixed, scene.moving,
        method=args.method, truth=scene.truth_params.to_dict(), errors=errors,
    )


def cmd_sweep(args) -> int:
    config = _config(args)
    spec = experiments.SweepSpec(
        shape=args.shape,
        n=args.n,
        methods=args.methods,
        noise_std=args.noise_std,
        noise_count=args.noise_count,
        outliers=args.outliers,
        rotations=args.rotations,
        seeds=args.seeds,
        transform=args.transform,
        rot_range=args.rot_range,
        scale_range=tuple(args.scale_range),
        noise_kind=args.noise_kind,
        base_seed=args.seed,
        config=config,
    )
    rows = experiments.run_sweep(spec, jobs=args.jobs)
    fileio.write_sweep_csv(rows, args.out, experiments.COLUMNS)
    if args.figures:
        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        for x_axis in ("noise_std", "noise_count", "outliers"):
            if len({r[x_axis] for r in rows}) < 2:
                continue
            for metric in ("accuracy", "mse", "iterations"):
                summary = experiments.summarize(rows, metric, x_axis)
                plotting.plot_sweep(summary, metric, x_axis, fig_dir / f"{metric}_vs_{x_axis}.svg")
    return EXIT_OK


def cmd_plot(args) -> int:
    rows = fileio.read_sweep_csv(args.csv, required=("method", args.metric, args.x_axis))
    try:
        summary = experiments.summarize(rows, args.metric, args.x_axis)
    except ValueError as exc:
        raise InvalidInput(f"non-numeric values in {args.csv}: {exc}") from None
    plotting.plot_sweep(summary, args.metric, args.x_axis, args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors share exit code 1 with other bad input; 2 means non-convergence
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lmmreg", description="Laplacian-mixture point-set registration")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("register", help="register a moving point CSV onto a fixed point CSV")
    p.add_argument("fixed")
    p.add_argument("moving")
    p.add_argument("--out", required=True, help="result JSON path")
    p.add_argument("--svg", help="optional overlay figure")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_register)

    def scene_flags(p, n_default):
        p.add_argument("--shape", default="fish", help="ellipse, star, spiral, fish or a CSV path")
        p.add_argument("--n", type=int, default=n_default)
        p.add_argument("--rot-range", type=float, default=np.pi / 4, help="radians")
        p.add_argument("--scale-range", type=float, nargs=2, default=(1.0, 1.0))
        p.add_argument("--noise-kind", choices=("gaussian", "laplacian"), default="gaussian")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("demo", help="register a synthetic scene and report errors against truth")
    scene_flags(p, 100)
    p.add_argument("--noise-std", type=float, default=0.0)
    p.add_argument("--outliers", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--save-points", help="prefix for writing the scene's fixed/moving CSVs")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("sweep", help="noise/outlier sweep, one CSV row per run")
    scene_flags(p, 100)
    p.add_argument("--methods", type=_methods, default=("lmm", "cpd"))
    p.add_argument("--noise-std", type=_floats, default=(0.02, 0.05, 0.1))
    p.add_argument("--noise-count", type=_ints, default=None, help="default: every point")
    p.add_argument("--outliers", type=_ints, default=(0,))
    p.add_argument("--rotations", type=int, default=8)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--figures", help="directory for summary figures")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="line chart of a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--metric", choices=("accuracy", "mse", "iterations"), default="accuracy")
    p.add_argument("--x-axis", choices=("noise_std", "noise_count", "outliers"), default="noise_std")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("LMMREG_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInput, FileNotFoundError, RegistrationError, OSError) as exc:
        print(f"lmmreg {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
