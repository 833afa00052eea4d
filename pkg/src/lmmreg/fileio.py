"""Result JSON and sweep CSV formats."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import RegConfig, RegistrationResult
from .errors import InvalidInput

FORMAT_VERSION = "lmmreg-result/1"


def result_document(result: RegistrationResult, config: RegConfig, **extra) -> dict:
    outlier_like = int(np.sum(result.resp.outlier > 0.5))
    doc = {
        "format_version": FORMAT_VERSION,
        "config": config.to_dict(),
        "params": result.params.to_dict(),
        "iterations": result.iterations,
        "converged": result.converged,
        "initial_nll": result.initial_nll,
        "final_nll": result.final_nll,
        "start_index": result.start_index,
        "outlier_classified": outlier_like,
        "degenerate_events": list(result.degenerate_events),
        "trace": [e.to_dict() for e in result.objective_trace],
    }
    doc.update(extra)
    return doc


def dumps(doc: dict) -> str:
    """Canonical JSON: sorted keys, two-space indent, shortest round-trip floats."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc))


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def write_points(points, path) -> None:
    np.savetxt(path, np.asarray(points), delimiter=",", fmt="%.17g")


def write_sweep_csv(rows: list[dict], path, columns) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (str(v).lower() if isinstance(v, bool) else v) for k, v in row.items()})


def read_sweep_csv(path, required=()) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise InvalidInput(f"{path}: missing columns {missing}")
        rows = list(reader)
    if not rows:
        raise InvalidInput(f"{path}: no data rows")
    return rows
