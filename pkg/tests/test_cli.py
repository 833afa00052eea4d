import csv
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from conftest import rot
from lmmreg.cli import main
from lmmreg.experiments import SweepSpec, run_sweep, summarize
from lmmreg.fileio import FORMAT_VERSION, dumps
from lmmreg.synthdata import make_shape

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def pair(tmp_path):
    shape = make_shape("star", 40, seed=1)
    np.savetxt(tmp_path / "fixed.csv", shape, delimiter=",")
    np.savetxt(tmp_path / "moving.csv", shape @ rot(0.3), delimiter=" ")
    return tmp_path / "fixed.csv", tmp_path / "moving.csv"


def sweep_args(out, *extra):
    return ["sweep", "--shape", "star", "--n", "30", "--noise-std", "0.02", "--rotations", "3", "--seeds", "1",
            "--out", str(out), *extra]


def test_register_self_is_identity(tmp_path, pair):
    fixed, _ = pair
    out = tmp_path / "r.json"
    assert main(["register", str(fixed), str(fixed), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["format_version"] == FORMAT_VERSION and doc["converged"]
    np.testing.assert_allclose(doc["params"]["R"], np.eye(2), atol=1e-6)
    assert doc["params"]["s"] == pytest.approx(1.0, abs=1e-6)
    assert doc["trace"] and doc["final_nll"] == doc["trace"][-1]["nll"]


def test_register_json_round_trip_and_svg(tmp_path, pair):
    fixed, moving = pair
    out, svg = tmp_path / "r.json", tmp_path / "r.svg"
    assert main(["register", str(fixed), str(moving), "--out", str(out), "--svg", str(svg)]) == 0
    text = out.read_text()
    assert dumps(json.loads(text)) == text
    assert ET.parse(svg).getroot().tag == SVG + "svg"


@pytest.mark.parametrize("method", ["cpd", "icp"])
def test_register_baselines(tmp_path, pair, method):
    fixed, moving = pair
    out = tmp_path / "r.json"
    assert main(["register", str(fixed), str(moving), "--method", method, "--out", str(out)]) == 0
    np.testing.assert_allclose(json.loads(out.read_text())["params"]["R"], rot(0.3), atol=1e-4)


def test_register_affine(tmp_path, pair):
    fixed, moving = pair
    out = tmp_path / "r.json"
    assert main(["register", str(fixed), str(moving), "--transform", "affine", "--starts", "4",
                 "--out", str(out)]) == 0
    np.testing.assert_allclose(json.loads(out.read_text())["params"]["B"], rot(0.3), atol=1e-4)


def test_register_missing_file(tmp_path, capsys):
    assert main(["register", str(tmp_path / "nope.csv"), str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "r.json")]) == 1
    err = capsys.readouterr().err.strip()
    assert len(err.splitlines()) == 1 and "nope.csv" in err


def test_register_malformed_inputs(tmp_path, pair):
    fixed, _ = pair
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\nfoo,3\n")
    assert main(["register", str(fixed), str(bad), "--out", str(tmp_path / "r.json")]) == 1
    three = tmp_path / "three.csv"
    three.write_text("1,2,3\n4,5,6\n7,8,9\n")
    assert main(["register", str(fixed), str(three), "--out", str(tmp_path / "r.json")]) == 1
    assert main(["register", str(fixed), str(fixed), "--w", "1.5", "--out", str(tmp_path / "r.json")]) == 1
    assert main(["register", str(fixed), str(fixed), "--method", "icp", "--transform", "affine",
                 "--out", str(tmp_path / "r.json")]) == 1


def test_usage_error_exits_1():
    assert exit_code(["register"]) == 1


def test_non_convergence_exit_2(tmp_path, pair):
    fixed, moving = pair
    out = tmp_path / "r.json"
    assert main(["register", str(fixed), str(moving), "--max-iter", "1", "--out", str(out)]) == 2
    assert json.loads(out.read_text())["converged"] is False


def test_demo_zero_noise(tmp_path):
    out, svg = tmp_path / "d.json", tmp_path / "d.svg"
    prefix = tmp_path / "scene"
    assert main(["demo", "--out", str(out), "--svg", str(svg), "--save-points", str(prefix)]) == 0
    doc = json.loads(out.read_text())
    assert doc["errors"]["angle_error"] < 1e-4
    assert doc["truth"]["R"]
    assert (tmp_path / "scene_fixed.csv").exists() and (tmp_path / "scene_moving.csv").exists()
    ET.parse(svg)


def test_demo_affine_with_outliers(tmp_path):
    out = tmp_path / "d.json"
    code = main(["demo", "--transform", "affine", "--outliers", "10", "--noise-std", "0.01",
                 "--shape", "star", "--out", str(out)])
    assert code in (0, 2)
    assert "matrix_rel_error" in json.loads(out.read_text())["errors"]


def test_sweep_rows_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(sweep_args(a, "--methods", "lmm")) == 0
    assert main(sweep_args(b, "--methods", "lmm")) == 0
    rows_a = list(csv.DictReader(a.open()))
    rows_b = list(csv.DictReader(b.open()))
    assert len(rows_a) == 3
    assert list(rows_a[0]) == ["method", "noise_std", "noise_count", "outliers", "seed", "rotation_id",
                               "accuracy", "mse", "iterations", "converged", "runtime_ms"]
    for ra, rb in zip(rows_a, rows_b):
        ra.pop("runtime_ms"), rb.pop("runtime_ms")
        assert ra == rb


def test_sweep_figures(tmp_path):
    figs = tmp_path / "figs"
    assert main(sweep_args(tmp_path / "s.csv", "--methods", "lmm,cpd,icp", "--noise-std", "0.01,0.05",
                           "--figures", str(figs))) == 0
    names = sorted(p.name for p in figs.iterdir())
    assert names == ["accuracy_vs_noise_std.svg", "iterations_vs_noise_std.svg", "mse_vs_noise_std.svg"]


def exit_code(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


@pytest.mark.parametrize("extra", [["--noise-std", ""], ["--noise-count", "31"], ["--methods", "lmm,foo"],
                                   ["--outliers", "-2"], ["--rotations", "0"], ["--noise-std", "a,b"]])
def test_sweep_invalid_grids(tmp_path, extra):
    assert exit_code(sweep_args(tmp_path / "s.csv", *extra)) == 1


def test_sweep_parallel_matches_serial():
    spec = SweepSpec(shape="star", n=30, methods=("lmm", "icp"), noise_std=(0.02,), rotations=2, seeds=2)
    strip = [{k: v for k, v in r.items() if k != "runtime_ms"} for r in run_sweep(spec)]
    par = [{k: v for k, v in r.items() if k != "runtime_ms"} for r in run_sweep(spec, jobs=2)]
    assert strip == par


def test_plot_two_series(tmp_path):
    data = tmp_path / "s.csv"
    main(sweep_args(data, "--methods", "lmm,cpd", "--noise-std", "0.01,0.05"))
    out = tmp_path / "p.svg"
    assert main(["plot", str(data), "--metric", "accuracy", "--x-axis", "noise_std", "--out", str(out)]) == 0
    root = ET.parse(out).getroot()
    series = [g.get("id") for g in root.iter(SVG + "g") if (g.get("id") or "").startswith("series-")]
    assert sorted(series) == ["series-cpd", "series-lmm"]
    texts = "".join(t.text or "" for t in root.iter(SVG + "text"))
    assert "noise std" in texts and "LMM" in texts


def test_plot_is_reproducible(tmp_path):
    data = tmp_path / "s.csv"
    main(sweep_args(data, "--methods", "lmm,cpd", "--noise-std", "0.01,0.05"))
    main(["plot", str(data), "--out", str(tmp_path / "a.svg")])
    main(["plot", str(data), "--out", str(tmp_path / "b.svg")])
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_plot_bad_inputs(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("method,noise_std,accuracy\n")
    assert main(["plot", str(empty), "--out", str(tmp_path / "p.svg")]) == 1
    other = tmp_path / "other.csv"
    other.write_text("method,foo\nlmm,1\n")
    assert main(["plot", str(other), "--out", str(tmp_path / "p.svg")]) == 1
    junk = tmp_path / "junk.csv"
    junk.write_text("method,noise_std,accuracy\nlmm,x,1\n")
    assert main(["plot", str(junk), "--out", str(tmp_path / "p.svg")]) == 1
    assert main(["plot", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "p.svg")]) == 1


def test_summarize_means():
    rows = [{"method": "cpd", "noise_std": "0.1", "mse": "2"}, {"method": "lmm", "noise_std": "0.1", "mse": "1"},
            {"method": "lmm", "noise_std": "0.1", "mse": "3"}, {"method": "lmm", "noise_std": "0.0", "mse": "5"}]
    assert summarize(rows, "mse", "noise_std") == {"lmm": ([0.0, 0.1], [5.0, 2.0]), "cpd": ([0.1], [2.0])}


def test_module_entry_point(tmp_path, pair):
    fixed, moving = pair
    proc = subprocess.run([sys.executable, "-m", "lmmreg", "register", str(fixed), str(moving),
                           "--out", str(tmp_path / "r.json")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
