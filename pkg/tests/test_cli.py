import json

import numpy as np
import pytest

from sci_interp.cli import EXIT_OK, EXIT_USER, main
from sci_interp.core import HolderParams, optimal_k
from sci_interp.estimators import WinnEstimator
from sci_interp.synthgen import Fig1Regression, generate

TRAIN = "x1,y\n0,0\n1,1\n2,4\n"


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def train(tmp_path):
    return _write(tmp_path / "train.csv", TRAIN)


def test_predict_at_training_point(tmp_path, train, capsys):
    q = _write(tmp_path / "q.csv", "x1\n1\n")
    code, out, _ = _run(capsys, "predict", train, q, "--k", 2)
    assert code == EXIT_OK
    assert out == "x1,yhat\n1,1\n"


def test_predict_hand_example(tmp_path, train, capsys):
    q = _write(tmp_path / "q.csv", "x1,y\n0.5,99\n")
    code, out, _ = _run(capsys, "predict", train, q, "--k", 2, "--delta", "log")
    assert code == EXIT_OK
    assert float(out.splitlines()[1].split(",")[1]) == pytest.approx(0.5, abs=1e-15)


def test_predict_matches_library(tmp_path, capsys):
    ds, _ = generate(Fig1Regression(n=40, seed=3))
    rows = "\n".join(f"{x!r},{y!r}" for x, y in zip(ds.points[:, 0].tolist(), ds.labels.tolist()))
    train = _write(tmp_path / "t.csv", "x1,y\n" + rows + "\n")
    Q = np.linspace(-0.5, 1.5, 37)
    q = _write(tmp_path / "q.csv", "x1\n" + "\n".join(repr(v) for v in Q.tolist()) + "\n")
    code, _, _ = _run(capsys, "predict", train, q, "--out", tmp_path / "o")
    assert code == EXIT_OK
    text = (tmp_path / "o" / "predictions.csv").read_text()
    rows = [line.split(",") for line in text.splitlines()]
    assert rows[0] == ["x1", "yhat"] and len(rows) == 38
    yhat = np.array([float(r[1]) for r in rows[1:]])
    k = optimal_k(40, HolderParams(1.0, 1))
    assert np.array_equal(yhat, WinnEstimator(ds, k).predict(Q[:, None]))


@pytest.mark.parametrize("est", ["knn", "1nn", "hilbert", "shepard", "simplex", "lagrange"])
def test_predict_other_estimators(tmp_path, train, capsys, est):
    q = _write(tmp_path / "q.csv", "x1\n2\n")
    code, out, _ = _run(capsys, "predict", train, q, "--estimator", est, "--k", 1)
    assert code == EXIT_OK
    assert out.splitlines()[1] == "2,4"


def test_predict_classify(tmp_path, capsys):
    train = _write(tmp_path / "t.csv", "x1,x2,y\n0,0,0\n1,0,1\n0,1,1\n5,5,0\n")
    q = _write(tmp_path / "q.csv", "x1,x2\n1,0\n0.1,0.1\n")
    code, out, _ = _run(capsys, "predict", train, q, "--k", 2, "--classify")
    assert code == EXIT_OK
    assert [line.split(",")[-1] for line in out.splitlines()[1:]] == ["1", "0"]


def test_predict_empty_query(tmp_path, train, capsys):
    q = _write(tmp_path / "q.csv", "")
    code, out, _ = _run(capsys, "predict", train, q, "--k", 2)
    assert code == EXIT_OK and out == ""


@pytest.mark.parametrize(
    "text,where",
    [("x1,y\n0,0\n1,abc\n", ":3:"), ("x1,y\n0,0\n1\n", ":3:"), ("a,b\n1,2\n", ":1:"), ("x1,y\n0,nan\n", ":2:")],
)
def test_malformed_csv_exit_2(tmp_path, capsys, text, where):
    bad = _write(tmp_path / "bad.csv", text)
    q = _write(tmp_path / "q.csv", "x1\n0\n")
    code, _, err = _run(capsys, "predict", bad, q)
    assert code == EXIT_USER
    assert where in err


def test_dimension_mismatch_exit_2(tmp_path, train, capsys):
    q = _write(tmp_path / "q.csv", "x1,x2\n0,0\n")
    code, _, err = _run(capsys, "predict", train, q)
    assert code == EXIT_USER and "feature columns" in err


def test_bad_k_exit_2(tmp_path, train, capsys):
    q = _write(tmp_path / "q.csv", "x1\n0\n")
    assert _run(capsys, "predict", train, q, "--k", 3)[0] == EXIT_USER
    assert _run(capsys, "predict", train, q, "--k", "many")[0] == EXIT_USER


def test_missing_file_and_bad_args_exit_2(tmp_path, capsys):
    assert _run(capsys, "predict", tmp_path / "nope.csv", tmp_path / "q.csv")[0] == EXIT_USER
    assert _run(capsys, "frobnicate")[0] == EXIT_USER
    assert _run(capsys, "fig1", "--seed", -1)[0] == EXIT_USER


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


@pytest.mark.parametrize("cmd", ["fig1", "fig2"])
def test_figures_byte_deterministic(tmp_path, capsys, cmd):
    assert _run(capsys, cmd, "--out", tmp_path / "a")[0] == EXIT_OK
    assert _run(capsys, cmd, "--out", tmp_path / "b")[0] == EXIT_OK
    assert _files(tmp_path / "a") == _files(tmp_path / "b")


def test_fig1_properties(tmp_path, capsys):
    assert _run(capsys, "fig1", "--out", tmp_path)[0] == EXIT_OK
    doc = json.loads((tmp_path / "fig1.json").read_text())
    res = doc["results"]
    assert res["passes_through_samples"] and res["max_abs_error_at_samples"] == 0.0
    assert doc["config"]["command"] == "fig1" and doc["config"]["k"] == 20
    assert set(doc) == {"config", "results", "version"}
    lines = (tmp_path / "fig1_curve.csv").read_text().splitlines()
    assert lines[0] == "x,yhat,eta,is_sample"
    assert sum(line.endswith(",1") for line in lines[1:]) == 50
    assert len((tmp_path / "fig1_samples.csv").read_text().splitlines()) == 51


def test_fig2_properties(tmp_path, capsys):
    assert _run(capsys, "fig2", "--out", tmp_path)[0] == EXIT_OK
    res = json.loads((tmp_path / "fig2.json").read_text())["results"]
    assert res["mislabeled_cells_carry_training_label"]
    assert res["bayes_line_x1"] == 1.0
    assert len((tmp_path / "fig2_regions.csv").read_text().splitlines()) == 256 * 256 + 1


def test_fig2_consistency_at_n_1000(tmp_path, capsys):
    cfg = _write(tmp_path / "c.toml", 'n = 1000\nk = "auto"\n')
    assert _run(capsys, "fig2", "--config", cfg, "--out", tmp_path)[0] == EXIT_OK
    res = json.loads((tmp_path / "fig2.json").read_text())["results"]
    assert res["far_cell_bayes_agreement"] >= 0.95


def test_fig2_no_flips_no_islands(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", json.dumps({"flip_prob": 0.0}))
    assert _run(capsys, "fig2", "--config", cfg, "--out", tmp_path)[0] == EXIT_OK
    res = json.loads((tmp_path / "fig2.json").read_text())["results"]
    assert res["n_mislabeled"] == 0


def test_config_round_trip(tmp_path, capsys):
    cfg = _write(tmp_path / "c.toml", 'replicates = 7\np_grid = [2, 10, 20, 50, 100]\nseed = 42\n')
    assert _run(capsys, "descent", "--config", cfg, "--out", tmp_path / "a")[0] == EXIT_OK
    first = tmp_path / "a" / "descent.json"
    assert _run(capsys, "descent", "--config", first, "--out", tmp_path / "b")[0] == EXIT_OK
    assert _files(tmp_path / "a") == _files(tmp_path / "b")


def test_auto_k_recorded(tmp_path, capsys):
    cfg = _write(tmp_path / "c.toml", 'k = "auto"\n')
    assert _run(capsys, "fig1", "--config", cfg, "--out", tmp_path)[0] == EXIT_OK
    doc = json.loads((tmp_path / "fig1.json").read_text())
    assert doc["config"]["k"] == "auto" and doc["config"]["resolved_k"] == optimal_k(50, HolderParams(1, 1))


@pytest.mark.parametrize("text", ['bogus = 1\n', 'n = "fifty"\n', 'command = "fig2"\n', "n = [\n"])
def test_bad_config_exit_2(tmp_path, capsys, text):
    cfg = _write(tmp_path / "c.toml", text)
    code, _, err = _run(capsys, "fig1", "--config", cfg, "--out", tmp_path)
    assert code == EXIT_USER and err.startswith("error:")
    assert not (tmp_path / "fig1.json").exists()


def test_threads_invariant(tmp_path, capsys, monkeypatch):
    cfg = _write(tmp_path / "c.toml", "n_values = [100, 200, 1000, 10000]\nreplicates = 3\nn_test = 200\n")
    assert _run(capsys, "rates", "--config", cfg, "--threads", 1, "--out", tmp_path / "a")[0] == EXIT_OK
    assert _run(capsys, "rates", "--config", cfg, "--threads", 3, "--out", tmp_path / "b")[0] == EXIT_OK
    monkeypatch.setenv("SCI_INTERP_THREADS", "2")
    assert _run(capsys, "rates", "--config", cfg, "--out", tmp_path / "c")[0] == EXIT_OK
    assert _files(tmp_path / "a") == _files(tmp_path / "b") == _files(tmp_path / "c")


def test_islands_small(tmp_path, capsys):
    cfg = _write(tmp_path / "c.toml", "n_values = [100, 1000]\nreplicates = 2\nmax_points = 5\n")
    assert _run(capsys, "islands", "--config", cfg, "--out", tmp_path)[0] == EXIT_OK
    res = json.loads((tmp_path / "islands.json").read_text())["results"]
    assert [r["n"] for r in res["per_n"]] == [100, 1000]
    assert all(r["all_mislabeled_self_misclassified"] for r in res["per_n"])


def test_internal_error_exit_3(monkeypatch, tmp_path, capsys):
    import sci_interp.cli as cli

    def boom(cfg):
        raise RuntimeError("invariant violated")

    monkeypatch.setitem(cli.RUNNERS, "fig1", lambda cfg, threads: boom(cfg))
    code, _, err = _run(capsys, "fig1", "--out", tmp_path)
    assert code == 3 and "internal error" in err
