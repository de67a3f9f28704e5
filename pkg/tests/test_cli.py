import json

import numpy as np
import pytest

from nested_enet.cli import main
from nested_enet.tabular import read_matrix


def run(*args):
    return main([str(a) for a in args])


def files(d):
    return {p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def grouped(tmp_path_factory):
    d = tmp_path_factory.mktemp("grouped")
    assert run("synth", "grouped_toy", "--out", d, "--set", "response_noise_sigma=1.0") == 0
    return d


@pytest.fixture(scope="module")
def classification(tmp_path_factory):
    d = tmp_path_factory.mktemp("cls")
    assert run("synth", "grouped_toy", "--out", d, "--classification", "--set", "n=80", "--seed", "2") == 0
    cfg = {
        "train": "data.tsv",
        "labels": "labels.tsv",
        "test_fraction": 0.25,
        "folds": 4,
        "n_tau": 8,
        "tau_ratio": 0.01,
        "n_lambda": 3,
        "mu_sweep": [0, "1e-2tau", "1tau"],
        "max_iterations": 100000,
    }
    (d / "config.json").write_text(json.dumps(cfg))
    assert run("run", "--config", d / "config.json", "--out", d / "out", "--workers", 1) == 0
    return d


def test_synth_grouped_defaults(tmp_path):
    assert run("synth", "grouped_toy", "--out", tmp_path) == 0
    t = read_matrix(tmp_path / "data.tsv")
    assert t.values.shape == (100, 40)
    truth = json.loads((tmp_path / "truth.json").read_text())
    assert truth["group_positions"] == [list(range(1, 6)), list(range(6, 11)), list(range(11, 16))]


def test_synth_toy_regression_noiseless(tmp_path):
    assert run("synth", "toy_regression", "--out", tmp_path, "--set", "noise_sigma=0", "--set", "p=20",
               "--set", "true_weights=[0.6449,0.818,0.6602]") == 0
    t = read_matrix(tmp_path / "train.tsv")
    labels = np.loadtxt(tmp_path / "train_labels.tsv", skiprows=1, usecols=1)
    w = np.zeros(20)
    w[:3] = [0.6449, 0.818, 0.6602]
    assert np.array_equal(t.values @ w, labels)


def test_synth_deterministic(tmp_path):
    for name in ("a", "b"):
        assert run("synth", "toy_regression", "--out", tmp_path / name, "--seed", 9, "--set", "p=30") == 0
    assert files(tmp_path / "a") == files(tmp_path / "b")


def test_synth_bad_override(tmp_path):
    assert run("synth", "grouped_toy", "--out", tmp_path, "--set", "colour=1") == 1


def test_run_single_point(grouped, tmp_path):
    cfg = {
        "train": str(grouped / "data.tsv"),
        "labels": str(grouped / "labels.tsv"),
        "task_kind": "regression",
        "folds": 3,
        "tau_values": [1.0],
        "lambda_values": [0.01],
        "mu_sweep": [1e-6],
    }
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    assert run("run", "--config", tmp_path / "c.json", "--out", tmp_path / "o") == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert len(report["sweep"]["entries"]) == 1
    assert sorted(p.name for p in (tmp_path / "o" / "models").iterdir()) == ["model_00.json"]
    assert report["stage1"]["tau_opt"] == 1.0


def test_run_grouped_large_mu_selects_fifteen(grouped, tmp_path):
    code = run("run", "--train", grouped / "data.tsv", "--labels", grouped / "labels.tsv", "--task-kind", "regression",
               "--folds", 5, "--mu-sweep", "0,1000tau", "--out", tmp_path)
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["sweep"]["entries"][-1]["cardinality"] == 15
    assert report["sweep"]["nesting"]["overlap_percent"] == [100.0]


def test_rerun_from_manifest_is_byte_identical(classification, tmp_path):
    out = classification / "out"
    assert run("run", "--config", out / "manifest.json", "--out", tmp_path / "again", "--workers", 3) == 0
    assert files(out) == files(tmp_path / "again")


def test_report_contents(classification):
    report = json.loads((classification / "out" / "report.json").read_text())
    assert report["n_test"] == 20 and report["n_train"] == 60
    entry = report["sweep"]["entries"][0]
    assert entry["rejection"]["evaluated_on"] == "test"
    assert set(entry["test_error"]["misclassified"]) == {"-1", "1"}
    assert report["stability"]["stage1"]["n_folds"] == 4
    text = (classification / "out" / "report.json").read_text()
    assert text == json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"


def test_predict_round_trip_matches_test_error(classification, tmp_path):
    out = classification / "out"
    report = json.loads((out / "report.json").read_text())
    table = read_matrix(classification / "data.tsv")
    labels = dict(np.loadtxt(classification / "labels.tsv", skiprows=1, dtype=str))
    test_ids = report["test_samples"]
    rows = [table.sample_ids.index(s) for s in test_ids]
    sub = tmp_path / "test.tsv"
    sub.write_text(
        "sample\t" + "\t".join(table.feature_ids) + "\n"
        + "".join(s + "\t" + "\t".join(repr(float(v)) for v in table.values[i]) + "\n" for s, i in zip(test_ids, rows))
    )
    for i, entry in enumerate(report["sweep"]["entries"]):
        assert run("predict", out / entry["model"], sub, "--out", tmp_path / f"p{i}.tsv") == 0
        pred = np.loadtxt(tmp_path / f"p{i}.tsv", skiprows=1, dtype=str)
        wrong = [float(lab) != float(labels[sid]) for sid, _, lab in pred]
        assert sum(wrong) == sum(entry["test_error"]["misclassified"].values())


def write_model(path, ids, weights, means, ymean=0.5):
    support = [[f, w] for f, w in zip(ids, weights) if w != 0]
    path.write_text(json.dumps({
        "format": "nested-enet-model/1", "task_kind": "regression", "feature_ids": ids,
        "feature_means": means, "response_mean": ymean, "support": support,
        "hyperparams": {"tau": 1.0, "mu": 0.0, "lambda": 0.0}, "converged": True,
    }))


def test_predict_zero_model(tmp_path):
    write_model(tmp_path / "m.json", ["a", "b"], [0, 0], [1, 2], ymean=0.25)
    (tmp_path / "x.tsv").write_text("id\ta\tb\nu\t5\t6\nv\t-1\t0\n")
    assert run("predict", tmp_path / "m.json", tmp_path / "x.tsv", "--out", tmp_path / "p.tsv") == 0
    assert (tmp_path / "p.tsv").read_text() == "sample\tscore\nu\t0.25\nv\t0.25\n"


def test_predict_matches_by_feature_id(tmp_path):
    write_model(tmp_path / "m.json", ["a", "b", "c"], [1.0, 0.0, -2.0], [0, 0, 1])
    (tmp_path / "x.tsv").write_text("id\ta\tb\tc\nu\t1\t2\t3\n")
    (tmp_path / "y.csv").write_text("id,c,a,b\nu,3,1,2\n")
    run("predict", tmp_path / "m.json", tmp_path / "x.tsv", "--out", tmp_path / "p1")
    run("predict", tmp_path / "m.json", tmp_path / "y.csv", "--out", tmp_path / "p2")
    assert (tmp_path / "p1").read_text() == (tmp_path / "p2").read_text() == "sample\tscore\nu\t-2.5\n"


def test_predict_feature_mismatch(tmp_path, capsys):
    write_model(tmp_path / "m.json", ["a", "b"], [1.0, 0.0], [0, 0])
    (tmp_path / "x.tsv").write_text("id\ta\tz\nu\t1\t2\n")
    assert run("predict", tmp_path / "m.json", tmp_path / "x.tsv") == 2
    err = capsys.readouterr().err
    assert "missing feature ids: b" in err and "unexpected feature ids: z" in err


def test_heatmap_export(tmp_path):
    write_model(tmp_path / "m.json", ["a", "b", "c"], [0.5, 0.0, -2.0], [0, 0, 0])
    (tmp_path / "x.tsv").write_text("id\ta\tb\tc\nu\t1\t0\t3\nv\t2\t0\t5\nw\t6\t0\t4\n")
    assert run("heatmap-export", tmp_path / "m.json", tmp_path / "x.tsv", "--out", tmp_path / "h.tsv") == 0
    t = read_matrix(tmp_path / "h.tsv")
    assert t.sample_ids == ("c", "a")  # rows by decreasing |weight|
    assert t.feature_ids == ("u", "v", "w")
    assert np.allclose(t.values.mean(axis=1), 0) and np.allclose(t.values.var(axis=1), 1)


def test_heatmap_single_feature(tmp_path):
    write_model(tmp_path / "m.json", ["a", "b"], [0.5, 0.0], [0, 0])
    (tmp_path / "x.tsv").write_text("id\ta\tb\nu\t1\t0\nv\t2\t0\n")
    assert run("heatmap-export", tmp_path / "m.json", tmp_path / "x.tsv", "--out", tmp_path / "h.tsv") == 0
    t = read_matrix(tmp_path / "h.tsv")
    assert t.values.shape == (1, 2) and np.allclose(t.values, [[-1, 1]])


def test_heatmap_errors(tmp_path, capsys):
    write_model(tmp_path / "m.json", ["a", "b"], [0.5, 0.0], [0, 0])
    (tmp_path / "x.tsv").write_text("id\ta\tb\nu\t1\t0\nv\t1\t0\n")
    assert run("heatmap-export", tmp_path / "m.json", tmp_path / "x.tsv", "--out", tmp_path / "h.tsv") == 2
    assert "zero variance feature" in capsys.readouterr().err
    write_model(tmp_path / "z.json", ["a", "b"], [0.0, 0.0], [0, 0])
    assert run("heatmap-export", tmp_path / "z.json", tmp_path / "x.tsv", "--out", tmp_path / "h.tsv") == 2


@pytest.mark.parametrize(
    "matrix, labels, message",
    [
        ("id\ta\tb\nu\t1\tnan\nv\t1\t2\n", "s\ty\nu\t1\nv\t-1\n", "x.tsv:2:3: non-finite"),
        ("id\ta\tb\nu\t1\tinf\nv\t1\t2\n", "s\ty\nu\t1\nv\t-1\n", "x.tsv:2:3: non-finite"),
        ("id\ta\ta\nu\t1\t1\nv\t1\t2\n", "s\ty\nu\t1\nv\t-1\n", "duplicated feature ids: a"),
        ("id\ta\tb\nu\t1\t1\nv\t1\toops\n", "s\ty\nu\t1\nv\t-1\n", "x.tsv:3:3: not a number"),
        ("id\ta\tb\nu\t1\t1\nv\t1\t2\n", "s\ty\nu\t1\nv\t0\n", "y.tsv:3:2: label must be +1 or -1"),
        ("id\ta\tb\nu\t1\t1\nv\t1\n", "s\ty\nu\t1\nv\t-1\n", "x.tsv:3: expected 3 cells"),
    ],
)
def test_run_rejects_bad_input(tmp_path, capsys, matrix, labels, message):
    (tmp_path / "x.tsv").write_text(matrix)
    (tmp_path / "y.tsv").write_text(labels)
    code = run("run", "--train", tmp_path / "x.tsv", "--labels", tmp_path / "y.tsv", "--folds", 2, "--out", tmp_path / "o")
    assert code == 2
    assert message in capsys.readouterr().err


def test_label_column(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((30, 4))
    y = np.where(X[:, 0] > 0, 1, -1)
    lines = ["id,a,b,c,d,cls"] + [f"s{i}," + ",".join(repr(float(v)) for v in X[i]) + f",{y[i]}" for i in range(30)]
    (tmp_path / "x.csv").write_text("\n".join(lines) + "\n")
    (tmp_path / "c.json").write_text(json.dumps({"train": "x.csv", "label_column": "cls", "folds": "loo",
                                                   "n_tau": 4, "tau_ratio": 0.05, "n_lambda": 2, "mu_sweep": [0, 0.01]}))
    assert run("run", "--config", tmp_path / "c.json", "--out", tmp_path / "o") == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["p"] == 4 and report["stage1"]["folds"] == 30


def test_usage_and_config_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("frobnicate")
    assert exc.value.code == 1
    assert run("run", "--train", tmp_path / "missing.tsv", "--labels", tmp_path / "l.tsv") == 1
    (tmp_path / "c.json").write_text('{"train": "x.tsv", "labels": "y.tsv", "bogus": 1}')
    assert run("run", "--config", tmp_path / "c.json") == 1
    (tmp_path / "x.tsv").write_text("id\ta\nu\t1\nv\t2\n")
    (tmp_path / "y.tsv").write_text("u\t1\nv\t-1\n")
    assert run("run", "--config", tmp_path / "c2.json") == 1
    assert run("run", "--train", tmp_path / "x.tsv", "--labels", tmp_path / "y.tsv", "--folds", "many") == 1
    assert run("run", "--train", tmp_path / "x.tsv", "--labels", tmp_path / "y.tsv", "--mu-sweep", "0,-1") == 1


def test_iteration_budget_exhaustion_exit_code(grouped, tmp_path, capsys):
    cfg = {"train": str(grouped / "data.tsv"), "labels": str(grouped / "labels.tsv"), "task_kind": "regression",
           "folds": 3, "tau_values": [0.05], "lambda_values": [0.01], "mu_sweep": [0], "max_iterations": 5}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    assert run("run", "--config", tmp_path / "c.json", "--out", tmp_path / "o") == 3
    assert "solver error" in capsys.readouterr().err


def test_non_convergence_at_optimum_exit_code(grouped, tmp_path, capsys, monkeypatch):
    import dataclasses

    import nested_enet.cli as cli

    real = cli.stage2_sweep

    def stalled(*args, **kwargs):
        result = real(*args, **kwargs)
        models = tuple(dataclasses.replace(m, converged=False) for m in result.models)
        return dataclasses.replace(result, models=models)

    monkeypatch.setattr(cli, "stage2_sweep", stalled)
    cfg = {"train": str(grouped / "data.tsv"), "labels": str(grouped / "labels.tsv"), "task_kind": "regression",
           "folds": 3, "tau_values": [1.0], "lambda_values": [0.01], "mu_sweep": [0]}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    assert run("run", "--config", tmp_path / "c.json", "--out", tmp_path / "o") == 3
    assert "did not converge" in capsys.readouterr().err
    assert (tmp_path / "o" / "report.json").exists()
