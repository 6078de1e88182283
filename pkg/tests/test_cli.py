import hashlib
import json

import numpy as np
import pytest

from polynet.cli import main
from polynet.data import read_feature_csv
from polynet.modelio import parse_model


def run(*argv):
    return main([str(a) for a in argv])


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture()
def synth_csv(tmp_path):
    path = tmp_path / "data.csv"
    assert run("synth", "--model", "alz", "--m-total", "76", "--rows", "300",
               "--scale", "0.05", "--seed", "5", "--out", path) == 0
    return path


def write_signal_csv(path, channels, seconds, rate):
    rng = np.random.default_rng(0)
    n = int(seconds * rate)
    data = rng.standard_normal((n, len(channels)))
    with open(path, "w") as fh:
        fh.write(",".join(channels) + "\n")
        for row in data:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def test_missing_rate_is_usage_error(tmp_path, capsys):
    sig = tmp_path / "sig.csv"
    write_signal_csv(sig, ["C3"], 2.0, 100.0)
    with pytest.raises(SystemExit) as exc:
        run("extract", sig, "--bands", "preset:alz4", "--out", tmp_path / "o.csv")
    assert exc.value.code == 1


def test_extract_alz_recipe_shape(tmp_path):
    sig = tmp_path / "sig.csv"
    names = [f"C{i+1}" for i in range(19)]
    write_signal_csv(sig, names, 8.0, 100.0)
    out = tmp_path / "feat.csv"
    assert run("extract", sig, "--rate", "100", "--window", "0.5",
               "--step", "0.25", "--bands", "preset:alz4", "--out", out) == 0
    table = read_feature_csv(out)
    assert table.n == 31
    assert table.m == 76


def test_extract_neonatal_recipe_shape(tmp_path):
    sig = tmp_path / "sig.csv"
    write_signal_csv(sig, ["C3", "C4"], 40.0, 100.0)
    out = tmp_path / "feat.csv"
    assert run("extract", sig, "--rate", "100", "--window", "10",
               "--bands", "preset:neo6", "--mode", "abs+rel",
               "--sum-channels", "C3+C4", "--out", out) == 0
    table = read_feature_csv(out)
    assert table.m == 36


def test_extract_does_not_mutate_input(tmp_path):
    sig = tmp_path / "sig.csv"
    write_signal_csv(sig, ["C3"], 4.0, 100.0)
    before = sha(sig)
    run("extract", sig, "--rate", "100", "--window", "1",
        "--bands", "preset:alz4", "--out", tmp_path / "o.csv")
    assert sha(sig) == before


def test_train_writes_model_and_trace(tmp_path, synth_csv):
    model = tmp_path / "m.pn"
    assert run("train", synth_csv, "--F", "1", "--Delta", "0.5",
               "--seed", "3", "--out", model) == 0
    net = parse_model(model.read_text())
    assert net.m == 76
    trace = json.loads((tmp_path / "m.pn.trace.json").read_text())
    assert trace["strategy"] == "layered"
    assert trace["cr_per_layer"]
    assert trace["fit_traces"]


def test_train_reruns_byte_identical(tmp_path, synth_csv):
    m1, m2 = tmp_path / "a.pn", tmp_path / "b.pn"
    args = ["train", synth_csv, "--F", "1", "--Delta", "0.5", "--seed", "9"]
    assert run(*args, "--out", m1) == 0
    assert run(*args, "--out", m2, "--threads", "4") == 0
    assert m1.read_bytes() == m2.read_bytes()


def test_train_split_zero_is_usage_error(tmp_path, synth_csv):
    assert run("train", synth_csv, "--split", "0",
               "--out", tmp_path / "m.pn") == 1


def test_train_constant_labels_incremental_exits_three(tmp_path, synth_csv):
    table = read_feature_csv(synth_csv)
    table.y[:] = 0.0
    from polynet.data import write_feature_csv

    const = tmp_path / "const.csv"
    write_feature_csv(const, table)
    assert run("train", const, "--algo", "incremental",
               "--out", tmp_path / "m.pn") == 3


def test_eval_reports_metric_triple(tmp_path, synth_csv):
    model = tmp_path / "m.pn"
    run("train", synth_csv, "--F", "1", "--Delta", "0.5", "--seed", "3",
        "--out", model)
    report = tmp_path / "r.json"
    assert run("eval", model, synth_csv, "--report", report) == 0
    rep = json.loads(report.read_text())
    assert set(rep["confusion"]) == {"tp", "fn", "tn", "fp"}
    assert 0.0 <= rep["performance"] <= 1.0


def test_eval_column_mismatch_exits_two(tmp_path, synth_csv):
    other = tmp_path / "small.csv"
    run("synth", "--model", "recovery", "--rows", "50", "--out", other)
    model = tmp_path / "m.pn"
    run("train", synth_csv, "--F", "1", "--Delta", "0.5", "--out", model)
    assert run("eval", model, other, "--report", tmp_path / "r.json") == 2


def test_eval_undefined_metric_warns_but_succeeds(tmp_path, synth_csv, capsys):
    table = read_feature_csv(synth_csv)
    from polynet.data import FeatureTable, write_feature_csv

    only_neg = FeatureTable(table.feature_names, table.X[table.y == 0],
                            y=np.zeros(int((table.y == 0).sum())))
    negs = tmp_path / "negs.csv"
    write_feature_csv(negs, only_neg)
    model = tmp_path / "m.pn"
    run("train", synth_csv, "--F", "1", "--Delta", "0.5", "--out", model)
    report = tmp_path / "r.json"
    assert run("eval", model, negs, "--report", report) == 0
    rep = json.loads(report.read_text())
    assert "error" in rep["sensitivity"]
    assert "warning" in capsys.readouterr().err


def test_bench_convergence_structure(tmp_path):
    out = tmp_path / "conv.json"
    assert run("bench", "--suite", "convergence", "--seed", "2",
               "--out", out) == 0
    rep = json.loads(out.read_text())
    assert [c["chi"] for c in rep["curves"]] == [1.25, 1.5, 1.75, 2.0]
    assert all(c["steps"] <= 40 for c in rep["curves"])
    assert (tmp_path / "conv.csv").exists()


def test_bench_figures_rendered(tmp_path):
    out = tmp_path / "conv.json"
    figs = tmp_path / "figs"
    assert run("bench", "--suite", "convergence", "--out", out,
               "--figures", figs) == 0
    assert (figs / "convergence.png").stat().st_size > 0


def test_synth_sidecar_embeds_generator(tmp_path):
    out = tmp_path / "d.csv"
    assert run("synth", "--model", "sleep", "--rows", "40", "--out", out) == 0
    sidecar = json.loads((tmp_path / "d.csv.json").read_text())
    net = parse_model(sidecar["generator"])
    assert len(net.neurons) == 7
    assert sidecar["n_rows"] == 40


def test_synth_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("synth", "--model", "recovery", "--rows", "60", "--seed", "8", "--out", a)
    run("synth", "--model", "recovery", "--rows", "60", "--seed", "8", "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_unknown_flag_rejected(tmp_path, synth_csv):
    with pytest.raises(SystemExit) as exc:
        run("train", synth_csv, "--wibble", "3", "--out", tmp_path / "m.pn")
    assert exc.value.code == 1
