import json

import pandas as pd
import pytest

from spinstein.errors import UsageError
from spinstein.main import dispatch, model_params, parse_restrict, redirect_outputs
from spinstein.reporting import ExperimentManifest, manifest_path_for
from spinstein.settings import RunConfig


def test_macrostates_table(tmp_path, capsys):
    out = tmp_path / "macrostates.csv"
    assert dispatch(["macrostates", "--q", "3", "--beta", "1.0", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert len(frame) == 1
    assert frame.loc[0, "x_1"] == pytest.approx(1 / 3)
    assert pd.isna(frame.loc[0, "dominant_color"])
    printed = capsys.readouterr().out
    assert "| index | dominant_color |" in printed
    assert manifest_path_for(out).exists()


def test_exit_codes(tmp_path, capsys):
    test_cases = [
        (["simulate", "--q", "2", "--out", str(tmp_path / "s.csv")], 2, "q must be ≥ 3"),
        (["exact", "tmix", "--q", "3", "--n", "5000", "--out", str(tmp_path / "t.csv")], 3, "above the limit"),
        (["exact", "stein", "--q", "3", "--n", "6", "--h", "fraction:9", "--out", str(tmp_path / "f.csv")], 2, "fraction:K"),
        (["bench", "clt", "--q", "3", "--n", "20", "--beta", "3.0", "--out", str(tmp_path / "c.csv")], 2, "beta_s"),
        (["macrostates", "--beta", "-1", "--out", str(tmp_path / "m.csv")], 2, "--beta"),
        (["no-such-command"], 2, ""),
    ]
    for argv, code, message in test_cases:
        assert dispatch(argv) == code, argv
        assert message in capsys.readouterr().err


def test_malformed_inputs_exit_with_usage_code(tmp_path, capsys):
    bad_graph = tmp_path / "bad_graph.txt"
    bad_graph.write_text("3 x\n", encoding="utf-8")
    bad_init = tmp_path / "bad_init.txt"
    bad_init.write_text("1 2 x\n", encoding="utf-8")
    short_init = tmp_path / "short_init.txt"
    short_init.write_text("1 2 3\n", encoding="utf-8")
    out = ["--out", str(tmp_path / "o.csv")]
    test_cases = [
        (["simulate", "--model", "graph", "--graph-file", str(bad_graph)], "bad_graph.txt:1"),
        (["simulate", "--n", "3", "--init-file", str(bad_init)], "bad_init.txt:1"),
        (["simulate", "--model", "graph", "--graph", "cycle", "--n", "10", "--init-file", str(short_init)], "expected 10"),
        (["simulate", "--n", "10", "--init-file", str(short_init)], "expected 10"),
        (["bench", "bounded-degree", "--graph", "regular", "--degree", "3", "--n", "11"], "regular graph"),
    ]
    for argv, message in test_cases:
        assert dispatch(argv + out) == 2, argv
        assert message in capsys.readouterr().err, argv


def test_simulate_from_init_file(tmp_path):
    init = tmp_path / "init.txt"
    init.write_text("1 1 1 2 2 3\n", encoding="utf-8")
    out = tmp_path / "traj.csv"
    argv = ["simulate", "--q", "3", "--beta", "0.5", "--n", "6", "--init-file", str(init), "--steps", "20"]
    assert dispatch(argv + ["--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.loc[0, ["counts_1", "counts_2", "counts_3"]]) == [3, 2, 1]


def test_model_params_rejects_invalid_size():
    config = RunConfig(q=3, beta=1.0, n=10)
    assert model_params(config).n_vertices == 10
    assert model_params(config, 4).n_vertices == 4
    with pytest.raises(UsageError) as caught:
        model_params(config, 0)
    assert "n-vertices" in caught.value.detail


def test_exact_tmix_writes_curve(tmp_path):
    out = tmp_path / "tmix.csv"
    svg = tmp_path / "tmix.svg"
    argv = ["exact", "tmix", "--q", "3", "--beta", "1.0", "--n", "12", "--out", str(out), "--svg", str(svg)]
    assert dispatch(argv) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["t", "worst_tv"]
    assert frame["worst_tv"].iloc[-1] <= 0.25
    assert svg.read_text(encoding="utf-8").startswith("<svg")
    manifest = ExperimentManifest.load(manifest_path_for(out))
    assert set(manifest.outputs) == {"tmix.csv", "tmix.svg"}
    assert manifest.command == "exact tmix"


def test_couple_columns(tmp_path):
    out = tmp_path / "couple.csv"
    argv = ["couple", "--q", "3", "--beta", "0", "--n", "10", "--unrestricted", "--replicas", "3", "--seed", "4"]
    assert dispatch(argv + ["--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["replica", "tau_couple", "phase1_len", "max_hamming", "event_B_violated_at"]
    assert list(frame["replica"]) == [0, 1, 2]
    assert (frame["tau_couple"] > 0).all()


def test_simulate_restricted(tmp_path):
    out = tmp_path / "traj.csv"
    argv = ["simulate", "--q", "3", "--beta", "1.6", "--n", "60", "--x", "ordered:1", "--steps", "2000", "--seed", "5"]
    assert dispatch(argv + ["--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert (frame[["counts_1", "counts_2", "counts_3"]].sum(axis=1) == 60).all()
    assert frame["counts_1"].min() > 40


def test_default_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SPINSTEIN_OUTPUT_DIR", str(tmp_path))
    assert dispatch(["bench", "theta-trend", "--q", "3", "--betas", "3,5"]) == 0
    assert (tmp_path / "bench_theta-trend.csv").exists()
    assert (tmp_path / "bench_theta-trend.csv.manifest.json").exists()


def test_replay_reproduces_outputs(tmp_path, capsys):
    out = tmp_path / "clt.csv"
    assert dispatch(["bench", "clt", "--q", "3", "--n", "30", "--beta", "0.5", "--out", str(out)]) == 0
    manifest = manifest_path_for(out)
    assert dispatch(["replay", str(manifest)]) == 0
    assert "replay ok" in capsys.readouterr().out

    record = json.loads(manifest.read_text(encoding="utf-8"))
    record["outputs"]["clt.csv"] = "0" * 64
    manifest.write_text(json.dumps(record), encoding="utf-8")
    assert dispatch(["replay", str(manifest)]) == 1
    assert "replay mismatch: clt.csv" in capsys.readouterr().out


def test_replay_of_missing_manifest(tmp_path):
    assert dispatch(["replay", str(tmp_path / "absent.manifest.json")]) == 2


def test_redirect_outputs(tmp_path):
    test_cases = [
        (["bench", "clt", "--out", "data/a.csv"], {"a.csv": "x"}, ["bench", "clt", "--out", str(tmp_path / "a.csv")]),
        (["bench", "clt", "--out=data/a.csv"], {"a.csv": "x"}, ["bench", "clt", f"--out={tmp_path / 'a.csv'}"]),
        (["macrostates"], {"macrostates.csv": "x"}, ["macrostates", "--out", str(tmp_path / "macrostates.csv")]),
        (
            ["exact", "tmix", "--svg", "p/plot.svg", "--out", "d/t.csv"],
            {"t.csv": "x", "plot.svg": "y"},
            ["exact", "tmix", "--svg", str(tmp_path / "plot.svg"), "--out", str(tmp_path / "t.csv")],
        ),
    ]
    for argv, outputs, expected in test_cases:
        assert redirect_outputs(argv, outputs, tmp_path) == expected


def test_macrostates_json(tmp_path, capsys):
    assert dispatch(["macrostates", "--q", "3", "--beta", "3.0", "--json", "--out", str(tmp_path / "m.csv")]) == 0
    record = json.loads(capsys.readouterr().out)
    assert [row["dominant_color"] for row in record["rows"]] == [1, 2, 3]
    assert record["summary"]["macrostates"] == 3


def test_parse_restrict():
    assert parse_restrict("ordered:2:0.05") == ("ordered:2", 0.05)
    assert parse_restrict("e:0.1") == ("e", 0.1)
    for text in ["e", "e:1.5", ":0.1", "ordered:1:wide"]:
        with pytest.raises(UsageError):
            parse_restrict(text)


def test_exact_stationary_on_restricted_chain(tmp_path):
    out = tmp_path / "pi.csv"
    argv = ["exact", "stationary", "--q", "3", "--beta", "1.0", "--n", "15", "--restrict", "e:0.3", "--out", str(out)]
    assert dispatch(argv) == 0
    frame = pd.read_csv(out)
    assert frame["stationary"].sum() == pytest.approx(1.0)
    assert (frame["stationary"] - frame["gibbs"]).abs().max() < 1e-9
