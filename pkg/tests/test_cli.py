import json
import subprocess
import sys

import pytest

from floorboost.cli import main

QUICK_TRAIN = [
    "--cascade-f", "0.55",
    "--cascade-d", "0.95",
    "--cascade-f-target", "0.05",
    "--separation-rounds", "12",
    "--bucket-rounds", "8",
    "--max-stages", "4",
    "--max-stumps-per-stage", "24",
]


def run_cli(args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "floorboost", *args],
        capture_output=True, text=True, **kwargs,
    )


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One generated log + trained model shared by the CLI tests."""
    root = tmp_path_factory.mktemp("cliws")
    logs = root / "logs.jsonl"
    model = root / "model.json"
    assert main(["generate", "--out", str(logs), "--n", "4000", "--seed", "5"]) == 0
    assert main(["train", "--logs", str(logs), "--out", str(model), *QUICK_TRAIN]) == 0
    return root, logs, model


def test_generate_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["generate", "--out", str(out1), "--n", "400", "--seed", "9"]) == 0
    assert main(["generate", "--out", str(out2), "--n", "400", "--seed", "9"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    m1 = json.loads((tmp_path / "a.jsonl.manifest.json").read_text())
    m2 = json.loads((tmp_path / "b.jsonl.manifest.json").read_text())
    assert m1["artifacts"] == m2["artifacts"]
    assert m1["config"]["seed"] == 9


def test_train_outputs(workspace):
    root, logs, model = workspace
    bundle = json.loads(model.read_text())
    assert bundle["format"] == "floorboost-model-v1"
    assert bundle["policy"]["separation"]["stages"]
    assert (root / "model.stages.csv").exists()
    assert (root / "model.cascade_stages.png").exists()
    manifest = json.loads((root / "model.json.manifest.json").read_text())
    assert "logs" in manifest["inputs"] and "model" in manifest["artifacts"]


def test_evaluate_outputs(workspace, tmp_path):
    root, logs, model = workspace
    out = tmp_path / "eval"
    assert main([
        "evaluate", "--logs", str(logs), "--model", str(model),
        "--out-dir", str(out), "--split", "holdout",
    ]) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert 0.5 < metrics["separation"]["auc"] <= 1.0
    assert 0.5 < metrics["high_value"]["auc"] <= 1.0
    for name in ("decisions.csv", "cascade_rates.csv", "roc_separation.png",
                 "roc_high_value.png", "feature_importance_separation.png", "manifest.json"):
        assert (out / name).exists(), name


def test_evaluate_training_error_respects_bound(workspace, tmp_path):
    root, logs, model = workspace
    out = tmp_path / "eval_train"
    assert main([
        "evaluate", "--logs", str(logs), "--model", str(model),
        "--out-dir", str(out), "--split", "train", "--no-figures",
    ]) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["separation"]["error"] <= metrics["separation"]["training_error_bound"] + 1e-12


def test_replay_baseline_and_policy(workspace, tmp_path):
    root, logs, model = workspace
    base_dir = tmp_path / "base"
    result = run_cli([
        "replay", "--logs", str(logs), "--policy", "none", "--out-dir", str(base_dir),
    ])
    assert result.returncode == 0
    assert "baseline revenue" in result.stdout
    assert (base_dir / "report.csv").exists()

    pol_dir = tmp_path / "pol"
    result = run_cli([
        "replay", "--logs", str(logs), "--policy", str(model),
        "--out-dir", str(pol_dir), "--split", "holdout",
    ])
    assert result.returncode == 0
    assert result.stdout.startswith("lift ")
    lift = json.loads((pol_dir / "lift.json").read_text())
    # the printed line matches the lift artifact
    printed_pct = float(result.stdout.split()[1].rstrip("%"))
    assert printed_pct == pytest.approx(lift["relative_lift"] * 100, abs=0.05)
    for name in ("report.csv", "report.json", "baseline.csv", "baseline.json",
                 "decisions.csv", "revenue_segments.png", "manifest.json"):
        assert (pol_dir / name).exists(), name


def test_replay_deterministic_artifacts(workspace, tmp_path):
    root, logs, model = workspace
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    for d in (d1, d2):
        assert main([
            "replay", "--logs", str(logs), "--policy", str(model),
            "--out-dir", str(d), "--split", "holdout",
        ]) == 0
    for name in ("report.csv", "report.json", "baseline.csv", "lift.json",
                 "decisions.csv", "revenue_segments.png"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes(), name


def test_sweep_small_grid(workspace, tmp_path):
    root, logs, model = workspace
    out = tmp_path / "sweep"
    result = run_cli([
        "sweep", "--logs", str(logs), "--out-dir", str(out),
        "--hv-cutoffs", "5,10", "--gap-cutoffs", "1",
        "--threads", "2", *QUICK_TRAIN,
    ])
    assert result.returncode == 0, result.stderr
    assert "best cutoffs" in result.stdout
    rows = (out / "sweep.csv").read_text().splitlines()
    assert len(rows) == 3  # header + 2 points
    best = json.loads((out / "best.json").read_text())
    assert best["high_value_cutoff"] in ("5.0000", "10.0000")
    assert (out / "sweep_lift.png").exists()


def test_unknown_flag_single_line_error(tmp_path):
    result = run_cli(["generate", "--out", str(tmp_path / "x.jsonl"), "--nope", "1"])
    assert result.returncode == 2
    lines = [l for l in result.stderr.splitlines() if l.strip()]
    assert len(lines) == 1
    assert lines[0].startswith("error: ")


def test_missing_file_is_clean_failure(tmp_path):
    out = tmp_path / "nothing"
    result = run_cli([
        "train", "--logs", str(tmp_path / "ghost.jsonl"), "--out", str(out / "m.json"),
        *QUICK_TRAIN,
    ])
    assert result.returncode == 2
    assert result.stderr.startswith("error: ")
    assert not out.exists()  # no partial artifacts


def test_missing_required_cascade_params(workspace, tmp_path):
    root, logs, model = workspace
    result = run_cli([
        "train", "--logs", str(logs), "--out", str(tmp_path / "m.json"),
    ])
    assert result.returncode == 2
    assert "cascade-f" in result.stderr


def test_config_file_and_flag_override(workspace, tmp_path):
    root, logs, model = workspace
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"n": 123, "seed": 4, "out": str(tmp_path / "from_conf.jsonl")}))
    assert main(["generate", "--config", str(conf)]) == 0
    assert len((tmp_path / "from_conf.jsonl").read_text().splitlines()) == 123
    # flag beats config file
    assert main([
        "generate", "--config", str(conf), "--n", "77", "--out", str(tmp_path / "over.jsonl"),
    ]) == 0
    assert len((tmp_path / "over.jsonl").read_text().splitlines()) == 77
    result = run_cli(["generate", "--config", str(tmp_path / "missing.json"), "--out", "x"])
    assert result.returncode == 2


def test_unknown_config_key_rejected(tmp_path):
    conf = tmp_path / "bad.json"
    conf.write_text(json.dumps({"not-a-key": 1}))
    result = run_cli(["generate", "--config", str(conf), "--out", str(tmp_path / "x.jsonl")])
    assert result.returncode == 2
    assert "unknown config key" in result.stderr


def test_no_figures_flag(workspace, tmp_path):
    root, logs, model = workspace
    out = tmp_path / "nofig"
    assert main([
        "replay", "--logs", str(logs), "--policy", str(model),
        "--out-dir", str(out), "--split", "holdout", "--no-figures",
    ]) == 0
    assert not (out / "revenue_segments.png").exists()
    assert (out / "report.csv").exists()


def test_help_lists_every_flag():
    result = run_cli(["train", "--help"])
    assert result.returncode == 0
    for flag in ("--cascade-f", "--cascade-d", "--cascade-f-target", "--gap-cutoff",
                 "--reserve-scale", "--figures", "--config"):
        assert flag in result.stdout
    assert "default" in result.stdout
