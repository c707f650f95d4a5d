import os
import subprocess
import sys

import pytest
import yaml

from alignlab.cli import main
from alignlab.config import OUTPUT_DIR_ENV
from alignlab.report import METRIC_FIELDS, read_jsonl, validate_metrics_record

SMOKE = {
    "trainer": {"k": 4, "hidden_dim": 8, "read_dim": 2, "episodes": 1, "alpha": 0.02, "delta_H": 0.1},
    "environment": {"horizon": 4, "n_agents": 2},
}


def write(tmp_path, data, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(data))
    return str(p)


def test_train_smoke(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["train", "--config", write(tmp_path, SMOKE), "--out", str(out)]) == 0
    recs = read_jsonl(out / "metrics.jsonl")
    assert len(recs) == 1
    for r in recs:
        validate_metrics_record(r)
    for name in ("curves.csv", "curves.png", "report.txt", "checkpoints/final.npz"):
        assert (out / name).exists(), name
    assert "certification warnings at startup: none" in (out / "report.txt").read_text()


def test_metrics_jsonl_schema(tmp_path):
    out = tmp_path / "run"
    cfg = {**SMOKE, "trainer": {**SMOKE["trainer"], "episodes": 3},
           "output": {"dump_trajectories": True, "dump_embeddings": True, "dump_diagnostics": True,
                      "dump_attention": True, "dump_graph": True, "checkpoint_interval": 2}}
    assert main(["train", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    with open(out / "metrics.jsonl") as fh:
        lines = fh.read().splitlines()
    assert len(lines) == 3
    for i, r in enumerate(read_jsonl(out / "metrics.jsonl")):
        validate_metrics_record(r)
        assert r["episode"] == i
        assert set(METRIC_FIELDS) <= set(r)
    assert len(read_jsonl(out / "trajectories.jsonl")) == 3 * 4 * 2
    assert len(read_jsonl(out / "graph.jsonl")) == 3
    assert set(read_jsonl(out / "diagnostics.jsonl")[0]) == {"episode", "t", "agent", "R_values", "pi_ref", "AR", "tau"}
    assert (out / "checkpoints" / "episode_000002.npz").exists()


def test_report_carries_certification_warning(tmp_path):
    out = tmp_path / "run"
    cfg = {**SMOKE, "trainer": {**SMOKE["trainer"], "gamma_E": 0.97, "alpha": 0.0}}
    assert main(["train", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    text = (out / "report.txt").read_text()
    assert "WARNING: contraction condition fails" in text


def test_seed_flag_and_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "envdir"))
    assert main(["train", "--config", write(tmp_path, SMOKE), "--seed", "7"]) == 0
    assert (tmp_path / "envdir" / "metrics.jsonl").exists()
    assert "seed 7" in (tmp_path / "envdir" / "report.txt").read_text()


def test_config_error_exit_code(tmp_path, capsys):
    bad = write(tmp_path, {"trainer": {"bogus": 1}})
    assert main(["train", "--config", bad, "--out", str(tmp_path / "x")]) == 1
    assert "trainer.bogus: unknown key" in capsys.readouterr().err
    assert main(["train", "--config", write(tmp_path, SMOKE), "--episodes", "0"]) == 1
    assert main(["profile", "--config", write(tmp_path, SMOKE), "--steps", "10"]) == 1


def test_certify_exit_codes(tmp_path, capsys):
    defaults = write(tmp_path, {"environment": {"horizon": 5}})
    assert main(["certify", "--config", defaults, "--out", str(tmp_path / "c1"), "--rollout-episodes", "1"]) == 0
    assert main(["certify", "--config", defaults, "--strict", "--out", str(tmp_path / "c1")]) == 2
    text = (tmp_path / "c1" / "certify.txt").read_text()
    assert "alpha = 0.05 vs bound 0.025" in text and "required > 0.05" in text
    good = write(tmp_path, SMOKE, "good.yaml")
    assert main(["certify", "--config", good, "--strict", "--out", str(tmp_path / "c2")]) == 0


def test_nan_abort_exit_code(tmp_path, monkeypatch, capsys):
    from alignlab import trainer as trainer_mod
    from alignlab.errors import NumericalAbort

    def boom(*a, **k):
        raise NumericalAbort("non-finite gradient in policy/W1 at episode 0", {"episode": 0, "phase": "policy"})

    monkeypatch.setattr(trainer_mod.Trainer, "update_phase", boom)
    out = tmp_path / "nan"
    assert main(["train", "--config", write(tmp_path, SMOKE), "--out", str(out)]) == 3
    assert (out / "abort.json").exists()


def test_sweep_rows_and_constraint_flags(tmp_path):
    spec = {"parameter": "delta_H", "values": [0.02, 0.1], "seeds": 2, "episodes": 1,
            "base": {**SMOKE, "trainer": {k: v for k, v in SMOKE["trainer"].items() if k != "delta_H"}}}
    out = tmp_path / "sw"
    assert main(["sweep", "--spec", write(tmp_path, spec, "s.yaml"), "--out", str(out)]) == 0
    import csv
    with open(out / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    flags = {r["value"]: r["hebbian_trace_decay_passed"] for r in rows}
    assert flags == {"0.02": "False", "0.1": "True"}
    assert (out / "sweep_summary.csv").exists() and (out / "sweep.png").exists()


def test_sweep_alpha_grid_shape(tmp_path):
    from alignlab.config import sweep_from_dict
    from alignlab.runner import run_sweep
    spec = sweep_from_dict({"parameter": "alpha", "values": [0, 0.01, 0.025], "seeds": [0, 1], "episodes": 1,
                            "base": SMOKE})
    rows, summary = run_sweep(spec, str(tmp_path))
    assert len(rows) == 6 and len(summary) == 3


def test_single_cell_sweep_equals_train(tmp_path):
    from alignlab.config import config_from_dict, sweep_from_dict
    from alignlab.runner import run_cell, run_train
    cfg_data = {**SMOKE, "trainer": {**SMOKE["trainer"], "episodes": 2}}
    records, _ = run_train(config_from_dict(cfg_data), str(tmp_path / "t"), seed=3)
    spec = sweep_from_dict({"parameter": "lambda_reg", "values": [0.1], "seeds": [3], "episodes": 2,
                            "base": cfg_data, "metrics": ["mean_AR", "mean_r_ext", "forecast_loss"]})
    row = run_cell((spec.base, spec, 0.1, 3))
    for m in spec.metrics:
        assert row[m] == records[-1][m]


def test_sweep_parallel_matches_serial(tmp_path):
    from alignlab.config import sweep_from_dict
    from alignlab.runner import run_sweep
    data = {"parameter": "k", "values": [2, 4], "seeds": 1, "episodes": 1, "base": SMOKE}
    serial, _ = run_sweep(sweep_from_dict(data), str(tmp_path / "a"))
    parallel, _ = run_sweep(sweep_from_dict({**data, "workers": 2}), str(tmp_path / "b"))
    assert serial == parallel


def test_profile_command(tmp_path, capsys):
    out = tmp_path / "prof"
    assert main(["profile", "--config", write(tmp_path, SMOKE), "--out", str(out)]) == 0
    text = (out / "profile.csv").read_text()
    assert "overhead_d64_k32_A6" in text and "forecast_r2" in text
    assert (out / "profile_scaling.png").exists()


def run_cli_subprocess(args, cwd):
    return subprocess.run([sys.executable, "-m", "alignlab.cli", *args], cwd=cwd, capture_output=True, text=True)


def test_byte_identical_metrics_across_processes(tmp_path):
    cfg = write(tmp_path, {**SMOKE, "trainer": {**SMOKE["trainer"], "episodes": 3}})
    for name in ("a", "b"):
        res = run_cli_subprocess(["train", "--config", cfg, "--seed", "2", "--out", str(tmp_path / name)], tmp_path)
        assert res.returncode == 0, res.stderr
    assert (tmp_path / "a" / "metrics.jsonl").read_bytes() == (tmp_path / "b" / "metrics.jsonl").read_bytes()


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "alignlab.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("train", "sweep", "profile", "certify"):
        assert cmd in res.stdout
