"""Run orchestration shared by the command line: train, sweep, profile, certify."""

from __future__ import annotations

import dataclasses
import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import report
from .certify import certify
from .checkpoint import save_checkpoint
from .config import RunConfig, SweepSpec
from .errors import CertificationWarning
from .profiling import profile_run
from .trainer import Trainer

log = logging.getLogger(__name__)


def run_train(cfg: RunConfig, out_dir=None, seed=None):
    """Train one seed and write metrics, curves, figures, report and checkpoints to ``out_dir``."""
    out_dir = out_dir or cfg.output_dir()
    seed = cfg.seed if seed is None else seed
    os.makedirs(out_dir, exist_ok=True)
    oc = cfg.output
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always", CertificationWarning)
        trainer = Trainer(cfg.trainer, cfg.environment, seed=seed)
    for w in trainer.startup_warnings:
        log.warning("certification: %s", w)
    certification = certify(cfg.trainer, cfg.environment, seed=seed, rollout_episodes=0)

    ckpt_dir = os.path.join(out_dir, "checkpoints")
    checkpoints = []
    dumps = {}
    for flag, name in (("dump_trajectories", "trajectories"), ("dump_embeddings", "embeddings"),
                       ("dump_diagnostics", "diagnostics"), ("dump_attention", "attention"),
                       ("dump_graph", "graph")):
        if getattr(oc, flag):
            dumps[name] = report.JsonlWriter(os.path.join(out_dir, f"{name}.jsonl"))

    def on_episode(rec, buf, tr):
        metrics.write(rec)
        m = rec["episode"]
        if "trajectories" in dumps:
            for t in range(buf.T):
                for i in range(buf.N):
                    dumps["trajectories"].write({
                        "episode": m, "t": t, "agent": i, "z": buf.z[t, i].tolist(), "a": int(buf.actions[t, i]),
                        "r_ext": buf.r_ext[t, i], "harm": buf.harm[t, i], "r_shaped": buf.r_shaped[t, i],
                    })
        if "embeddings" in dumps:
            for t in range(buf.T):
                for i in range(buf.N):
                    dumps["embeddings"].write({"episode": m, "t": t, "agent": i,
                                               "norm_E": float(np.linalg.norm(buf.E_next[t, i])),
                                               "E": buf.E_next[t, i].tolist()})
        if "diagnostics" in dumps:
            for d in buf.diagnostics:
                dumps["diagnostics"].write({"episode": m, **d})
        if "attention" in dumps:
            for t in range(buf.T):
                for i in range(buf.N):
                    dumps["attention"].write({"episode": m, "t": t, "agent": i, "alpha": buf.attention[t, i].tolist()})
        if "graph" in dumps:
            g = tr.graph
            dumps["graph"].write({"episode": m, "similarity": g.similarity.tolist(), "lambda_max": g.lambda_max(),
                                  "n_edges": g.n_edges, "bias_penalty_value": rec["bias_penalty"]})
        if oc.checkpoint_interval and (m + 1) % oc.checkpoint_interval == 0:
            checkpoints.append(save_checkpoint(tr, os.path.join(ckpt_dir, f"episode_{m + 1:06d}.npz")))

    metrics = report.JsonlWriter(os.path.join(out_dir, "metrics.jsonl"))
    try:
        records = trainer.train(on_episode=on_episode, diagnostics="diagnostics" in dumps)
    finally:
        metrics.close()
        for w in dumps.values():
            w.close()
    checkpoints.append(save_checkpoint(trainer, os.path.join(ckpt_dir, "final.npz")))
    report.write_curves(os.path.join(out_dir, "curves.csv"), records)
    if oc.figures and records:
        report.plot_curves(os.path.join(out_dir, "curves.png"), records, title=f"seed {seed}")
    text = report.render_train_report(records, certification, trainer.startup_warnings,
                                      trainer.watchdog.events, seed, checkpoints)
    with open(os.path.join(out_dir, "report.txt"), "w") as fh:
        fh.write(text)
    return records, trainer


def _cell_config(base: RunConfig, spec: SweepSpec, value):
    trainer = dataclasses.replace(base.trainer, episodes=spec.episodes, **spec.cell_overrides(value))
    trainer.validate()
    return trainer


def run_cell(args):
    """One (cell, seed) sub-run; returns the sweep row. Module-level so worker processes can pickle it."""
    base, spec, value, seed = args
    tcfg = _cell_config(base, spec, value)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CertificationWarning)
        trainer = Trainer(tcfg, base.environment, seed=seed)
    records = trainer.train()
    cert = certify(tcfg, base.environment, seed=seed, rollout_episodes=0)
    row = {"parameter": spec.parameter, "value": spec.cell_label(value), "seed": seed, "episodes": spec.episodes}
    for c in cert.conditions:
        row[c.name.replace(" ", "_") + "_passed"] = c.passed
    final = records[-1]
    for m in spec.metrics:
        row[m] = final[m]
    return row


def run_sweep(spec: SweepSpec, out_dir=None):
    out_dir = out_dir or spec.base.output_dir()
    os.makedirs(out_dir, exist_ok=True)
    jobs = [(spec.base, spec, v, s) for v in spec.values for s in spec.seeds]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(run_cell, jobs))
    else:
        rows = [run_cell(j) for j in jobs]
    fields = list(rows[0].keys())
    report.write_csv(os.path.join(out_dir, "sweep.csv"), rows, fields)
    summary = []
    for v in spec.values:
        label = spec.cell_label(v)
        cell = [r for r in rows if r["value"] == label]
        srow = {"parameter": spec.parameter, "label": label, "n_seeds": len(cell)}
        for key in fields:
            if key.endswith("_passed"):
                srow[key] = all(r[key] for r in cell)
        for m in spec.metrics:
            vals = np.array([r[m] for r in cell], dtype=float)
            srow[f"{m}_mean"] = float(vals.mean())
            srow[f"{m}_std"] = float(vals.std())
        summary.append(srow)
    report.write_csv(os.path.join(out_dir, "sweep_summary.csv"), summary, list(summary[0].keys()))
    if spec.base.output.figures and "mean_AR" in spec.metrics:
        report.plot_sweep(os.path.join(out_dir, "sweep.png"), spec.parameter, summary, "mean_AR")
    return rows, summary


def run_profile(cfg: RunConfig, out_dir=None, min_steps=1000):
    out_dir = out_dir or cfg.output_dir()
    os.makedirs(out_dir, exist_ok=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CertificationWarning)
        rows, fit = profile_run(cfg.trainer, cfg.environment, min_steps=min_steps, seed=cfg.seed)
    table = [{"section": s, "name": n, "value": v} for s, n, v in rows]
    report.write_csv(os.path.join(out_dir, "profile.csv"), table, ["section", "name", "value"])
    if cfg.output.figures:
        report.plot_scaling(os.path.join(out_dir, "profile_scaling.png"), fit)
    return table, fit


def run_certify(cfg: RunConfig, out_dir=None, rollout_episodes=2):
    out_dir = out_dir or cfg.output_dir()
    os.makedirs(out_dir, exist_ok=True)
    result = certify(cfg.trainer, cfg.environment, seed=cfg.seed, rollout_episodes=rollout_episodes)
    with open(os.path.join(out_dir, "certify.txt"), "w") as fh:
        fh.write(result.render())
    return result
