"""Run outputs: JSONL metrics, CSV tables, text reports and figures."""

from __future__ import annotations

import csv
import json
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

METRIC_FIELDS = (
    "episode", "mean_r_ext", "mean_r_shaped", "mean_AR", "mean_harm", "mean_norm_E", "tau",
    "forecast_loss", "policy_loss", "entropy", "bias_penalty", "hebbian_watchdog", "lambda_max",
)
CURVE_PANELS = (
    ("mean_r_ext", "extrinsic reward"),
    ("mean_AR", "alignment regret"),
    ("mean_harm", "harm"),
    ("mean_norm_E", "mean ||E||"),
    ("forecast_loss", "forecast loss"),
    ("tau", "temperature"),
)


def _clean(value):
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def json_line(record):
    return json.dumps({k: _clean(v) for k, v in record.items()}, sort_keys=True)


class JsonlWriter:
    """Appends one JSON object per line, flushing after each record."""

    def __init__(self, path):
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        self.path = path
        self._fh = open(path, "w")

    def write(self, record):
        self._fh.write(json_line(record) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_jsonl(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def validate_metrics_record(record):
    """Raise ``ValueError`` if a metrics record misses a field or has a non-numeric value."""
    missing = [k for k in METRIC_FIELDS if k not in record]
    if missing:
        raise ValueError(f"metrics record missing {missing}")
    for k in METRIC_FIELDS:
        if not isinstance(record[k], (int, float)) or isinstance(record[k], bool):
            raise ValueError(f"metrics field {k} is not numeric: {record[k]!r}")


def write_csv(path, rows, fieldnames):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: _clean(row.get(k, "")) for k in fieldnames})
    return path


def write_curves(path, records):
    fields = list(METRIC_FIELDS) + sorted({k for r in records for k in r} - set(METRIC_FIELDS))
    return write_csv(path, records, fields)


def plot_curves(path, records, title=None):
    episodes = [r["episode"] for r in records]
    fig, axes = plt.subplots(2, 3, figsize=(11, 6), sharex=True)
    for ax, (key, label) in zip(axes.ravel(), CURVE_PANELS):
        ax.plot(episodes, [r[key] for r in records], lw=1.2)
        ax.set_title(label, fontsize=10)
        ax.grid(alpha=0.3)
    for ax in axes[-1]:
        ax.set_xlabel("episode")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def plot_sweep(path, parameter, summary, metric="mean_AR"):
    """Cell means with one-standard-deviation bars; ``summary`` rows hold ``label``, ``<metric>_mean/_std``."""
    labels = [row["label"] for row in summary]
    means = np.array([row[f"{metric}_mean"] for row in summary], dtype=float)
    stds = np.array([row[f"{metric}_std"] for row in summary], dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    x = np.arange(len(labels))
    ax.errorbar(x, means, yerr=stds, fmt="o-", capsize=3)
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_xlabel(parameter)
    ax.set_ylabel(metric)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def plot_scaling(path, fit):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(fit.sizes, np.asarray(fit.times) * 1e6, "o", label="measured")
    xs = np.linspace(0, max(fit.sizes), 50)
    ax.plot(xs, (fit.slope * xs + fit.intercept) * 1e6, "-", label=f"linear fit, R^2 = {fit.r2:.3f}")
    ax.set_xlabel("candidate actions")
    ax.set_ylabel("forecast time per step (us)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def render_train_report(records, certification, startup_warnings, watchdog_events, seed, checkpoints):
    lines = [f"training report (seed {seed}, {len(records)} episodes)", ""]
    lines.append(certification.render().rstrip())
    lines.append("")
    if startup_warnings:
        lines.append("certification warnings at startup:")
        lines += [f"  WARNING: {w}" for w in startup_warnings]
    else:
        lines.append("certification warnings at startup: none")
    lines.append("")
    if watchdog_events:
        lines.append(f"hebbian watchdog: {len(watchdog_events)} event(s)")
        for ev in watchdog_events[:20]:
            lines.append(f"  episode {ev['episode']} agent {ev['agent']}: ||H||_F = {ev['frobenius_norm']:.4g} "
                         f"> {ev['threshold']:.4g}")
    else:
        lines.append("hebbian watchdog: no events")
    if records:
        lines.append("")
        n = max(1, len(records) // 10)
        for key in ("mean_r_ext", "mean_AR", "mean_harm", "mean_norm_E", "forecast_loss"):
            first = np.mean([r[key] for r in records[:n]])
            last = np.mean([r[key] for r in records[-n:]])
            lines.append(f"{key:>14}: first {n} ep {first:.5g} -> last {n} ep {last:.5g}")
    if checkpoints:
        lines.append("")
        lines.append("checkpoints: " + ", ".join(os.path.basename(c) for c in checkpoints))
    return "\n".join(lines) + "\n"
