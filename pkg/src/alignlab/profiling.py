"""Cost model and wall-clock measurements for the alignment machinery."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .counterfactual import EMATarget, forecast_all
from .environment import N_ACTIONS, OBS_DIM, EnvConfig
from .tensor_math import FeedForwardNet, make_rng
from .trainer import Trainer, TrainerConfig, VanillaTrainer


def predicted_overhead(d, k, n_actions):
    """``(|A| k^2 + |A| k d) / d^2``: extra cost relative to a d^2 policy/value pass."""
    return (n_actions * k * k + n_actions * k * d) / float(d * d)


def memory_estimate(k, d, d_id=8):
    """Per-agent bytes: ``(approximate 8k^2 + 12kd, itemized 4k + 4kd + 8k^2 + 8kd + 4 d_id)``."""
    approx = 8 * k * k + 12 * k * d
    itemized = 4 * k + 4 * k * d + 8 * k * k + 8 * k * d + 4 * d_id
    return approx, itemized


@dataclass
class ScalingFit:
    sizes: np.ndarray
    times: np.ndarray
    slope: float
    intercept: float
    r2: float


def linear_fit(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def time_forecast_phase(n_actions, k=32, d=OBS_DIM, read_dim=8, hidden_dim=32, steps=1000, warmup=100, repeats=3, seed=0):
    """Median-of-repeats seconds per step to forecast every action for one agent."""
    rng = make_rng(seed, "profile")
    net = EMATarget(FeedForwardNet(d + n_actions + 1 + read_dim, hidden_dim, k, rng))
    z = rng.standard_normal((steps + warmup, d))
    read = rng.standard_normal((steps + warmup, read_dim))
    actions = np.arange(n_actions)
    for t in range(warmup):
        forecast_all(net, z[t], 0.0, read[t], actions, n_actions)
    runs = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for t in range(warmup, warmup + steps):
            forecast_all(net, z[t], 0.0, read[t], actions, n_actions)
        runs.append((time.perf_counter() - t0) / steps)
    return float(np.median(runs))


def forecast_scaling(sizes=(2, 4, 8, 16), steps=1000, rounds=5, **kw):
    # rounds interleave the sizes so a transient slowdown hits one sample, not one size;
    # the fastest round per size is the least disturbed measurement
    samples = [[time_forecast_phase(a, steps=steps, repeats=1, **kw) for a in sizes] for _ in range(rounds)]
    times = np.min(np.array(samples), axis=0)
    slope, intercept, r2 = linear_fit(sizes, times)
    return ScalingFit(np.asarray(sizes), times, slope, intercept, r2)


def _rollout_steps(episodes, env_config):
    return episodes * env_config.horizon


def measure_overhead(config: TrainerConfig, env_config: EnvConfig, min_steps=1000, seed=0):
    """Rollout seconds per environment step for the full trainer and the vanilla baseline.

    Returns ``(per_component, esai_per_step, vanilla_per_step)``; the
    components come from the trainer's internal timers.
    """
    episodes = max(1, int(np.ceil(min_steps / env_config.horizon)))
    esai = Trainer(config, env_config, seed=seed, profile=True)
    esai.run_episode()  # warm-up
    esai.timers.clear()
    t0 = time.perf_counter()
    for _ in range(episodes):
        esai.run_episode()
    esai_total = time.perf_counter() - t0
    vanilla = VanillaTrainer(config, env_config, seed=seed)
    vanilla.run_episode()
    t0 = time.perf_counter()
    for _ in range(episodes):
        vanilla.run_episode()
    vanilla_total = time.perf_counter() - t0
    steps = _rollout_steps(episodes, env_config)
    per_component = {name: total / steps for name, total in sorted(esai.timers.items())}
    return per_component, esai_total / steps, vanilla_total / steps


def profile_run(config: TrainerConfig, env_config: EnvConfig, min_steps=1000, sizes=(2, 4, 8, 16), seed=0,
                reference=(64, 32, 6)):
    """All profiler rows as ``(section, name, value)`` triples plus the scaling fit."""
    rows = []
    d_ref, k_ref, a_ref = reference
    rows.append(("predicted", f"overhead_d{d_ref}_k{k_ref}_A{a_ref}", predicted_overhead(d_ref, k_ref, a_ref)))
    approx, itemized = memory_estimate(k_ref, d_ref, config.d_id)
    rows.append(("predicted", f"memory_bytes_approx_k{k_ref}_d{d_ref}", approx))
    rows.append(("predicted", f"memory_bytes_itemized_k{k_ref}_d{d_ref}", itemized))
    rows.append(("predicted", "overhead_configured", predicted_overhead(OBS_DIM, config.k, N_ACTIONS)))
    rows.append(("predicted", "memory_bytes_configured", memory_estimate(config.k, OBS_DIM, config.d_id)[0]))
    comps, esai, vanilla = measure_overhead(config, env_config, min_steps, seed)
    for name, v in comps.items():
        rows.append(("measured", f"seconds_per_step_{name}", v))
    rows.append(("measured", "seconds_per_step_esai_rollout", esai))
    rows.append(("measured", "seconds_per_step_vanilla_rollout", vanilla))
    rows.append(("measured", "overhead_ratio", esai / vanilla if vanilla > 0 else float("nan")))
    fit = forecast_scaling(sizes, steps=min_steps, k=config.k, read_dim=config.read_dim,
                           hidden_dim=config.hidden_dim, seed=seed)
    for a, t in zip(fit.sizes, fit.times):
        rows.append(("scaling", f"forecast_seconds_A{int(a)}", float(t)))
    rows.append(("scaling", "forecast_slope", fit.slope))
    rows.append(("scaling", "forecast_r2", fit.r2))
    return rows, fit
