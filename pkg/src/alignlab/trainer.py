"""Training loop: rollout with counterfactual references, then serialized updates.

Per environment step, in order: attention gate -> action sample ->
counterfactual forecasts (EMA target) -> softmin reference -> env step ->
embedding update (lagged neighbors) -> Hebbian update -> regret -> reward
shaping -> store. The update phase then runs policy, value, forecaster,
embedding dynamics, EMA target, temperature, similarity, Laplacian and
identity updates, each by plain gradient descent.
"""

from __future__ import annotations

import logging
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import environment as envmod
from .attention import AttentionGate, attention_weights, gate_observation, uniform_weights
from .counterfactual import (
    EMATarget,
    TemperatureSchedule,
    alignment_regret,
    build_reference,
    ema_update,
    encode_forecast_batch,
    forecast_all,
    forecast_loss,
    importance_weight,
    topk_candidate_actions,
)
from .errors import CertificationWarning, ConfigError, NumericalAbort
from .graph import (
    TOPOLOGIES, AgentGraph, bias_penalty, build_laplacian, check_alpha, laplacian_frobenius, topology_mask,
)
from .hebbian import HebbianReadHead, HebbianWatchdog, update_traces
from .iae import IAEDynamics, certify_boundedness, encode_update_input
from .ppo import PolicyCore, composite_loss, compute_gae, shape_reward
from .tensor_math import FeedForwardNet, clip_by_global_norm, make_rng

log = logging.getLogger(__name__)

UPDATE_PHASES = (
    "policy", "value", "forecast", "iae_dynamics", "ema_target",
    "temperature", "similarity", "laplacian", "identities",
)


@dataclass
class TrainerConfig:
    # defaults from the reference hyperparameter table
    k: int = 32
    gamma_E: float = 0.9
    alpha: float = 0.05
    lambda_reg: float = 0.1
    kappa: float = 0.5
    tau_0: float = 1.0
    tau_min: float = 0.01
    K_tau_steps: float = 5e5
    tau_ema: float = 0.995
    eta_H: float = 1e-3
    delta_H: float = 0.02
    lambda_bias: float = 0.01
    clip_eps: float = 0.2
    gae_lambda: float = 0.95
    gamma: float = 0.99
    learning_rate: float = 3e-4
    batch_size: int = 2048
    # artifact defaults
    entropy_coef: float = 0.01
    lambda_H: float = 0.1
    lambda_D: float = 0.1
    top_k: int | None = None
    episodes: int = 100
    hidden_dim: int = 32
    L_g: float = 0.05
    rho_max: float = 0.95
    read_dim: int = 8
    d_id: int = 8
    beta_min: float = 0.0
    topology: str = "auto"
    attention: str = "learned"
    attention_rescale: bool = False
    regret_neighbor_squared: bool = False
    ppo_epochs: int = 1
    off_policy_weights: bool = False
    c_max: float = 2.0
    grad_clip: float = 10.0
    hebbian_design_C_E: float = 5.0
    hebbian_design_C_z: float = 10.0
    watchdog_factor: float = 3.0

    def K_tau_episodes(self, horizon):
        return self.K_tau_steps / horizon

    def validate(self, n_actions=envmod.N_ACTIONS):
        def need(cond, name, msg):
            if not cond:
                raise ConfigError(msg, f"trainer.{name}")

        for name in ("k", "batch_size", "episodes", "hidden_dim", "read_dim", "d_id", "ppo_epochs"):
            need(int(getattr(self, name)) >= 1, name, "must be >= 1")
        need(0.0 <= self.gamma_E < 1.0, "gamma_E", "must lie in [0, 1)")
        need(self.alpha >= 0, "alpha", "must be nonnegative")
        need(0.0 < self.tau_ema <= 1.0 or self.tau_ema == 0.0, "tau_ema", "must lie in [0, 1]")
        need(self.tau_0 > 0 and self.tau_min > 0, "tau_0", "temperatures must be positive")
        need(self.K_tau_steps > 0, "K_tau_steps", "must be positive")
        need(0.0 < self.delta_H < 1.0, "delta_H", "must lie in (0, 1)")
        need(self.eta_H >= 0, "eta_H", "must be nonnegative")
        need(self.L_g > 0, "L_g", "must be positive")
        need(self.learning_rate > 0, "learning_rate", "must be positive")
        need(0.0 <= self.beta_min <= 1.0, "beta_min", "must lie in [0, 1]")
        need(self.topology in TOPOLOGIES, "topology", f"must be one of {TOPOLOGIES}")
        need(self.attention in ("learned", "uniform"), "attention", "must be 'learned' or 'uniform'")
        if self.top_k is not None:
            need(1 <= self.top_k <= n_actions, "top_k", f"must lie in [1, {n_actions}]")
        for name in ("lambda_reg", "kappa", "lambda_bias", "entropy_coef", "lambda_H", "lambda_D", "c_max", "grad_clip"):
            need(getattr(self, name) >= 0, name, "must be nonnegative")


def stability_preset(**overrides):
    """Table defaults with the two stability-violating constants moved inside their bounds."""
    return TrainerConfig(**{"alpha": 0.02, "delta_H": 0.1, **overrides})


@dataclass
class TrajectoryBuffer:
    """Arrays indexed ``[t, agent, ...]`` for one episode."""

    z: np.ndarray
    z_tilde: np.ndarray
    attention: np.ndarray
    actions: np.ndarray
    logp_old: np.ndarray
    probs: np.ndarray
    values: np.ndarray
    r_ext: np.ndarray
    r_prev: np.ndarray
    harm: np.ndarray
    AR: np.ndarray
    r_shaped: np.ndarray
    E: np.ndarray
    E_next: np.ndarray
    E_ref: np.ndarray
    H: np.ndarray
    dones: np.ndarray
    diagnostics: list = field(default_factory=list)
    advantages: np.ndarray = None
    returns: np.ndarray = None

    @classmethod
    def allocate(cls, T, N, d, k, n_actions):
        z = lambda *s: np.zeros((T, N) + s)  # noqa: E731
        return cls(
            z=z(d), z_tilde=z(d), attention=z(d), actions=np.zeros((T, N), dtype=int),
            logp_old=z(), probs=z(n_actions), values=z(), r_ext=z(), r_prev=z(), harm=z(),
            AR=z(), r_shaped=z(), E=z(k), E_next=z(k), E_ref=z(k), H=z(k, d), dones=np.zeros(T),
        )

    @property
    def T(self):
        return self.z.shape[0]

    @property
    def N(self):
        return self.z.shape[1]

    def __len__(self):
        return self.T * self.N

    def flat(self, name):
        a = getattr(self, name)
        return a.reshape((-1,) + a.shape[2:])


def _check_finite(phase, episode, *grad_dicts):
    for gd in grad_dicts:
        for name, g in gd.items():
            if not np.all(np.isfinite(g)):
                raise NumericalAbort(
                    f"non-finite gradient in {phase}/{name} at episode {episode}",
                    {"episode": episode, "phase": phase, "param": name},
                )


def _descend(params, grads, lr):
    for name, g in grads.items():
        params[name] -= lr * g


class Trainer:
    """Full alignment-embedding trainer for one seed."""

    def __init__(self, config: TrainerConfig | None = None, env_config: envmod.EnvConfig | None = None,
                 seed: int = 0, profile: bool = False):
        self.config = config = config or TrainerConfig()
        self.env_config = env_config = env_config or envmod.EnvConfig()
        config.validate()
        env_config.validate()
        self.seed = int(seed)
        self.profile = profile
        self.timers = {}
        d, k, nA, N = envmod.OBS_DIM, config.k, envmod.N_ACTIONS, env_config.n_agents
        self.d, self.k, self.n_actions, self.N = d, k, nA, N
        h = config.hidden_dim

        self.core = PolicyCore(d, nA, h, make_rng(seed, "policy"), make_rng(seed, "value"), make_rng(seed, "actions"))
        self.g_net = FeedForwardNet(d + nA + 1, h, k, make_rng(seed, "g_net"), lipschitz_budget=config.L_g)
        self.forecaster = FeedForwardNet(d + nA + 1 + config.read_dim, h, k, make_rng(seed, "forecast"))
        self.target = EMATarget(self.forecaster, config.tau_ema)
        self.gate = AttentionGate(d, k, make_rng(seed, "attention"), rescale=config.attention_rescale)
        self.read_head = HebbianReadHead(config.read_dim, k, d, make_rng(seed, "read"))
        id_rng = make_rng(seed, "identities")
        phi = id_rng.standard_normal((N, config.d_id))
        phi /= np.linalg.norm(phi, axis=1, keepdims=True)
        self.graph = AgentGraph(phi, topology_mask(config.topology, N), config.beta_min)
        self.dynamics = IAEDynamics(self.g_net, config.gamma_E, config.alpha, lambda: self.graph.laplacian, nA)
        self.schedule = TemperatureSchedule(config.tau_0, config.tau_min, config.K_tau_episodes(env_config.horizon))
        self.env_seeds = make_rng(seed, "env")
        nominal = (config.eta_H / config.delta_H) * config.hebbian_design_C_E * config.hebbian_design_C_z
        self.watchdog = HebbianWatchdog(nominal, config.watchdog_factor)
        self.episode = 0
        self.phase_log = []
        self.startup_warnings = self._startup_checks()

    # ------------------------------------------------------------------ checks
    def input_bounds(self):
        """``(C_z, C_a, C_r)``: observations lie in [-1, 1]^d, one-hot actions, rewards in [0, 1]."""
        return (float(np.sqrt(self.d)), 1.0, 1.0)

    def certificate(self, warn=False):
        return certify_boundedness(self.dynamics, self.input_bounds(), warn=warn)

    def alpha_check(self):
        c = self.config
        return check_alpha(c.alpha, c.gamma_E, c.L_g, c.rho_max, self.graph.lambda_max())

    def _startup_checks(self):
        msgs = []
        a = self.alpha_check()
        if not a.passed:
            msgs.append(f"alpha={a.alpha:g} exceeds the stable bound {a.bound:.4g} (lambda_max={a.lambda_max:.4g})")
        cert = self.certificate()
        if not cert.passed:
            msgs.append(f"contraction condition fails: rho + L_g = {cert.rho + cert.lipschitz:.4f} >= 1")
        for m in msgs:
            warnings.warn(m, CertificationWarning, stacklevel=3)
        return msgs

    # ------------------------------------------------------------------ rollout
    def _tick(self, name, t0):
        if self.profile:
            now = time.perf_counter()
            self.timers[name] = self.timers.get(name, 0.0) + now - t0
            return now
        return t0

    def tau(self):
        return self.schedule(self.episode)

    def gate_inputs(self, E, Z):
        if self.config.attention == "uniform":
            alpha = uniform_weights(len(Z), self.d)
        else:
            alpha = attention_weights(self.gate, E)
        return alpha, gate_observation(alpha, Z, self.config.attention_rescale)

    def run_episode(self, diagnostics=False):
        cfg, ecfg = self.config, self.env_config
        T, N, d, k, nA = ecfg.horizon, self.N, self.d, self.k, self.n_actions
        world, Z = envmod.reset(ecfg, int(self.env_seeds.integers(2 ** 31)))
        buf = TrajectoryBuffer.allocate(T, N, d, k, nA)
        E = np.zeros((N, k))
        H = np.zeros((N, k, d))
        r_prev = np.zeros(N)
        tau = self.tau()
        neighbors = [self.graph.neighbors(i) for i in range(N)]
        tick = self._tick
        for t in range(T):
            t0 = time.perf_counter() if self.profile else 0.0
            alpha, z_tilde = self.gate_inputs(E, Z)
            t0 = tick("attention", t0)
            actions, logp, probs, values = self.core.act(z_tilde)
            t0 = tick("policy", t0)
            read = self.read_head(H)
            E_ref = np.empty((N, k))
            bundles = []
            for i in range(N):
                cands = (np.arange(nA) if cfg.top_k is None else topk_candidate_actions(probs[i], cfg.top_k))
                b = build_reference(forecast_all(self.target, Z[i], r_prev[i], read[i], cands, nA), tau)
                E_ref[i] = b.E_ref
                bundles.append(b)
            t0 = tick("forecast", t0)
            Z_next, r_ext, harm, done = envmod.step(world, actions)
            t0 = tick("env", t0)
            E_next = self.dynamics.step_all(E, Z, actions, r_ext)
            t0 = tick("iae", t0)
            H_next = update_traces(H, E, Z, cfg.delta_H, cfg.eta_H)
            t0 = tick("hebbian", t0)
            AR = np.array([
                alignment_regret(E_next[i], E_ref[i], E[neighbors[i]], cfg.kappa, cfg.regret_neighbor_squared)
                for i in range(N)
            ])
            r_shaped = shape_reward(r_ext, AR, cfg.lambda_reg)
            tick("regret", t0)

            buf.z[t], buf.z_tilde[t], buf.attention[t] = Z, z_tilde, alpha
            buf.actions[t], buf.logp_old[t], buf.probs[t], buf.values[t] = actions, logp, probs, values
            buf.r_ext[t], buf.r_prev[t], buf.harm[t] = r_ext, r_prev, harm
            buf.AR[t], buf.r_shaped[t] = AR, r_shaped
            buf.E[t], buf.E_next[t], buf.E_ref[t], buf.H[t] = E, E_next, E_ref, H
            buf.dones[t] = float(done)
            if diagnostics:
                for i, b in enumerate(bundles):
                    buf.diagnostics.append({
                        "t": t, "agent": i, "R_values": b.R.tolist(), "pi_ref": b.pi_ref.tolist(),
                        "AR": float(AR[i]), "tau": tau,
                    })
            E, H, Z, r_prev = E_next, H_next, Z_next, r_ext
        return buf

    # ------------------------------------------------------------------ updates
    def _apply(self, phase, params, grads):
        _check_finite(phase, self.episode, grads)
        clip_by_global_norm([grads], self.config.grad_clip)
        _descend(params, grads, self.config.learning_rate)

    def update_phase(self, buf: TrajectoryBuffer):
        cfg = self.config
        lr = cfg.learning_rate
        self.phase_log = []
        stats = {}
        # advantages come from shaped rewards only
        adv, ret = compute_gae(buf.r_shaped, buf.values, buf.dones, cfg.gamma, cfg.gae_lambda)
        buf.advantages, buf.returns = adv, ret
        # the clip mask would silently zero a NaN advantage, so check before it gets there
        _check_finite("policy", self.episode, {"advantages": adv})
        Z, E = buf.flat("z"), buf.flat("E")
        actions, logp_old = buf.flat("actions"), buf.flat("logp_old")
        A_flat, R_flat = adv.reshape(-1), ret.reshape(-1)
        n = len(A_flat)
        mb = min(cfg.batch_size, n)

        # policy (and the attention gate upstream of it)
        for _ in range(cfg.ppo_epochs):
            for start in range(0, n, mb):
                sl = slice(start, start + mb)
                self.core.policy.zero_grad()
                self.gate.zero_grad()
                alpha, z_tilde = self.gate_inputs(E[sl], Z[sl])
                pstats, dz = self.core.policy_gradients(
                    z_tilde, actions[sl], logp_old[sl], A_flat[sl], cfg.clip_eps, cfg.entropy_coef)
                groups = [self.core.policy.grads]
                if cfg.attention == "learned":
                    self.gate.backward(E[sl], Z[sl], alpha, dz)
                    groups.append({"W_a": self.gate.grad_W, "b_a": self.gate.grad_b})
                for g in groups:
                    _check_finite("policy", self.episode, g)
                clip_by_global_norm(groups, cfg.grad_clip)
                _descend(self.core.policy.params, self.core.policy.grads, lr)
                if cfg.attention == "learned":
                    self.gate.W_a -= lr * self.gate.grad_W
                    self.gate.b_a -= lr * self.gate.grad_b
                stats.update(pstats)
        self.phase_log.append("policy")

        z_tilde_old = buf.flat("z_tilde")
        for _ in range(cfg.ppo_epochs):
            for start in range(0, n, mb):
                sl = slice(start, start + mb)
                self.core.value.zero_grad()
                stats["value_loss"] = self.core.value_gradients(z_tilde_old[sl], R_flat[sl])
                self._apply("value", self.core.value.params, self.core.value.grads)
        self.phase_log.append("value")

        # forecaster on realized transitions, with the read head upstream
        Hs = buf.flat("H")
        weights = None
        if cfg.off_policy_weights:
            _, z_now = self.gate_inputs(E, Z)
            p_now = self.core.policy.forward(z_now, record=False)[0]
            p_now = np.exp(p_now - p_now.max(axis=1, keepdims=True))
            p_now /= p_now.sum(axis=1, keepdims=True)
            weights = importance_weight(p_now[np.arange(n), actions], np.exp(logp_old), cfg.c_max)
        self.forecaster.zero_grad()
        self.read_head.zero_grad()
        X = encode_forecast_batch(Z, actions, buf.flat("r_prev"), self.read_head(Hs), self.n_actions)
        stats["forecast_loss"], d_in = forecast_loss(self.forecaster, X, buf.flat("E_next"), weights)
        self.read_head.backward(Hs, d_in[:, self.d + self.n_actions + 1:])
        groups = [self.forecaster.grads, {"W_r": self.read_head.grad}]
        for g in groups:
            _check_finite("forecast", self.episode, g)
        clip_by_global_norm(groups, cfg.grad_clip)
        _descend(self.forecaster.params, self.forecaster.grads, lr)
        self.read_head.W_r -= lr * self.read_head.grad
        self.phase_log.append("forecast")

        # embedding dynamics through the deviation-from-reference term
        self.g_net.zero_grad()
        x = encode_update_input(Z, actions, buf.flat("r_ext"), self.n_actions)
        g_out, tape = self.g_net.forward(x)
        E_next = buf.E_next.reshape(-1, self.k)
        dev = E_next - buf.flat("E_ref")
        stats["iae_loss"] = float(np.mean(np.sum(dev * dev, axis=1)))
        self.g_net.backward(tape, 2.0 * dev / n)
        _check_finite("iae_dynamics", self.episode, self.g_net.grads)
        clip_by_global_norm([self.g_net.grads], cfg.grad_clip)
        self.g_net.apply_gradients(lr)
        self.phase_log.append("iae_dynamics")

        ema_update(self.target, self.forecaster)
        self.phase_log.append("ema_target")

        self.episode += 1
        self.phase_log.append("temperature")

        build_laplacian(self.graph)
        self.phase_log.append("similarity")
        self.phase_log.append("laplacian")

        bias_value, bias_grad = bias_penalty(self.graph, cfg.lambda_bias)
        lap_value, lap_grad = laplacian_frobenius(self.graph)
        grad_phi = {"phi": bias_grad + cfg.lambda_D * lap_grad}
        _check_finite("identities", self.episode, grad_phi)
        clip_by_global_norm([grad_phi], cfg.grad_clip)
        self.graph.identities = self.graph.identities - lr * grad_phi["phi"]
        self.phase_log.append("identities")

        bias_raw = bias_value / cfg.lambda_bias if cfg.lambda_bias > 0 else float(
            np.sum((self.graph.edge_mask * self.graph.similarity ** 2) ** 2))
        hebb_sq = float(np.mean(np.sum(buf.H ** 2, axis=(2, 3))))
        stats.update(
            bias_penalty=bias_value,
            laplacian_frobenius=lap_value,
            hebbian_sq=hebb_sq,
            composite_loss=composite_loss(stats["policy_loss"], stats["entropy"], hebb_sq, lap_value, bias_raw,
                                          cfg.entropy_coef, cfg.lambda_H, cfg.lambda_D, cfg.lambda_bias),
        )
        return stats

    # ------------------------------------------------------------------ driver
    def episode_metrics(self, buf, stats, episode_index):
        H_max_norm = np.linalg.norm(buf.H.reshape(buf.T, buf.N, -1), axis=2).max(axis=0)
        fired = self.watchdog.check(episode_index, H_max_norm[:, None])
        return {
            "episode": episode_index,
            "mean_r_ext": float(buf.r_ext.mean()),
            "mean_r_shaped": float(buf.r_shaped.mean()),
            "mean_AR": float(buf.AR.mean()),
            "mean_harm": float(buf.harm.mean()),
            "mean_norm_E": float(np.linalg.norm(buf.E_next, axis=2).mean()),
            "tau": self.schedule(episode_index),
            "forecast_loss": stats["forecast_loss"],
            "policy_loss": stats["policy_loss"],
            "entropy": stats["entropy"],
            "bias_penalty": stats["bias_penalty"],
            "hebbian_watchdog": len(fired),
            "lambda_max": self.graph.lambda_max(),
            "value_loss": stats["value_loss"],
            "iae_loss": stats["iae_loss"],
            "laplacian_frobenius": stats["laplacian_frobenius"],
            "composite_loss": stats["composite_loss"],
        }

    def train(self, episodes=None, on_episode=None, diagnostics=False):
        """Run ``episodes`` (default from config); returns the list of metric records."""
        episodes = self.config.episodes if episodes is None else episodes
        records = []
        for _ in range(episodes):
            m = self.episode
            buf = self.run_episode(diagnostics=diagnostics)
            stats = self.update_phase(buf)
            rec = self.episode_metrics(buf, stats, m)
            records.append(rec)
            if on_episode is not None:
                on_episode(rec, buf, self)
        return records

    def parameters(self):
        """Flat name -> array map of every learned parameter (checkpoint layout)."""
        out = {}
        for prefix, net in (("policy", self.core.policy), ("value", self.core.value), ("g", self.g_net),
                            ("forecast", self.forecaster), ("forecast_target", self.target.net)):
            for name, p in net.params.items():
                out[f"{prefix}/{name}"] = p
        out["attention/W_a"] = self.gate.W_a
        out["attention/b_a"] = self.gate.b_a
        out["read/W_r"] = self.read_head.W_r
        out["graph/identities"] = self.graph.identities
        return out


class VanillaTrainer:
    """Clipped policy gradient on raw observations, built from the same primitives.

    Shares network initialization and sampling streams with :class:`Trainer`
    so ablated runs can be compared action for action.
    """

    def __init__(self, config: TrainerConfig | None = None, env_config: envmod.EnvConfig | None = None, seed=0):
        self.config = config or TrainerConfig()
        self.env_config = env_config or envmod.EnvConfig()
        self.config.validate()
        self.env_config.validate()
        d, nA = envmod.OBS_DIM, envmod.N_ACTIONS
        self.core = PolicyCore(d, nA, self.config.hidden_dim,
                               make_rng(seed, "policy"), make_rng(seed, "value"), make_rng(seed, "actions"))
        self.env_seeds = make_rng(seed, "env")
        self.episode = 0

    def run_episode(self):
        ecfg = self.env_config
        T, N = ecfg.horizon, ecfg.n_agents
        world, Z = envmod.reset(ecfg, int(self.env_seeds.integers(2 ** 31)))
        out = {k: [] for k in ("z", "actions", "logp", "values", "r_ext", "dones")}
        for _ in range(T):
            actions, logp, _, values = self.core.act(Z)
            Z_next, r_ext, _, done = envmod.step(world, actions)
            for key, val in (("z", Z), ("actions", actions), ("logp", logp), ("values", values),
                             ("r_ext", r_ext), ("dones", float(done))):
                out[key].append(val)
            Z = Z_next
        return {k: np.asarray(v) for k, v in out.items()}

    def update_phase(self, traj):
        cfg = self.config
        adv, ret = compute_gae(traj["r_ext"], traj["values"], traj["dones"], cfg.gamma, cfg.gae_lambda)
        Z = traj["z"].reshape(-1, traj["z"].shape[-1])
        actions, logp = traj["actions"].reshape(-1), traj["logp"].reshape(-1)
        A_flat, R_flat = adv.reshape(-1), ret.reshape(-1)
        n = len(A_flat)
        mb = min(cfg.batch_size, n)
        for _ in range(cfg.ppo_epochs):
            for start in range(0, n, mb):
                sl = slice(start, start + mb)
                self.core.policy.zero_grad()
                self.core.policy_gradients(Z[sl], actions[sl], logp[sl], A_flat[sl], cfg.clip_eps, cfg.entropy_coef)
                _check_finite("policy", self.episode, self.core.policy.grads)
                clip_by_global_norm([self.core.policy.grads], cfg.grad_clip)
                _descend(self.core.policy.params, self.core.policy.grads, cfg.learning_rate)
        for _ in range(cfg.ppo_epochs):
            for start in range(0, n, mb):
                sl = slice(start, start + mb)
                self.core.value.zero_grad()
                self.core.value_gradients(Z[sl], R_flat[sl])
                _check_finite("value", self.episode, self.core.value.grads)
                clip_by_global_norm([self.core.value.grads], cfg.grad_clip)
                _descend(self.core.value.params, self.core.value.grads, cfg.learning_rate)
        self.episode += 1

    def train(self, episodes):
        actions = []
        for _ in range(episodes):
            traj = self.run_episode()
            actions.append(traj["actions"])
            self.update_phase(traj)
        return actions


def config_dict(config):
    return asdict(config)
