"""Clipped policy-gradient pieces: reward shaping, GAE, surrogate, entropy."""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .tensor_math import FeedForwardNet, log_softmax, softmax


def shape_reward(r_ext, AR, lambda_reg):
    """``r' = r_ext - lambda_reg * AR``."""
    return np.asarray(r_ext, dtype=float) - lambda_reg * np.asarray(AR, dtype=float)


def compute_gae(rewards, values, dones, gamma, gae_lambda):
    """Advantages and value targets along the leading (time) axis.

    ``values[t]`` is ``V(z_t)``; the value after the last step is taken as 0
    (episode end), and ``dones[t]`` cuts the bootstrap after step ``t``.
    """
    rewards = np.asarray(rewards, dtype=float)
    if rewards.shape[0] == 0:
        raise DomainError("empty trajectory")
    values = np.asarray(values, dtype=float)
    notdone = 1.0 - np.asarray(dones, dtype=float)
    T = rewards.shape[0]
    adv = np.zeros_like(rewards)
    last = np.zeros_like(rewards[0])
    for t in range(T - 1, -1, -1):
        next_v = values[t + 1] if t + 1 < T else np.zeros_like(values[t])
        delta = rewards[t] + gamma * next_v * notdone[t] - values[t]
        last = delta + gamma * gae_lambda * notdone[t] * last
        adv[t] = last
    return adv, adv + values


def ppo_clip_surrogate(logits, actions, logp_old, advantages, clip_eps):
    """Mean of ``min(ratio * A, clip(ratio) * A)`` and its gradient w.r.t. ``logits``.

    This is the quantity the optimizer ascends.
    """
    logits = np.atleast_2d(logits)
    n = logits.shape[0]
    idx = np.arange(n)
    logp_all = log_softmax(logits)
    logp = logp_all[idx, actions]
    ratio = np.exp(logp - logp_old)
    A = np.asarray(advantages, dtype=float)
    unclipped = ratio * A
    clipped = np.clip(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * A
    surrogate = float(np.mean(np.minimum(unclipped, clipped)))
    # gradient flows only where the unclipped branch attains the min
    active = unclipped <= clipped
    d_logp = np.where(active, ratio * A, 0.0) / n
    probs = np.exp(logp_all)
    d_logits = -probs * d_logp[:, None]
    d_logits[idx, actions] += d_logp
    return surrogate, d_logits


def entropy(logits):
    """Mean policy entropy and its gradient w.r.t. ``logits``."""
    logits = np.atleast_2d(logits)
    logp = log_softmax(logits)
    p = np.exp(logp)
    H = -np.sum(p * logp, axis=1)
    d_logits = -p * (logp + H[:, None]) / logits.shape[0]
    return float(np.mean(H)), d_logits


def composite_loss(policy_loss, entropy_value, hebbian_sq, laplacian_sq, bias_raw,
                   beta, lambda_H, lambda_D, lambda_bias):
    """``L_pi - beta H + lambda_H ||H||^2 + lambda_D ||L||_F^2 + lambda_bias ||A*S||_F^2``.

    ``policy_loss`` is the negated clipped surrogate, so the whole expression
    is minimized.
    """
    return (policy_loss - beta * entropy_value + lambda_H * hebbian_sq
            + lambda_D * laplacian_sq + lambda_bias * bias_raw)


def sample_actions(probs, rng):
    """Inverse-CDF sampling, one uniform draw per row."""
    probs = np.atleast_2d(probs)
    u = rng.random(probs.shape[0])
    cdf = np.cumsum(probs, axis=1)
    a = (cdf < u[:, None]).sum(axis=1)
    return np.minimum(a, probs.shape[1] - 1)


class PolicyCore:
    """Policy and value networks plus the action sampler shared by all trainers."""

    def __init__(self, obs_dim, n_actions, hidden_dim, policy_rng, value_rng, action_rng):
        self.policy = FeedForwardNet(obs_dim, hidden_dim, n_actions, policy_rng)
        self.value = FeedForwardNet(obs_dim, hidden_dim, 1, value_rng)
        self.action_rng = action_rng
        self.n_actions = n_actions

    def act(self, z_tilde):
        logits = self.policy(z_tilde)
        probs = softmax(logits)
        actions = sample_actions(probs, self.action_rng)
        logp = np.log(probs[np.arange(len(actions)), actions])
        values = self.value(z_tilde)[:, 0]
        return actions, logp, probs, values

    def policy_gradients(self, z_tilde, actions, logp_old, advantages, clip_eps, entropy_coef):
        """Accumulate policy grads for ``-(surrogate + beta H)``; return stats and ``dL/dz_tilde``."""
        logits, tape = self.policy.forward(z_tilde)
        surrogate, d_surr = ppo_clip_surrogate(logits, actions, logp_old, advantages, clip_eps)
        ent, d_ent = entropy(logits)
        d_logits = -(d_surr + entropy_coef * d_ent)
        dz = self.policy.backward(tape, d_logits)
        return {"surrogate": surrogate, "policy_loss": -surrogate, "entropy": ent}, dz

    def value_gradients(self, z_tilde, returns):
        v, tape = self.value.forward(z_tilde)
        err = v[:, 0] - returns
        self.value.backward(tape, (err / len(err))[:, None])
        return 0.5 * float(np.mean(err * err))
