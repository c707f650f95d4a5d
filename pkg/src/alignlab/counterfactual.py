"""Counterfactual forecasts, softmin reference and alignment regret.

A forecaster predicts the next alignment embedding for every candidate
action. Actions whose forecast has a small norm get exponentially more
weight in the softmin reference; the regret measures how far the realized
embedding landed from the reference-weighted forecast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .gradcheck import numerical_gradient, relative_error
from .tensor_math import FeedForwardNet

NORM_EPS = 1e-8
C_MAX = 2.0


def encode_forecast_input(z, action, r_prev, read, n_actions):
    """``[z; one_hot(a); r; read(H)]`` for a single agent/action."""
    z, read = np.ravel(z), np.ravel(read)
    x = np.zeros(z.size + n_actions + 1 + read.size)
    x[:z.size] = z
    x[z.size + int(action)] = 1.0
    x[z.size + n_actions] = r_prev
    x[z.size + n_actions + 1:] = read
    return x


def encode_forecast_batch(Z, actions, r_prev, read, n_actions):
    """Row-stacked forecaster inputs; all arguments share the leading axis."""
    Z, read = np.atleast_2d(Z), np.atleast_2d(read)
    n, d = Z.shape
    x = np.zeros((n, d + n_actions + 1 + read.shape[1]))
    x[:, :d] = Z
    x[np.arange(n), d + np.asarray(actions, dtype=int)] = 1.0
    x[:, d + n_actions] = r_prev
    x[:, d + n_actions + 1:] = read
    return x


class EMATarget:
    """Slow copy of the forecaster used for every counterfactual query."""

    def __init__(self, online: FeedForwardNet, tau_ema=0.995):
        if not 0.0 <= tau_ema <= 1.0:
            raise DomainError("tau_ema must lie in [0, 1]")
        self.net = online.copy()
        self.tau_ema = float(tau_ema)


def ema_update(ema: EMATarget, online: FeedForwardNet):
    for name, p in online.params.items():
        t = ema.net.params[name]
        if t.shape != p.shape:
            raise ShapeError(f"EMA target {name} shape {t.shape} != online {p.shape}")
        ema.net.params[name] = ema.tau_ema * t + (1.0 - ema.tau_ema) * p
    return ema


@dataclass
class ForecastBundle:
    actions: np.ndarray
    forecasts: np.ndarray
    R: np.ndarray
    pi_ref: np.ndarray = None
    E_ref: np.ndarray = None
    tau: float = None
    inputs: np.ndarray = None


def forecast_all(net, z, r_prev, read, actions, n_actions):
    """One forward pass per candidate action through ``net`` (the EMA target in training)."""
    actions = np.asarray(actions, dtype=int)
    if actions.size == 0:
        raise DomainError("empty candidate action set")
    if isinstance(net, EMATarget):
        net = net.net
    n = actions.size
    inputs = encode_forecast_batch(np.tile(np.ravel(z), (n, 1)), actions, r_prev, np.tile(np.ravel(read), (n, 1)),
                                   n_actions)
    forecasts = net.forward_each(inputs)
    return ForecastBundle(actions, forecasts, np.linalg.norm(forecasts, axis=1), inputs=inputs)


def softmin_reference(R, tau):
    """``pi(a) ∝ exp(-R(a) / tau)``, shifted by ``min R`` for stability."""
    if tau <= 0:
        raise DomainError("temperature must be positive")
    R = np.asarray(R, dtype=float)
    w = np.exp(-(R - R.min()) / tau)
    return w / w.sum()


def expected_reference(bundle: ForecastBundle):
    """``sum_a pi_ref(a) * forecast(a)``."""
    if bundle.pi_ref is None:
        raise DomainError("bundle has no reference distribution")
    return bundle.pi_ref @ bundle.forecasts


def build_reference(bundle: ForecastBundle, tau):
    bundle.tau = float(tau)
    bundle.pi_ref = softmin_reference(bundle.R, tau)
    bundle.E_ref = expected_reference(bundle)
    return bundle


def alignment_regret(E_next, E_ref, neighbor_embeddings, kappa, squared_neighbors=False):
    """``||E_next - E_ref||^2 + kappa * mean_j ||E_j||`` over lagged neighbors.

    ``squared_neighbors`` switches the neighbor term to ``||E_j||^2``.
    """
    dev = np.ravel(E_next) - np.ravel(E_ref)
    value = float(dev @ dev)
    nb = np.asarray(neighbor_embeddings, dtype=float)
    if nb.size:
        norms = np.linalg.norm(np.atleast_2d(nb), axis=1)
        value += kappa * float(np.mean(norms ** 2 if squared_neighbors else norms))
    return value


def importance_weight(p_current, p_behavior, c_max=C_MAX):
    """Clipped ratio ``min(c_max, pi(a|z) / pi_old(a|z))``."""
    return np.minimum(c_max, np.asarray(p_current, dtype=float) / np.asarray(p_behavior, dtype=float))


def forecast_loss(net: FeedForwardNet, inputs, targets, weights=None):
    """Mean of ``w * ||h(x) - E_next||^2``; gradients accumulate into ``net.grads``.

    Targets are constants. Returns ``(loss, d_inputs)`` where ``d_inputs``
    lets callers propagate into anything upstream of the forecaster input.
    """
    X = np.atleast_2d(inputs)
    Y = np.atleast_2d(targets)
    n = X.shape[0]
    w = np.ones(n) if weights is None else np.broadcast_to(np.asarray(weights, dtype=float), (n,))
    pred, tape = net.forward(X)
    err = pred - Y
    loss = float(np.mean(w * np.sum(err * err, axis=1)))
    d_pred = (2.0 / n) * w[:, None] * err
    d_inputs = net.backward(tape, d_pred)
    return loss, d_inputs


@dataclass
class TemperatureSchedule:
    tau_0: float = 1.0
    tau_min: float = 0.01
    K_tau: float = 5e5 / 64

    def __call__(self, m):
        return max(self.tau_min, self.tau_0 * float(np.exp(-m / self.K_tau)))


def topk_candidate_actions(policy_probs, K):
    """The ``K`` most probable actions, ties to the lower index, in index order."""
    probs = np.asarray(policy_probs, dtype=float)
    if not 1 <= K <= probs.size:
        raise DomainError(f"K={K} outside [1, {probs.size}]")
    order = np.argsort(-probs, kind="stable")
    return np.sort(order[:K])


def reference_vjp(net: FeedForwardNet, bundle: ForecastBundle, upstream):
    """Accumulate ``d(upstream . E_ref)/d params`` into ``net.grads``.

    Splits the gradient into the direct forecast term ``pi(a) u`` and the
    softmin term routed through ``R(a) = ||forecast(a)||``, whose derivative
    uses an epsilon-guarded norm.
    """
    u = np.ravel(upstream)
    F, pi, tau = bundle.forecasts, bundle.pi_ref, bundle.tau
    c = F @ u
    d_R = -(pi / tau) * (c - pi @ c)
    unit = F / np.sqrt(np.sum(F * F, axis=1, keepdims=True) + NORM_EPS)
    d_F = pi[:, None] * u[None, :] + d_R[:, None] * unit
    _, tape = net.forward(bundle.inputs)
    net.backward(tape, d_F)
    return d_F


def _reference_from_params(net, inputs, tau):
    F = net.forward(inputs, record=False)[0]
    pi = softmin_reference(np.linalg.norm(F, axis=1), tau)
    return pi @ F


def reference_gradient_check(net: FeedForwardNet, bundle: ForecastBundle, h=1e-5):
    """Max relative error between analytic and finite-difference ``dE_ref/dpsi``.

    Every output coordinate of ``E_ref`` is checked against central
    differences over all forecaster parameters.
    """
    k = bundle.forecasts.shape[1]
    worst = 0.0
    for j in range(k):
        u = np.zeros(k)
        u[j] = 1.0
        net.zero_grad()
        reference_vjp(net, bundle, u)
        analytic = np.concatenate([net.grads[n].ravel() for n in sorted(net.params)])
        numeric = np.concatenate([
            numerical_gradient(lambda: _reference_from_params(net, bundle.inputs, bundle.tau)[j], net.params[n], h).ravel()
            for n in sorted(net.params)
        ])
        worst = max(worst, relative_error(analytic, numeric))
    net.zero_grad()
    return worst
