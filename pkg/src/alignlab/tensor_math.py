"""Dense linear algebra and a two-layer rectifier network with manual backprop.

Every learned function in the package (IAE update, forecaster, policy,
value) is a :class:`FeedForwardNet`. Matrices are plain ``float64`` numpy
arrays; nothing here depends on an autodiff framework.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, StateError

PARAM_NAMES = ("W1", "b1", "W2", "b2")


def make_rng(seed: int, stream: str) -> np.random.Generator:
    """Independent generator for a named stream derived from the run seed.

    Streams are keyed by name so adding a network does not perturb the
    initialization of the others.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(stream.encode())]))


def relu(x):
    return np.maximum(x, 0.0)


def softmax(logits):
    """Max-shifted softmax over the last axis."""
    logits = np.asarray(logits, dtype=float)
    if logits.size == 0 or logits.shape[-1] == 0:
        raise ShapeError("softmax of an empty vector")
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits):
    logits = np.asarray(logits, dtype=float)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def one_hot(index, n):
    v = np.zeros(n)
    v[index] = 1.0
    return v


def spectral_norm(m, iterations: int = 50, seed: int = 0, tol: float = 0.0) -> float:
    """Largest singular value of ``m`` by power iteration on ``m.T @ m``.

    The start vector is drawn from a fixed seed so the estimate is
    reproducible; it is nondecreasing in ``iterations``. With ``tol > 0``
    iteration stops once the estimate changes by less than ``tol``
    (relative).
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if not np.any(m):
        return 0.0
    v = np.random.default_rng(seed).standard_normal(m.shape[1])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(iterations):
        w = m.T @ (m @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if tol > 0.0:
            if abs(nrm - prev) <= tol * nrm:
                break
            prev = nrm
    return float(np.linalg.norm(m @ v))


@dataclass
class Tape:
    """Activations recorded by one forward pass, consumed by ``backward``."""

    x: np.ndarray
    pre: np.ndarray
    hidden: np.ndarray
    squeeze: bool


class FeedForwardNet:
    """``W2 relu(W1 x + b1) + b2`` with optional Lipschitz budget.

    Accepts a single input vector or a batch of row vectors. Gradients from
    :meth:`backward` accumulate into :attr:`grads` until :meth:`zero_grad`.
    """

    def __init__(self, input_dim, hidden_dim, output_dim, rng=None, lipschitz_budget=None):
        self.input_dim = int(input_dim)
        self.hidden_dim = int(hidden_dim)
        self.output_dim = int(output_dim)
        self.lipschitz_budget = lipschitz_budget
        if rng is None:
            self.params = {
                "W1": np.zeros((hidden_dim, input_dim)),
                "b1": np.zeros(hidden_dim),
                "W2": np.zeros((output_dim, hidden_dim)),
                "b2": np.zeros(output_dim),
            }
        else:
            s1 = 1.0 / np.sqrt(input_dim)
            s2 = 1.0 / np.sqrt(hidden_dim)
            self.params = {
                "W1": rng.uniform(-s1, s1, size=(hidden_dim, input_dim)),
                "b1": np.zeros(hidden_dim),
                "W2": rng.uniform(-s2, s2, size=(output_dim, hidden_dim)),
                "b2": np.zeros(output_dim),
            }
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}
        if lipschitz_budget is not None:
            project_lipschitz(self)

    def __repr__(self):
        return f"FeedForwardNet({self.input_dim}->{self.hidden_dim}->{self.output_dim})"

    @property
    def n_params(self):
        return sum(p.size for p in self.params.values())

    def copy(self):
        clone = FeedForwardNet.__new__(FeedForwardNet)
        clone.input_dim, clone.hidden_dim, clone.output_dim = self.input_dim, self.hidden_dim, self.output_dim
        clone.lipschitz_budget = self.lipschitz_budget
        clone.params = {k: v.copy() for k, v in self.params.items()}
        clone.grads = {k: np.zeros_like(v) for k, v in self.params.items()}
        return clone

    def zero_grad(self):
        for g in self.grads.values():
            g.fill(0.0)

    def forward(self, x, record=True):
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        xb = np.atleast_2d(x)
        if xb.shape[-1] != self.input_dim:
            raise ShapeError(f"expected input of length {self.input_dim}, got {xb.shape[-1]}")
        p = self.params
        pre = xb @ p["W1"].T + p["b1"]
        hidden = relu(pre)
        out = hidden @ p["W2"].T + p["b2"]
        tape = Tape(xb, pre, hidden, squeeze) if record else None
        return (out[0] if squeeze else out), tape

    def __call__(self, x):
        return self.forward(x, record=False)[0]

    def forward_each(self, X):
        """Independent single-row passes over the rows of ``X`` (no tape).

        Same arithmetic as calling the net once per row, without the per-call
        validation overhead.
        """
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise ShapeError(f"expected rows of length {self.input_dim}, got shape {X.shape}")
        p = self.params
        W1t, b1, W2t, b2 = p["W1"].T, p["b1"], p["W2"].T, p["b2"]
        out = np.empty((X.shape[0], self.output_dim))
        for j in range(X.shape[0]):
            out[j] = (relu(X[j:j + 1] @ W1t + b1) @ W2t + b2)[0]
        return out

    def backward(self, tape, output_grad):
        """Accumulate parameter gradients; return the gradient w.r.t. the input."""
        if tape is None:
            raise StateError("backward called without a recorded forward pass")
        dy = np.atleast_2d(np.asarray(output_grad, dtype=float))
        if dy.shape != (tape.x.shape[0], self.output_dim):
            raise ShapeError(f"output_grad shape {dy.shape} does not match forward output")
        p, g = self.params, self.grads
        g["W2"] += dy.T @ tape.hidden
        g["b2"] += dy.sum(axis=0)
        dh = (dy @ p["W2"]) * (tape.pre > 0)
        g["W1"] += dh.T @ tape.x
        g["b1"] += dh.sum(axis=0)
        dx = dh @ p["W1"]
        return dx[0] if tape.squeeze else dx

    def apply_gradients(self, lr, grads=None):
        grads = self.grads if grads is None else grads
        for k in PARAM_NAMES:
            self.params[k] -= lr * grads[k]
        if self.lipschitz_budget is not None:
            project_lipschitz(self)


def project_lipschitz(net: FeedForwardNet, iterations: int = 2000, tol: float = 1e-14) -> FeedForwardNet:
    """Rescale each weight matrix so its spectral norm is at most sqrt(L_g).

    Uses ``W * sqrt(L_g) / max(||W||_2, sqrt(L_g))``: layers already within
    budget are left untouched. Biases are not constrained. Operates in place.
    The norm estimate runs to convergence: a truncated power iteration
    underestimates when the top singular values nearly tie, which would
    leave the layer over budget.
    """
    if net.lipschitz_budget is None:
        return net
    cap = np.sqrt(net.lipschitz_budget)
    for name in ("W1", "W2"):
        w = net.params[name]
        nrm = spectral_norm(w, iterations, tol=tol)
        if nrm > cap:
            net.params[name] = w * (cap / nrm)
    return net


def global_norm(*grad_dicts):
    return float(np.sqrt(sum(np.sum(g * g) for d in grad_dicts for g in d.values())))


def clip_by_global_norm(grad_dicts, max_norm):
    """Scale every array in ``grad_dicts`` (in place) so the joint norm <= max_norm."""
    nrm = global_norm(*grad_dicts)
    if nrm > max_norm:
        scale = max_norm / nrm
        for d in grad_dicts:
            for g in d.values():
                g *= scale
    return nrm
