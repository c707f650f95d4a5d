"""Embedding-conditioned softmax gate over observation features."""

from __future__ import annotations

import numpy as np

from .errors import ShapeError
from .tensor_math import softmax


class AttentionGate:
    """``alpha = softmax(W_a E + b_a)`` with ``W_a`` of shape (d, k)."""

    def __init__(self, d, k, rng=None, rescale=False):
        self.d, self.k = d, k
        self.rescale = rescale
        if rng is None:
            self.W_a = np.zeros((d, k))
        else:
            s = 1.0 / np.sqrt(k)
            self.W_a = rng.uniform(-s, s, size=(d, k))
        self.b_a = np.zeros(d)
        self.zero_grad()

    def zero_grad(self):
        self.grad_W = np.zeros_like(self.W_a)
        self.grad_b = np.zeros_like(self.b_a)

    def backward(self, E, z, alpha, gated_grad):
        """Accumulate parameter gradients from ``dL/dz_tilde``; return ``dL/dE``."""
        E, z, alpha = np.atleast_2d(E), np.atleast_2d(z), np.atleast_2d(alpha)
        dz = np.atleast_2d(gated_grad)
        d_alpha = dz * z * (self.d if self.rescale else 1.0)
        d_logits = alpha * (d_alpha - np.sum(alpha * d_alpha, axis=1, keepdims=True))
        self.grad_W += d_logits.T @ E
        self.grad_b += d_logits.sum(axis=0)
        return d_logits @ self.W_a


def attention_weights(gate: AttentionGate, E):
    E = np.asarray(E, dtype=float)
    if E.shape[-1] != gate.k:
        raise ShapeError(f"embedding length {E.shape[-1]} != gate k={gate.k}")
    return softmax(E @ gate.W_a.T + gate.b_a)


def gate_observation(alpha, z, rescale=False):
    """Elementwise ``alpha * z``, optionally multiplied by the feature count."""
    alpha, z = np.asarray(alpha, dtype=float), np.asarray(z, dtype=float)
    if alpha.shape != z.shape:
        raise ShapeError(f"attention {alpha.shape} vs observation {z.shape}")
    gated = alpha * z
    return gated * z.shape[-1] if rescale else gated


def uniform_weights(n, d):
    return np.full((n, d), 1.0 / d)
