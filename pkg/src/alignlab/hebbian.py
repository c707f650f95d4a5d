"""Decaying outer-product memory, its linear read-out and stability checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ShapeError


@dataclass
class HebbianTrace:
    H: np.ndarray
    delta_H: float = 0.02
    eta_H: float = 1e-3

    @classmethod
    def zeros(cls, k, d, delta_H=0.02, eta_H=1e-3):
        return cls(np.zeros((k, d)), delta_H, eta_H)

    @property
    def frobenius(self):
        return float(np.linalg.norm(self.H))


def update_trace(trace: HebbianTrace, E, z):
    """``H' = (1 - delta_H) H + eta_H * outer(E, z)``; returns a new trace."""
    E, z = np.ravel(E), np.ravel(z)
    if trace.H.shape != (E.size, z.size):
        raise ShapeError(f"trace {trace.H.shape} vs outer product ({E.size}, {z.size})")
    H = (1.0 - trace.delta_H) * trace.H + trace.eta_H * np.outer(E, z)
    return HebbianTrace(H, trace.delta_H, trace.eta_H)


def update_traces(H, E, Z, delta_H, eta_H):
    """Batched update for stacked traces ``H`` of shape (N, k, d)."""
    return (1.0 - delta_H) * H + eta_H * E[:, :, None] * Z[:, None, :]


class HebbianReadHead:
    """``read(H) = W_r vec(H)`` with row-major vectorization."""

    def __init__(self, read_dim, k, d, rng=None):
        self.read_dim, self.k, self.d = read_dim, k, d
        if rng is None:
            self.W_r = np.zeros((read_dim, k * d))
        else:
            s = 1.0 / np.sqrt(k * d)
            self.W_r = rng.uniform(-s, s, size=(read_dim, k * d))
        self.grad = np.zeros_like(self.W_r)

    def zero_grad(self):
        self.grad.fill(0.0)

    def __call__(self, H):
        return read_trace(self, H)

    def backward(self, H, read_grad):
        """Accumulate ``dW_r`` for reads of traces ``H`` (N, k, d) with upstream (N, read_dim)."""
        flat = np.reshape(H, (-1, self.k * self.d))
        self.grad += np.atleast_2d(read_grad).T @ flat


def read_trace(head: HebbianReadHead, trace):
    H = trace.H if isinstance(trace, HebbianTrace) else np.asarray(trace, dtype=float)
    if H.shape[-2:] != (head.k, head.d):
        raise ShapeError(f"trace shape {H.shape} incompatible with read head ({head.k}, {head.d})")
    flat = H.reshape(H.shape[:-2] + (head.k * head.d,))
    return flat @ head.W_r.T


@dataclass
class StabilityCheck:
    passed: bool
    margin: float
    required: float
    delta_H: float


def check_stability_constraint(delta_H, eta_H, C_E, C_z):
    """Mean-square stability requires ``delta_H > eta_H * C_E * C_z``."""
    required = eta_H * C_E * C_z
    return StabilityCheck(bool(delta_H > required), float(delta_H - required), float(required), float(delta_H))


def moment_bounds(E_samples, z_samples):
    """Root second moments ``(sqrt E||E||^2, sqrt E||z||^2)`` from samples."""
    E = np.reshape(E_samples, (-1, np.shape(E_samples)[-1]))
    z = np.reshape(z_samples, (-1, np.shape(z_samples)[-1]))
    return float(np.sqrt(np.mean(np.sum(E * E, axis=1)))), float(np.sqrt(np.mean(np.sum(z * z, axis=1))))


def fixed_point(eta_H, delta_H, mean_outer):
    return (eta_H / delta_H) * np.asarray(mean_outer, dtype=float)


@dataclass
class ConvergenceFit:
    slope: float
    delta_H: float
    n_fit: int
    floor: float

    @property
    def rate(self):
        """Per-step mean-square contraction factor, ideally ``(1 - delta_H)^2``."""
        return float(np.exp(self.slope))

    @property
    def time_constant(self):
        """Steps for ``||H_t - H*||_F`` to shrink by e."""
        return float(-2.0 / self.slope)

    @property
    def predicted_slope(self):
        return 2.0 * np.log(1.0 - self.delta_H)


def trace_error_curve(delta_H, eta_H, E_stream, z_stream, H0=None):
    """Mean over replicates of ``||H_t - H*||_F^2`` for t = 0..T.

    Streams have shape (reps, T, k) / (reps, T, d) (a single replicate may
    drop the leading axis). ``H*`` is estimated from the pooled sample mean
    of ``E (x) z``.
    """
    E = np.asarray(E_stream, dtype=float)
    z = np.asarray(z_stream, dtype=float)
    if E.ndim == 2:
        E, z = E[None], z[None]
    reps, T, k = E.shape
    d = z.shape[2]
    H_star = fixed_point(eta_H, delta_H, np.einsum("rtk,rtd->kd", E, z) / (reps * T))
    H = np.zeros((reps, k, d)) if H0 is None else np.broadcast_to(H0, (reps, k, d)).copy()
    err = np.empty(T + 1)
    err[0] = np.mean(np.sum((H - H_star) ** 2, axis=(1, 2)))
    for t in range(T):
        H = (1.0 - delta_H) * H + eta_H * E[:, t, :, None] * z[:, t, None, :]
        err[t + 1] = np.mean(np.sum((H - H_star) ** 2, axis=(1, 2)))
    return err, H_star


def empirical_convergence_rate(delta_H, eta_H, E_stream, z_stream, H0=None):
    """Fit the log-linear decay of the mean-square distance to the fixed point.

    The steady-state floor is estimated from the last fifth of the curve and
    subtracted; the slope is fit over the transient where the excess error
    is still well above that floor. Needs at least ``5 / delta_H`` samples.
    """
    T = np.shape(E_stream)[-2]
    if T < 5.0 / delta_H:
        raise InsufficientDataError(f"need >= {int(np.ceil(5.0 / delta_H))} samples, got {T}")
    err, _ = trace_error_curve(delta_H, eta_H, E_stream, z_stream, H0)
    tail = err[-max(2, len(err) // 5):]
    floor = float(np.mean(tail))
    excess = err - floor
    # fit only where the transient dominates the floor and its fluctuation
    threshold = max(10.0 * floor, 10.0 * float(np.std(tail)), 1e-300)
    below = np.flatnonzero(excess <= threshold)
    stop = int(below[0]) if below.size else len(excess)
    if stop < 3:
        raise InsufficientDataError("transient too short to fit a decay rate")
    t = np.arange(stop)
    slope = float(np.polyfit(t, np.log(excess[:stop]), 1)[0])
    return ConvergenceFit(slope, float(delta_H), int(stop), floor)


def geometric_decay_rate(delta_H, eta_H, E, z, steps, H0=None):
    """Per-step ratio ``||H_{t+1} - H*|| / ||H_t - H*||`` under constant inputs."""
    E, z = np.ravel(E), np.ravel(z)
    H_star = fixed_point(eta_H, delta_H, np.outer(E, z))
    H = np.zeros_like(H_star) if H0 is None else np.array(H0, dtype=float)
    ratios = []
    prev = np.linalg.norm(H - H_star)
    for _ in range(steps):
        H = (1.0 - delta_H) * H + eta_H * np.outer(E, z)
        cur = np.linalg.norm(H - H_star)
        if prev > 0:
            ratios.append(cur / prev)
        prev = cur
    return np.array(ratios), H


class HebbianWatchdog:
    """Flags traces whose Frobenius norm exceeds ``factor`` times the nominal fixed-point norm."""

    def __init__(self, nominal_norm, factor=3.0):
        self.threshold = factor * float(nominal_norm)
        self.events = []

    def check(self, episode, H_stack):
        norms = np.linalg.norm(np.reshape(H_stack, (len(H_stack), -1)), axis=1)
        fired = []
        for agent, n in enumerate(norms):
            if n > self.threshold:
                ev = {"episode": int(episode), "agent": agent, "frobenius_norm": float(n), "threshold": self.threshold}
                self.events.append(ev)
                fired.append(ev)
        return fired
