"""Internal alignment embeddings: update rule, potential and boundedness certificate."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CertificationWarning, ShapeError
from .tensor_math import FeedForwardNet, relu, spectral_norm


def encode_update_input(z, action, r, n_actions):
    """``[z; one_hot(a); r]`` for one agent, or row-stacked for arrays of agents."""
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        x = np.zeros(z.size + n_actions + 1)
        x[:z.size] = z
        x[z.size + int(action)] = 1.0
        x[-1] = r
        return x
    n, d = z.shape
    x = np.zeros((n, d + n_actions + 1))
    x[:, :d] = z
    x[np.arange(n), d + np.asarray(action, dtype=int)] = 1.0
    x[:, -1] = r
    return x


class IAEDynamics:
    """``E' = gamma_E E + g(z, a, r) - alpha * L E`` applied coordinate-wise.

    ``laplacian`` is the N x N agent operator; it is read at every step so a
    graph rebuild between episodes is picked up automatically when a
    callable is supplied.
    """

    def __init__(self, g_net: FeedForwardNet, gamma_E, alpha, laplacian, n_actions):
        if not 0.0 <= gamma_E < 1.0:
            raise ValueError("gamma_E must lie in [0, 1)")
        if alpha < 0:
            raise ValueError("alpha must be nonnegative")
        self.g_net = g_net
        self.gamma_E = float(gamma_E)
        self.alpha = float(alpha)
        self._laplacian = laplacian
        self.n_actions = n_actions
        self.k = g_net.output_dim
        self.obs_dim = g_net.input_dim - n_actions - 1
        if self.obs_dim < 1:
            raise ShapeError("g_net input_dim must equal d + |A| + 1")

    @property
    def laplacian(self):
        lap = self._laplacian() if callable(self._laplacian) else self._laplacian
        return np.asarray(lap, dtype=float)

    @property
    def lipschitz(self):
        return self.g_net.lipschitz_budget

    def operator(self):
        """The N x N matrix ``gamma_E I - alpha L``."""
        lap = self.laplacian
        return self.gamma_E * np.eye(lap.shape[0]) - self.alpha * lap

    def step_all(self, E, Z, actions, rewards, record=False):
        """Synchronous update for all agents from the frozen time-t buffer ``E``."""
        E = np.asarray(E, dtype=float)
        if E.ndim != 2 or E.shape[1] != self.k:
            raise ShapeError(f"embeddings must have shape (N, {self.k})")
        lap = self.laplacian
        if lap.shape != (E.shape[0], E.shape[0]):
            raise ShapeError("Laplacian size does not match agent count")
        x = encode_update_input(Z, actions, rewards, self.n_actions)
        g, tape = self.g_net.forward(x, record=record)
        E_next = self.gamma_E * E + g - self.alpha * (lap @ E)
        return (E_next, tape) if record else E_next


def update_embedding(dyn: IAEDynamics, E_all_prev, i, z, a, r_ext):
    """Next embedding for agent ``i`` from all agents' time-t embeddings."""
    E_all_prev = np.asarray(E_all_prev, dtype=float)
    z = np.asarray(z, dtype=float)
    if z.shape != (dyn.obs_dim,):
        raise ShapeError(f"observation must have length {dyn.obs_dim}")
    if E_all_prev.ndim != 2 or E_all_prev.shape[1] != dyn.k:
        raise ShapeError(f"embeddings must have shape (N, {dyn.k})")
    lap = dyn.laplacian
    g = dyn.g_net(encode_update_input(z, a, r_ext, dyn.n_actions))
    diffusion = lap[i] @ E_all_prev
    return dyn.gamma_E * E_all_prev[i] + g - dyn.alpha * diffusion


def alignment_potential(s_feats, E, W, v):
    """Scalar ``v . relu(W [s; E])``."""
    x = np.concatenate([np.ravel(s_feats), np.ravel(E)])
    W = np.atleast_2d(np.asarray(W, dtype=float))
    v = np.ravel(v)
    if W.shape[1] != x.size or W.shape[0] != v.size:
        raise ShapeError(f"W {W.shape} / v {v.shape} do not match input of length {x.size}")
    return float(v @ relu(W @ x))


def alignment_objective_term(E_all):
    """Per-timestep ``sum_i ||E_i||_2``."""
    E_all = np.atleast_2d(np.asarray(E_all, dtype=float))
    return float(np.linalg.norm(E_all, axis=1).sum())


@dataclass
class BoundednessCertificate:
    rho: float
    lipschitz: float
    K: float
    B0: float
    input_bounds: tuple
    empirical_max: float = 0.0
    violations: int = 0
    rho_inf: float = None

    @property
    def passed(self):
        return self.rho + self.lipschitz < 1.0

    @property
    def margin(self):
        return 1.0 - (self.rho + self.lipschitz)

    @property
    def analytic_bound(self):
        """Asymptotic ``K / (1 - rho)``; infinite when rho >= 1."""
        return self.K / (1.0 - self.rho) if self.rho < 1.0 else float("inf")

    @property
    def worst_case_bound(self):
        """``K / (1 - rho_inf)`` with ``rho_inf`` the max absolute row sum of the agent operator.

        Holds for every agent under any inputs of norm at most K, including
        adversarial ones; coincides with :attr:`analytic_bound` on regular
        graphs, where ``rho_inf == rho``.
        """
        if self.rho_inf is None or self.rho_inf >= 1.0:
            return float("inf")
        return self.K / (1.0 - self.rho_inf)

    def bound_at(self, t, initial_max=0.0):
        if self.rho >= 1.0:
            return float("inf")
        return self.rho ** t * initial_max + self.analytic_bound

    def observe(self, E_all, t=None, initial_max=0.0, tol=1e-6):
        """Track the running max of ``||E_i||_2``; count bound violations."""
        m = float(np.linalg.norm(np.atleast_2d(E_all), axis=1).max())
        self.empirical_max = max(self.empirical_max, m)
        bound = self.analytic_bound if t is None else self.bound_at(t, initial_max)
        if m > bound + tol:
            self.violations += 1
        return m

    def summary(self):
        return {
            "rho": self.rho,
            "L_g": self.lipschitz,
            "rho_plus_L_g": self.rho + self.lipschitz,
            "K": self.K,
            "B0": self.B0,
            "analytic_bound": self.analytic_bound,
            "rho_inf": self.rho_inf,
            "worst_case_bound": self.worst_case_bound,
            "empirical_max": self.empirical_max,
            "passed": self.passed,
        }


def certify_boundedness(dyn: IAEDynamics, input_bounds, B0=None, warn=True, iterations=5000):
    """Contraction certificate for the IAE recursion.

    ``input_bounds`` is ``(C_z, C_a, C_r)``. ``B0`` defaults to the measured
    ``||g(0, 0, 0)||_2``. A failing certificate emits a
    :class:`CertificationWarning` rather than raising.
    """
    C_z, C_a, C_r = (float(c) for c in input_bounds)
    L_g = dyn.lipschitz
    if L_g is None:
        raise ValueError("g_net has no Lipschitz budget; cannot certify")
    if B0 is None:
        B0 = float(np.linalg.norm(dyn.g_net(np.zeros(dyn.g_net.input_dim))))
    op = dyn.operator()
    # near-tied eigenvalues converge slowly; run to tolerance
    rho = spectral_norm(op, iterations, tol=1e-15)
    cert = BoundednessCertificate(
        rho=rho, lipschitz=float(L_g), K=L_g * (C_z + C_a + C_r) + B0, B0=B0, input_bounds=(C_z, C_a, C_r),
        rho_inf=float(np.abs(op).sum(axis=1).max()),
    )
    if warn and not cert.passed:
        warnings.warn(
            f"contraction condition fails: rho + L_g = {rho + L_g:.4f} >= 1",
            CertificationWarning,
            stacklevel=2,
        )
    return cert
