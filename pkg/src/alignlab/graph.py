"""Agent communication graph built from cosine similarity of identity vectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

import numpy as np

from .errors import DomainError
from .tensor_math import spectral_norm


def similarity(phi_i, phi_j):
    """``max(0, cos(phi_i, phi_j))``; zero if either vector is zero."""
    ni, nj = np.linalg.norm(phi_i), np.linalg.norm(phi_j)
    if ni == 0.0 or nj == 0.0:
        return 0.0
    return max(0.0, float(np.dot(phi_i, phi_j) / (ni * nj)))


def _cosine_matrix(identities):
    norms = np.linalg.norm(identities, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = identities / safe[:, None]
    cos = unit @ unit.T
    cos[norms == 0, :] = 0.0
    cos[:, norms == 0] = 0.0
    return cos, norms


def similarity_matrix(identities):
    cos, _ = _cosine_matrix(np.asarray(identities, dtype=float))
    S = np.clip(cos, 0.0, 1.0)
    return 0.5 * (S + S.T)


def default_topology(n):
    """Complete graph for up to 8 agents, ring beyond that."""
    if n <= 8:
        mask = np.ones((n, n)) - np.eye(n)
    else:
        mask = np.zeros((n, n))
        idx = np.arange(n)
        mask[idx, (idx + 1) % n] = 1.0
        mask[idx, (idx - 1) % n] = 1.0
    return mask


TOPOLOGIES = ("auto", "complete", "ring", "empty")


def topology_mask(kind, n):
    if kind == "auto":
        return default_topology(n)
    if kind == "complete":
        return np.ones((n, n)) - np.eye(n)
    if kind == "ring":
        mask = np.zeros((n, n))
        if n > 1:
            idx = np.arange(n)
            mask[idx, (idx + 1) % n] = 1.0
            mask[idx, (idx - 1) % n] = 1.0
            np.fill_diagonal(mask, 0.0)
        return mask
    if kind == "empty":
        return np.zeros((n, n))
    raise DomainError(f"unknown topology {kind!r}; expected one of {TOPOLOGIES}")


def normalized_laplacian(A):
    """``D^-1/2 (D - A) D^-1/2`` with zero rows/columns for isolated nodes."""
    A = np.asarray(A, dtype=float)
    deg = A.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    L = np.diag(nz.astype(float)) - inv_sqrt[:, None] * A * inv_sqrt[None, :]
    return 0.5 * (L + L.T)


@dataclass
class AgentGraph:
    identities: np.ndarray
    topology_mask: np.ndarray
    beta_min: float = 0.0
    similarity: np.ndarray = field(init=False)
    adjacency: np.ndarray = field(init=False)
    laplacian: np.ndarray = field(init=False)

    def __post_init__(self):
        self.identities = np.asarray(self.identities, dtype=float)
        mask = np.asarray(self.topology_mask, dtype=float).copy()
        np.fill_diagonal(mask, 0.0)
        self.topology_mask = mask
        build_laplacian(self)

    @classmethod
    def random(cls, n, d_id=8, rng=None, topology=None, beta_min=0.0):
        rng = np.random.default_rng(0) if rng is None else rng
        phi = rng.standard_normal((n, d_id))
        phi /= np.linalg.norm(phi, axis=1, keepdims=True)
        return cls(phi, default_topology(n) if topology is None else topology, beta_min)

    @property
    def n(self):
        return self.identities.shape[0]

    @property
    def edge_mask(self):
        """Topology mask with pruned (below ``beta_min``) edges removed."""
        return self.topology_mask * (self.similarity >= self.beta_min)

    @property
    def n_edges(self):
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    def neighbors(self, i):
        return np.flatnonzero(self.adjacency[i] > 0)

    def lambda_max(self):
        if self.n == 1:
            return 0.0
        return float(np.linalg.eigvalsh(self.laplacian)[-1])


def build_laplacian(graph: AgentGraph):
    """Refresh similarity, adjacency and Laplacian from the identities."""
    graph.similarity = similarity_matrix(graph.identities)
    graph.adjacency = graph.edge_mask * graph.similarity
    graph.laplacian = normalized_laplacian(graph.adjacency)
    return graph.laplacian


def prune_sparse(graph: AgentGraph, beta_min):
    """Drop edges whose similarity is below ``beta_min`` and rebuild."""
    if not 0.0 <= beta_min <= 1.0:
        raise ValueError("beta_min must lie in [0, 1]")
    graph.beta_min = float(beta_min)
    build_laplacian(graph)
    return graph


def max_stable_alpha(gamma_E, L_g, rho_max, lambda_max):
    """Diffusion-strength ceiling ``min{(gamma_E + rho_max)/2, (1 - L_g - gamma_E)/lambda_max}``.

    A nonpositive result means no positive alpha is certified. With
    ``lambda_max == 0`` (no edges) the second term is unbounded. Evaluated
    in decimal on the shortest repr of each input, so decimal config
    constants give the decimal answer (0.9, 0.05, 0.95, 2 -> 0.025 exactly).
    """
    g, lg, rm, lam = (Decimal(repr(float(v))) for v in (gamma_E, L_g, rho_max, lambda_max))
    first = (g + rm) / 2
    slack = 1 - lg - g
    if lam <= 0:
        return float(min(first, slack)) if slack <= 0 else float(first)
    return float(min(first, slack / lam))


@dataclass
class AlphaCheck:
    alpha: float
    bound: float
    lambda_max: float

    @property
    def passed(self):
        return self.bound > 0 and self.alpha < self.bound


def check_alpha(alpha, gamma_E, L_g, rho_max, lambda_max):
    return AlphaCheck(float(alpha), max_stable_alpha(gamma_E, L_g, rho_max, lambda_max), float(lambda_max))


def _similarity_vjp(graph: AgentGraph, dS):
    """Pull a gradient on the (ordered-pair) similarity entries back onto identities."""
    phi = graph.identities
    cos, norms = _cosine_matrix(phi)
    active = (cos > 0) & (norms[:, None] > 0) & (norms[None, :] > 0)
    np.fill_diagonal(active, False)
    G = np.where(active, dS, 0.0)
    G = G + G.T  # S_ij and S_ji share one cosine
    safe = np.where(norms > 0, norms, 1.0)
    unit = phi / safe[:, None]
    # d cos_ij / d phi_i = (u_j - cos_ij u_i) / |phi_i|
    return (G @ unit - (G * cos).sum(axis=1, keepdims=True) * unit) / safe[:, None]


def bias_penalty(graph: AgentGraph, lambda_bias):
    """``lambda_bias * ||A_tilde * S||_F^2`` and its gradient w.r.t. the identities."""
    S, m = graph.similarity, graph.edge_mask
    value = lambda_bias * float(np.sum((m * S * S) ** 2))
    dS = lambda_bias * 4.0 * m * S ** 3
    return value, _similarity_vjp(graph, dS)


def laplacian_frobenius(graph: AgentGraph):
    """``||L||_F^2`` and its gradient w.r.t. the identities through the Laplacian build."""
    A, m = graph.adjacency, graph.edge_mask
    value = float(np.sum(graph.laplacian ** 2))
    deg = A.sum(axis=1)
    nz = deg > 0
    inv = np.zeros_like(deg)
    inv[nz] = 1.0 / deg[nz]
    T = A ** 2 * inv[:, None] * inv[None, :]
    dQ_ddeg = -(T.sum(axis=1) + T.sum(axis=0)) * inv
    dA = 2.0 * A * inv[:, None] * inv[None, :] + dQ_ddeg[:, None]
    dS = np.where(m > 0, dA * m, 0.0)
    return value, _similarity_vjp(graph, dS)


def operator_spectral_radius(graph: AgentGraph, gamma_E, alpha, iterations=5000):
    return spectral_norm(gamma_E * np.eye(graph.n) - alpha * graph.laplacian, iterations, tol=1e-15)
