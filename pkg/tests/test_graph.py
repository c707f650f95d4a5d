import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gradpaths
from alignlab.errors import DomainError
from alignlab.graph import (
    AgentGraph,
    bias_penalty,
    check_alpha,
    default_topology,
    max_stable_alpha,
    normalized_laplacian,
    operator_spectral_radius,
    prune_sparse,
    similarity,
    similarity_matrix,
    topology_mask,
)
from oracles import jacobi_eigvals, normalized_laplacian_loops


def test_similarity_examples():
    v = np.array([1.0, 2.0, -1.0])
    assert similarity(v, v) == pytest.approx(1.0)
    assert similarity(np.array([1.0, 0.0]), np.array([0.0, 3.0])) == 0.0
    assert similarity(v, -v) == 0.0
    assert similarity(v, np.zeros(3)) == 0.0


def test_similarity_matrix_matches_pairwise():
    phi = np.random.default_rng(0).standard_normal((5, 4))
    S = similarity_matrix(phi)
    for i in range(5):
        for j in range(5):
            assert S[i, j] == pytest.approx(similarity(phi[i], phi[j]), abs=1e-14)
    assert np.array_equal(S, S.T)


def test_two_agent_laplacian():
    g = AgentGraph(np.array([[1.0, 0.0], [2.0, 0.0]]), np.ones((2, 2)))
    np.testing.assert_allclose(g.laplacian, [[1, -1], [-1, 1]], atol=1e-15)
    np.testing.assert_allclose(jacobi_eigvals(g.laplacian), [0, 2], atol=1e-9)
    assert g.lambda_max() == pytest.approx(2.0)


def test_path_laplacian_eigenvalues():
    path = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
    g = AgentGraph(np.ones((3, 2)), path)
    np.testing.assert_allclose(jacobi_eigvals(g.laplacian), [0, 1, 2], atol=1e-9)
    np.testing.assert_allclose(np.linalg.eigvalsh(g.laplacian), [0, 1, 2], atol=1e-9)


def test_single_and_isolated_agents():
    g = AgentGraph(np.ones((1, 3)), np.zeros((1, 1)))
    assert g.laplacian.tolist() == [[0.0]]
    assert g.lambda_max() == 0.0
    # node 2 is orthogonal to the others: zero row and column
    phi = np.array([[1.0, 0.0], [1.0, 0.1], [0.0, 1.0]])
    phi[2] = [-0.1, 0.0]
    g = AgentGraph(phi, np.ones((3, 3)))
    assert not np.any(g.laplacian[2]) and not np.any(g.laplacian[:, 2])
    empty = AgentGraph(np.ones((3, 2)), np.zeros((3, 3)))
    assert not np.any(empty.laplacian)


def test_laplacian_matches_loop_oracle():
    rng = np.random.default_rng(1)
    A = rng.random((6, 6))
    A = (A + A.T) / 2
    np.fill_diagonal(A, 0)
    A[4, :] = A[:, 4] = 0
    np.testing.assert_allclose(normalized_laplacian(A), normalized_laplacian_loops(A), atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10_000), st.floats(0, 1))
def test_laplacian_symmetric_psd_bounded(n, seed, beta_min):
    rng = np.random.default_rng(seed)
    g = AgentGraph.random(n, d_id=4, rng=rng, beta_min=beta_min)
    assert np.linalg.norm(g.laplacian - g.laplacian.T) < 1e-12
    ev = jacobi_eigvals(g.laplacian)
    assert ev[0] >= -1e-10 and ev[-1] <= 2 + 1e-10
    S = g.similarity
    assert np.array_equal(S, S.T) and S.min() >= 0 and S.max() <= 1


def test_topologies():
    assert default_topology(4).sum() == 12
    ring = default_topology(10)
    assert np.all(ring.sum(axis=1) == 2)
    assert np.array_equal(topology_mask("complete", 10), np.ones((10, 10)) - np.eye(10))
    assert topology_mask("ring", 2).sum() == 2
    assert not np.any(topology_mask("empty", 3))
    with pytest.raises(DomainError):
        topology_mask("star", 3)


def test_max_stable_alpha_examples():
    assert max_stable_alpha(0.9, 0.05, 0.95, 2) == 0.025
    assert max_stable_alpha(0.0, 0.0, 0.95, 2) == pytest.approx(0.475)
    assert max_stable_alpha(0.95, 0.05, 0.95, 2) == pytest.approx(0.0, abs=1e-15)
    assert not check_alpha(0.01, 0.95, 0.05, 0.95, 2).passed
    assert check_alpha(0.5, 0.9, 0.05, 0.95, 0).passed
    assert not check_alpha(0.05, 0.9, 0.05, 0.95, 2).passed
    assert check_alpha(0.02, 0.9, 0.05, 0.95, 2).passed


def test_operator_spectral_radius():
    g = AgentGraph(np.ones((2, 2)), np.ones((2, 2)))
    # eigenvalues of 0.9 I - 0.025 L: 0.9 and 0.85
    assert operator_spectral_radius(g, 0.9, 0.025) == pytest.approx(0.9, abs=1e-12)
    assert operator_spectral_radius(g, 0.9, 0.5) == pytest.approx(0.9, abs=1e-12)
    assert operator_spectral_radius(g, 0.9, 1.0) == pytest.approx(1.1, abs=1e-12)


def test_bias_penalty_examples():
    g = AgentGraph(np.array([[1.0, 0.0], [1.0, 0.0]]), np.ones((2, 2)))
    assert bias_penalty(g, 0.01)[0] == pytest.approx(0.02)
    assert bias_penalty(g, 0.0)[0] == 0.0
    ortho = AgentGraph(np.eye(3), np.ones((3, 3)))
    value, grad = bias_penalty(ortho, 0.01)
    assert value == 0.0 and not np.any(grad)


@pytest.mark.parametrize("seed", range(20))
def test_bias_penalty_gradient(seed):
    assert gradpaths.bias(seed) < 1e-4


@pytest.mark.parametrize("seed", range(20))
def test_laplacian_frobenius_gradient(seed):
    assert gradpaths.laplacian_norm(seed) < 1e-4


@pytest.mark.parametrize("seed", range(5))
def test_bias_descent_monotone(seed):
    rng = np.random.default_rng(seed)
    g = AgentGraph.random(5, d_id=6, rng=rng)
    prev = bias_penalty(g, 1.0)[0]
    for _ in range(200):
        _, grad = bias_penalty(g, 1.0)
        g.identities = g.identities - 1e-3 * grad
        g.__post_init__()
        cur = bias_penalty(g, 1.0)[0]
        assert cur <= prev + 1e-15
        prev = cur


def test_prune_sparse():
    # unit vectors at chosen angles give similarities 0.2, 0.5, 0.9 against agent 0
    angles = [0.0, np.arccos(0.2), np.arccos(0.5), np.arccos(0.9)]
    phi = np.array([[np.cos(a), np.sin(a)] for a in angles])
    mask = np.zeros((4, 4))
    mask[0, 1:] = mask[1:, 0] = 1
    g = AgentGraph(phi, mask)
    before = g.laplacian.copy()
    prune_sparse(g, 0.0)
    np.testing.assert_array_equal(g.laplacian, before)
    prune_sparse(g, 0.3)
    assert g.adjacency[0].round(12).tolist() == [0.0, 0.0, 0.5, 0.9]
    assert g.n_edges == 2
    prune_sparse(g, 1.0)
    assert g.n_edges == 0
    with pytest.raises(ValueError):
        prune_sparse(g, 1.5)


def test_neighbors():
    g = AgentGraph(np.array([[1.0, 0.0], [1.0, 0.2], [-1.0, 0.0]]), np.ones((3, 3)))
    assert g.neighbors(0).tolist() == [1]
    assert g.neighbors(2).tolist() == []
