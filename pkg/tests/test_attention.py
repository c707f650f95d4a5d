import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import gradpaths
from alignlab.attention import AttentionGate, attention_weights, gate_observation, uniform_weights
from alignlab.errors import ShapeError
from alignlab.tensor_math import make_rng


def test_zero_gate_is_uniform():
    gate = AttentionGate(7, 3)
    np.testing.assert_allclose(attention_weights(gate, np.array([1.0, -2.0, 0.5])), np.full(7, 1 / 7), atol=1e-15)


def test_zero_embedding_gives_softmax_of_bias():
    gate = AttentionGate(4, 3, make_rng(0, "a"))
    gate.b_a = np.array([0.0, 1.0, -1.0, 2.0])
    e = np.exp(gate.b_a)
    np.testing.assert_allclose(attention_weights(gate, np.zeros(3)), e / e.sum(), atol=1e-15)


def test_forward_oracle():
    gate = AttentionGate(4, 3, make_rng(1, "a"))
    E = np.array([0.2, -0.7, 1.1])
    logits = [sum(gate.W_a[i][j] * E[j] for j in range(3)) + gate.b_a[i] for i in range(4)]
    m = max(logits)
    ex = [np.exp(v - m) for v in logits]
    np.testing.assert_allclose(attention_weights(gate, E), [v / sum(ex) for v in ex], atol=1e-14)


def test_shape_errors():
    with pytest.raises(ShapeError):
        attention_weights(AttentionGate(4, 3), np.zeros(4))
    with pytest.raises(ShapeError):
        gate_observation(np.full(3, 1 / 3), np.zeros(4))


def test_gate_observation_examples():
    z = np.array([0.5, -1.0, 0.25, 1.0])
    np.testing.assert_allclose(gate_observation(np.full(4, 0.25), z), z / 4)
    np.testing.assert_allclose(gate_observation(np.full(4, 0.25), z, rescale=True), z)
    one_hot = np.array([0.0, 1.0, 0.0, 0.0])
    np.testing.assert_array_equal(gate_observation(one_hot, z), [0.0, -1.0, 0.0, 0.0])
    a = np.array([0.1, 0.2, 0.3, 0.4])
    assert gate_observation(a, z).tolist() == [a[i] * z[i] for i in range(4)]


def test_uniform_weights():
    w = uniform_weights(3, 16)
    assert w.shape == (3, 16)
    assert np.all(w * 16 == 1.0)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, 3, elements=st.floats(-50, 50)), arrays(np.float64, 6, elements=st.floats(-10, 10)),
       st.integers(0, 1000))
def test_normalization_and_contraction(E, z, seed):
    gate = AttentionGate(6, 3, make_rng(seed, "a"))
    a = attention_weights(gate, E)
    assert abs(a.sum() - 1) <= 1e-9
    zt = gate_observation(a, z)
    assert np.abs(zt).max() <= np.abs(z).max() + 1e-12
    assert np.abs(zt).sum() <= a.max() * np.abs(z).sum() + 1e-12


@pytest.mark.parametrize("seed", range(20))
def test_gradient_through_gate(seed):
    assert gradpaths.attention(seed) < 1e-4


def test_rescaled_gradient():
    from alignlab.gradcheck import numerical_gradient, relative_error
    rng = np.random.default_rng(0)
    gate = AttentionGate(5, 3, make_rng(0, "a"), rescale=True)
    E, z, u = rng.standard_normal((2, 3)), rng.standard_normal((2, 5)), rng.standard_normal((2, 5))

    def loss():
        return float(np.sum(u * gate_observation(attention_weights(gate, E), z, rescale=True)))

    gate.backward(E, z, attention_weights(gate, E), u)
    assert relative_error(gate.grad_W, numerical_gradient(loss, gate.W_a)) < 1e-6
