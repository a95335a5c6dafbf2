import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gdr.errors import InvalidInputError
from gdr.genome import (
    PolicyArchitecture,
    as_genome,
    backward,
    forward_cached,
    genome_from_bytes,
    genome_to_bytes,
    init_genome,
    l2_distance,
    mlp_forward,
    param_count,
    policy_forward,
)


def test_param_count_matches_layer_sizes():
    arch = PolicyArchitecture(3, 2, (4, 4))
    assert param_count(arch) == 3 * 4 + 4 + 4 * 4 + 4 + 4 * 2 + 2 == 46
    assert PolicyArchitecture(17, 6, (128, 128)).param_count == 17 * 128 + 128 + 128 * 128 + 128 + 128 * 6 + 6


def test_layout_is_weights_then_bias_per_layer():
    arch = PolicyArchitecture(2, 1, (3,), output_activation="linear")
    params = np.arange(arch.param_count, dtype=float)
    (w1, b1), (w2, b2) = arch.unpack(params)
    np.testing.assert_array_equal(w1, [[0, 1], [2, 3], [4, 5]])
    np.testing.assert_array_equal(b1, [6, 7, 8])
    np.testing.assert_array_equal(w2, [[9, 10, 11]])
    np.testing.assert_array_equal(b2, [12])


def test_hand_computed_forward():
    arch = PolicyArchitecture(2, 1, (2,), output_activation="linear")
    # W1 = [[1, -1], [2, 0]], b1 = [0, -5], W2 = [[1, 3]], b2 = [0.5]
    params = np.array([1, -1, 2, 0, 0, -5, 1, 3, 0.5], dtype=float)
    x = np.array([3.0, 1.0])
    # hidden = relu([2, 1]) = [2, 1]; out = 2 + 3 + 0.5
    assert mlp_forward(arch, params, x)[0] == pytest.approx(5.5)


def test_zero_genome_outputs_zero():
    arch = PolicyArchitecture(4, 2, (8, 8))
    out = policy_forward(arch, np.zeros(arch.param_count), np.ones(4))
    np.testing.assert_array_equal(out, [0.0, 0.0])


def test_batch_matches_single():
    rng = np.random.default_rng(0)
    arch = PolicyArchitecture(3, 2, (5, 4))
    g = init_genome(arch, rng)
    xs = rng.standard_normal((6, 3))
    batched = mlp_forward(arch, g, xs)
    for i in range(6):
        np.testing.assert_allclose(batched[i], mlp_forward(arch, g, xs[i]), rtol=0, atol=1e-15)


def test_init_bounds_and_zero_bias():
    arch = PolicyArchitecture(16, 2, (32,))
    g = init_genome(arch, np.random.default_rng(1))
    (w1, b1), (w2, b2) = arch.unpack(g)
    assert np.all(np.abs(w1) <= 1 / 4) and np.all(np.abs(w2) <= 1 / np.sqrt(32))
    assert not b1.any() and not b2.any()


def test_wrong_length_rejected():
    arch = PolicyArchitecture(3, 2, (4,))
    with pytest.raises(InvalidInputError):
        mlp_forward(arch, np.zeros(arch.param_count + 1), np.zeros(3))
    with pytest.raises(InvalidInputError):
        mlp_forward(arch, np.zeros(arch.param_count), np.zeros(4))
    with pytest.raises(InvalidInputError):
        as_genome([0.0, np.nan])
    with pytest.raises(InvalidInputError):
        PolicyArchitecture(3, 2, ())


def test_backward_input_gradient_matches_finite_difference():
    rng = np.random.default_rng(3)
    arch = PolicyArchitecture(3, 2, (6, 5))
    g = init_genome(arch, rng) + 0.1 * rng.standard_normal(arch.param_count)
    x = rng.standard_normal((1, 3))
    out, cache = forward_cached(arch, g, x)
    d_in = backward(arch, g, cache, out, np.ones((1, 2)), need_input_grad=True)
    h = 1e-6
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        num = (mlp_forward(arch, g, x[0] + e).sum() - mlp_forward(arch, g, x[0] - e).sum()) / (2 * h)
        assert d_in[0, j] == pytest.approx(num, rel=1e-5, abs=1e-9)


def test_l2_distance_examples():
    assert l2_distance(np.zeros(2), np.array([3.0, 4.0])) == 5.0
    with pytest.raises(InvalidInputError):
        l2_distance(np.zeros(2), np.zeros(3))


def test_bytes_round_trip():
    g = np.array([1.5, -0.0, 1e-300, np.pi])
    data = genome_to_bytes(g)
    assert data[:8] == (4).to_bytes(8, "little")
    back, end = genome_from_bytes(data + b"tail")
    assert end == len(data)
    assert back.tobytes() == g.tobytes()
    with pytest.raises(InvalidInputError):
        genome_from_bytes(data[:-1])


vectors = st.integers(1, 8).flatmap(
    lambda n: st.tuples(*[st.lists(st.floats(-1e6, 1e6), min_size=n, max_size=n) for _ in range(3)])
)


@given(vectors)
@settings(max_examples=200, deadline=None)
def test_distance_is_a_metric(vs):
    a, b, c = (np.array(v) for v in vs)
    assert l2_distance(a, a) == 0.0
    assert l2_distance(a, b) == l2_distance(b, a)
    assert l2_distance(a, c) <= l2_distance(a, b) + l2_distance(b, c) + 1e-9 * (1 + l2_distance(a, c))


@given(st.integers(0, 2**32 - 1), st.floats(0.1, 1e3))
@settings(max_examples=50, deadline=None)
def test_tanh_output_bounded(seed, scale):
    rng = np.random.default_rng(seed)
    arch = PolicyArchitecture(4, 3, (8,))
    g = scale * rng.standard_normal(arch.param_count)
    out = mlp_forward(arch, g, rng.standard_normal((5, 4)) * scale)
    assert np.all(np.abs(out) <= 1.0)
