import numpy as np
import pytest

from krabc import (
    DegenerateWeightsWarning,
    GramSolveError,
    KernelConfig,
    WeightedParticleSet,
    embed_posterior,
    gram_matrix,
    kabc_weights,
    posterior_mean,
)


def test_weights_scalar_solve():
    w = kabc_weights(np.array([[1.0]]), np.array([1.0]), delta=1.0)
    assert w == pytest.approx([0.5])


def test_weights_zero_kvec():
    g = gram_matrix(np.random.default_rng(0).normal(size=(6, 2)), KernelConfig(1.0))
    np.testing.assert_array_equal(kabc_weights(g, np.zeros(6), 0.3), np.zeros(6))


def test_weights_two_by_two_elimination_oracle():
    g = np.array([[1.0, 0.5], [0.5, 1.0]])
    kvec = np.array([1.0, 0.0])
    delta = 0.1
    # forward elimination on (G + 2*delta*I) w = kvec, done by hand
    a = g + 2 * delta * np.eye(2)
    factor = a[1, 0] / a[0, 0]
    a1 = a[1, 1] - factor * a[0, 1]
    k1 = kvec[1] - factor * kvec[0]
    w1 = k1 / a1
    w0 = (kvec[0] - a[0, 1] * w1) / a[0, 0]
    got = kabc_weights(g, kvec, delta)
    np.testing.assert_allclose(got, [w0, w1], atol=1e-10)


def test_weights_residual_contract_on_random_instances():
    rng = np.random.default_rng(12)
    for _ in range(200):
        n = int(rng.integers(1, 50))
        pts = rng.normal(size=(n, int(rng.integers(1, 4))))
        g = gram_matrix(pts, KernelConfig(float(rng.uniform(0.05, 5.0))))
        kvec = rng.uniform(0.0, 1.0, n)
        delta = float(10 ** rng.uniform(-6, 0))
        w = kabc_weights(g, kvec, delta)
        resid = np.linalg.norm((g + n * delta * np.eye(n)) @ w - kvec)
        assert resid <= 1e-8 * (1.0 + np.linalg.norm(kvec))


def test_weights_shrink_as_delta_grows():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(25, 2))
    g = gram_matrix(pts, KernelConfig(1.0))
    kvec = rng.uniform(size=25)
    norms = [np.linalg.norm(kabc_weights(g, kvec, d)) for d in (1e-4, 2e-4, 1e-2, 2e-2, 1.0, 2.0, 100.0)]
    assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))
    assert norms[-1] < 1e-2 * norms[0]


def test_weights_interpolation_sanity():
    # observed equals the j-th simulated summary; with tiny regularization the
    # j-th weight dominates.
    summaries = np.array([[0.0], [5.0], [10.0], [15.0]])
    cfg = KernelConfig(1.0)
    g = gram_matrix(summaries, cfg)
    for j in range(4):
        kvec = gram_matrix(np.vstack([summaries, summaries[j]]), cfg)[-1, :-1]
        w = kabc_weights(g, kvec, 1e-10)
        assert int(np.argmax(w)) == j


def test_weights_contract_violations():
    with pytest.raises(ValueError):
        kabc_weights(np.eye(3), np.ones(2), 0.1)
    with pytest.raises(ValueError):
        kabc_weights(np.eye(2), np.ones(2), 0.0)
    with pytest.raises(GramSolveError):
        kabc_weights(np.array([[np.nan, 0.0], [0.0, 1.0]]), np.ones(2), 0.1)


def test_embed_posterior_two_point_closed_form():
    # y1 matches the observation, y2 is hopelessly far: w1 >> w2 and the
    # posterior mean sits at theta1.
    params = np.array([[2.0], [9.0]])
    summaries = np.array([[0.0], [1e6]])
    ps = embed_posterior(params, summaries, [0.0], KernelConfig(1.0), KernelConfig(1.0), delta=1e-6)
    w1, w2 = ps.weights
    assert w1 > 1e3 * abs(w2)
    np.testing.assert_allclose(posterior_mean(ps), [2.0], atol=1e-4)


def test_embed_posterior_exchangeable_weights():
    params = np.random.default_rng(0).normal(size=(5, 2))
    summaries = np.tile([1.0, 2.0], (5, 1))
    ps = embed_posterior(params, summaries, [1.0, 2.0], KernelConfig(1.0), KernelConfig(1.0), delta=0.1)
    np.testing.assert_allclose(ps.weights, ps.weights[0], rtol=1e-10)


def test_embed_posterior_far_data_weight_collapse():
    rng = np.random.default_rng(1)
    params = rng.normal(size=(20, 1))
    summaries = rng.normal(loc=1e5, scale=1.0, size=(20, 1))
    ps = embed_posterior(params, summaries, [0.0], KernelConfig(1.0), KernelConfig(1.0), delta=0.01)
    assert abs(ps.sum_weights) < 1e-8


def test_embed_posterior_dimension_mismatch():
    with pytest.raises(ValueError, match="summary dimension"):
        embed_posterior(
            np.zeros((3, 1)), np.zeros((3, 2)), np.zeros(3), KernelConfig(1.0), KernelConfig(1.0), 0.1
        )


def test_posterior_mean_trivial_cases():
    cfg = KernelConfig(1.0)
    single = WeightedParticleSet(np.array([[4.0, -1.0]]), np.array([0.3]), cfg)
    np.testing.assert_allclose(posterior_mean(single), [4.0, -1.0])

    two = WeightedParticleSet(np.array([[0.0], [2.0]]), np.array([0.5, 0.5]), cfg)
    np.testing.assert_allclose(posterior_mean(two), [1.0])

    skew = WeightedParticleSet(np.array([[0.0], [4.0]]), np.array([0.75, 0.25]), cfg)
    np.testing.assert_allclose(posterior_mean(skew), [1.0])


def test_posterior_mean_degenerate_flagged_not_thrown():
    ps = WeightedParticleSet(np.array([[0.0], [2.0]]), np.array([0.5, -0.5]), KernelConfig(1.0))
    with pytest.warns(DegenerateWeightsWarning):
        np.testing.assert_allclose(posterior_mean(ps), [1.0])


def test_particle_set_validation():
    cfg = KernelConfig(1.0)
    with pytest.raises(ValueError):
        WeightedParticleSet(np.zeros((2, 1)), np.zeros(3), cfg)
    with pytest.raises(ValueError):
        WeightedParticleSet(np.array([[np.inf]]), np.array([1.0]), cfg)
