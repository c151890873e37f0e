import numpy as np
import pytest

from krabc import (
    KernelConfig,
    WeightedParticleSet,
    energy_distance_linear,
    energy_distance_quadratic,
    mmd_quadratic,
    mmd_to_embedding,
)


def naive_energy_quadratic(x, y, unbiased):
    """Double-loop reference implementation."""
    x = np.atleast_2d(x)
    y = np.atleast_2d(y)
    n, m = len(x), len(y)
    cross = sum(np.linalg.norm(a - b) for a in x for b in y) / (n * m)

    def within(z):
        k = len(z)
        if k < 2:
            return 0.0
        total = sum(np.linalg.norm(z[i] - z[j]) for i in range(k) for j in range(k))
        return total / (k * (k - 1)) if unbiased else total / k**2

    return 2.0 * cross - within(x) - within(y)


def test_linear_hand_example():
    # two scalar observations each: h = 1 + 1 - 0 - 0
    assert energy_distance_linear([0.0, 0.0], [1.0, 1.0]) == pytest.approx(2.0)


def test_linear_identical_inputs():
    x = np.arange(10.0)
    assert energy_distance_linear(x, x) == 0.0


def test_linear_odd_count_drops_last():
    x = np.array([0.0, 0.0, 99.0])
    y = np.array([1.0, 1.0, -99.0])
    assert energy_distance_linear(x, y) == pytest.approx(2.0)


def test_linear_contract_violations():
    with pytest.raises(ValueError):
        energy_distance_linear([0.0], [1.0])
    with pytest.raises(ValueError):
        energy_distance_linear([0.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        energy_distance_linear(np.zeros((4, 2)), np.zeros((4, 3)))


def test_linear_shuffle_mean_matches_quadratic_oracle():
    rng = np.random.default_rng(11)
    x = rng.normal(0.0, 1.0, 500)
    y = rng.normal(1.0, 1.0, 500)
    vals = np.array([energy_distance_linear(x, y, seed=s) for s in range(200)])
    target = energy_distance_quadratic(x, y, unbiased=True)
    se = vals.std(ddof=1) / np.sqrt(len(vals))
    assert abs(vals.mean() - target) < 3.0 * se


def test_quadratic_identical_is_zero():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(40, 2))
    assert abs(energy_distance_quadratic(x, x)) <= 1e-12


def test_quadratic_single_atoms():
    for unbiased in (False, True):
        assert energy_distance_quadratic([0.0], [2.0], unbiased=unbiased) == pytest.approx(4.0)


def test_quadratic_matches_naive_double_loop():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(50, 3))
    y = rng.normal(0.5, 1.2, size=(50, 3))
    for unbiased in (False, True):
        got = energy_distance_quadratic(x, y, unbiased=unbiased)
        want = naive_energy_quadratic(x, y, unbiased)
        assert got == pytest.approx(want, abs=1e-10)


def test_quadratic_symmetry_exact():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(20, 2))
    y = rng.normal(size=(30, 2))
    assert energy_distance_quadratic(x, y) == energy_distance_quadratic(y, x)


def test_quadratic_scale_homogeneity():
    rng = np.random.default_rng(9)
    x = rng.normal(size=(25, 2))
    y = rng.normal(1.0, 2.0, size=(25, 2))
    base = energy_distance_quadratic(x, y)
    for a in (0.5, 3.0, -2.0):
        scaled = energy_distance_quadratic(a * x, a * y)
        assert scaled == pytest.approx(abs(a) * base, rel=1e-12)


def test_quadratic_empty_rejected():
    with pytest.raises(ValueError):
        energy_distance_quadratic(np.empty((0, 1)), [1.0])


def test_mmd_identical_is_zero():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(30, 2))
    assert abs(mmd_quadratic(x, x, KernelConfig(1.0))) <= 1e-12


def test_mmd_two_atoms_closed_form():
    got = mmd_quadratic([0.0], [1.0], KernelConfig(1.0))
    assert got == pytest.approx(2.0 - 2.0 * np.exp(-0.5), abs=1e-12)
    # general z
    for z in (0.3, 2.5):
        got = mmd_quadratic([0.0], [z], KernelConfig(1.0))
        assert got == pytest.approx(2.0 - 2.0 * np.exp(-(z**2) / 2.0), abs=1e-12)


def test_mmd_symmetry():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(15, 1))
    y = rng.normal(size=(10, 1))
    cfg = KernelConfig(0.8)
    assert mmd_quadratic(x, y, cfg) == mmd_quadratic(y, x, cfg)


def test_mmd_consistent_with_embedding_distance():
    # A uniform-weight particle set embeds the first sample; the RKHS distance
    # to the second sample must square to the quadratic MMD.
    rng = np.random.default_rng(4)
    x = rng.normal(size=(20, 1))
    y = rng.normal(0.5, 1.0, size=(35, 1))
    cfg = KernelConfig(1.3)
    ps = WeightedParticleSet(x, np.full(20, 1.0 / 20.0), cfg)
    assert mmd_to_embedding(ps, y) ** 2 == pytest.approx(mmd_quadratic(x, y, cfg), abs=1e-10)
