import numpy as np
import pytest

from krabc import (
    DegenerateBandwidthError,
    KernelConfig,
    bandwidth_grid,
    gaussian_kernel,
    gram_matrix,
    median_heuristic,
)


def test_kernel_identity_is_one():
    cfg = KernelConfig(0.5)
    assert gaussian_kernel([3.7, -1.0], [3.7, -1.0], cfg) == 1.0


@pytest.mark.parametrize("sigma", [0.3, 1.0, 7.5])
def test_kernel_half_value_at_forced_distance(sigma):
    # k = 1/2 exactly when ||x-y|| = sigma * sqrt(2 ln 2), whatever sigma is.
    cfg = KernelConfig(sigma)
    y = sigma * np.sqrt(2.0 * np.log(2.0))
    assert gaussian_kernel([0.0], [y], cfg) == pytest.approx(0.5, abs=1e-12)


def test_kernel_direct_arithmetic():
    cfg = KernelConfig(1.0)
    assert gaussian_kernel([0.0, 0.0], [1.0, 1.0], cfg) == pytest.approx(np.exp(-1.0), abs=1e-12)


def test_kernel_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        gaussian_kernel([0.0], [0.0, 1.0], KernelConfig(1.0))


def test_kernel_symmetric_exactly():
    rng = np.random.default_rng(0)
    cfg = KernelConfig(0.7)
    for _ in range(50):
        x, y = rng.normal(size=(2, 4))
        assert gaussian_kernel(x, y, cfg) == gaussian_kernel(y, x, cfg)


def test_bandwidth_must_be_positive():
    for bad in (0.0, -1.0, np.nan, np.inf):
        with pytest.raises(ValueError):
            KernelConfig(bad)


def test_gram_single_point():
    g = gram_matrix([[2.0, 3.0]], KernelConfig(1.0))
    assert g.shape == (1, 1) and g[0, 0] == 1.0


def test_gram_identical_points():
    g = gram_matrix([[1.0], [1.0]], KernelConfig(2.0))
    np.testing.assert_array_equal(g, np.ones((2, 2)))


def test_gram_two_points_closed_form():
    g = gram_matrix([[0.0], [1.0]], KernelConfig(1.0))
    expected = np.array([[1.0, np.exp(-0.5)], [np.exp(-0.5), 1.0]])
    np.testing.assert_allclose(g, expected, atol=1e-15)


def test_gram_empty_rejected():
    with pytest.raises(ValueError):
        gram_matrix(np.empty((0, 2)), KernelConfig(1.0))


@pytest.mark.parametrize("n,d,bw", [(5, 1, 0.1), (40, 3, 1.0), (120, 5, 10.0)])
def test_gram_psd_and_symmetric(n, d, bw):
    rng = np.random.default_rng(n * d)
    pts = rng.normal(size=(n, d))
    g = gram_matrix(pts, KernelConfig(bw))
    np.testing.assert_array_equal(g, g.T)
    np.testing.assert_array_equal(np.diag(g), np.ones(n))
    assert np.linalg.eigvalsh(g).min() >= -1e-8 * n


def test_median_heuristic_hand_values():
    # {0, 1, 3}: pairwise distances {1, 2, 3} -> median 2.
    assert median_heuristic([[0.0], [1.0], [3.0]]) == 2.0
    assert median_heuristic([[0.0], [2.0]]) == 2.0


def test_median_heuristic_matches_bruteforce():
    rng = np.random.default_rng(42)
    pts = rng.standard_normal((100, 3))
    dists = [np.linalg.norm(pts[i] - pts[j]) for i in range(100) for j in range(i + 1, 100)]
    assert median_heuristic(pts) == float(np.median(sorted(dists)))


def test_median_heuristic_invariances():
    rng = np.random.default_rng(7)
    pts = rng.standard_normal((30, 2))
    med = median_heuristic(pts)
    perm = rng.permutation(30)
    assert median_heuristic(pts[perm]) == med
    assert median_heuristic(pts + np.array([100.0, -3.0])) == pytest.approx(med, rel=1e-12)


def test_median_heuristic_degenerate():
    with pytest.raises(DegenerateBandwidthError):
        median_heuristic([[1.0], [1.0], [1.0]])


def test_median_heuristic_needs_two_points():
    with pytest.raises(ValueError):
        median_heuristic([[1.0]])


def test_median_heuristic_subsample_is_deterministic():
    rng = np.random.default_rng(3)
    pts = rng.standard_normal((120, 2))
    a = median_heuristic(pts, max_points=50)
    b = median_heuristic(pts, max_points=50)
    assert a == b


def test_bandwidth_grid_default():
    grid = bandwidth_grid(1.0)
    assert len(grid) == 9
    assert grid[0] == pytest.approx(1.0 / 16.0)
    assert grid[-1] == pytest.approx(16.0)


def test_bandwidth_grid_scaling():
    grid = bandwidth_grid(2.0)
    assert grid[0] == pytest.approx(1.0 / 8.0)
    assert grid[-1] == pytest.approx(32.0)


def test_bandwidth_grid_shape_properties():
    base = 0.37
    grid = bandwidth_grid(base, n_points=11)
    assert np.all(np.diff(grid) > 0)
    # symmetric in log space about the base
    logs = np.log(grid / base)
    np.testing.assert_allclose(logs + logs[::-1], np.zeros_like(logs), atol=1e-12)


def test_bandwidth_grid_rejects_bad_base():
    with pytest.raises(ValueError):
        bandwidth_grid(0.0)
