import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import hard
from lmmreg.core import (
    AffineParams,
    RegConfig,
    Responsibilities,
    RigidParams,
    bbox_volume,
    center,
    check_points,
    weighted_centroids,
)
from lmmreg.errors import InvalidInput, ZeroMassError

coords = st.floats(-1e3, 1e3, allow_nan=False)


def test_weighted_centroids_single_point():
    mu_x, mu_y, n_prime = weighted_centroids(np.array([[2.0, 4.0]]), np.array([[0.0, 0.0]]), hard(1))
    np.testing.assert_array_equal(mu_x, [2, 4])
    np.testing.assert_array_equal(mu_y, [0, 0])
    assert n_prime == 1


def test_weighted_centroids_uniform_posterior_gives_means():
    X = np.array([[1.0, 2.0], [3.0, -4.0]])
    Y = np.array([[0.0, 5.0], [2.0, 1.0]])
    resp = Responsibilities(np.full((2, 2), 0.25), np.zeros(2))
    mu_x, mu_y, n_prime = weighted_centroids(X, Y, resp)
    np.testing.assert_allclose(mu_x, X.mean(axis=0))
    np.testing.assert_allclose(mu_y, Y.mean(axis=0))
    assert n_prime == pytest.approx(1.0)


def test_weighted_centroids_hand_sum():
    resp = Responsibilities(np.array([[0.75], [0.25]]), np.zeros(1))
    _, mu_y, _ = weighted_centroids(np.array([[9.0, 9.0]]), np.array([[0.0, 0.0], [4.0, 0.0]]), resp)
    np.testing.assert_allclose(mu_y, [1.0, 0.0])


def test_weighted_centroids_orientation_is_rows_centroids():
    # P is (M, N): row sums weight Y, column sums weight X
    X = np.array([[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]])
    Y = np.array([[0.0, 1.0], [0.0, 3.0]])
    P = np.array([[0.5, 0.0, 0.0], [0.0, 0.25, 0.25]])
    mu_x, mu_y, n_prime = weighted_centroids(X, Y, Responsibilities(P, 1 - P.sum(0)))
    np.testing.assert_allclose(mu_x, [7.5, 0.0])
    np.testing.assert_allclose(mu_y, [0.0, 2.0])
    assert n_prime == pytest.approx(1.0)


def test_weighted_centroids_zero_mass():
    resp = Responsibilities(np.zeros((2, 3)), np.ones(3))
    with pytest.raises(ZeroMassError):
        weighted_centroids(np.zeros((3, 2)), np.zeros((2, 2)), resp)


@given(arrays(float, (5, 2), elements=coords), arrays(float, (4, 2), elements=coords),
       arrays(float, (4, 5), elements=st.floats(0.01, 1.0)))
def test_column_stochastic_mass_equals_n(X, Y, raw):
    P = raw / raw.sum(axis=0)
    assert weighted_centroids(X, Y, Responsibilities(P, np.zeros(5)))[2] == pytest.approx(5.0, rel=1e-12)


def test_center_examples():
    np.testing.assert_array_equal(center([[1.0, 1.0]], [1.0, 1.0]), [[0.0, 0.0]])
    np.testing.assert_array_equal(center([[1.0, 0.0], [3.0, 0.0]], [2.0, 0.0]), [[-1.0, 0.0], [1.0, 0.0]])


@given(arrays(float, (7, 3), elements=coords))
def test_center_about_mean_has_zero_mean(X):
    np.testing.assert_allclose(center(X, X.mean(axis=0)).mean(axis=0), 0.0, atol=1e-12 * (1 + np.abs(X).max()))


@given(arrays(float, (6, 2), elements=st.floats(-10, 10)), arrays(float, 2, elements=st.floats(-10, 10)))
def test_center_reconstructs(X, mu):
    np.testing.assert_allclose(center(X, mu) + mu, X, rtol=0, atol=1e-14)


@pytest.mark.parametrize("bad", [np.zeros((0, 2)), np.zeros((3, 4)), np.zeros(3), [[np.nan, 0.0]]])
def test_check_points_rejects(bad):
    with pytest.raises(InvalidInput):
        check_points(bad)


@pytest.mark.parametrize("kw", [{"w": 1.0}, {"w": -0.1}, {"tol": 0.0}, {"kernel": "cauchy"},
                                {"transform": "tps"}, {"max_iter": 0}, {"irls_epsilon": -1}])
def test_config_validation(kw):
    with pytest.raises(InvalidInput):
        RegConfig(**kw)


def test_param_inverses(rng):
    Y = rng.normal(size=(10, 2))
    c, s = np.cos(0.3), np.sin(0.3)
    rigid = RigidParams(1.7, np.array([[c, -s], [s, c]]), np.array([0.2, -1.0]))
    np.testing.assert_allclose(rigid.inverse().apply(rigid.apply(Y)), Y, atol=1e-12)
    aff = AffineParams(np.array([[2.0, 0.3], [0.1, 0.5]]), np.array([1.0, 2.0]))
    np.testing.assert_allclose(aff.inverse().apply(aff.apply(Y)), Y, atol=1e-12)


def test_bbox_volume():
    assert bbox_volume(np.array([[0.0, 0.0], [2.0, 3.0]])) == 6.0
    assert bbox_volume(np.array([[1.0, 1.0]])) > 0
