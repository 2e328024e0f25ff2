import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qwalk import QuantumWalkLimit, mixed_state, point_state, walk_family

SQ2 = np.sqrt(2.0)


def test_params_and_clone():
    est = QuantumWalkLimit(coin="biased", coin_params={"rho": 0.4}, grid_size=128)
    params = est.get_params()
    assert params["coin"] == "biased" and params["grid_size"] == 128
    other = clone(est).set_params(grid_size=64)
    assert other.grid_size == 64 and est.grid_size == 128


def test_fit_default_mixed():
    est = QuantumWalkLimit(grid_size=1024).fit()
    lo, hi = est.support_
    assert lo == pytest.approx(-1 / SQ2, abs=1e-6) and hi == pytest.approx(1 / SQ2, abs=1e-6)
    assert est.n_dropped_ == 0
    assert est.moment(2) == pytest.approx(1 - 1 / SQ2, abs=1e-6)
    assert est.cdf(0.0) == pytest.approx(0.5, abs=1e-3)


def test_fit_inputs_equivalent():
    spec = walk_family("hadamard")
    a = QuantumWalkLimit(grid_size=64).fit("mixed")
    b = QuantumWalkLimit(grid_size=64).fit(mixed_state(spec))
    np.testing.assert_array_equal(a.law_.weight, b.law_.weight)
    c = QuantumWalkLimit(grid_size=64).fit([1, 0])
    d = QuantumWalkLimit(grid_size=64).fit(point_state(0, [1, 0], spec))
    np.testing.assert_array_equal(c.law_.h, d.law_.h)


def test_explicit_coin_and_2d():
    coin = np.array([[1, 1], [1, -1]]) / SQ2
    est = QuantumWalkLimit(coin=coin, shifts=[[1], [-1]], grid_size=64).fit()
    ref = QuantumWalkLimit(grid_size=64).fit()
    np.testing.assert_allclose(est.law_.h, ref.law_.h, atol=1e-15)
    with pytest.raises(ValueError):
        QuantumWalkLimit(coin=coin).fit()
    est2 = QuantumWalkLimit(coin="hadamard2d", grid_size=32).fit()
    assert est2.sample(5, random_state=0).shape == (5, 2)
    assert est2.moment(2, projection=[1 / SQ2, 1 / SQ2]) > 0


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        QuantumWalkLimit().cdf(0.0)


def test_sample_reproducible():
    est = QuantumWalkLimit(coin="biased", coin_params={"rho": 0.25}, grid_size=256).fit()
    a = est.sample(1000, random_state=7)
    b = est.sample(1000, random_state=7)
    np.testing.assert_array_equal(a, b)
    assert np.all(np.abs(a) <= 0.5 + 1e-9)


def test_docstring_example():
    import doctest

    import qwalk.estimator

    assert doctest.testmod(qwalk.estimator).failed == 0
