import math

import numpy as np
import pytest

from tailsim.distributions import fit_lognormal, lognormal_comp_quantile
from tailsim.errors import DomainError
from tailsim.sampling import (
    PowerTransform,
    SampleMode,
    midpoint_partition,
    permute,
    severity_sample,
    transform_weight,
    uniform_sample,
)


@pytest.mark.parametrize("n, expected", [(1, [0.5]), (2, [0.25, 0.75]), (4, [0.125, 0.375, 0.625, 0.875])])
def test_midpoint_partition(n, expected):
    np.testing.assert_array_equal(midpoint_partition(n), expected)


def test_midpoint_properties():
    r = midpoint_partition(1001)
    assert np.all(np.diff(r) > 0) and r[0] > 0 and r[-1] < 1
    np.testing.assert_allclose(r + r[::-1], 1.0, rtol=0, atol=1e-15)
    with pytest.raises(DomainError):
        midpoint_partition(0)


def test_uniform_sample_determinism_and_mean():
    a = uniform_sample(1000, 42)
    np.testing.assert_array_equal(a, uniform_sample(1000, 42))
    assert not np.array_equal(a, uniform_sample(1000, 43))
    assert not np.array_equal(a, uniform_sample(1000, 42, 1))
    u = uniform_sample(10**6, 7)
    assert np.all((u > 0) & (u < 1))
    half_width = 5 * (1 / math.sqrt(12)) / 1e3
    assert abs(u.mean() - 0.5) <= half_width
    with pytest.raises(DomainError):
        uniform_sample(0, 1)


@pytest.mark.parametrize("k, q, w", [(1, 0.3, 1.0), (2, 0.5, 1.0), (3, 0.1, 0.03)])
def test_transform_weight(k, q, w):
    assert transform_weight(PowerTransform(k), q) == pytest.approx(w, rel=1e-14)


def test_transform_rules():
    with pytest.raises(DomainError):
        PowerTransform(0.5)
    t = PowerTransform(2.5)
    assert t.t(0.0) == 0.0 and t.t(1.0) == 1.0
    q = np.linspace(0.01, 0.99, 50)
    assert np.all(np.diff(t.t(q)) > 0)
    np.testing.assert_allclose(t.t_inverse(t.t(q)), q, rtol=1e-13)
    with pytest.raises(DomainError):
        transform_weight(t, 0.0)


def test_severity_sample_identity_k1():
    p = fit_lognormal(10, 30)
    q = np.linspace(0.001, 0.999, 777)
    values, weights = severity_sample(p, PowerTransform(1), q)
    np.testing.assert_array_equal(weights, 1.0)
    np.testing.assert_array_equal(values, lognormal_comp_quantile(p, q))


def test_severity_sample_k2_median():
    value, weight = severity_sample(fit_lognormal(10, 30), PowerTransform(2), math.sqrt(0.5))
    assert value == pytest.approx(3.1622777, rel=1e-7)
    assert weight == pytest.approx(1.4142136, rel=1e-7)


def test_severity_sample_moves_into_tail():
    p = fit_lognormal(10, 30)
    q = 0.2
    value, weight = severity_sample(p, PowerTransform(2), q)
    assert value > lognormal_comp_quantile(p, q)
    assert weight < 1


def test_permute():
    np.testing.assert_array_equal(permute(1, 5), [0])
    perm = permute(1000, 5)
    np.testing.assert_array_equal(np.sort(perm), np.arange(1000))
    np.testing.assert_array_equal(perm, permute(1000, 5))
    assert not np.array_equal(perm, permute(1000, 6))


def test_sample_mode_validation():
    with pytest.raises(DomainError):
        SampleMode("sobol", 0)
    with pytest.raises(DomainError):
        SampleMode("random", -1)


@pytest.mark.parametrize("k", [1, 1.5, 2, 3])
def test_weight_normalisation(k):
    w = transform_weight(PowerTransform(k), midpoint_partition(10**5))
    assert abs(w.mean() - 1) <= 1e-6


@pytest.mark.parametrize("k", [1.5, 2, 3])
def test_expectation_preserved(k):
    p = fit_lognormal(10, 30)
    r = midpoint_partition(10**6)
    baseline = lognormal_comp_quantile(p, r).mean()
    s, w = severity_sample(p, PowerTransform(k), r)
    assert (s * w).mean() == pytest.approx(baseline, rel=1e-3)
