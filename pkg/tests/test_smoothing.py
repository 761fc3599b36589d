import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import nlagg.smoothing as smoothing
from nlagg.core import ConfigurationError, Dataset
from nlagg.generators import FunctionalSpec, gen_functional
from nlagg.smoothing import (DEFAULT_BANDWIDTH_GRID, SmootherSpec, cv_bandwidths, nw_smooth,
                             smooth_training_set)


@pytest.mark.parametrize("h", [0.01, 0.15, 0.7, 5.0])
def test_constant_curve_unchanged(h):
    np.testing.assert_allclose(nw_smooth(np.full(101, 3.25), h), 3.25, rtol=1e-14)


def test_huge_bandwidth_gives_mean(rng):
    c = rng.normal(size=101)
    np.testing.assert_allclose(nw_smooth(c, 1e6), c.mean(), rtol=1e-9)


def test_three_point_grid():
    grid = np.array([0, 0.5, 1])
    out = nw_smooth([0, 1, 0], 0.5, grid)
    e = np.exp
    assert out[0] == pytest.approx(e(-0.5) / (1 + e(-0.5) + e(-2)), rel=1e-14)
    assert out[1] == pytest.approx(1 / (1 + 2 * e(-0.5)), rel=1e-14)
    assert out[2] == pytest.approx(out[0], rel=1e-14)


@pytest.mark.parametrize("h", [0, -0.1])
def test_bad_bandwidth(h):
    with pytest.raises(ConfigurationError):
        nw_smooth(np.zeros(101), h)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 2.0), st.integers(0, 2**32 - 1), st.floats(-10, 10), st.floats(-10, 10))
def test_linear_and_range_confined(h, seed, a, b):
    r = np.random.default_rng(seed)
    f, g = r.normal(size=101), r.normal(size=101)
    lhs = nw_smooth(a * f + b * g, h)
    rhs = a * nw_smooth(f, h) + b * nw_smooth(g, h)
    scale = np.abs(a * f).max() + np.abs(b * g).max() + 1e-300
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale
    s = nw_smooth(f, h)
    assert s.min() >= f.min() - 1e-12 and s.max() <= f.max() + 1e-12


def test_smooth_training_set_per_population(rng):
    ds = gen_functional(FunctionalSpec.model_ii(), 10, rng)
    out = smooth_training_set(ds, SmootherSpec(0.15, 0.7))
    np.testing.assert_array_equal(out.y, ds.y)
    np.testing.assert_allclose(out.x[ds.y == 1], nw_smooth(ds.x[ds.y == 1], 0.15))
    np.testing.assert_allclose(out.x[ds.y == 0], nw_smooth(ds.x[ds.y == 0], 0.7))
    same = smooth_training_set(ds, SmootherSpec(0.3, 0.3))
    np.testing.assert_allclose(same.x, nw_smooth(ds.x, 0.3))


def test_constant_dataset_unchanged():
    ds = Dataset(np.repeat(np.arange(4.0)[:, None], 101, axis=1), [0, 1, 0, 1])
    np.testing.assert_allclose(smooth_training_set(ds, SmootherSpec()).x, ds.x, rtol=1e-14)


def test_default_spec():
    spec = SmootherSpec()
    assert (spec.h1, spec.h2) == (0.15, 0.7)
    with pytest.raises(ConfigurationError):
        SmootherSpec(search_grid=(0.3, 0.2))


def test_default_grid():
    assert len(DEFAULT_BANDWIDTH_GRID) == 13
    assert DEFAULT_BANDWIDTH_GRID[0] == 0.1 and DEFAULT_BANDWIDTH_GRID[-1] == 0.7


def test_cv_single_pair(rng):
    ds = gen_functional(FunctionalSpec.model_ii(), 25, rng)
    assert cv_bandwidths(ds, [0.35], rng=rng) == (0.35, 0.35)


def test_cv_evaluates_all_pairs(monkeypatch, rng):
    calls = []
    monkeypatch.setattr(smoothing, "_pipeline_error",
                        lambda *a, **k: calls.append((a[2], a[3])) or 0.0)
    ds = gen_functional(FunctionalSpec.model_ii(), 25, rng)
    assert cv_bandwidths(ds, rng=rng) == (0.1, 0.1)
    assert len(set(calls)) == 169 and len(calls) == 169 * 5


def test_cv_deterministic():
    ds = gen_functional(FunctionalSpec.model_ii(), 25, np.random.default_rng(11))
    grid = (0.1, 0.3, 0.5, 0.7)
    a = cv_bandwidths(ds, grid, rng=np.random.default_rng(5))
    b = cv_bandwidths(ds, grid, rng=np.random.default_rng(5))
    assert a == b and a[0] in grid and a[1] in grid


def test_cv_needs_both_labels():
    ds = Dataset(np.zeros((10, 101)), np.ones(10))
    with pytest.raises(ConfigurationError):
        cv_bandwidths(ds, [0.2, 0.3])
