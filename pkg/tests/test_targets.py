"""Built-in objectives: values, Lipschitz constants, vectorized twins."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import geowalk as gw
from geowalk.errors import DimensionMismatch, PreconditionError


def test_distance_target_basics():
    man = gw.Sphere(2)
    anchor = np.array([0.0, 0.0, 1.0])
    target = gw.distance_to(man, anchor)
    assert target.lipschitz == 1.0
    assert target.min_value == 0.0
    assert target.f(anchor) == 0.0
    probe = np.array([0.0, 1.0, 0.0])
    assert target.f(probe) == pytest.approx(math.pi / 2, abs=1e-12)


def test_sqdist_target_scales_like_half_square():
    man = gw.Sphere(2)
    anchor = np.array([0.0, 0.0, 1.0])
    target = gw.sqdist_to(man, anchor, diameter=2.0)
    probe = np.array([math.sin(0.4), 0.0, math.cos(0.4)])
    assert target.f(probe) == pytest.approx(0.5 * 0.4**2, abs=1e-12)
    assert target.lipschitz == 2.0


def test_linear_target_on_box():
    box = gw.EuclideanBox(np.array([0.0, -1.0]), np.array([2.0, 3.0]))
    target = gw.linear(np.array([1.0, -2.0]), box=box)
    assert target.lipschitz == pytest.approx(math.sqrt(5.0))
    # Maximizing -2y pulls y up, minimizing x pulls it down.
    assert np.array_equal(target.minimizer, np.array([0.0, 3.0]))
    assert target.min_value == pytest.approx(-6.0)
    assert target.f(np.array([1.0, 1.0])) == pytest.approx(-1.0)


def test_linear_target_rejects_degenerate_inputs():
    with pytest.raises(PreconditionError):
        gw.linear(np.zeros(3))
    box = gw.EuclideanBox(np.zeros(2), np.ones(2))
    with pytest.raises(DimensionMismatch):
        gw.linear(np.array([1.0, 2.0, 3.0]), box=box)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_vectorized_twin_matches_scalar(seed):
    man = gw.Sphere(3)
    rng = gw.stream(seed)
    anchor = rng.standard_normal(4)
    anchor /= math.sqrt(anchor @ anchor)
    pts = rng.standard_normal((8, 4))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    for target in (gw.distance_to(man, anchor), gw.sqdist_to(man, anchor, 2.0)):
        batch = target.f_many(pts)
        for i in range(len(pts)):
            assert batch[i] == pytest.approx(target.f(pts[i]), abs=1e-12)


def test_as_gibbs_wraps_target():
    man = gw.Sphere(2)
    target = gw.distance_to(man, np.array([0.0, 0.0, 1.0]))
    gibbs = gw.as_gibbs(target, 0.3)
    assert gibbs.temperature == 0.3
    assert gibbs.lipschitz == target.lipschitz
    assert gibbs.f is target.f
    with pytest.raises(PreconditionError):
        gw.as_gibbs(target, 0.0)
