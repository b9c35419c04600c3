"""Membership, metadata, convexity, and uniform sampling of the bodies."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import geowalk as gw
from geowalk.errors import AcceptanceTooLow, NotConvex, PreconditionError


def test_cap_membership_spot_checks(cap60):
    axis = cap60.axis
    assert cap60.contains_coords(axis)
    rim = np.array([math.sin(math.pi / 3 - 1e-9), 0.0, math.cos(math.pi / 3 - 1e-9)])
    outside = np.array([math.sin(math.pi / 3 + 1e-6), 0.0, math.cos(math.pi / 3 + 1e-6)])
    assert cap60.contains_coords(rim)
    assert not cap60.contains_coords(outside)
    assert not cap60.contains_coords(-axis)


def test_cap_metadata(cap60):
    center, r, d = gw.metadata(cap60)
    assert np.array_equal(center, cap60.axis)
    assert r == pytest.approx(math.pi / 3)
    assert d == pytest.approx(2 * math.pi / 3)
    assert cap60.spec_string.startswith("cap:")


def test_cap_rejects_hemisphere_and_beyond():
    man = gw.Sphere(2)
    axis = np.array([0.0, 0.0, 1.0])
    with pytest.raises(NotConvex):
        gw.SphericalCap(man, axis, math.pi / 2)
    with pytest.raises(NotConvex):
        gw.SphericalCap(man, axis, -0.1)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31), angle=st.floats(0.05, math.pi / 2 - 0.01))
def test_cap_is_geodesically_convex(seed, angle):
    cap = gw.SphericalCap(gw.Sphere(2), np.array([0.0, 0.0, 1.0]), angle)
    rng = gw.stream(seed)
    x = gw.rejection_sample_uniform(cap, rng)
    y = gw.rejection_sample_uniform(cap, rng)
    mid = x + y
    mid /= math.sqrt(mid @ mid)
    assert cap.contains_coords(mid)


def test_geodesic_ball_metadata_and_membership():
    man = gw.Sphere(3)
    center = np.array([0.0, 0.0, 0.0, 1.0])
    ball = gw.GeodesicBall(man, center, 0.5)
    assert ball.inner_radius == 0.5
    assert ball.diameter == 1.0
    assert ball.contains_coords(center)
    far = np.array([math.sin(0.6), 0.0, 0.0, math.cos(0.6)])
    assert not ball.contains_coords(far)
    with pytest.raises(NotConvex):
        gw.GeodesicBall(man, center, 0.5 * man.injectivity_radius + 0.01)


def test_euclidean_ball_and_box():
    ball = gw.GeodesicBall(gw.Euclidean(3), np.zeros(3), 2.0)
    assert ball.contains_coords(np.array([1.0, 1.0, 1.0]))
    assert not ball.contains_coords(np.array([2.0, 1.0, 0.0]))

    box = gw.EuclideanBox(np.array([0.0, -1.0]), np.array([2.0, 1.0]))
    assert box.inner_radius == 1.0
    assert box.diameter == pytest.approx(math.sqrt(8.0))
    assert box.contains_coords(np.array([1.0, 0.0]))
    assert not box.contains_coords(np.array([2.1, 0.0]))
    with pytest.raises(PreconditionError):
        gw.EuclideanBox(np.array([0.0, 0.0]), np.array([1.0, 0.0]))


def test_contains_many_matches_scalar(cap60):
    rng = gw.stream(9)
    pts = rng.standard_normal((64, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    flags = cap60.contains_many(pts)
    for i, row in enumerate(pts):
        assert flags[i] == cap60.contains_coords(row)


def test_cap_uniform_sampling_fraction_matches_area():
    # A 60-degree cap covers exactly a quarter of the 2-sphere, so the
    # rejection sampler's acceptance rate is 1/4.
    man = gw.Sphere(2)
    cap = gw.SphericalCap(man, np.array([0.0, 0.0, 1.0]), math.pi / 3)
    rng = gw.stream(4)
    samples = gw.sample_uniform_many(cap, rng, 20_000)
    assert samples.shape == (20_000, 3)
    assert np.all(cap.contains_many(samples))
    # Polar angle CDF within a tight KS band for exact sampling.
    angles = man.dist_many(samples, cap.axis)
    ks = gw.ks_one_sample(angles, lambda t: (1.0 - np.cos(t)) / 0.5)
    assert ks < 0.02


def test_box_sampling_is_direct_and_uniform():
    box = gw.EuclideanBox(np.array([1.0, 2.0]), np.array([3.0, 6.0]))
    rng = gw.stream(5)
    samples = gw.sample_uniform_many(box, rng, 50_000)
    assert np.all((samples >= box.lo) & (samples <= box.hi))
    assert np.max(np.abs(samples.mean(axis=0) - box.inner_center)) < 0.03


def test_euclidean_ball_sampling_radius_law():
    ball = gw.GeodesicBall(gw.Euclidean(2), np.array([1.0, -1.0]), 3.0)
    rng = gw.stream(6)
    samples = gw.sample_uniform_many(ball, rng, 50_000)
    radii = np.linalg.norm(samples - ball.center, axis=1)
    ks = gw.ks_one_sample(radii, lambda t: (t / 3.0) ** 2)
    assert ks < 0.02


def test_rejection_sampler_is_deterministic(cap60):
    a = gw.rejection_sample_uniform(cap60, gw.stream(11))
    b = gw.rejection_sample_uniform(cap60, gw.stream(11))
    assert np.array_equal(a, b)


def test_tiny_body_trips_acceptance_guard():
    man = gw.Sphere(2)
    sliver = gw.SphericalCap(man, np.array([0.0, 0.0, 1.0]), 1e-4)
    with pytest.raises(AcceptanceTooLow):
        gw.sample_uniform_many(sliver, gw.stream(0), 10, max_consecutive_rejections=2000)


def test_contains_wrapper_validates_manifold(cap60):
    point = gw.ManifoldPoint(cap60.manifold, np.array([0.0, 0.0, 1.0]))
    assert gw.contains(cap60, point)
    other = gw.ManifoldPoint(gw.Sphere(3), np.array([0.0, 0.0, 0.0, 1.0]))
    with pytest.raises(PreconditionError):
        gw.contains(cap60, other)
