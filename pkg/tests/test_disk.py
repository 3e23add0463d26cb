import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moebius_boundary.disk import (
    GeodesicState,
    MoebiusTransform,
    angle_at,
    busemann_poisson,
    busemann_radial_oracle,
    check_interior,
    classify_by_trace,
    disk_distance,
    distance_to_geodesic,
    log_cross_ratio_disk,
    log_visual_metric_disk,
    nearest_point_to_origin,
    point_at_distance,
    sup_busemann,
    visual_derivative_angle,
)
from moebius_boundary.errors import DomainError


def test_distance_from_origin():
    for t in (0.1, 1.0, 5.0, 12.0):
        assert disk_distance(0, point_at_distance(t, 0.7)) == pytest.approx(t, rel=1e-12)


def test_interior_check():
    with pytest.raises(DomainError):
        check_interior(1.0)
    with pytest.raises(DomainError):
        disk_distance(0.3, 1j)


def test_busemann_matches_radial_limit():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, y = (complex(*rng.uniform(-0.5, 0.5, 2)) for _ in range(2))
        theta = rng.uniform(0, 2 * math.pi)
        assert float(busemann_poisson(theta, x, y)) == pytest.approx(busemann_radial_oracle(theta, x, y), abs=1e-6)


def test_visual_metric_at_origin_is_half_chord():
    xi, eta = 0.3, 2.1
    half_chord = abs(np.exp(1j * xi) - np.exp(1j * eta)) / 2
    assert math.exp(log_visual_metric_disk(0, xi, eta)) == pytest.approx(half_chord, rel=1e-14)
    assert math.exp(log_visual_metric_disk(0, 0.0, math.pi)) == pytest.approx(1.0, rel=1e-15)


def test_derivative_from_angle_agrees_with_poisson():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x, y = (complex(*rng.uniform(-0.6, 0.6, 2)) for _ in range(2))
        theta = rng.uniform(0, 2 * math.pi, 5)
        assert np.allclose(visual_derivative_angle(x, y, theta), np.exp(busemann_poisson(theta, x, y)), rtol=1e-10)


def test_sup_busemann_is_distance():
    rng = np.random.default_rng(2)
    for _ in range(20):
        x, y = (point_at_distance(rng.uniform(0, 4), rng.uniform(0, 6.3)) for _ in range(2))
        val, arg = sup_busemann(x, y)
        assert val == pytest.approx(disk_distance(x, y), abs=1e-9)
        # the maximizing direction is where y is seen from x
        if disk_distance(x, y) > 1e-3:
            assert angle_at(x, y, arg) == pytest.approx(0, abs=1e-5)


def test_moebius_determinant_and_inverse():
    m = MoebiusTransform.from_halfplane(2, 1, 3, 2)
    assert abs(m.a) ** 2 - abs(m.b) ** 2 == pytest.approx(1)
    z = 0.2 - 0.4j
    assert m.inverse().apply_point(m.apply_point(z)) == pytest.approx(z, abs=1e-14)
    with pytest.raises(DomainError):
        MoebiusTransform(2, 0)


def test_moebius_is_an_isometry_and_lift_is_consistent():
    rng = np.random.default_rng(3)
    m = MoebiusTransform.from_halfplane(1.5, -0.3, 0.7, 0.8)
    for _ in range(20):
        x, y = (complex(*rng.uniform(-0.6, 0.6, 2)) for _ in range(2))
        assert disk_distance(m.apply_point(x), m.apply_point(y)) == pytest.approx(disk_distance(x, y), rel=1e-11)
    t = np.linspace(0, 2 * math.pi, 50)
    assert np.allclose(np.mod(m.lift(t), 2 * math.pi), m.apply_angle(t), atol=1e-12) or np.allclose(
        np.exp(1j * m.lift(t)), np.exp(1j * m.apply_angle(t)), atol=1e-12
    )
    assert m.lift(t[0] + 2 * math.pi) == pytest.approx(m.lift(t[0]) + 2 * math.pi)
    h = 1e-6
    fd = (m.lift(t + h) - m.lift(t - h)) / (2 * h)
    assert np.allclose(fd, m.derivative(t), rtol=1e-7)


def test_halfplane_translation_fixes_infinity():
    m = MoebiusTransform.from_halfplane(1, 1, 0, 1)
    # the Cayley map sends infinity to the boundary point 1
    assert m.apply_angle(0.0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize(
    "matrix, kind",
    [
        ([[1, 1], [0, 1]], "parabolic"),
        ([[math.cos(0.3), -math.sin(0.3)], [math.sin(0.3), math.cos(0.3)]], "elliptic"),
        ([[2, 0], [0, 0.5]], "hyperbolic"),
        ([[-1, 3], [0, -1]], "parabolic"),
    ],
)
def test_trace_classification(matrix, kind):
    assert classify_by_trace(matrix) == kind


def test_nearest_point_and_geodesic_state():
    p = nearest_point_to_origin(0.0, math.pi / 2)
    assert distance_to_geodesic(p, 0.0, math.pi / 2) == pytest.approx(0, abs=1e-12)
    assert distance_to_geodesic(0, 0.0, math.pi / 2) == pytest.approx(disk_distance(0, p), rel=1e-12)
    g = GeodesicState.from_ray(0.1 + 0.2j, 1.0)
    assert g.eta == pytest.approx(1.0)
    assert disk_distance(g.point_at(2.5), g.basepoint) == pytest.approx(2.5, rel=1e-12)
    assert disk_distance(g.flow(1.0).point_at(1.0), g.point_at(2.0)) == pytest.approx(0, abs=1e-9)
    with pytest.raises(DomainError):
        GeodesicState(0.0, 1.0, 0.5j)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-3, 3), min_size=4, max_size=4),
    st.lists(st.floats(0, 2 * math.pi), min_size=4, max_size=4, unique=True),
)
def test_cross_ratio_invariance_property(entries, quad):
    a, b, c, d = entries
    if a * d - b * c < 0.1:
        return
    pts = np.exp(1j * np.array(quad))
    if min(abs(pts[i] - pts[j]) for i in range(4) for j in range(i + 1, 4)) < 1e-3:
        return
    m = MoebiusTransform.from_halfplane(a, b, c, d)
    before = log_cross_ratio_disk(quad)
    after = log_cross_ratio_disk(m.apply_angle(np.array(quad)))
    assert after == pytest.approx(before, abs=1e-8)
    assert log_cross_ratio_disk(quad, x=0.3 - 0.5j) == pytest.approx(before, abs=1e-10)
