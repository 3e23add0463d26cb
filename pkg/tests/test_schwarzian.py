import math

import numpy as np
import pytest

from moebius_boundary.disk import GeodesicState, MoebiusTransform, disk_distance
from moebius_boundary.errors import DomainError, ParseError
from moebius_boundary.schwarzian import (
    FourierDiffeo,
    MoebiusCircleMap,
    cocycle_residual,
    conf_gmvt_check,
    conformal_derivative,
    conjugate_geodesic,
    difference_quotient_derivative,
    distance_diff_profile,
    distortion_residual,
    flip_deviation,
    format_diffeo,
    forward_asymptotic_decay,
    integrated_schwarzian,
    parse_diffeo,
    random_diffeo,
    schwarzian,
    schwarzian_grid,
    schwarzian_sup,
    sine_diffeo,
)

# S(0, pi) of theta -> theta + 0.2 sin(theta), from the closed form below
SINE_S_0_PI = 0.04082199452025512


def closed_form_schwarzian(f, xi, eta):
    """2 [log rho0(f xi, f eta) - log rho0(xi, eta) - (log phi'(xi) + log phi'(eta)) / 2]."""
    r0 = lambda a, b: math.log(abs(np.exp(1j * a) - np.exp(1j * b)) / 2)
    fx, fe = float(f.phi(xi)), float(f.phi(eta))
    return 2 * (r0(fx, fe) - r0(xi, eta) - 0.5 * (math.log(f.dphi(xi)) + math.log(f.dphi(eta))))


def test_sine_diffeo_frozen_value():
    f = sine_diffeo()
    assert schwarzian(f, 0.0, math.pi) == pytest.approx(SINE_S_0_PI, abs=1e-13)
    assert closed_form_schwarzian(f, 0.0, math.pi) == pytest.approx(SINE_S_0_PI, abs=1e-13)


def test_schwarzian_matches_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(30):
        f = random_diffeo(rng, 0.3)
        xi, eta = rng.uniform(0, 2 * math.pi, 2)
        if abs(math.remainder(xi - eta, 2 * math.pi)) < 0.05:
            continue
        assert schwarzian(f, xi, eta) == pytest.approx(closed_form_schwarzian(f, xi, eta), abs=1e-10)


def test_derivative_against_difference_quotient():
    f = sine_diffeo()
    x, y = 0.2 - 0.1j, 0.3 + 0.3j
    assert difference_quotient_derivative(f, x, y, 1.0) == pytest.approx(float(conformal_derivative(f, x, y, 1.0)), rel=1e-6)


def test_moebius_maps_have_zero_schwarzian():
    m = MoebiusCircleMap(MoebiusTransform.from_halfplane(2, 1, 3, 2))
    for xi, eta in ((0.1, 2.0), (4.0, 1.0), (0.0, math.pi)):
        assert abs(schwarzian(m, xi, eta)) < 1e-12
    assert np.nanmax(np.abs(schwarzian_grid(m, 32))) < 1e-10


def test_schwarzian_grid_and_symmetry():
    f = sine_diffeo()
    S = schwarzian_grid(f, 16)
    assert np.all(np.isnan(np.diag(S)))
    assert np.allclose(S, S.T, equal_nan=True)
    assert S[0, 8] == pytest.approx(SINE_S_0_PI, abs=1e-12)
    assert schwarzian_sup(f) >= SINE_S_0_PI - 1e-12


def test_schwarzian_rejects_equal_points():
    with pytest.raises(DomainError):
        integrated_schwarzian(sine_diffeo(), 1.0, 1.0)


def test_conjugacy_of_moebius_map_is_the_isometry():
    T = MoebiusTransform.from_halfplane(1.2, 0.4, -0.5, 1.0)
    m = MoebiusCircleMap(T)
    g = GeodesicState.from_ray(0.3 - 0.2j, 2.0)
    h = conjugate_geodesic(m, g)
    assert disk_distance(h.basepoint, T.apply_point(g.basepoint)) < 1e-12
    assert flip_deviation(m, g) < 1e-12


def test_identities_for_random_diffeos():
    rng = np.random.default_rng(4)
    for _ in range(10):
        f, g = random_diffeo(rng, 0.3), random_diffeo(rng, 0.3)
        geo = GeodesicState.from_ray(complex(*rng.uniform(-0.5, 0.5, 2)), rng.uniform(0, 6))
        assert flip_deviation(f, geo) < 1e-9
        assert cocycle_residual(f, g, 0.4, 3.0) < 1e-10
        assert distortion_residual(f, (0.1, 1.7, 3.3, 4.9)) < 1e-10


def test_distortion_rejects_ill_conditioned_quads():
    with pytest.raises(DomainError):
        distortion_residual(sine_diffeo(), (0.0, 1e-6, 2.0, 4.0))


def test_gmvt_sandwich_on_sine():
    f = sine_diffeo()
    s = schwarzian_sup(f)
    v = conf_gmvt_check(f, 0.1j, -0.3, 0.5, 2.5, s)
    assert v.holds
    # with x, y on the geodesics and matched basepoints the middle term is exactly S
    x = GeodesicState.through_nearest(0.5, 2.5).basepoint
    y = GeodesicState.through_nearest(float(f(0.5)), float(f(2.5))).basepoint
    mid = conf_gmvt_check(f, x, y, 0.5, 2.5, s).log_middle
    assert mid == pytest.approx(schwarzian(f, 0.5, 2.5), abs=1e-12)


def test_profile_converges_to_schwarzian():
    f = sine_diffeo()
    prof = distance_diff_profile(f, 0, 0.0, math.pi, [5, 10, 15])
    errs = [abs(p - SINE_S_0_PI) for p in prof]
    assert errs[2] < 1e-4
    assert errs[0] > errs[1] > errs[2] or errs[2] < 1e-8


def test_profile_for_moebius_is_zero():
    m = MoebiusCircleMap(MoebiusTransform.from_halfplane(2, 1, 3, 2))
    assert max(abs(p) for p in distance_diff_profile(m, 0.1, 0.5, 3.0, [2, 8, 15])) < 1e-7


def test_forward_asymptotic_decay():
    f = sine_diffeo()
    g = GeodesicState.through_nearest(0.0, math.pi)
    prof = forward_asymptotic_decay(f, g)
    assert prof.forward[-1] < 1e-3
    # the backward term settles at the Schwarzian difference of the two backward endpoints
    level = abs(schwarzian(f, 0.0, math.pi) - schwarzian(f, 0.5, math.pi))
    assert prof.backward[-1] == pytest.approx(level, abs=1e-5)


def test_diffeo_file_round_trip_and_errors():
    f = FourierDiffeo(((1, 0.1, 0.0), (3, -0.05, 1.5)))
    assert parse_diffeo(format_diffeo(f)) == f
    with pytest.raises(ParseError, match="d.txt:3:"):
        parse_diffeo("diffeo v1\nTERM 1 0.5 0\nTERM 2 0.3 0\n", path="d.txt")
    with pytest.raises(ParseError, match="d.txt:2:"):
        parse_diffeo("diffeo v1\nTERM x 0.5 0\n", path="d.txt")
    with pytest.raises(ParseError, match="header"):
        parse_diffeo("TERM 1 0.5 0\n")


def test_fourier_diffeo_validation():
    with pytest.raises(DomainError):
        FourierDiffeo(((1, 0.95, 0.0),))
