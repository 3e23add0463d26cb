import math

import numpy as np
import pytest

from moebius_boundary.descent import containing_bisector, minimax_descent, move, refine_maxima
from moebius_boundary.disk import MoebiusTransform, busemann_poisson, disk_distance
from moebius_boundary.errors import ProjectionNotConverged


def test_containing_bisector():
    assert containing_bisector([0.1]) == pytest.approx(0.1)
    assert containing_bisector([0.0, 1.0]) == pytest.approx(0.5)
    assert containing_bisector([6.0, 0.5]) % (2 * math.pi) == pytest.approx((6.0 + (0.5 + 2 * math.pi - 6.0) / 2) % (2 * math.pi))
    assert containing_bisector([0.0, 2.1, 4.2]) is None


def test_move_has_unit_speed():
    y = 0.3 - 0.2j
    assert disk_distance(y, move(y, 1.0, 2.0)) == pytest.approx(2.0, rel=1e-12)


def busemann_objective(thetas, consts):
    thetas, consts = np.asarray(thetas), np.asarray(consts)

    def evaluate(y):
        # each term decreases when y moves toward its boundary point
        vals = consts - busemann_poisson(thetas, 0, y)
        T = MoebiusTransform.to_origin(y)
        return vals, T.apply(np.exp(1j * thetas))

    return evaluate


def test_symmetric_busemann_max_is_minimized_at_origin():
    ev = busemann_objective([0.0, 2 * math.pi / 3, 4 * math.pi / 3], [0, 0, 0])
    res = minimax_descent(ev, 0.4 + 0.3j, tol=1e-9)
    assert abs(res.point) < 1e-6
    assert res.value == pytest.approx(0, abs=1e-8)
    assert res.history == sorted(res.history, reverse=True)


def test_two_opposite_terms_minimum_on_their_geodesic():
    # max(-B_0, -B_pi + c) is minimized where the two agree: at distance c/2 toward pi
    c = 1.0
    ev = busemann_objective([0.0, math.pi], [0.0, c])
    res = minimax_descent(ev, 0.5j, tol=1e-9)
    assert res.value == pytest.approx(c / 2, abs=1e-6)


def test_iteration_cap_raises_with_diagnostics():
    ev = busemann_objective([0.0, 2 * math.pi / 3, 4 * math.pi / 3], [0, 0, 0])
    with pytest.raises(ProjectionNotConverged) as info:
        minimax_descent(ev, 0.9, tol=1e-12, max_iter=2)
    assert "point" in info.value.diagnostics


def test_refine_maxima_finds_peak_between_grid_points():
    grid = np.linspace(0, 2 * math.pi, 16, endpoint=False)
    fn = lambda t: np.cos(np.asarray(t) - 0.1234)
    ref = refine_maxima(fn, grid, fn(grid), top=1)
    assert ref[0] == pytest.approx(0.1234, abs=1e-7)
