import math
import random
from fractions import Fraction

import numpy as np
import pytest

from moebius_boundary.boundary_metrics import dM
from moebius_boundary.disk import TWO_PI, MoebiusTransform, disk_distance, log_visual_metric_disk, point_at_distance
from moebius_boundary.errors import DomainError, NotMoebius
from moebius_boundary.extension import (
    DISK,
    DiskMetric,
    conf_extension,
    d_conf_pushed_visual,
    disk_dM,
    disk_visual_dM,
    embed_point,
    extend_moebius,
    metric_from_involution,
    moebius_witness,
    project,
    project_disk,
    pushforward,
    sample_admissible_metric,
    spot_check_disk_metric,
)
from moebius_boundary.schwarzian import FourierDiffeo, MoebiusCircleMap, schwarzian_sup, sine_diffeo
from moebius_boundary.tree import h_tree, random_point, random_tree, relabeled_copy, sample_member_metric, spider

HALF_LOG2 = 0.5 * math.log(2)


def test_embed_spider_center_is_zero():
    T = spider(5)
    rho = embed_point(T, T.vertex_point("c"))
    assert set(rho.entries.values()) == {0}


def test_embed_disk_origin_is_half_chord():
    rho = embed_point(DISK, 0)
    assert rho.is_visual
    xi, eta = 0.4, 2.9
    assert float(rho.log_distance(xi, eta)) == pytest.approx(math.log(abs(np.exp(1j * xi) - np.exp(1j * eta)) / 2))


def test_disk_metric_pushforward_matches_direct_formula():
    m = MoebiusTransform.from_halfplane(2, 1, 3, 2)
    sm = metric_from_involution(FourierDiffeo(((1, 0.1, 0.0), (3, 0.05, 0.0))))
    rho = sm.metric
    pushed = rho.pushforward(m)
    inv = m.inverse()
    t = np.array([0.3, 1.1, 2.5, 4.0, 5.5])
    for a in t:
        for b in t:
            if a != b:
                direct = rho.log_distance(float(inv.apply_angle(a)), float(inv.apply_angle(b)))
                assert float(pushed.log_distance(a, b)) == pytest.approx(float(direct), abs=1e-9)


def test_visual_pushforward_is_visual_at_image():
    m = MoebiusTransform.from_halfplane(1.5, 0.2, -0.4, 0.6)
    x = 0.2 + 0.3j
    pushed = DiskMetric.visual(x).pushforward(m)
    assert pushed.anchor == pytest.approx(m.apply_point(x))
    assert np.max(np.abs(pushed.coeffs)) == 0


def test_disk_dM_of_visual_metrics_is_distance():
    rng = np.random.default_rng(0)
    for _ in range(10):
        x, y = (point_at_distance(rng.uniform(0, 3), rng.uniform(0, TWO_PI)) for _ in range(2))
        d = disk_distance(x, y)
        assert disk_visual_dM(x, y) == pytest.approx(d, abs=1e-9)
        assert disk_dM(DiskMetric.visual(x), DiskMetric.visual(y)) == pytest.approx(d, abs=1e-8)


def test_involution_metric_is_admissible():
    sm = metric_from_involution(FourierDiffeo(((1, 0.1, 0.0), (2, -0.08, 0.0), (3, 0.02, 0.0))))
    assert sm.closure_error < 1e-12
    assert sm.constant_spread < 1e-9
    tri, anti, diam = spot_check_disk_metric(sm.metric, np.random.default_rng(1))
    assert tri <= 1e-8
    assert anti <= 1e-6
    assert diam <= 1e-6
    assert not sm.metric.is_visual


def test_sampler_reports_rejections_and_projection_gap():
    rng = np.random.default_rng(2)
    rho, rejections = sample_admissible_metric(rng)
    assert rejections >= 0
    res = project_disk(rho)
    assert res.value <= HALF_LOG2 + 1e-3


def test_project_visual_returns_point():
    x = 0.3 - 0.5j
    p = project(DISK, DiskMetric.visual(x), start=0)
    assert disk_distance(p.point, x) < 1e-6
    assert p.gap < 1e-7
    T = spider(4)
    q = T.point(2, Fraction(7, 3))
    pt = project(T, embed_point(T, q))
    assert pt.point == q and pt.gap == 0


def test_tree_pushforward_is_a_relabeling_and_an_isometry():
    T = spider(4)
    swap = {"e1": "e2", "e2": "e1", "e3": "e3", "e4": "e4"}
    x = T.point(0, 1)
    pushed = pushforward(swap, embed_point(T, x), target=T)
    assert pushed == embed_point(T, T.point(1, 1))
    rng = random.Random(4)
    T = random_tree(rng, 6)
    T2, end_map = relabeled_copy(T, rng)
    for _ in range(10):
        r1, r2 = sample_member_metric(T, rng)[0], sample_member_metric(T, rng)[0]
        assert dM(pushforward(end_map, r1, T2), pushforward(end_map, r2, T2)) == dM(r1, r2)


def test_identity_pushforward_unchanged():
    sm = metric_from_involution(FourierDiffeo(((1, 0.1, 0.0),)))
    out = pushforward(MoebiusTransform.identity(), sm.metric)
    assert np.allclose(out.coeffs, sm.metric.coeffs)


def test_non_moebius_map_rejected_with_witness():
    f = sine_diffeo()
    with pytest.raises(NotMoebius) as info:
        pushforward(f, DiskMetric.visual(0))
    assert len(info.value.witness) == 4
    before, after = info.value.values
    assert abs(before - after) > 1e-9
    assert moebius_witness(MoebiusCircleMap(MoebiusTransform.from_halfplane(2, 1, 3, 2)), np.random.default_rng(0)) is None


def test_tree_to_disk_extension_rejected():
    with pytest.raises(DomainError):
        extend_moebius({}, spider(4), DISK)


def test_disk_moebius_extension_is_close_to_isometry():
    m = MoebiusTransform.from_halfplane(2, 1, 3, 2)
    F = extend_moebius(m, DISK, DISK, start=0)
    for x in (0.0, 0.3j, -0.5 + 0.2j):
        assert disk_distance(F(x), m.apply_point(x)) < 1e-4
    coh = F.impl.boundary_coherence(0.1j, 1.0)
    assert coh[-1] < 1e-3


def test_identity_extension_is_identity():
    F = extend_moebius(MoebiusTransform.identity(), DISK, DISK, start=0.2)
    assert disk_distance(F(-0.4 + 0.1j), -0.4 + 0.1j) < 1e-4


def test_tree_leg_swap_extension_defect_zero():
    T = h_tree(3)
    F = extend_moebius({"a": "c", "b": "d", "c": "a", "d": "b"}, T, T)
    rng = random.Random(0)
    pts = [random_point(T, rng) for _ in range(8)]
    assert F.defect([(p, q) for p in pts for q in pts]) == 0


def test_conformal_extension_bound_for_sine():
    f = sine_diffeo()
    E = conf_extension(f)
    pts = [0, 0.4j, -0.5 + 0.1j, 0.6]
    bound = math.log(2) + 12 * schwarzian_sup(f)
    assert E.defect([(p, q) for p in pts for q in pts]) <= bound + 1e-3
    y, value, one_sided, _ = E.locate(0.4j)
    assert value == pytest.approx(d_conf_pushed_visual(f, 0.4j, y), abs=1e-9)
    # the one-sided minimum is at most the two-sided value
    assert one_sided <= value + 1e-9
    assert value <= HALF_LOG2 + 6 * schwarzian_sup(f) + 1e-3


def test_conformal_extension_of_moebius_map():
    m = MoebiusTransform.from_halfplane(1.3, 0.2, 0.1, 0.9)
    E = conf_extension(MoebiusCircleMap(m))
    assert disk_distance(E(0.2 - 0.1j), m.apply_point(0.2 - 0.1j)) < 1e-4
