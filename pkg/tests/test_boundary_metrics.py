import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from moebius_boundary.boundary_metrics import (
    FiniteBoundary,
    LogMetric,
    conformal_scale,
    cross_ratio_log,
    dM,
    derivative_log,
    embed_coordinates,
    format_logmetric,
    lipschitz_check,
    log_derivative,
    parse_logmetric,
    sup_distance,
    validate_membership,
)
from moebius_boundary.errors import NotMoebiusEquivalent, ParseError
from moebius_boundary.tree import h_tree, random_point, random_tree, sample_member_metric, spider, visual_log_metric

Q = Fraction


def spider_center_metric(k=4):
    T = spider(k)
    return visual_log_metric(T, T.vertex_point("c"))


def test_spider_center_metric_is_all_zero():
    rho = spider_center_metric()
    assert set(rho.entries.values()) == {0}


def test_conformal_scale_member_and_derivative():
    base = spider_center_metric()
    rho = conformal_scale(base, [Q(3, 2), Q(-3, 2), Q(-3, 2), Q(-3, 2)])
    assert validate_membership(rho, base).member
    assert log_derivative(rho, base).values == (Q(3, 2), Q(-3, 2), Q(-3, 2), Q(-3, 2))
    assert dM(base, rho) == Q(3, 2)


def test_unbalanced_scale_is_rejected():
    base = spider_center_metric()
    rho = conformal_scale(base, [1, -1, -1, -2])
    verdict = validate_membership(rho, base)
    assert verdict.status == "violation"
    assert any("antipodality" in v for v in verdict.violations)


def test_positive_entry_rejected():
    base = spider_center_metric()
    rho = conformal_scale(base, [2, -1, -1, -1])
    verdict = validate_membership(rho, base)
    assert not verdict.member
    assert any("positive" in v for v in verdict.violations)


def test_cross_ratio_mismatch_detected():
    T1, T2 = h_tree(1), h_tree(2)
    r1 = visual_log_metric(T1, T1.vertex_point("u"))
    r2 = visual_log_metric(T2, T2.vertex_point("u"))
    verdict = validate_membership(r2, r1)
    assert any("cross-ratio" in v for v in verdict.violations)
    with pytest.raises(NotMoebiusEquivalent):
        derivative_log(r2, r1, "a")


def test_htree_cross_ratio_values():
    for L in (1, 2, Q(7, 3)):
        T = h_tree(L)
        rho = visual_log_metric(T, T.vertex_point("v"))
        assert cross_ratio_log(rho, ("a", "c", "b", "d")) == -Q(L)
        assert cross_ratio_log(rho, ("a", "b", "c", "d")) == 0


def test_file_round_trip():
    base = spider_center_metric()
    rho = conformal_scale(base, [Q(5, 3), Q(-5, 3), Q(-5, 3), Q(-5, 3)])
    text = format_logmetric(rho)
    assert "D e2 e3 -5/3" in text
    assert parse_logmetric(text) == rho


@pytest.mark.parametrize(
    "text, line",
    [
        ("logmetric v2\n", 1),
        ("logmetric v1\nD a b 0\n", 2),
        ("logmetric v1\nPOINTS a b c d\nD a b 1/2\n", 3),
        ("logmetric v1\nPOINTS a b c d\n# comment\nD a e 0\n", 4),
        ("logmetric v1\nPOINTS a b c d\nD a b x/y\n", 3),
        ("logmetric v1\nPOINTS a b c d\nD a b 0\nD b a 0\n", 4),
        ("logmetric v1\nPOINTS a b\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as info:
        parse_logmetric(text, path="m.txt")
    assert f"m.txt:{line}:" in str(info.value)


def test_lipschitz_worst_ratio_for_visual_metrics():
    T = spider(4)
    r1 = visual_log_metric(T, T.vertex_point("c"))
    r2 = visual_log_metric(T, T.point(0, 1))
    v = lipschitz_check(r2, r1)
    # f = (e, 1/e, 1/e, 1/e), lam = e, rho1 = 1 on distinct ends
    assert v.holds
    assert v.worst_ratio == pytest.approx((2.718281828459045 - 1 / 2.718281828459045) / (2 * 2.718281828459045**2), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_exact_identities_on_random_trees(seed):
    rng = random.Random(seed)
    T = random_tree(rng, rng.randint(4, 8))
    r1 = visual_log_metric(T, random_point(T, rng))
    r2 = sample_member_metric(T, rng)[0]
    r3 = visual_log_metric(T, random_point(T, rng))
    L21, L32, L31 = (log_derivative(a, b).values for a, b in ((r2, r1), (r3, r2), (r3, r1)))
    assert L31 == tuple(a + b for a, b in zip(L32, L21))
    assert max(L21) + min(L21) == 0
    assert dM(r1, r3) <= dM(r1, r2) + dM(r2, r3)
    assert dM(r1, r2) == dM(r2, r1)
    assert sup_distance(embed_coordinates(r1, r3), embed_coordinates(r2, r3)) == dM(r1, r2)


def test_finite_boundary_rejects_duplicates():
    with pytest.raises(ValueError):
        FiniteBoundary(("a", "a", "b"))


def test_logmetric_requires_all_pairs():
    with pytest.raises(ValueError):
        LogMetric(FiniteBoundary(("a", "b", "c")), {(0, 1): Q(0)})
