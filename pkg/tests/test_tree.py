import random
from fractions import Fraction

import pytest

from moebius_boundary.boundary_metrics import conformal_scale, dM, log_derivative
from moebius_boundary.errors import DomainError, NotMoebius, ParseError, SurjectivityViolation
from moebius_boundary.tree import (
    TreePoint,
    busemann_log,
    format_tree,
    gromov_product,
    h_tree,
    parse_tree,
    project_metric_tree,
    random_point,
    random_tree,
    relabeled_copy,
    sample_member_metric,
    spider,
    tree_distance,
    tree_moebius_extend,
    visual_log_metric,
)

Q = Fraction


def test_spider_distances_and_products():
    T = spider(4)
    x, y = T.point(0, Q(1, 2)), T.point(1, Q(1, 3))
    assert tree_distance(T, x, y) == Q(5, 6)
    assert gromov_product(T, x, "e1", "e2") == 0
    assert gromov_product(T, x, "e2", "e3") == Q(1, 2)
    assert busemann_log(T, "e1", T.vertex_point("c"), x) == Q(1, 2)
    assert busemann_log(T, "e2", T.vertex_point("c"), x) == -Q(1, 2)


def test_visual_metric_matches_far_point_products():
    rng = random.Random(3)
    for _ in range(100):
        T = random_tree(rng, rng.randint(4, 8))
        x = random_point(T, rng)
        rho = visual_log_metric(T, x)
        n = len(T.rays)
        for i in range(n):
            for j in range(i + 1, n):
                assert rho.ld(i, j) == -gromov_product(T, x, i, j)


def test_visual_derivative_is_busemann():
    T = spider(4)
    c, x = T.vertex_point("c"), T.point(0, Q(1, 2))
    d = log_derivative(visual_log_metric(T, x), visual_log_metric(T, c)).values
    assert d == (Q(1, 2), -Q(1, 2), -Q(1, 2), -Q(1, 2))
    assert dM(visual_log_metric(T, c), visual_log_metric(T, x)) == tree_distance(T, c, x)


def test_projection_of_scaled_metric():
    T = spider(4)
    base = visual_log_metric(T, T.vertex_point("c"))
    rho = conformal_scale(base, [Q(3, 2), -Q(3, 2), -Q(3, 2), -Q(3, 2)])
    assert project_metric_tree(T, rho) == (TreePoint(0, Q(3, 2)), 0)


def test_projection_of_visual_metric_returns_the_point():
    rng = random.Random(11)
    for _ in range(40):
        T = random_tree(rng, rng.randint(4, 7))
        x = random_point(T, rng)
        p, gap = project_metric_tree(T, visual_log_metric(T, x))
        assert gap == 0
        assert tree_distance(T, p, x) == 0


def test_projection_of_sampled_members_has_zero_gap():
    rng = random.Random(5)
    for _ in range(10):
        T = random_tree(rng, rng.randint(4, 8))
        rho, _ = sample_member_metric(T, rng)
        _, gap = project_metric_tree(T, rho)
        assert gap == 0


def test_projection_rejects_non_members():
    T = spider(4)
    base = visual_log_metric(T, T.vertex_point("c"))
    with pytest.raises(DomainError):
        project_metric_tree(T, conformal_scale(base, [1, -1, -1, -2]))


def test_surjectivity_violation_type():
    assert issubclass(SurjectivityViolation, AssertionError)


def test_htree_extension_rejects_different_lengths():
    with pytest.raises(NotMoebius) as info:
        tree_moebius_extend(h_tree(1), h_tree(2), {e: e for e in "abcd"})
    assert info.value.witness == ("a", "c", "b", "d")
    assert info.value.values == (-1, -2)


def test_leg_swap_is_an_exact_isometry():
    T = h_tree(Q(5, 2))
    F = tree_moebius_extend(T, T, {"a": "c", "b": "d", "c": "a", "d": "b"})
    rng = random.Random(1)
    pts = [random_point(T, rng) for _ in range(12)]
    assert F.distance_defect([(p, q) for p in pts for q in pts]) == 0
    # the midpoint of the bridge is fixed, its ends swap
    assert F(T.point(0, Q(5, 4))) == T.point(0, Q(5, 4))
    assert F(T.vertex_point("u")) == T.vertex_point("v")
    assert all(F.boundary_coherent(e) for e in "abcd")


def test_relabeled_copy_extension():
    rng = random.Random(8)
    T = random_tree(rng, 6)
    T2, end_map = relabeled_copy(T, rng)
    F = tree_moebius_extend(T, T2, end_map)
    pts = [random_point(T, rng) for _ in range(10)]
    assert F.distance_defect([(p, q) for p in pts for q in pts]) == 0


def test_tree_file_round_trip():
    T = h_tree(Q(7, 3))
    text = format_tree(T)
    T2 = parse_tree(text)
    assert format_tree(T2) == text
    assert T2.edges == T.edges


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("tree v1\nVERTEX u\nEDGE u u 1\n", 3, "cycle"),
        ("tree v1\nVERTEX u\nVERTEX v\nEDGE u v 0\nEND a AT u\nEND b AT u\nEND c AT v\nEND d AT v\n", 4, "length"),
        ("tree v1\nVERTEX u\nEND a AT u\nEND b AT u\nEND c AT u\n", None, "ends"),
        ("tree v1\nVERTEX u\nVERTEX v\nEDGE u v 1\nEND a AT u\nEND b AT u\nEND c AT u\nEND d AT u\n", 3, "degree"),
    ],
)
def test_tree_parse_errors(text, line, fragment):
    with pytest.raises((ParseError, DomainError)) as info:
        parse_tree(text, path="t.txt")
    msg = str(info.value)
    assert fragment in msg
    if line is not None:
        assert f"t.txt:{line}:" in msg
