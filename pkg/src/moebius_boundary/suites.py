"""Seeded property suites for every module, shared by the CLI and the acceptance tests.

Every check returns a ``PropertyResult`` holding the worst residual seen,
the tolerance it was held to and, on failure, a reproducer: the failing
inputs written in the package's file formats where one exists.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import boundary_metrics as bm
from . import classifier as cl
from . import disk as dk
from . import extension as ex
from . import schwarzian as sz
from . import tree as tr
from .errors import NotMoebius

HALF_LOG2 = 0.5 * math.log(2)
LOG2 = math.log(2)


@dataclass
class PropertyResult:
    name: str
    passed: bool
    worst: object  # exact Fraction for tree properties, float otherwise
    tolerance: object
    cases: int
    seconds: float = 0.0
    reproducer: str | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    cases: int
    properties: list
    seconds: float

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def _result(name, worst, tol, cases, timer, reproducer=None, passed=None, **extra):
    if passed is None:
        passed = worst <= tol
    return PropertyResult(name, bool(passed), worst, tol, cases, timer.seconds, None if passed else reproducer, extra)


# -- core: exact identities on tree boundaries -------------------------------


def _random_metric(T, rng):
    if rng.random() < 0.5:
        return tr.visual_log_metric(T, tr.random_point(T, rng))
    return tr.sample_member_metric(T, rng)[0]


def check_exact_identities(seed: int = 0, cases: int = 200) -> list[PropertyResult]:
    rng = random.Random(seed)
    failures = {k: None for k in ("chain", "gmvt", "maxmin", "axioms", "embedding")}
    with _Timer() as t:
        for _ in range(cases):
            T = tr.random_tree(rng, rng.randint(4, 8))
            r1, r2, r3 = (_random_metric(T, rng) for _ in range(3))
            L21 = bm.log_derivative(r2, r1).values
            L32 = bm.log_derivative(r3, r2).values
            L31 = bm.log_derivative(r3, r1).values
            bad = []
            if any(a != b + c for a, b, c in zip(L31, L32, L21)):
                bad.append("chain")
            n = len(r1)
            if any(r2.ld(i, j) - r1.ld(i, j) != (L21[i] + L21[j]) / 2 for i in range(n) for j in range(i + 1, n)):
                bad.append("gmvt")
            if max(L21) + min(L21) != 0:
                bad.append("maxmin")
            d12, d21, d23, d13 = bm.dM(r1, r2), bm.dM(r2, r1), bm.dM(r2, r3), bm.dM(r1, r3)
            if bm.dM(r1, r1) != 0 or d12 != d21 or d13 > d12 + d23 or (d12 == 0) != (r1 == r2):
                bad.append("axioms")
            c1, c2 = bm.embed_coordinates(r1, r3), bm.embed_coordinates(r2, r3)
            if bm.sup_distance(c1, c2) != d12:
                bad.append("embedding")
            for k in bad:
                if failures[k] is None:
                    failures[k] = tr.format_tree(T) + "\n" + "\n".join(bm.format_logmetric(r) for r in (r1, r2, r3))
    names = {
        "chain": "chain rule",
        "gmvt": "geometric mean value theorem",
        "maxmin": "max derivative times min derivative = 1",
        "axioms": "dM metric axioms",
        "embedding": "sup-norm embedding is isometric",
    }
    return [
        PropertyResult(names[k], failures[k] is None, 0 if failures[k] is None else 1, 0, cases, t.seconds, failures[k])
        for k in names
    ]


def check_lipschitz(seed: int = 0, cases: int = 50, precision: int = bm.DEFAULT_PRECISION) -> PropertyResult:
    rng = random.Random(seed + 1)
    worst, repro, ok = 0.0, None, True
    with _Timer() as t:
        for _ in range(cases):
            T = tr.random_tree(rng, rng.randint(4, 8))
            r1, r2 = _random_metric(T, rng), _random_metric(T, rng)
            v = bm.lipschitz_check(r2, r1, precision=precision)
            worst = max(worst, v.worst_ratio)
            if not v.holds and ok:
                ok = False
                repro = bm.format_logmetric(r1) + "\n" + bm.format_logmetric(r2)
    return _result("derivative Lipschitz bound (certified)", worst, 1.0, cases, t, repro, passed=ok)


def suite_core(seed=0, cases=200, precision=bm.DEFAULT_PRECISION, **_):
    return check_exact_identities(seed, cases) + [check_lipschitz(seed, max(10, cases // 4), precision)]


# -- tree ------------------------------------------------------------------


def check_tree_surjectivity(seed: int = 0, trees: int = 10, per_tree: int = 5) -> PropertyResult:
    rng = random.Random(seed + 2)
    worst, repro = Fraction(0), None
    with _Timer() as t:
        for _ in range(trees):
            T = tr.random_tree(rng, rng.randint(4, 8))
            for _ in range(per_tree):
                rho, _rej = tr.sample_member_metric(T, rng)
                try:
                    _, gap = tr.project_metric_tree(T, rho)
                except Exception:
                    gap = Fraction(1)
                if gap > worst:
                    worst = gap
                    repro = tr.format_tree(T) + "\n" + bm.format_logmetric(rho)
    return _result("tree projection gap is exactly 0", worst, Fraction(0), trees * per_tree, t, repro)


def check_tree_extension(seed: int = 0, pairs: int = 20, distances: int = 100) -> list[PropertyResult]:
    rng = random.Random(seed + 3)
    worst, repro, coherent = Fraction(0), None, True
    coherent_repro = None
    with _Timer() as t:
        for _ in range(pairs):
            T = tr.random_tree(rng, rng.randint(4, 8))
            T2, end_map = tr.relabeled_copy(T, rng)
            F = tr.tree_moebius_extend(T, T2, end_map)
            pts = [tr.random_point(T, rng) for _ in range(20)]
            all_pairs = [(a, b) for i, a in enumerate(pts) for b in pts[i + 1 :]]
            chosen = rng.sample(all_pairs, min(distances, len(all_pairs)))
            d = F.distance_defect(chosen)
            if d > worst:
                worst = d
                repro = tr.format_tree(T) + "\n" + tr.format_tree(T2) + f"\n# end map {end_map}"
            for e in T.end_labels:
                if not F.boundary_coherent(e) and coherent:
                    coherent = False
                    coherent_repro = tr.format_tree(T) + "\n" + tr.format_tree(T2) + f"\n# end map {end_map}"
    return [
        _result("tree extension preserves distances exactly", worst, Fraction(0), pairs * distances, t, repro),
        _result("tree extension has boundary map f", 0 if coherent else 1, 0, pairs, t, coherent_repro),
    ]


def suite_tree(seed=0, cases=50, **_):
    per = max(1, cases // 10)
    return [check_tree_surjectivity(seed, 10, per)] + check_tree_extension(seed)


# -- disk --------------------------------------------------------------------


def _random_disk_point(rng, max_dist: float) -> complex:
    r = rng.uniform(0, max_dist)
    return dk.point_at_distance(r, rng.uniform(0, dk.TWO_PI))


def random_halfplane_moebius(rng, spread: float = 3.0) -> dk.MoebiusTransform:
    while True:
        m = rng.uniform(-spread, spread, 4)
        if m[0] * m[3] - m[1] * m[2] > 0.05:
            return dk.MoebiusTransform.from_halfplane(*m)


def check_disk_isometry(seed: int = 0, cases: int = 100, samples: int = 4096, tol: float = 1e-6) -> PropertyResult:
    rng = np.random.default_rng(seed + 4)
    worst, repro = 0.0, None
    with _Timer() as t:
        for _ in range(cases):
            x, y = _random_disk_point(rng, 4.0), _random_disk_point(rng, 4.0)
            err = abs(ex.disk_visual_dM(x, y, samples) - dk.disk_distance(x, y))
            if err > worst:
                worst, repro = err, f"x = {x!r}\ny = {y!r}"
    return _result("disk dM(rho_x, rho_y) = d(x, y)", worst, tol, cases, t, repro)


def check_cross_ratio_invariance(seed: int = 0, cases: int = 500, tol: float = 1e-10) -> PropertyResult:
    rng = np.random.default_rng(seed + 5)
    worst, repro = 0.0, None
    with _Timer() as t:
        for _ in range(cases):
            m = random_halfplane_moebius(rng)
            q = rng.uniform(0, dk.TWO_PI, 4)
            before = dk.log_cross_ratio_disk(q)
            after = dk.log_cross_ratio_disk(m.apply_angle(q))
            err = abs(math.expm1(after - before))
            if err > worst:
                worst, repro = err, f"matrix a={m.a!r} b={m.b!r}\nquad = {list(q)!r}"
    return _result("cross-ratio invariance under Moebius maps (relative)", worst, tol, cases, t, repro)


def suite_disk(seed=0, cases=100, samples=4096, **_):
    return [check_disk_isometry(seed, cases, samples), check_cross_ratio_invariance(seed, 5 * cases)]


# -- schwarzian --------------------------------------------------------------


def test_diffeos(seed: int = 0, count: int = 5) -> list:
    """The sine diffeo plus random Fourier diffeos with sum k |a_k| = 0.3."""
    rng = np.random.default_rng(seed + 6)
    return [sz.sine_diffeo()] + [sz.random_diffeo(rng, total=0.3) for _ in range(count - 1)]


def _well_conditioned_quad(rng, min_gap: float = 0.2):
    while True:
        q = np.sort(rng.uniform(0, dk.TWO_PI, 4))
        gaps = np.diff(np.concatenate([q, [q[0] + dk.TWO_PI]]))
        if gaps.min() > min_gap:
            a, b, c, d = q
            return (a, c, b, d)


def check_distortion(seed=0, cases=100, tol=1e-6, diffeos=None) -> PropertyResult:
    rng = np.random.default_rng(seed + 7)
    diffeos = diffeos or test_diffeos(seed)
    worst, repro = 0.0, None
    with _Timer() as t:
        for f in diffeos:
            for _ in range(cases):
                q = _well_conditioned_quad(rng)
                err = sz.distortion_residual(f, q)
                if err > worst:
                    worst, repro = err, sz.format_diffeo(f) + f"# quad {list(map(float, q))}"
    return _result("cross-ratio distortion identity", worst, tol, cases * len(diffeos), t, repro)


def _random_geodesic(rng, max_dist: float = 2.0) -> dk.GeodesicState:
    return dk.GeodesicState.from_ray(_random_disk_point(rng, max_dist), rng.uniform(0, dk.TWO_PI))


def check_flip(seed=0, cases=100, tol=1e-6, moebius_tol=1e-9, diffeos=None) -> list[PropertyResult]:
    rng = np.random.default_rng(seed + 8)
    diffeos = diffeos or test_diffeos(seed)
    worst, repro = 0.0, None
    with _Timer() as t:
        for f in diffeos:
            for _ in range(cases):
                g = _random_geodesic(rng)
                err = sz.flip_deviation(f, g)
                if err > worst:
                    worst, repro = err, sz.format_diffeo(f) + f"# geodesic {g}"
    mworst, mrepro = 0.0, None
    with _Timer() as tm:
        for _ in range(cases):
            m = random_halfplane_moebius(rng, 2.0)
            g = _random_geodesic(rng)
            err = sz.flip_deviation(sz.MoebiusCircleMap(m), g)
            if err > mworst:
                mworst, mrepro = err, f"matrix a={m.a!r} b={m.b!r}\n# geodesic {g}"
    return [
        _result("flip deviation identity (diffeos)", worst, tol, cases * len(diffeos), t, repro),
        _result("flip deviation identity (Moebius)", mworst, moebius_tol, cases, tm, mrepro),
    ]


def check_gmvt(seed=0, cases=1000, slack=1e-6, diffeos=None) -> PropertyResult:
    rng = np.random.default_rng(seed + 9)
    diffeos = diffeos or test_diffeos(seed)
    norms = [sz.schwarzian_sup(f) for f in diffeos]
    worst, ok, repro = 0.0, True, None
    with _Timer() as t:
        for k in range(cases):
            j = k % len(diffeos)
            f = diffeos[j]
            x, y = _random_disk_point(rng, 3.0), _random_disk_point(rng, 3.0)
            xi, eta = rng.uniform(0, dk.TWO_PI, 2)
            if abs(np.exp(1j * xi) - np.exp(1j * eta)) < 1e-3:
                continue
            v = sz.conf_gmvt_check(f, x, y, xi, eta, norms[j], slack)
            worst = max(worst, abs(v.log_middle) / v.bound)
            if not v.holds and ok:
                ok = False
                repro = sz.format_diffeo(f) + f"# x={x!r} y={y!r} xi={xi!r} eta={eta!r}"
    return _result("conformal mean value sandwich (|middle| / bound)", worst, 1.0, cases, t, repro, passed=ok)


def check_cocycle(seed=0, cases=200, tol=1e-7) -> PropertyResult:
    rng = np.random.default_rng(seed + 10)
    worst, repro = 0.0, None
    with _Timer() as t:
        for _ in range(cases):
            f, g = sz.random_diffeo(rng, 0.3), sz.random_diffeo(rng, 0.3)
            xi, eta = _well_conditioned_quad(rng)[:2]
            err = sz.cocycle_residual(f, g, xi, eta)
            if err > worst:
                worst, repro = err, sz.format_diffeo(f) + sz.format_diffeo(g) + f"# xi={xi!r} eta={eta!r}"
    return _result("Schwarzian cocycle rule", worst, tol, cases, t, repro)


def check_profile(seed=0, cases=20, t_final=15.0, tol=1e-4, diffeos=None) -> PropertyResult:
    rng = np.random.default_rng(seed + 11)
    diffeos = diffeos or test_diffeos(seed)
    worst, repro = 0.0, None
    with _Timer() as t:
        for k in range(cases):
            f = diffeos[k % len(diffeos)]
            x = _random_disk_point(rng, 1.0)
            xi, eta = _well_conditioned_quad(rng)[:2]
            prof = sz.distance_diff_profile(f, x, xi, eta, [t_final])[0]
            err = abs(prof - sz.schwarzian(f, xi, eta))
            if err > worst:
                worst, repro = err, sz.format_diffeo(f) + f"# x={x!r} xi={xi!r} eta={eta!r}"
    return _result("distance-difference profile tends to S", worst, tol, cases, t, repro)


def suite_schwarzian(seed=0, cases=100, tol=None, **_):
    diffeos = test_diffeos(seed)
    return (
        [check_distortion(seed, cases, tol or 1e-6, diffeos)]
        + check_flip(seed, cases, diffeos=diffeos)
        + [
            check_gmvt(seed, 10 * cases, diffeos=diffeos),
            check_cocycle(seed, 2 * cases),
            check_profile(seed, max(5, cases // 5), diffeos=diffeos),
        ]
    )


# -- extension ---------------------------------------------------------------


def check_disk_density(seed=0, cases=20, tol=1e-3) -> PropertyResult:
    rng = np.random.default_rng(seed + 12)
    worst, repro, rejections = 0.0, None, 0
    with _Timer() as t:
        for _ in range(cases):
            rho, rej = ex.sample_admissible_metric(rng)
            rejections += rej
            res = ex.project_disk(rho)
            if res.value > worst:
                worst, repro = res.value, f"# anchor {rho.anchor!r}\n# coeffs {list(rho.coeffs)!r}"
    return _result(
        "disk projection gap <= (1/2) log 2", worst, HALF_LOG2 + tol, cases, t, repro, rejections=rejections
    )


def check_moebius_extension(seed=0, pairs=200, probes=50, tol=1e-3) -> list[PropertyResult]:
    rng = np.random.default_rng(seed + 13)
    m = random_halfplane_moebius(rng, 2.0)
    # start every descent at 0 so that the projection does real work
    F = ex.DiskExtension(m, start=0j)
    pts = [_random_disk_point(rng, 3.0) for _ in range(40)]
    all_pairs = [(a, b) for i, a in enumerate(pts) for b in pts[i + 1 :]]
    idx = rng.choice(len(all_pairs), size=min(pairs, len(all_pairs)), replace=False)
    chosen = [all_pairs[i] for i in idx]
    repro = f"matrix a={m.a!r} b={m.b!r}"
    with _Timer() as t1:
        defect = F.defect(chosen)
    with _Timer() as t2:
        density = F.density([_random_disk_point(rng, 3.0) for _ in range(probes)])
    coherent, worst_end = True, 0.0
    with _Timer() as t3:
        for _ in range(5):
            vals = F.boundary_coherence(_random_disk_point(rng, 1.0), rng.uniform(0, dk.TWO_PI))
            worst_end = max(worst_end, vals[-1])
            coherent &= all(b <= a + 1e-9 for a, b in zip(vals, vals[1:])) and vals[-1] <= 1e-3
    return [
        _result("Moebius extension distance defect <= log 2", defect, LOG2 + tol, len(chosen), t1, repro),
        _result("Moebius extension image is log 2 dense", density, LOG2 + tol, probes, t2, repro),
        _result("Moebius extension has boundary map f", worst_end, 1e-3, 5, t3, repro, passed=coherent),
    ]


def check_conformal_extension(seed=0, points=12, tol=1e-3, diffeos=None) -> PropertyResult:
    rng = np.random.default_rng(seed + 14)
    diffeos = diffeos or test_diffeos(seed)
    worst, ok, repro = 0.0, True, None
    with _Timer() as t:
        for f in diffeos:
            bound = LOG2 + 12 * sz.schwarzian_sup(f) + tol
            E = ex.conf_extension(f)
            pts = [_random_disk_point(rng, 2.5) for _ in range(points)]
            d = E.defect([(a, b) for i, a in enumerate(pts) for b in pts[i + 1 :]])
            worst = max(worst, d / bound)
            if d > bound and ok:
                ok = False
                repro = sz.format_diffeo(f) + f"# points {pts!r}"
    return _result("conformal extension defect (defect / bound)", worst, 1.0, points * len(diffeos), t, repro, passed=ok)


def suite_extension(seed=0, cases=20, **_):
    return (
        [check_disk_density(seed, cases)]
        + check_moebius_extension(seed)
        + [check_conformal_extension(seed)]
    )


# -- classify ----------------------------------------------------------------


def random_unit_halfplane_matrix(rng, spread: float = 3.0):
    while True:
        m = rng.uniform(-spread, spread, (2, 2))
        det = np.linalg.det(m)
        if det > 0.05:
            return m / math.sqrt(det)


def check_oracle_agreement(seed=0, cases=300, N=cl.DEFAULT_N) -> PropertyResult:
    rng = np.random.default_rng(seed + 15)
    agree, repro, n = 0, None, 0
    with _Timer() as t:
        while n < cases:
            m = random_unit_halfplane_matrix(rng)
            if abs(abs(np.trace(m)) - 2) <= cl.NEAR_PARABOLIC_BAND:
                continue
            n += 1
            v = cl.classify_matrix(m.ravel().tolist(), N=N)
            if v.kind == v.oracle:
                agree += 1
            elif repro is None:
                repro = "matrix " + " ".join(repr(float(e)) for e in m.ravel())
    return _result("classification agrees with the trace oracle", cases - agree, 0, cases, t, repro)


def exact_parabolic_matrices(rng, count: int = 10):
    """Integer-entry conjugates of unipotent matrices (trace exactly 2)."""
    out = []
    while len(out) < count:
        p, q = rng.integers(-4, 5, 2)
        s = int(rng.integers(1, 4)) * int(rng.choice((-1, 1)))
        # (1 + s p q, -s p^2; s q^2, 1 - s p q) fixes p / q on the real line
        m = [1 + s * p * q, -s * p * p, s * q * q, 1 - s * p * q]
        if q == 0 and p == 0:
            continue
        out.append([int(v) for v in m])
    return out


def check_fixed_points(seed=0, N=cl.DEFAULT_N, samples=20) -> list[PropertyResult]:
    rng = np.random.default_rng(seed + 16)
    mats = [("parabolic", e) for e in exact_parabolic_matrices(rng)]
    while len(mats) < 20:
        m = random_unit_halfplane_matrix(rng)
        if abs(np.trace(m)) > 2.2:
            mats.append(("hyperbolic", m.ravel().tolist()))
    worst_fp, worst_conv, kinds_ok, repro = 0.0, 0.0, True, None
    with _Timer() as t:
        for kind, e in mats:
            v = cl.classify_matrix(e, N=N)
            c = v.classification
            if v.kind != kind:
                kinds_ok = False
                repro = repro or f"matrix {e}"
                continue
            m = dk.MoebiusTransform.from_halfplane(*map(float, e))
            worst_fp = max(worst_fp, c.diagnostics["fixed_point_residual"])
            xs = rng.uniform(0, dk.TWO_PI, samples)
            fwd_target = c.fixed_points[0]
            bwd_target = c.fixed_points[-1]
            # exclude samples sitting on the repelling point
            xs = xs[np.abs(np.exp(1j * xs) - np.exp(1j * bwd_target)) > 1e-3]
            for sign, target in ((1, fwd_target), (-1, bwd_target)):
                ys = xs if sign == 1 else xs[np.abs(np.exp(1j * xs) - np.exp(1j * fwd_target)) > 1e-3]
                d1 = cl.boundary_orbit_distances(m, ys, target, sign * c.N)
                d2 = cl.boundary_orbit_distances(m, ys, target, sign * 4 * c.N)
                conv = float(np.max(d2))
                worst_conv = max(worst_conv, conv)
                if np.any(d2 > d1 + 1e-12) or conv > 0.1:
                    kinds_ok = False
                    repro = repro or f"matrix {e}"
    return [
        _result("accumulation points are boundary fixed points", worst_fp, 1e-6, len(mats), t),
        _result("sampled boundary orbits converge to the fixed points", worst_conv, 0.1, len(mats), t, repro, passed=kinds_ok),
    ]


def check_elliptic_and_tree(seed=0, cases=10) -> list[PropertyResult]:
    rng = np.random.default_rng(seed + 17)
    worst, ok = 0.0, True
    with _Timer() as t:
        n = 0
        while n < cases:
            m = random_unit_halfplane_matrix(rng)
            if abs(np.trace(m)) > 1.9:
                continue
            n += 1
            T = dk.MoebiusTransform.from_halfplane(*m.ravel())
            x = _random_disk_point(rng, 1.0)
            rec = cl.orbit(T, x, 20)
            diam = float(np.max(rec.displacement))
            dist = cl.elliptic_distortion(T, x, 20, rng)
            worst = max(worst, dist / (2 * diam + LOG2) if diam > 0 else dist)
            ok &= dist <= 2 * diam + LOG2
    prng = random.Random(seed + 18)
    tree_ok = True
    with _Timer() as t2:
        for k in range(cases):
            # symmetric trees so that nontrivial automorphisms exist
            T = tr.spider(4 + k % 4) if k % 2 == 0 else tr.h_tree(Fraction(prng.randint(1, 6), 2))
            F = _random_tree_automorphism(T, prng)
            c = cl.classify_orbit(F, tr.random_point(T, prng), N=cl.DEFAULT_N)
            tree_ok &= c.kind == cl.ELLIPTIC
    return [
        _result("elliptic iterates are uniformly bi-Lipschitz", worst, 1.0, cases, t, passed=ok),
        _result("tree self-maps are elliptic", 0 if tree_ok else 1, 0, cases, t2),
    ]


def _random_tree_automorphism(T, rng):
    """Extension of a random non-identity permutation of the ends that preserves cross-ratios."""
    labels = list(T.end_labels)
    for _ in range(500):
        perm = rng.sample(labels, len(labels))
        if perm == labels:
            continue
        try:
            return tr.tree_moebius_extend(T, T, dict(zip(labels, perm)))
        except NotMoebius:
            continue
    raise ValueError("tree has no nontrivial automorphism")


def suite_classify(seed=0, cases=300, N=cl.DEFAULT_N, **_):
    return (
        [check_oracle_agreement(seed, cases, N)]
        + check_fixed_points(seed, N)
        + check_elliptic_and_tree(seed)
    )


SUITES = {
    "core": suite_core,
    "tree": suite_tree,
    "disk": suite_disk,
    "schwarzian": suite_schwarzian,
    "extension": suite_extension,
    "classify": suite_classify,
}

DEFAULT_CASES = {"core": 200, "tree": 50, "disk": 100, "schwarzian": 100, "extension": 20, "classify": 300}


def run_suite(name: str, seed: int = 0, cases: int | None = None, **kwargs) -> list[SuiteReport]:
    if name == "all":
        return [r for n in SUITES for r in run_suite(n, seed, cases, **kwargs)]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    cases = DEFAULT_CASES[name] if cases is None else cases
    with _Timer() as t:
        props = SUITES[name](seed=seed, cases=cases, **kwargs)
    return [SuiteReport(name, seed, cases, props, t.seconds)]
