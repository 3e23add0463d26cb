"""Points of the space of Moebius-equivalent metrics for both models, and maps between models.

``embed_point`` sends a point to its visual metric, ``pushforward``
transports a metric along a boundary map and ``project`` returns a point
whose visual metric is closest.  Composing the three gives the extension
of a boundary map to the interior.

On the disk a metric in the class of the round metric is stored as an
anchor point a together with u = log d rho / d rho_a, written as a
trigonometric series in the frame of a (the frame where a sits at 0).
Visual metrics are then exact (u = 0) and Moebius pushforwards only move
the anchor and rotate u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .boundary_metrics import LogMetric, dM
from .descent import DescentResult, minimax_descent, refine_maxima
from .disk import (
    TWO_PI,
    GeodesicState,
    MoebiusTransform,
    check_interior,
    circle,
    disk_distance,
    log_poisson,
    log_visual_metric_disk,
    sup_busemann,
)
from .errors import DomainError, NotMoebius
from .schwarzian import CircleMap, FourierDiffeo, InverseMap, MoebiusCircleMap, log_conformal_derivative
from .tree import (
    TreeExtension,
    TreePoint,
    TreeSpace,
    project_metric_tree,
    tree_distance,
    tree_moebius_extend,
    visual_log_metric,
)

DISK = "disk"
HALF_LOG2 = 0.5 * math.log(2)


# -- disk metrics --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiskMetric:
    anchor: complex
    coeffs: np.ndarray = field(repr=False)  # c_0..c_K, u(t) = c_0 + 2 Re sum_{k>=1} c_k e^{ikt}

    @classmethod
    def visual(cls, x) -> "DiskMetric":
        return cls(check_interior(x), np.zeros(1, dtype=complex))

    @classmethod
    def from_samples(cls, anchor, samples, rel_cut: float = 1e-16) -> "DiskMetric":
        """Trigonometric interpolant of samples of u on a uniform grid of the anchor frame."""
        samples = np.asarray(samples, dtype=float)
        n = len(samples)
        c = np.fft.rfft(samples) / n
        if n % 2 == 0:
            c[-1] /= 2
        scale = max(np.max(np.abs(c)), 1e-300)
        keep = np.flatnonzero(np.abs(c) > rel_cut * scale)
        c = c[: (keep[-1] + 1 if len(keep) else 1)]
        return cls(check_interior(anchor), c)

    @property
    def is_visual(self) -> bool:
        return not np.any(self.coeffs)

    def u(self, t):
        t = np.asarray(t, dtype=float)
        c = self.coeffs
        if len(c) == 1:
            return np.full(t.shape, c[0].real)
        k = np.arange(len(c))
        e = np.exp(1j * np.multiply.outer(t, k))
        return 2 * (e @ c).real - c[0].real

    def frame(self) -> MoebiusTransform:
        return MoebiusTransform.to_origin(self.anchor)

    def rotate(self, beta: float) -> "DiskMetric":
        """Same anchor, u replaced by t -> u(t - beta)."""
        k = np.arange(len(self.coeffs))
        return DiskMetric(self.anchor, self.coeffs * np.exp(-1j * k * beta))

    def pushforward(self, m: MoebiusTransform) -> "DiskMetric":
        """The metric (xi, eta) -> rho(m^-1 xi, m^-1 eta)."""
        new_anchor = m.apply_point(self.anchor)
        R = MoebiusTransform.to_origin(new_anchor).compose(m).compose(self.frame().inverse())
        beta = float(np.angle(R.apply(1.0)))
        return DiskMetric(new_anchor, self.rotate(beta).coeffs)

    def log_distance(self, xi, eta):
        T = self.frame()
        a, b = np.angle(T.apply(circle(xi))), np.angle(T.apply(circle(eta)))
        return np.log(np.abs(circle(a) - circle(b)) / 2) + (self.u(a) + self.u(b)) / 2

    def log_derivative_visual(self, y, theta):
        """log d rho / d rho_y at boundary angles theta."""
        T = self.frame()
        a = np.angle(T.apply(circle(theta)))
        return self.u(a) + log_poisson(self.anchor, theta) - log_poisson(y, theta)


def disk_dM(r1: DiskMetric, r2: DiskMetric, samples: int = 2048) -> float:
    """max of log d r2 / d r1, sampled uniformly in both anchor frames and refined."""
    params = _merged_grid(r1.frame(), r2.frame(), samples)

    def fn(theta):
        return (
            r2.log_derivative_visual(r1.anchor, theta) - r1.u(np.angle(r1.frame().apply(circle(theta))))
        )

    vals = fn(params)
    ref = refine_maxima(fn, params, vals)
    return float(max(np.max(vals), np.max(fn(ref)) if len(ref) else -np.inf))


def _merged_grid(T1: MoebiusTransform, T2: MoebiusTransform, samples: int):
    """Boundary angles uniform in the frames of T1 and of T2, sorted."""
    g = np.arange(samples) * (TWO_PI / samples)
    a = np.angle(T1.inverse().apply(circle(g)))
    b = np.angle(T2.inverse().apply(circle(g)))
    return np.sort(np.mod(np.concatenate([a, b]), TWO_PI))


def _disk_objective(rho: DiskMetric, samples: int):
    """evaluate(y) for phi(y) = max log d rho / d rho_y."""

    def evaluate(y):
        Ty = MoebiusTransform.to_origin(y)
        params = _merged_grid(Ty, rho.frame(), samples)

        def fn(theta):
            return rho.log_derivative_visual(y, theta)

        vals = fn(params)
        ref = refine_maxima(fn, params, vals)
        theta = np.concatenate([params, ref])
        vals = np.concatenate([vals, fn(ref)])
        return vals, Ty.apply(circle(theta))

    return evaluate


def project_disk(rho: DiskMetric, start=None, samples: int = 1024, tol: float = 1e-8) -> DescentResult:
    """Point y minimizing dM(rho, rho_y) and the minimum, by minimax descent."""
    start = rho.anchor if start is None else check_interior(start)
    return minimax_descent(_disk_objective(rho, samples), start, tol=tol)


def spot_check_disk_metric(rho: DiskMetric, rng, triples: int = 200, rows: int = 50, samples: int = 4096):
    """(worst triangle excess, worst antipodality defect, worst diameter excess) on random samples."""
    tri = 0.0
    for _ in range(triples):
        p = rng.uniform(0, TWO_PI, 3)
        d = np.exp([rho.log_distance(p[0], p[2]), rho.log_distance(p[0], p[1]), rho.log_distance(p[1], p[2])])
        tri = max(tri, float(d[0] - d[1] - d[2]))
    grid = np.arange(samples) * (TWO_PI / samples)
    anti, diam = 0.0, -np.inf
    for xi in rng.uniform(0, TWO_PI, rows):
        eta = grid + xi + TWO_PI / samples / 2

        def fn(e, xi=xi):
            return rho.log_distance(xi, e)

        vals = fn(eta)
        ref = refine_maxima(fn, eta, vals, top=1)
        top = max(float(np.max(vals)), float(np.max(fn(ref))))
        anti = max(anti, abs(top))
        diam = max(diam, top)
    return tri, anti, diam


# -- admissible metrics on the circle ------------------------------------------


@dataclass
class SampledMetric:
    metric: DiskMetric
    involution: FourierDiffeo
    closure_error: float  # how far u fails to close up after integration
    constant_spread: float  # disagreement of the additive constant across the grid


def metric_from_involution(h: CircleMap, n: int = 1024) -> SampledMetric:
    """Antipodal metric whose antipode map is h o (t -> t + pi) o h^-1.

    For rho = rho_0 f^(1/2) f^(1/2) with antipode map s(t) = t + pi + d(t),
    maximality of rho(t, .) at s(t) forces (log f)' = -tan(d / 2), and the
    antipodal value 1 fixes the additive constant.  The derivative
    integrates to a periodic function when sum tan(d/2) vanishes, which
    holds for instance when h commutes with t -> -t.
    """
    t = np.arange(n) * (TWO_PI / n)
    hinv = InverseMap(h)
    sigma = h.phi(hinv.phi(t) + math.pi)
    d = sigma - t - math.pi
    du = -np.tan(d / 2)
    closure = abs(float(np.mean(du)))
    c = np.fft.rfft(du) / n
    k = np.arange(len(c))
    cu = np.zeros_like(c)
    cu[1:] = c[1:] / (1j * k[1:])
    if n % 2 == 0:
        cu[-1] = 0
    trial = DiskMetric(0j, cu)
    lhs = -2 * np.log(np.cos(d / 2)) - trial.u(t) - trial.u(sigma)
    const = float(np.mean(lhs)) / 2
    spread = float(np.max(np.abs(lhs - 2 * const)))
    cu = cu.copy()
    cu[0] = const
    return SampledMetric(DiskMetric.from_samples(0j, DiskMetric(0j, cu).u(t)), h, closure, spread)


def sample_admissible_metric(rng, total: float = 0.3, modes=(1, 2, 3), max_tries: int = 50, check_rng=None):
    """Random member of the Moebius class of the round metric that is generally not visual.

    The antipode map is conjugated from the half-turn by an odd Fourier
    diffeomorphism; the result is rotated and moved by a random Moebius map
    and kept only if the spot checks pass.  Returns (metric, rejections).
    """
    check_rng = check_rng or rng
    rejections = 0
    for _ in range(max_tries):
        w = rng.dirichlet(np.ones(len(modes)))
        terms = tuple((k, float(total * wk / k * rng.choice((-1, 1))), 0.0) for k, wk in zip(modes, w))
        sm = metric_from_involution(FourierDiffeo(terms))
        if sm.closure_error > 1e-12 or sm.constant_spread > 1e-9:
            rejections += 1
            continue
        m = MoebiusTransform.rotation(float(rng.uniform(0, TWO_PI))).compose(
            MoebiusTransform.to_origin(complex(*rng.uniform(-0.4, 0.4, 2))).inverse()
        )
        rho = sm.metric.pushforward(m)
        tri, anti, diam = spot_check_disk_metric(rho, check_rng, triples=100, rows=20)
        if tri > 1e-8 or anti > 1e-6 or diam > 1e-6:
            rejections += 1
            continue
        return rho, rejections
    raise RuntimeError("no admissible metric found")


# -- generic dispatch ----------------------------------------------------------


def embed_point(model, x):
    if isinstance(model, TreeSpace):
        return visual_log_metric(model, x)
    if model == DISK:
        return DiskMetric.visual(x)
    raise DomainError(f"unknown model {model!r}")


def _disk_map(f) -> MoebiusTransform:
    if isinstance(f, MoebiusTransform):
        return f
    if isinstance(f, MoebiusCircleMap):
        return f.m
    raise DomainError("disk pushforward needs a Moebius transform")


def moebius_witness(f: CircleMap, rng, trials: int = 200, tol: float = 1e-9):
    """A quadruple whose cross-ratio f changes by more than ``tol``, or None."""
    for _ in range(trials):
        q = np.sort(rng.uniform(0, TWO_PI, 4))
        a, b, c, d = q
        # interleaved order keeps the quadruple well separated in the cross-ratio
        ld = lambda s, t: float(log_visual_metric_disk(0, s, t))
        fq = [float(v) for v in f(q)]
        before = ld(a, c) + ld(b, d) - ld(a, d) - ld(b, c)
        after = ld(fq[0], fq[2]) + ld(fq[1], fq[3]) - ld(fq[0], fq[3]) - ld(fq[1], fq[2])
        if abs(after - before) > tol:
            return (float(a), float(b), float(c), float(d)), (before, after)
    return None


def pushforward(f, rho, target=None):
    """Transport a metric along a boundary map.

    Trees: ``f`` maps end labels of the source to those of ``target``.
    Disk: ``f`` is a Moebius transform; non-Moebius circle maps are
    rejected with a witness quadruple.
    """
    if isinstance(rho, LogMetric):
        if target is None:
            raise DomainError("tree pushforward needs the target tree")
        labels2 = target.end_labels
        inv = [0] * len(labels2)
        for k, e in enumerate(rho.boundary.labels):
            inv[labels2.index(f[e])] = k
        return rho.relabel(inv, target.boundary)
    if isinstance(f, CircleMap) and not isinstance(f, MoebiusCircleMap):
        found = moebius_witness(f, np.random.default_rng(0))
        if found is not None:
            quad, values = found
            raise NotMoebius("circle map changes a cross-ratio", witness=quad, values=values)
        raise DomainError("general circle maps are pushed forward with conf_extension")
    return rho.pushforward(_disk_map(f))


@dataclass
class Projection:
    point: object
    gap: object
    detail: object = None


def project(model, rho, start=None) -> Projection:
    if isinstance(model, TreeSpace):
        point, gap = project_metric_tree(model, rho)
        return Projection(point, gap)
    if model == DISK:
        res = project_disk(rho, start=start)
        return Projection(res.point, res.value, res)
    raise DomainError(f"unknown model {model!r}")


def model_distance(model, x, y):
    if isinstance(model, TreeSpace):
        return tree_distance(model, x, y)
    return disk_distance(x, y)


@dataclass
class DiskExtension:
    m: MoebiusTransform
    start: object = None  # descent start; None means the anchor of the pushed metric
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, x) -> complex:
        x = check_interior(x)
        if x not in self._cache:
            rho = DiskMetric.visual(x).pushforward(self.m)
            self._cache[x] = project_disk(rho, start=self.start).point
        return self._cache[x]

    def defect(self, pairs) -> float:
        return max(abs(disk_distance(self(x), self(y)) - disk_distance(x, y)) for x, y in pairs)

    def density(self, probes) -> float:
        """max over probes y of d(F(x_y), y) where x_y projects the pullback of rho_y."""
        inv = self.m.inverse()
        worst = 0.0
        for y in probes:
            x = project_disk(DiskMetric.visual(y).pushforward(inv)).point
            worst = max(worst, disk_distance(self(x), y))
        return worst

    def boundary_coherence(self, x, xi: float, offsets=(4.0, 8.0, 12.0)) -> list[float]:
        """rho_{F(x)} distance between the direction of F(a_t) and m(xi), for a_t on the ray [x, xi)."""
        ray = GeodesicState.from_ray(x, xi)
        fx = self(x)
        target = float(self.m.apply_angle(xi))
        T = MoebiusTransform.to_origin(fx)
        out = []
        for t in offsets:
            w = T.apply(self(ray.point_at(t)))
            direction = float(T.inverse().apply_angle(np.angle(w)))
            chord = abs(complex(circle(direction) - circle(target))) / 2
            p = np.exp((log_poisson(fx, direction) + log_poisson(fx, target)) / 2)
            out.append(float(chord * p))
        return out


@dataclass
class Extension:
    """F = project_Y o pushforward_f o embed_X with defect diagnostics."""

    source: object
    target: object
    impl: object

    def __call__(self, x):
        return self.impl(x)

    def defect(self, pairs):
        if isinstance(self.impl, TreeExtension):
            return self.impl.distance_defect(pairs)
        return self.impl.defect(pairs)


def extend_moebius(f, model_x, model_y, start=None) -> Extension:
    tree_x, tree_y = isinstance(model_x, TreeSpace), isinstance(model_y, TreeSpace)
    if tree_x != tree_y:
        raise DomainError("no Moebius map exists between the ends of a tree and the circle")
    if tree_x:
        return Extension(model_x, model_y, tree_moebius_extend(model_x, model_y, f))
    if isinstance(f, CircleMap) and not isinstance(f, MoebiusCircleMap):
        found = moebius_witness(f, np.random.default_rng(0))
        if found is not None:
            raise NotMoebius("circle map changes a cross-ratio", witness=found[0], values=found[1])
    return Extension(DISK, DISK, DiskExtension(_disk_map(f), start=start))


# -- conformal extension ------------------------------------------------------


def _conformal_objective(f: CircleMap, x, samples: int, two_sided: bool):
    """evaluate(y) for max of -log df_{x,y} (and of +log df_{x,y} when two-sided)."""
    Tx = MoebiusTransform.to_origin(x)
    finv = f.inverse()
    g = np.arange(samples) * (TWO_PI / samples)
    src_grid = np.angle(Tx.inverse().apply(circle(g)))

    def evaluate(y):
        Ty = MoebiusTransform.to_origin(y)
        tgt_grid = finv.phi(np.angle(Ty.inverse().apply(circle(g))))
        params = np.sort(np.mod(np.concatenate([src_grid, tgt_grid]), TWO_PI))

        def fn(theta):
            return -log_conformal_derivative(f, x, y, theta)

        v = fn(params)
        thetas, vals, signs = [params], [v], [np.ones_like(v)]
        ref = refine_maxima(fn, params, v)
        thetas.append(ref)
        vals.append(fn(ref))
        signs.append(np.ones(len(ref)))
        if two_sided:
            ref2 = refine_maxima(fn, params, v, sign=-1.0)
            thetas += [params, ref2]
            vals += [-v, -fn(ref2)]
            signs += [-np.ones_like(v), -np.ones(len(ref2))]
        theta = np.concatenate(thetas)
        sign = np.concatenate(signs)
        dirs = sign * Ty.apply(circle(f.phi(theta)))
        return np.concatenate(vals), dirs

    return evaluate


def d_conf_pushed_visual(f: CircleMap, x, y, samples: int = 2048) -> float:
    """d_Conf(f_* rho_x, rho_y) = max |log df_{x,y}|."""
    vals, _ = _conformal_objective(f, check_interior(x), samples, True)(check_interior(y))
    return float(np.max(vals))


@dataclass
class ConformalExtension:
    f: CircleMap
    samples: int = 1024
    polish: bool = True
    start: object = None
    _cache: dict = field(default_factory=dict, repr=False)

    def locate(self, x):
        """(F(x), d_Conf at F(x), one-sided minimum, descent results)."""
        x = check_interior(x)
        if x in self._cache:
            return self._cache[x]
        start = self.start
        if start is None:
            # basepoint of the conjugate of a geodesic through x: a coarse guess
            from .schwarzian import conjugate_geodesic

            start = conjugate_geodesic(self.f, GeodesicState.from_ray(x, 0.0)).basepoint
        one = minimax_descent(_conformal_objective(self.f, x, self.samples, False), start)
        point, results = one.point, [one]
        if self.polish:
            two = minimax_descent(_conformal_objective(self.f, x, self.samples, True), one.point)
            results.append(two)
            point = two.point
        value = d_conf_pushed_visual(self.f, x, point)
        self._cache[x] = (point, value, one.value, results)
        return self._cache[x]

    def __call__(self, x) -> complex:
        return self.locate(x)[0]

    def defect(self, pairs) -> float:
        return max(abs(disk_distance(self(x), self(y)) - disk_distance(x, y)) for x, y in pairs)


def conf_extension(f: CircleMap, **kwargs) -> ConformalExtension:
    return ConformalExtension(f, **kwargs)


def disk_visual_dM(x, y, samples: int = 4096) -> float:
    """dM(rho_x, rho_y) = max over the circle of B(., x, y)."""
    return sup_busemann(x, y, samples)[0]


def tree_visual_dM(T: TreeSpace, x: TreePoint, y: TreePoint) -> Fraction:
    return dM(visual_log_metric(T, x), visual_log_metric(T, y))
