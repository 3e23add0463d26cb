"""Conformal circle maps, their integrated Schwarzian and the induced geodesic conjugacy.

A circle map is given by a lift phi: R -> R with phi(t + 2 pi) =
phi(t) + 2 pi and its derivative.  Its derivative with respect to the
visual metrics at x (source) and y (target) is

    df_{x,y}(t) = phi'(t) P(y, phi(t)) / P(x, t)

with P the Poisson kernel, and all quantities below are built from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .disk import (
    TWO_PI,
    GeodesicState,
    MoebiusTransform,
    check_interior,
    circle,
    disk_distance,
    log_poisson,
    log_visual_metric_disk,
    normalize_angle,
)
from .errors import DomainError, InternalConsistencyError, ParseError

MAX_COEFF_SUM = 0.9


class CircleMap:
    """Orientation-preserving circle diffeomorphism described by a lift."""

    is_moebius = False

    def phi(self, theta):
        raise NotImplementedError

    def dphi(self, theta):
        raise NotImplementedError

    def __call__(self, theta):
        return normalize_angle(self.phi(theta))

    def compose(self, inner: "CircleMap") -> "CircleMap":
        """self o inner."""
        return ComposedMap(self, inner)

    def inverse(self) -> "CircleMap":
        return InverseMap(self)


@dataclass(frozen=True)
class FourierDiffeo(CircleMap):
    """theta + sum_k a_k sin(k theta + p_k), a diffeomorphism when sum k |a_k| < 1."""

    terms: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self):
        terms = tuple((int(k), float(a), float(p)) for k, a, p in self.terms)
        object.__setattr__(self, "terms", terms)
        for k, _, _ in terms:
            if k < 1:
                raise DomainError("mode numbers must be positive integers")
        if self.coefficient_sum > MAX_COEFF_SUM:
            raise DomainError(f"sum k|a_k| = {self.coefficient_sum} exceeds {MAX_COEFF_SUM}")

    @property
    def coefficient_sum(self) -> float:
        return sum(k * abs(a) for k, a, _ in self.terms)

    @property
    def is_moebius(self):
        return not any(a for _, a, _ in self.terms)

    def phi(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = theta.copy()
        for k, a, p in self.terms:
            out = out + a * np.sin(k * theta + p)
        return out

    def dphi(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.ones_like(theta)
        for k, a, p in self.terms:
            out = out + k * a * np.cos(k * theta + p)
        return out


@dataclass(frozen=True)
class MoebiusCircleMap(CircleMap):
    m: MoebiusTransform
    is_moebius = True

    def phi(self, theta):
        return self.m.lift(theta)

    def dphi(self, theta):
        return self.m.derivative(theta)

    def inverse(self):
        return MoebiusCircleMap(self.m.inverse())


@dataclass(frozen=True)
class ComposedMap(CircleMap):
    outer: CircleMap
    inner: CircleMap

    @property
    def is_moebius(self):
        return self.outer.is_moebius and self.inner.is_moebius

    def phi(self, theta):
        return self.outer.phi(self.inner.phi(theta))

    def dphi(self, theta):
        return self.outer.dphi(self.inner.phi(theta)) * self.inner.dphi(theta)


@dataclass(frozen=True)
class InverseMap(CircleMap):
    base: CircleMap

    @property
    def is_moebius(self):
        return self.base.is_moebius

    def phi(self, theta):
        target = np.asarray(theta, dtype=float)
        # phi(t) - t is periodic and bounded, so t = target - shift is a good start
        t = target - (self.base.phi(target) - target)
        for _ in range(60):
            step = (self.base.phi(t) - target) / self.base.dphi(t)
            t = t - step
            if np.all(np.abs(step) < 1e-15):
                break
        return t

    def dphi(self, theta):
        return 1 / self.base.dphi(self.phi(theta))

    def inverse(self):
        return self.base


IDENTITY = FourierDiffeo(())


def sine_diffeo() -> FourierDiffeo:
    """theta -> theta + 0.2 sin(theta)."""
    return FourierDiffeo(((1, 0.2, 0.0),))


def random_diffeo(rng, total: float = 0.3, max_mode: int = 4) -> FourierDiffeo:
    """Random member of the Fourier family with sum k |a_k| = total."""
    modes = list(range(1, max_mode + 1))
    weights = rng.dirichlet(np.ones(len(modes)))
    terms = []
    for k, w in zip(modes, weights):
        a = total * w / k * rng.choice((-1.0, 1.0))
        terms.append((k, float(a), float(rng.uniform(0, TWO_PI))))
    return FourierDiffeo(tuple(terms))


# -- derivative and integrated Schwarzian -----------------------------------


def log_conformal_derivative(f: CircleMap, x, y, theta):
    theta = np.asarray(theta, dtype=float)
    return np.log(f.dphi(theta)) + log_poisson(y, f.phi(theta)) - log_poisson(x, theta)


def conformal_derivative(f: CircleMap, x, y, theta):
    """Derivative of f at theta with respect to the visual metrics at x and y."""
    return np.exp(log_conformal_derivative(f, check_interior(x), check_interior(y), theta))


def difference_quotient_derivative(f: CircleMap, x, y, theta: float, h: float = 1e-7) -> float:
    """rho_y(f xi, f eta) / rho_x(xi, eta) for eta at angular offset h from xi."""
    t2 = theta + h
    num = log_visual_metric_disk(y, f.phi(theta), f.phi(t2))
    den = log_visual_metric_disk(x, theta, t2)
    return float(np.exp(num - den))


@dataclass(frozen=True)
class SchwarzianValue:
    xi: float
    eta: float
    value: float
    spread: float  # largest disagreement between basepoint choices

    def __float__(self):
        return self.value


def _schwarzian_at(f, xi, eta, x, y):
    return float(-(log_conformal_derivative(f, x, y, xi) + log_conformal_derivative(f, x, y, eta)))


def integrated_schwarzian(f: CircleMap, xi: float, eta: float, tol: float = 1e-9) -> SchwarzianValue:
    """-log(df(xi) df(eta)) with x on (xi, eta) and y on (f xi, f eta).

    The value is computed at the points nearest the origin and recomputed
    at two other pairs of basepoints along the same geodesics.
    """
    if abs(math.remainder(eta - xi, TWO_PI)) < 1e-12:
        raise DomainError("integrated Schwarzian needs two distinct points")
    g = GeodesicState.through_nearest(xi, eta)
    h = GeodesicState.through_nearest(float(f(xi)), float(f(eta)))
    main = _schwarzian_at(f, xi, eta, g.basepoint, h.basepoint)
    others = [
        _schwarzian_at(f, xi, eta, g.point_at(0.8), h.point_at(-0.6)),
        _schwarzian_at(f, xi, eta, g.point_at(-1.1), h.point_at(1.4)),
    ]
    spread = max(abs(v - main) for v in others)
    if spread > tol:
        raise InternalConsistencyError(
            f"integrated Schwarzian depends on basepoints: spread {spread:.3e} at ({xi}, {eta})"
        )
    return SchwarzianValue(float(xi), float(eta), main, spread)


def schwarzian(f: CircleMap, xi: float, eta: float) -> float:
    return integrated_schwarzian(f, xi, eta).value


def _nearest_points(xi, eta):
    delta = np.remainder(eta - xi + math.pi, TWO_PI) - math.pi
    psi = np.abs(delta) / 2
    mid = xi + delta / 2
    r = (1 - np.sin(psi)) / np.cos(psi)
    return r * np.exp(1j * mid)


def schwarzian_grid(f: CircleMap, n: int = 128) -> np.ndarray:
    """S on the n x n grid of angle pairs (NaN on the diagonal)."""
    theta = np.arange(n) * (TWO_PI / n)
    xi, eta = np.meshgrid(theta, theta, indexing="ij")
    off = ~np.eye(n, dtype=bool)
    xs, es = xi[off], eta[off]
    x = _nearest_points(xs, es)
    y = _nearest_points(normalize_angle(f.phi(xs)), normalize_angle(f.phi(es)))

    def logdf(t):
        fz = circle(f.phi(t))
        return (
            np.log(f.dphi(t))
            + np.log1p(-np.abs(y) ** 2)
            - 2 * np.log(np.abs(y - fz))
            - np.log1p(-np.abs(x) ** 2)
            + 2 * np.log(np.abs(x - circle(t)))
        )

    out = np.full((n, n), np.nan)
    out[off] = -(logdf(xs) + logdf(es))
    return out


def schwarzian_sup(f: CircleMap, n: int = 128) -> float:
    """Sampled sup |S(f)|, a lower bound on the true sup norm."""
    return float(np.nanmax(np.abs(schwarzian_grid(f, n))))


# -- geodesic conjugacy -------------------------------------------------------


def conjugate_geodesic(f: CircleMap, g: GeodesicState) -> GeodesicState:
    """Image geodesic: endpoints (f xi, f eta), basepoint y with df_{x,y}(eta) = 1."""
    fxi, feta = float(f(g.xi)), float(f(g.eta))
    start = GeodesicState.through_nearest(fxi, feta)
    s = -float(log_conformal_derivative(f, g.basepoint, start.basepoint, g.eta))
    return GeodesicState(fxi, feta, start.point_at(s))


def flip_deviation(f: CircleMap, g: GeodesicState) -> float:
    """Distance between phi(flip g) and flip(flow_{-S} phi(g)) basepoints."""
    t = schwarzian(f, g.xi, g.eta)
    lhs = conjugate_geodesic(f, g.flip())
    rhs = conjugate_geodesic(f, g).flow(-t).flip()
    return disk_distance(lhs.basepoint, rhs.basepoint)


def distortion_residual(f: CircleMap, quad, min_separation: float = 1e-4) -> float:
    """|log cross-ratio distortion - half the alternating sum of S| for (xi, xi', eta, eta')."""
    a, a2, b, b2 = (float(q) for q in quad)
    pts = circle(np.array([a, a2, b, b2]))
    sep = min(abs(pts[i] - pts[j]) for i in range(4) for j in range(i + 1, 4))
    if sep < min_separation:
        raise DomainError(f"quadruple is ill-conditioned: chordal separation {sep:.2e}")

    def logcr(p, p2, q, q2):
        ld = lambda s, t: float(log_visual_metric_disk(0, s, t))
        return ld(p, q) + ld(p2, q2) - ld(p, q2) - ld(p2, q)

    lhs = logcr(*(float(f(t)) for t in (a, a2, b, b2))) - logcr(a, a2, b, b2)
    rhs = 0.5 * (schwarzian(f, a, b) + schwarzian(f, a2, b2) - schwarzian(f, a, b2) - schwarzian(f, a2, b))
    return abs(lhs - rhs)


@dataclass
class GMVTVerdict:
    holds: bool
    log_middle: float
    bound: float


def conf_gmvt_check(f: CircleMap, x, y, xi: float, eta: float, s_norm: float, slack: float = 1e-6) -> GMVTVerdict:
    """Check |log((rho_y(f xi, f eta) / rho_x(xi, eta))^2 / (df(xi) df(eta)))| <= 4 s_norm."""
    ratio = float(log_visual_metric_disk(y, float(f(xi)), float(f(eta))) - log_visual_metric_disk(x, xi, eta))
    df = float(log_conformal_derivative(f, x, y, xi) + log_conformal_derivative(f, x, y, eta))
    middle = 2 * ratio - df
    bound = 4 * s_norm + slack
    return GMVTVerdict(abs(middle) <= bound, middle, bound)


def cocycle_residual(f: CircleMap, g: CircleMap, xi: float, eta: float) -> float:
    """|S(g o f)(xi, eta) - S(g)(f xi, f eta) - S(f)(xi, eta)|."""
    gf = g.compose(f)
    return abs(
        schwarzian(gf, xi, eta) - schwarzian(g, float(f(xi)), float(f(eta))) - schwarzian(f, xi, eta)
    )


def distance_diff_profile(f: CircleMap, x, xi: float, eta: float, t_list) -> list[float]:
    """d(conj(v_t), conj(w_t)) - d(x_t, y_t) along the rays from x to xi and eta."""
    x = check_interior(x)
    if max(t_list) > 30:
        raise DomainError("profile times above 30 are outside double-precision range")
    ray_xi = GeodesicState.from_ray(x, xi)
    ray_eta = GeodesicState.from_ray(x, eta)
    out = []
    for t in t_list:
        v, w = ray_xi.flow(t), ray_eta.flow(t)
        p = conjugate_geodesic(f, v).basepoint
        q = conjugate_geodesic(f, w).basepoint
        out.append(disk_distance(p, q) - disk_distance(v.basepoint, w.basepoint))
    return out


@dataclass
class AsymptoticProfile:
    times: list
    perturbations: list
    forward: list
    backward: list


def default_schedule(t_max: float = 12.0, perturbation: float = 1e-4, steps: int = 12):
    """Times 1..t_max with perturbations shrinking like 1/t down to ``perturbation``."""
    times = list(np.linspace(t_max / steps, t_max, steps))
    return times, [perturbation * t_max / t for t in times]


def forward_asymptotic_decay(
    f: CircleMap, g: GeodesicState, times=None, perturbations=None, backward_shift: float = 0.5
) -> AsymptoticProfile:
    """Distances between conjugates of v_n = g'(t_n) and nearby vectors w_n.

    w_n sits at distance eps_n from g(t_n), perpendicular to g, on the
    geodesic coming from the fixed backward endpoint xi_0 = xi +
    ``backward_shift``.  ``forward`` holds d(pi phi(v_n), pi phi(w_n)),
    ``backward`` the same for the flipped vectors.
    """
    if times is None:
        times, perturbations = default_schedule()
    xi0 = g.xi + backward_shift
    fwd, bwd = [], []
    for t, eps in zip(times, perturbations):
        v = g.flow(t)
        T = MoebiusTransform.to_origin(v.basepoint)
        zeta = complex(T.apply(circle(g.eta)))
        p = complex(T.inverse().apply(math.tanh(eps / 2) * 1j * zeta / abs(zeta)))
        w = GeodesicState.from_ray(p, xi0).flip()
        fwd.append(disk_distance(conjugate_geodesic(f, v).basepoint, conjugate_geodesic(f, w).basepoint))
        bwd.append(
            disk_distance(conjugate_geodesic(f, v.flip()).basepoint, conjugate_geodesic(f, w.flip()).basepoint)
        )
    return AsymptoticProfile(list(times), list(perturbations), fwd, bwd)


# -- file format -------------------------------------------------------------

HEADER = "diffeo v1"


def parse_diffeo(text: str, path=None) -> FourierDiffeo:
    terms = []
    seen_header = False
    last = 1
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        last = no
        if not seen_header:
            if s != HEADER:
                raise ParseError(f"expected header '{HEADER}'", no, path)
            seen_header = True
            continue
        parts = s.split()
        if parts[0] != "TERM" or len(parts) != 4:
            raise ParseError("expected 'TERM <k> <a_k> <phi_k>'", no, path)
        try:
            k, a, p = int(parts[1]), float(parts[2]), float(parts[3])
        except ValueError:
            raise ParseError(f"bad number in {s!r}", no, path) from None
        if k < 1:
            raise ParseError("mode number must be a positive integer", no, path)
        terms.append((k, a, p))
    if not seen_header:
        raise ParseError(f"expected header '{HEADER}'", 1, path)
    total = sum(k * abs(a) for k, a, _ in terms)
    if total > MAX_COEFF_SUM:
        raise ParseError(f"sum k|a_k| = {total:g} exceeds {MAX_COEFF_SUM}", last, path)
    return FourierDiffeo(tuple(terms))


def format_diffeo(f: FourierDiffeo) -> str:
    return "\n".join([HEADER] + [f"TERM {k} {a!r} {p!r}" for k, a, p in f.terms]) + "\n"


def read_diffeo(path) -> FourierDiffeo:
    with open(path) as fh:
        return parse_diffeo(fh.read(), path=str(path))
