"""The Poincare disk: points, boundary angles, Busemann functions and Moebius maps.

Interior points are complex numbers with |z| < 1, boundary points are
angles.  Most functions accept numpy arrays of angles so that circle
grids can be evaluated in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError

INTERIOR_MARGIN = 1e-12
TWO_PI = 2 * math.pi


def check_interior(z) -> complex:
    z = complex(z)
    if not abs(z) < 1 - INTERIOR_MARGIN:
        raise DomainError(f"{z} is not an interior point of the disk")
    return z


def normalize_angle(theta):
    return np.mod(theta, TWO_PI)


def circle(theta):
    return np.exp(1j * np.asarray(theta, dtype=float))


def disk_distance(x, y) -> float:
    x, y = check_interior(x), check_interior(y)
    s = abs(x - y) / math.sqrt((1 - abs(x) ** 2) * (1 - abs(y) ** 2))
    return 2 * math.asinh(s)


def point_at_distance(t: float, direction: float = 0.0) -> complex:
    """Point at hyperbolic distance ``t`` from 0 in the given direction."""
    return math.tanh(t / 2) * complex(math.cos(direction), math.sin(direction))


def log_poisson(z, theta):
    """log P(z, xi) with P(z, xi) = (1 - |z|^2) / |z - xi|^2."""
    z = complex(z)
    return math.log1p(-abs(z) ** 2) - 2 * np.log(np.abs(z - circle(theta)))


def busemann_poisson(theta, x, y):
    """B(xi, x, y) = lim d(x, a) - d(y, a) as a -> xi."""
    return log_poisson(check_interior(y), theta) - log_poisson(check_interior(x), theta)


def busemann_radial_oracle(theta, x, y, k: int = 8) -> float:
    """d(x, a) - d(y, a) at the radial point a = (1 - 10^-k) xi."""
    a = (1 - 10.0 ** (-k)) * complex(circle(theta))
    return disk_distance(x, a) - disk_distance(y, a)


def log_visual_metric_disk(x, xi, eta):
    x = check_interior(x)
    chord = np.abs(circle(xi) - circle(eta))
    if np.any(chord == 0):
        raise DomainError("visual distance of a point to itself")
    return np.log(chord / 2) + (log_poisson(x, xi) + log_poisson(x, eta)) / 2


def visual_metric_disk(x, xi, eta):
    return np.exp(log_visual_metric_disk(x, xi, eta))


def log_cross_ratio_disk(quad, x=0j):
    """log of rho(a, b) rho(a', b') / (rho(a, b') rho(a', b)) for quad = (a, a', b, b'); independent of x."""
    a, a2, b, b2 = quad
    ld = lambda s, t: log_visual_metric_disk(x, s, t)
    return ld(a, b) + ld(a2, b2) - ld(a, b2) - ld(a2, b)


def angle_at(x, y, theta):
    """Angle at ``x`` between the geodesic to ``y`` and the ray to ``theta``."""
    x, y = check_interior(x), check_interior(y)
    T = MoebiusTransform.to_origin(x)
    w = T.apply(y)
    zeta = T.apply(circle(theta))
    if w == 0:
        raise DomainError("angle undefined when y = x")
    return np.abs(np.angle(zeta / w))


def visual_derivative_angle(x, y, theta):
    """d rho_y / d rho_x at ``theta`` from the distance and angle at ``x``."""
    t = disk_distance(x, y)
    if t == 0:
        return np.ones_like(np.asarray(theta, dtype=float))
    s = np.sin(angle_at(x, y, theta) / 2) ** 2
    return 1 / ((math.exp(t) - math.exp(-t)) * s + math.exp(-t))


def comparison_angle(x, xi, eta):
    return 2 * np.arcsin(np.minimum(visual_metric_disk(x, xi, eta), 1.0))


@dataclass(frozen=True)
class MoebiusTransform:
    """z -> (a z + b) / (conj(b) z + conj(a)) with |a|^2 - |b|^2 = 1."""

    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        det = abs(a) ** 2 - abs(b) ** 2
        # relative: entries grow like e^(d/2) for maps moving 0 a distance d
        if abs(det - 1) > 1e-12 * (abs(a) ** 2 + abs(b) ** 2):
            raise DomainError(f"|a|^2 - |b|^2 = {det}, expected 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_disk_matrix(cls, m) -> "MoebiusTransform":
        """Normalize a disk matrix (a, b; conj b, conj a) to unit determinant."""
        m = np.asarray(m, dtype=complex)
        det = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]).real
        if det <= 0:
            raise DomainError("disk matrix must have positive determinant")
        if abs(m[1, 0] - np.conj(m[0, 1])) > 1e-9 * (1 + abs(m[0, 1])) or abs(
            m[1, 1] - np.conj(m[0, 0])
        ) > 1e-9 * (1 + abs(m[0, 0])):
            raise DomainError("matrix is not of the form (a, b; conj b, conj a)")
        s = math.sqrt(det)
        a, b = m[0, 0] / s, m[0, 1] / s
        scale = math.sqrt(abs(a) ** 2 - abs(b) ** 2)
        return cls(a / scale, b / scale)

    @classmethod
    def from_halfplane(cls, a, b, c, d) -> "MoebiusTransform":
        """Conjugate a real determinant-one matrix acting on the upper half-plane into the disk."""
        det = a * d - b * c
        if det <= 0:
            raise DomainError("half-plane matrix must have positive determinant")
        s = math.sqrt(det)
        h = np.array([[a, b], [c, d]], dtype=complex) / s
        cayley = np.array([[1, -1j], [1, 1j]])
        m = cayley @ h @ np.linalg.inv(cayley)
        # cayley has determinant 2i so m already has determinant 1
        return cls.from_disk_matrix(m)

    @classmethod
    def rotation(cls, alpha: float) -> "MoebiusTransform":
        return cls(complex(math.cos(alpha / 2), math.sin(alpha / 2)), 0j)

    @classmethod
    def to_origin(cls, p) -> "MoebiusTransform":
        """The map z -> (z - p) / (1 - conj(p) z), sending p to 0."""
        p = check_interior(p)
        s = math.sqrt(1 - abs(p) ** 2)
        return cls(1 / s, -p / s)

    @classmethod
    def identity(cls) -> "MoebiusTransform":
        return cls(1, 0)

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.b.conjugate(), self.a.conjugate()]])

    def apply(self, z):
        return (self.a * z + self.b) / (self.b.conjugate() * z + self.a.conjugate())

    def apply_point(self, z) -> complex:
        return complex(self.apply(check_interior(z)))

    def apply_angle(self, theta):
        return normalize_angle(np.angle(self.apply(circle(theta))))

    def lift(self, theta):
        """Continuous lift of the boundary action: lift(theta + 2 pi) = lift(theta) + 2 pi."""
        theta = np.asarray(theta, dtype=float)
        r = self.b / self.a
        return theta + 2 * np.angle(self.a) + 2 * np.angle(1 + r * np.exp(-1j * theta))

    def derivative(self, theta):
        """Angular derivative of the boundary action."""
        return 1 / np.abs(self.b.conjugate() * circle(theta) + self.a.conjugate()) ** 2

    def compose(self, other: "MoebiusTransform") -> "MoebiusTransform":
        """self o other."""
        m = self.matrix @ other.matrix
        return MoebiusTransform.from_disk_matrix(m)

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.a.conjugate(), -self.b)

    def power(self, n: int) -> "MoebiusTransform":
        base = self if n >= 0 else self.inverse()
        out = MoebiusTransform.identity()
        for _ in range(abs(n)):
            out = base.compose(out)
        return out

    def trace(self) -> float:
        return 2 * self.a.real


def apply_moebius(m: MoebiusTransform, point, boundary: bool = False):
    """Act on an interior point (complex) or, with ``boundary=True``, on angles."""
    if boundary:
        return m.apply_angle(point)
    return m.apply_point(point)


def classify_by_trace(matrix, tol: float = 1e-9) -> str:
    """Classical trichotomy for a real determinant-one 2x2 matrix."""
    (a, b), (c, d) = np.asarray(matrix, dtype=float)
    det = a * d - b * c
    if det <= 0:
        raise DomainError("matrix must have positive determinant")
    tr = abs(a + d) / math.sqrt(det)
    if abs(tr - 2) <= tol:
        return "parabolic"
    return "elliptic" if tr < 2 else "hyperbolic"


# -- geodesics ---------------------------------------------------------------


def nearest_point_to_origin(xi: float, eta: float) -> complex:
    """Point of the geodesic (xi, eta) closest to 0."""
    delta = math.remainder(eta - xi, TWO_PI)
    if delta == 0:
        raise DomainError("geodesic endpoints must differ")
    psi = abs(delta) / 2
    mid = xi + delta / 2
    r = (1 - math.sin(psi)) / math.cos(psi) if psi < math.pi / 2 else 0.0
    return r * complex(math.cos(mid), math.sin(mid))


def distance_to_geodesic(p, xi: float, eta: float) -> float:
    T = MoebiusTransform.to_origin(p)
    q = nearest_point_to_origin(float(T.apply_angle(xi)), float(T.apply_angle(eta)))
    return 2 * math.atanh(abs(q))


@dataclass(frozen=True)
class GeodesicState:
    """Unit-speed geodesic from ``xi`` (t -> -inf) to ``eta`` (t -> +inf) through ``basepoint`` at t = 0."""

    xi: float
    eta: float
    basepoint: complex

    def __post_init__(self):
        object.__setattr__(self, "xi", float(normalize_angle(self.xi)))
        object.__setattr__(self, "eta", float(normalize_angle(self.eta)))
        object.__setattr__(self, "basepoint", check_interior(self.basepoint))
        if abs(math.remainder(self.eta - self.xi, TWO_PI)) < 1e-15:
            raise DomainError("geodesic endpoints must differ")
        if distance_to_geodesic(self.basepoint, self.xi, self.eta) > 1e-9:
            raise DomainError("basepoint is not on the geodesic")

    @classmethod
    def through_nearest(cls, xi: float, eta: float) -> "GeodesicState":
        return cls(xi, eta, nearest_point_to_origin(xi, eta))

    @classmethod
    def from_ray(cls, x, direction: float) -> "GeodesicState":
        """Geodesic through ``x`` whose forward endpoint is the boundary angle ``direction``."""
        T = MoebiusTransform.to_origin(x)
        zeta = complex(T.apply(circle(direction)))
        back = float(T.inverse().apply_angle(np.angle(-zeta)))
        return cls(back, direction, x)

    def point_at(self, t: float) -> complex:
        return geodesic_point_at(self, t)

    def flip(self) -> "GeodesicState":
        return GeodesicState(self.eta, self.xi, self.basepoint)

    def flow(self, t: float) -> "GeodesicState":
        return GeodesicState(self.xi, self.eta, self.point_at(t))


def geodesic_point_at(g: GeodesicState, t: float) -> complex:
    T = MoebiusTransform.to_origin(g.basepoint)
    zeta = complex(T.apply(circle(g.eta)))
    return complex(T.inverse().apply(math.tanh(t / 2) * zeta / abs(zeta)))


# -- sup of the Busemann function over the circle ---------------------------


def sup_busemann(x, y, samples: int = 4096) -> tuple[float, float]:
    """max over the circle of B(., x, y), and the maximizing angle.

    The grid is uniform in the frame of ``x``, where B(., x, y) becomes
    log P(T_x y, .), a unimodal function; the grid argmax is refined by a
    bounded scalar search over the neighbouring cells.
    """
    T = MoebiusTransform.to_origin(x)
    w = T.apply_point(y)
    alpha = np.arange(samples) * (TWO_PI / samples)
    vals = log_poisson(w, alpha)
    k = int(np.argmax(vals))
    h = TWO_PI / samples
    res = minimize_scalar(
        lambda s: -float(log_poisson(w, s)),
        bounds=(alpha[k] - h, alpha[k] + h),
        method="bounded",
        options={"xatol": 1e-12},
    )
    best, arg = (-res.fun, res.x) if -res.fun >= vals[k] else (vals[k], alpha[k])
    return float(best), float(T.inverse().apply_angle(arg))
