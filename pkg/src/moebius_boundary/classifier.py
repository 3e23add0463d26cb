"""Elliptic / parabolic / hyperbolic classification of Moebius self-maps from orbits.

The orbit of a basepoint x under the extensions F_n is summarized by the
displacements D_n = d(x, F_n x) and the directions in which F_n x is seen
from x.  For an escaping orbit D_n grows with |n| (like 2 log |n| for a
parabolic map, linearly for a hyperbolic one); an elliptic orbit stays on
a circle, so its displacement either stays small or turns back.  When
none of the rules fires the horizon N is doubled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .disk import TWO_PI, MoebiusTransform, check_interior, classify_by_trace
from .errors import DomainError
from .tree import TreeExtension, TreePoint, tree_distance

ELLIPTIC, PARABOLIC, HYPERBOLIC, UNDECIDED = "elliptic", "parabolic", "hyperbolic", "undecided"

DEFAULT_N = 50
DEFAULT_RADIUS = 10.0
DEFAULT_CLUSTER_TOL = 0.05
MAX_N = 3200
NEAR_PARABOLIC_BAND = 1e-3


@dataclass
class OrbitRecord:
    N: int
    points: list  # F_n(x) for n = -N..N
    displacement: np.ndarray  # d(x, F_n x)
    direction: np.ndarray | None  # angle of F_n x seen from x (disk only)
    consecutive_defect: float  # max_n d(F_{n+1} x, F_1(F_n x))
    bounded: bool = field(init=False)

    def __post_init__(self):
        if len(self.points) != 2 * self.N + 1:
            raise DomainError("orbit must have 2N + 1 points")
        self.bounded = bool(np.max(self.displacement) < DEFAULT_RADIUS)

    def at(self, n: int):
        return self.points[n + self.N]

    def d(self, n: int) -> float:
        return float(self.displacement[n + self.N])

    def theta(self, n: int) -> float:
        return float(self.direction[n + self.N])


@dataclass
class Classification:
    kind: str
    N: int
    fixed_points: tuple = ()  # boundary fixed points: (xi0,) or (xi_plus, xi_minus)
    cluster: tuple = ()  # raw accumulation directions read off the orbit
    diagnostics: dict = field(default_factory=dict)
    record: OrbitRecord | None = field(default=None, repr=False)


# -- orbits ------------------------------------------------------------------


def _mp_power_orbit(m: MoebiusTransform, x: complex, N: int, precision: int):
    """Conjugated powers g^n = T_x m^n T_x^-1 for n = -N..N as mp (a, b) pairs."""
    with mpmath.workprec(precision):
        Tx = MoebiusTransform.to_origin(x)
        g = Tx.compose(m).compose(Tx.inverse())
        a, b = mpmath.mpc(g.a), mpmath.mpc(g.b)
        s = mpmath.sqrt(abs(a) ** 2 - abs(b) ** 2)
        a, b = a / s, b / s
        out = {0: (mpmath.mpc(1), mpmath.mpc(0))}
        for sign, (ga, gb) in ((1, (a, b)), (-1, (mpmath.conj(a), -b))):
            pa, pb = mpmath.mpc(1), mpmath.mpc(0)
            for n in range(1, N + 1):
                # (ga, gb; conj gb, conj ga) @ (pa, pb; conj pb, conj pa)
                pa, pb = ga * pa + gb * mpmath.conj(pb), ga * pb + gb * mpmath.conj(pa)
                out[sign * n] = (pa, pb)
        return [out[n] for n in range(-N, N + 1)]


def orbit(f, x, N: int = DEFAULT_N, precision: int = 128) -> OrbitRecord:
    """Orbit of x under the extensions of f and its powers.

    ``f`` is a MoebiusTransform (disk) or a TreeExtension of a tree to itself.
    """
    if isinstance(f, TreeExtension):
        return _tree_orbit(f, x, N)
    x = check_interior(x)
    powers = _mp_power_orbit(f, x, N, precision)
    inv = MoebiusTransform.to_origin(x).inverse()
    with mpmath.workprec(precision):
        disp = np.array([float(2 * mpmath.asinh(abs(b))) for _, b in powers])
        direc = np.array([float(mpmath.arg(b) + mpmath.arg(a)) if b != 0 else 0.0 for a, b in powers])
        local = [complex(b / mpmath.conj(a)) for a, b in powers]
    points = [complex(inv.apply(w)) if abs(w) < 1 else complex(inv.apply(w / abs(w))) for w in local]
    # F_{n+1} x = F_1(F_n x) holds exactly for matrix orbits; measured to catch round-off
    defect = 0.0
    for n in range(-N, N):
        wa, wb = local[n + N], local[n + N + 1]
        if abs(wa) < 1 - 1e-9 and abs(wb) < 1 - 1e-9:
            fx = complex(inv.inverse().apply(f.apply(inv.apply(wa))))
            defect = max(defect, _local_distance(fx, wb))
    return OrbitRecord(N, points, disp, np.mod(direc, TWO_PI), defect)


def _local_distance(z, w) -> float:
    s = abs(z - w) / math.sqrt(max((1 - abs(z) ** 2) * (1 - abs(w) ** 2), 1e-300))
    return 2 * math.asinh(s)


def _tree_orbit(F: TreeExtension, x: TreePoint, N: int) -> OrbitRecord:
    if F.source is not F.target:
        raise DomainError("tree orbit needs a self-map")
    inv_map = {v: k for k, v in F.end_map.items()}
    G = TreeExtension(F.source, F.source, inv_map, [F.perm.index(j) for j in range(len(F.perm))])
    fwd, bwd = [x], [x]
    for _ in range(N):
        fwd.append(F(fwd[-1]))
        bwd.append(G(bwd[-1]))
    points = bwd[:0:-1] + fwd
    T = F.source
    disp = np.array([float(tree_distance(T, x, p)) for p in points])
    defect = max(
        (tree_distance(T, points[k + 1], F(points[k])) for k in range(2 * N)), default=Fraction(0)
    )
    return OrbitRecord(N, points, disp, None, float(defect))


# -- classification ----------------------------------------------------------


def _angle_gap(a: float, b: float) -> float:
    return abs(math.remainder(a - b, TWO_PI))


def _turns_back(disp: np.ndarray, N: int) -> bool:
    fwd, bwd = disp[N:], disp[N::-1]
    for seq in (fwd, bwd):
        tol = 1e-10 * (1 + seq[:-1])
        if np.any(seq[1:] < seq[:-1] - tol):
            return True
    return bool(np.any(np.delete(disp, N) < 1e-9))


def classify(
    record: OrbitRecord,
    radius_threshold: float = DEFAULT_RADIUS,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> Classification:
    """Decide the type from one orbit record; may return ``undecided``."""
    N = record.N
    disp = record.displacement
    diag = {"max_displacement": float(np.max(disp)), "consecutive_defect": record.consecutive_defect}
    if _turns_back(disp, N) or record.direction is None:
        return Classification(ELLIPTIC, N, diagnostics=diag, record=record)
    if record.d(N) < radius_threshold and record.d(-N) < radius_threshold:
        diag["reason"] = "orbit has not escaped the radius threshold"
        return Classification(UNDECIDED, N, diagnostics=diag, record=record)
    h = N // 2
    growth = max(record.d(N) - record.d(h), record.d(-N) - record.d(-h))
    sep = _angle_gap(record.theta(N), record.theta(-N))
    sep_half = _angle_gap(record.theta(h), record.theta(-h))
    conv = max(_angle_gap(record.theta(N), record.theta(h)), _angle_gap(record.theta(-N), record.theta(-h)))
    ratio = sep / sep_half if sep_half > 0 else 1.0
    diag.update(growth=growth, separation=sep, separation_ratio=ratio, convergence=conv)
    cluster = (record.theta(N), record.theta(-N))
    if conv < cluster_tol and growth > 2 * math.log(2) + 0.5 and abs(sep - sep_half) < cluster_tol:
        return Classification(HYPERBOLIC, N, cluster=cluster, diagnostics=diag, record=record)
    if sep < cluster_tol and abs(growth - 2 * math.log(2)) < 0.25 and ratio < 0.75:
        mid = record.theta(N) + math.remainder(record.theta(-N) - record.theta(N), TWO_PI) / 2
        return Classification(PARABOLIC, N, cluster=(mid % TWO_PI,), diagnostics=diag, record=record)
    diag["reason"] = "accumulation pattern ambiguous at this horizon"
    return Classification(UNDECIDED, N, cluster=cluster, diagnostics=diag, record=record)


def refine_fixed_point(m: MoebiusTransform, theta0: float, steps: int = 200, precision: int = 160) -> float:
    """Boundary fixed point of m near theta0 by Newton iteration on m(t) - t."""
    with mpmath.workprec(precision):
        a, b = mpmath.mpc(m.a), mpmath.mpc(m.b)

        def h(t):
            z = mpmath.expj(t)
            w = (a * z + b) / (mpmath.conj(b) * z + mpmath.conj(a))
            return mpmath.arg(w / z)

        t = mpmath.mpf(theta0)
        for _ in range(steps):
            v = h(t)
            eps = mpmath.mpf(2) ** (-precision // 3)
            dv = (h(t + eps) - h(t - eps)) / (2 * eps)
            if dv == 0:
                break
            step = v / dv
            t -= step
            if abs(step) < mpmath.mpf(2) ** (-precision // 2):
                break
        return float(t % (2 * mpmath.pi))


def boundary_residual(m: MoebiusTransform, theta: float) -> float:
    return _angle_gap(float(m.apply_angle(theta)), theta)


def classify_orbit(
    f,
    x=0j,
    N: int = DEFAULT_N,
    radius_threshold: float = DEFAULT_RADIUS,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    precision: int = 128,
    max_N: int = MAX_N,
) -> Classification:
    """Classify, doubling N (and the working precision) while the verdict is undecided."""
    while True:
        prec = max(precision, 64 + 4 * N)
        rec = orbit(f, x, N, prec)
        c = classify(rec, radius_threshold, cluster_tol)
        if c.kind != UNDECIDED or 2 * N > max_N:
            break
        N *= 2
    if isinstance(f, MoebiusTransform) and c.kind in (PARABOLIC, HYPERBOLIC):
        c.fixed_points = tuple(refine_fixed_point(f, t) for t in c.cluster)
        c.diagnostics["fixed_point_residual"] = max(boundary_residual(f, t) for t in c.fixed_points)
    return c


@dataclass
class MatrixVerdict:
    kind: str
    oracle: str
    in_band: bool
    classification: Classification


def _as_fraction(v):
    return v if isinstance(v, Fraction) else Fraction(v)


def classify_matrix(entries, model: str = "halfplane", x=0j, **kwargs) -> MatrixVerdict:
    """Classify a 2x2 matrix acting on the half-plane (real entries) or the disk.

    Matrices within the near-parabolic band are reported as undecided
    unless their trace is exactly +-2 in the given entries.
    """
    if model == "halfplane":
        a, b, c, d = (_as_fraction(v) for v in entries)
        det = a * d - b * c
        if det <= 0:
            raise DomainError("half-plane matrix must have positive determinant")
        m = MoebiusTransform.from_halfplane(float(a), float(b), float(c), float(d))
        tr2 = (a + d) ** 2 / det
        exact_parabolic = tr2 == 4
        in_band = abs(math.sqrt(float(tr2)) - 2) <= NEAR_PARABOLIC_BAND
        oracle = "parabolic" if exact_parabolic else classify_by_trace([[float(a), float(b)], [float(c), float(d)]])
    elif model == "disk":
        a, b = complex(entries[0]), complex(entries[1])
        m = MoebiusTransform.from_disk_matrix([[a, b], [b.conjugate(), a.conjugate()]])
        tr = abs(2 * m.a.real)
        exact_parabolic = tr == 2
        in_band = abs(tr - 2) <= NEAR_PARABOLIC_BAND
        oracle = "parabolic" if exact_parabolic else ("elliptic" if tr < 2 else "hyperbolic")
    else:
        raise DomainError(f"unknown model {model!r}")
    cls = classify_orbit(m, x, **kwargs)
    kind = cls.kind
    if in_band and not exact_parabolic:
        kind = UNDECIDED
    return MatrixVerdict(kind, oracle, in_band, cls)


def boundary_orbit_distances(m: MoebiusTransform, samples, target: float, n: int) -> np.ndarray:
    """Chordal distances |f^n(xi) - target| for sampled xi (negative n iterates the inverse)."""
    g = m if n >= 0 else m.inverse()
    t = np.asarray(samples, dtype=float)
    for _ in range(abs(n)):
        t = g.apply_angle(t)
    return np.abs(np.exp(1j * t) - np.exp(1j * target))


def elliptic_distortion(m: MoebiusTransform, x, N: int, rng, pairs: int = 50) -> float:
    """max over |n| <= N and sampled pairs of |log rho_x(f^n xi, f^n eta) / rho_x(xi, eta)|."""
    from .disk import log_visual_metric_disk

    xi, eta = rng.uniform(0, TWO_PI, pairs), rng.uniform(0, TWO_PI, pairs)
    keep = np.abs(np.exp(1j * xi) - np.exp(1j * eta)) > 1e-6
    xi, eta = xi[keep], eta[keep]
    base = log_visual_metric_disk(x, xi, eta)
    worst = 0.0
    p = MoebiusTransform.identity()
    q = MoebiusTransform.identity()
    for _ in range(N):
        p, q = m.compose(p), m.inverse().compose(q)
        for g in (p, q):
            worst = max(worst, float(np.max(np.abs(log_visual_metric_disk(x, g.apply_angle(xi), g.apply_angle(eta)) - base))))
    return worst
