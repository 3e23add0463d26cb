"""Metrics on a finite boundary that are Moebius equivalent to a base metric.

Everything here is exact: a metric is stored through its log-distances,
which are rationals, and every identity of the theory (chain rule, mean
value theorem, max/min) is additive in logs.  Only the two inequalities
that genuinely live in the linear domain (triangle inequality, Lipschitz
bound of the derivative) need real numbers; those are decided with
interval arithmetic at a configurable precision.
"""

from __future__ import annotations

import itertools
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from mpmath import iv

from .errors import DomainError, NotMoebiusEquivalent, ParseError, UndecidedAtPrecision

DEFAULT_PRECISION = 128
MAX_PRECISION = 8192

_IV_LOCK = threading.Lock()


@contextmanager
def interval_precision(bits):
    """Run a block with mpmath's interval context at ``bits`` of precision.

    mpmath keeps the interval precision as global state, hence the lock.
    """
    with _IV_LOCK:
        old = iv.prec
        iv.prec = int(bits)
        try:
            yield iv
        finally:
            iv.prec = old


def iv_exp_fraction(q: Fraction):
    return iv.exp(iv.mpf(q.numerator) / q.denominator)


def iv_le(a, b):
    """Decide ``a <= b`` for intervals: True, False, or None when they overlap."""
    if a.b <= b.a:
        return True
    if a.a > b.b:
        return False
    return None


@dataclass(frozen=True)
class FiniteBoundary:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 4:
            raise DomainError(f"a boundary needs at least 4 points, got {len(labels)}")
        if len(set(labels)) != len(labels):
            raise DomainError("boundary labels must be pairwise distinct")

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def index(self, point) -> int:
        if isinstance(point, int):
            if not 0 <= point < len(self.labels):
                raise DomainError(f"point index {point} out of range")
            return point
        try:
            return self.labels.index(str(point))
        except ValueError:
            raise DomainError(f"unknown boundary point {point!r}") from None


def _key(i, j):
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class LogMetric:
    """A symmetric table of log-distances on a finite boundary.

    Only off-diagonal entries are stored; the distance from a point to
    itself is zero and never enters a formula.
    """

    boundary: FiniteBoundary
    entries: Mapping[tuple[int, int], Fraction] = field(repr=False)

    def __post_init__(self):
        n = len(self.boundary)
        clean = {}
        for i, j in itertools.combinations(range(n), 2):
            if (i, j) in self.entries:
                v = self.entries[(i, j)]
            elif (j, i) in self.entries:
                v = self.entries[(j, i)]
            else:
                raise DomainError(
                    f"missing log-distance for pair ({self.boundary.labels[i]}, {self.boundary.labels[j]})"
                )
            clean[(i, j)] = Fraction(v)
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_function(cls, boundary: FiniteBoundary, fn) -> "LogMetric":
        n = len(boundary)
        return cls(boundary, {(i, j): Fraction(fn(i, j)) for i, j in itertools.combinations(range(n), 2)})

    def __len__(self):
        return len(self.boundary)

    def ld(self, i: int, j: int) -> Fraction:
        """Log-distance between point indices ``i != j``."""
        if i == j:
            raise DomainError("log-distance of a point to itself is undefined")
        return self.entries[_key(i, j)]

    def logdist(self, a, b) -> Fraction:
        return self.ld(self.boundary.index(a), self.boundary.index(b))

    def row(self, i: int) -> list[Fraction]:
        return [self.ld(i, j) for j in range(len(self)) if j != i]

    def max_entry(self) -> Fraction:
        return max(self.entries.values())

    def relabel(self, perm: Sequence[int], boundary: FiniteBoundary) -> "LogMetric":
        """Metric on ``boundary`` whose point ``k`` is this metric's point ``perm[k]``."""
        return LogMetric.from_function(boundary, lambda i, j: self.ld(perm[i], perm[j]))

    def __eq__(self, other):
        if not isinstance(other, LogMetric):
            return NotImplemented
        return self.boundary == other.boundary and self.entries == other.entries

    def __hash__(self):
        return hash((self.boundary, tuple(sorted(self.entries.items()))))


@dataclass(frozen=True)
class LogDerivative:
    boundary: FiniteBoundary
    values: tuple[Fraction, ...]

    @property
    def max(self) -> Fraction:
        return max(self.values)

    @property
    def min(self) -> Fraction:
        return min(self.values)


@dataclass
class MembershipVerdict:
    status: str  # "member" | "violation" | "undecided"
    violations: list[str] = field(default_factory=list)
    precision: int = DEFAULT_PRECISION

    @property
    def member(self) -> bool:
        return self.status == "member"

    def __bool__(self):
        return self.member


def _same_boundary(r1: LogMetric, r2: LogMetric):
    if r1.boundary != r2.boundary:
        raise DomainError("metrics live on different boundaries")


def _distinct(*idx):
    if len(set(idx)) != len(idx):
        raise DomainError("points must be pairwise distinct")


def cross_ratio_log(rho: LogMetric, quad) -> Fraction:
    """log [xi xi' eta eta'] = l(xi,eta) + l(xi',eta') - l(xi,eta') - l(xi',eta)."""
    a, a2, b, b2 = (rho.boundary.index(p) for p in quad)
    _distinct(a, a2, b, b2)
    return rho.ld(a, b) + rho.ld(a2, b2) - rho.ld(a, b2) - rho.ld(a2, b)


def _pairing_sums(rho: LogMetric, s):
    a, b, c, d = s
    return (
        rho.ld(a, b) + rho.ld(c, d),
        rho.ld(a, c) + rho.ld(b, d),
        rho.ld(a, d) + rho.ld(b, c),
    )


def cross_ratio_mismatch(r1: LogMetric, r2: LogMetric, perm2: Sequence[int] | None = None):
    """First quadruple whose cross-ratio differs between ``r1`` and ``r2``.

    ``perm2[k]`` is the index in ``r2`` of the image of ``r1``'s point ``k``
    (identity when omitted).  Every log cross-ratio of a 4-set is a
    difference of two of its three pairing sums, so comparing two
    differences per 4-set is complete.  Returns ``None`` or
    ``(quad_indices, value1, value2)`` with quad ordered as
    ``(xi, xi', eta, eta')``.
    """
    n = len(r1)
    if perm2 is None:
        perm2 = range(n)
    perm2 = list(perm2)
    for s in itertools.combinations(range(n), 4):
        p1 = _pairing_sums(r1, s)
        p2 = _pairing_sums(r2, [perm2[k] for k in s])
        a, b, c, d = s
        # p[0] - p[2] is [a c b d]; p[0] - p[1] is [a d b c]
        if p1[0] - p1[2] != p2[0] - p2[2]:
            return (a, c, b, d), p1[0] - p1[2], p2[0] - p2[2]
        if p1[0] - p1[1] != p2[0] - p2[1]:
            return (a, d, b, c), p1[0] - p1[1], p2[0] - p2[1]
    return None


def _triangle_check(rho: LogMetric, precision: int):
    """Return (violations, undecided) for the linear-domain triangle inequality."""
    n = len(rho)
    violations, undecided = [], False
    with interval_precision(precision):
        ex = {k: iv_exp_fraction(v) for k, v in rho.entries.items()}
        for i, j, k in itertools.permutations(range(n), 3):
            lhs = ex[_key(i, k)]
            rhs = ex[_key(i, j)] + ex[_key(j, k)]
            verdict = iv_le(lhs, rhs)
            if verdict is None:
                undecided = True
            elif not verdict:
                L = rho.boundary.labels
                violations.append(f"triangle inequality fails for ({L[i]}, {L[j]}, {L[k]})")
    return violations, undecided


def validate_membership(
    candidate: LogMetric,
    base: LogMetric,
    precision: int = DEFAULT_PRECISION,
    escalate: bool = True,
    max_precision: int = MAX_PRECISION,
) -> MembershipVerdict:
    """Decide whether ``candidate`` is an antipodal diameter-one metric Moebius equivalent to ``base``.

    The exact conditions (sign of entries, diameter one, antipodality,
    cross-ratios) are checked first.  The triangle inequality is decided
    by interval arithmetic; if some triple is still undecided the
    precision is doubled up to ``max_precision`` when ``escalate`` is set,
    otherwise the verdict is ``"undecided"``.
    """
    _same_boundary(candidate, base)
    L = candidate.boundary.labels
    n = len(candidate)
    violations = []
    positive = [k for k, v in candidate.entries.items() if v > 0]
    if positive:
        i, j = positive[0]
        violations.append(f"log-distance ({L[i]}, {L[j]}) is positive: distance exceeds 1")
    if candidate.max_entry() != 0:
        violations.append(f"diameter-one fails: max log-distance is {candidate.max_entry()}")
    for i in range(n):
        if max(candidate.row(i)) != 0:
            violations.append(f"antipodality fails at {L[i]}")
    mismatch = cross_ratio_mismatch(base, candidate)
    if mismatch is not None:
        q, v1, v2 = mismatch
        violations.append(
            "cross-ratio differs on ({}): {} vs {}".format(", ".join(L[k] for k in q), v1, v2)
        )
    prec = precision
    while True:
        tri, undecided = _triangle_check(candidate, prec)
        if tri or not undecided or not escalate or prec >= max_precision:
            break
        prec *= 2
    violations.extend(tri)
    if violations:
        return MembershipVerdict("violation", violations, prec)
    if undecided:
        return MembershipVerdict("undecided", ["triangle inequality undecided at precision"], prec)
    return MembershipVerdict("member", [], prec)


def _derivative_term(r2: LogMetric, r1: LogMetric, x: int, e: int, e2: int) -> Fraction:
    return (r2.ld(x, e) + r2.ld(x, e2) + r1.ld(e, e2)) - (r1.ld(x, e) + r1.ld(x, e2) + r2.ld(e, e2))


def derivative_log(r2: LogMetric, r1: LogMetric, xi) -> Fraction:
    """log (d rho2 / d rho1)(xi), checked to be independent of the auxiliary pair."""
    _same_boundary(r1, r2)
    x = r1.boundary.index(xi)
    others = [k for k in range(len(r1)) if k != x]
    values = {_derivative_term(r2, r1, x, e, e2) for e, e2 in itertools.combinations(others, 2)}
    if len(values) != 1:
        raise NotMoebiusEquivalent(
            f"derivative at {r1.boundary.labels[x]} depends on the auxiliary pair "
            f"({len(values)} distinct values)"
        )
    return values.pop()


def log_derivative(r2: LogMetric, r1: LogMetric) -> LogDerivative:
    return LogDerivative(r1.boundary, tuple(derivative_log(r2, r1, k) for k in range(len(r1))))


def dM(r1: LogMetric, r2: LogMetric) -> Fraction:
    """Distance in the space of Moebius-equivalent metrics: max of log d r2/d r1."""
    return log_derivative(r2, r1).max


def conformal_scale(base: LogMetric, logf: Sequence) -> LogMetric:
    """Candidate metric base(xi,eta) * f(xi)^(1/2) f(eta)^(1/2); not validated."""
    if len(logf) != len(base):
        raise DomainError("logf must have one entry per boundary point")
    f = [Fraction(v) for v in logf]
    return LogMetric.from_function(base.boundary, lambda i, j: base.ld(i, j) + (f[i] + f[j]) / 2)


def embed_coordinates(rho: LogMetric, base: LogMetric) -> tuple[Fraction, ...]:
    return log_derivative(rho, base).values


def sup_distance(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return max(abs(a - b) for a, b in zip(u, v))


@dataclass
class LipschitzVerdict:
    holds: bool
    worst_ratio: float
    precision: int


def lipschitz_check(
    r2: LogMetric, r1: LogMetric, precision: int = DEFAULT_PRECISION, max_precision: int = MAX_PRECISION
) -> LipschitzVerdict:
    """Certify |f(a) - f(b)| <= 2 lam^2 rho1(a, b) for f = d r2/d r1, lam = max f.

    ``worst_ratio`` is the largest observed |f(a) - f(b)| / (2 lam^2 rho1(a,b)).
    """
    D = log_derivative(r2, r1).values
    top = max(D)
    n = len(r1)
    prec = precision
    while True:
        undecided = False
        holds = True
        worst = 0.0
        with interval_precision(prec):
            f = [iv_exp_fraction(d) for d in D]
            k2 = 2 * iv_exp_fraction(2 * top)
            for a, b in itertools.combinations(range(n), 2):
                lhs = abs(f[a] - f[b])
                rhs = k2 * iv_exp_fraction(r1.ld(a, b))
                verdict = iv_le(lhs, rhs)
                if verdict is None:
                    undecided = True
                elif not verdict:
                    holds = False
                worst = max(worst, float((lhs / rhs).b))
        if not undecided or prec >= max_precision:
            break
        prec *= 2
    if undecided and holds:
        raise UndecidedAtPrecision("Lipschitz bound undecided", prec)
    return LipschitzVerdict(holds, worst, prec)


# -- file format -------------------------------------------------------------

HEADER = "logmetric v1"


def _strip(line):
    return line.split("#", 1)[0].strip()


def parse_logmetric(text: str, path=None) -> LogMetric:
    lines = text.splitlines()
    content = [(no, _strip(s)) for no, s in enumerate(lines, 1)]
    content = [(no, s) for no, s in content if s]
    if not content or content[0][1] != HEADER:
        raise ParseError(f"expected header '{HEADER}'", content[0][0] if content else 1, path)
    boundary = None
    entries = {}
    for no, s in content[1:]:
        parts = s.split()
        if parts[0] == "POINTS":
            if boundary is not None:
                raise ParseError("duplicate POINTS line", no, path)
            try:
                boundary = FiniteBoundary(tuple(parts[1:]))
            except DomainError as exc:
                raise ParseError(str(exc), no, path) from None
        elif parts[0] == "D":
            if boundary is None:
                raise ParseError("D line before POINTS", no, path)
            if len(parts) != 4:
                raise ParseError("expected 'D <label> <label> <p>/<q>'", no, path)
            try:
                i, j = boundary.index(parts[1]), boundary.index(parts[2])
            except DomainError as exc:
                raise ParseError(str(exc), no, path) from None
            if i == j:
                raise ParseError("D line pairs a point with itself", no, path)
            try:
                value = Fraction(parts[3])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad rational {parts[3]!r}", no, path) from None
            if value > 0:
                raise ParseError("log-distance must be <= 0", no, path)
            if _key(i, j) in entries:
                raise ParseError("duplicate pair", no, path)
            entries[_key(i, j)] = value
        else:
            raise ParseError(f"unknown keyword {parts[0]!r}", no, path)
    if boundary is None:
        raise ParseError("missing POINTS line", None, path)
    try:
        return LogMetric(boundary, entries)
    except DomainError as exc:
        raise ParseError(str(exc), None, path) from None


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def format_logmetric(rho: LogMetric) -> str:
    L = rho.boundary.labels
    out = [HEADER, "POINTS " + " ".join(L)]
    for (i, j), v in sorted(rho.entries.items()):
        out.append(f"D {L[i]} {L[j]} {format_fraction(v)}")
    return "\n".join(out) + "\n"


def read_logmetric(path) -> LogMetric:
    with open(path) as fh:
        return parse_logmetric(fh.read(), path=str(path))


def quadruples(n: int) -> Iterable[tuple[int, int, int, int]]:
    return itertools.permutations(range(n), 4)
