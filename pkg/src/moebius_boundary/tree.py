"""Finite-core metric trees with rational edge lengths and their ends.

A tree is a finite graph of vertices and edges plus a set of rays, each
ray a copy of [0, inf) glued to a vertex.  The ends of the tree are the
rays, so the boundary is finite and every quantity below (Gromov
products, Busemann functions, visual metrics, nearest-point projection)
is an exact rational.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .boundary_metrics import (
    FiniteBoundary,
    LogMetric,
    cross_ratio_mismatch,
    validate_membership,
)
from .errors import DomainError, NotMoebius, ParseError, SurjectivityViolation


@dataclass(frozen=True, order=True)
class TreePoint:
    segment: int
    offset: Fraction

    def __repr__(self):
        return f"TreePoint({self.segment}, {self.offset})"


@dataclass(frozen=True, eq=False)
class TreeSpace:
    """Segments are numbered edges first, then rays.

    Edge ``k`` runs from ``edges[k][0]`` (offset 0) to ``edges[k][1]``
    (offset = length); ray ``r`` has id ``len(edges) + r`` and starts at
    its attach vertex.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, Fraction], ...]
    rays: tuple[tuple[str, str], ...]
    _vdist: dict = field(init=False, repr=False, compare=False)
    _incident: dict = field(init=False, repr=False, compare=False)
    _vertex_metrics: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple((u, v, Fraction(w)) for u, v, w in self.edges))
        object.__setattr__(self, "rays", tuple(tuple(r) for r in self.rays))
        check_tree_structure(self.vertices, self.edges, self.rays)
        incident = {v: [] for v in self.vertices}
        for k, (u, v, _) in enumerate(self.edges):
            incident[u].append(k)
            incident[v].append(k)
        for r, (v, _) in enumerate(self.rays):
            incident[v].append(len(self.edges) + r)
        object.__setattr__(self, "_incident", {v: sorted(s) for v, s in incident.items()})
        object.__setattr__(self, "_vdist", self._all_vertex_distances())
        object.__setattr__(self, "_vertex_metrics", {})

    def _all_vertex_distances(self):
        adj = {v: [] for v in self.vertices}
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        out = {}
        for s in self.vertices:
            dist = {s: Fraction(0)}
            queue = deque([s])
            while queue:
                a = queue.popleft()
                for b, w in adj[a]:
                    if b not in dist:
                        dist[b] = dist[a] + w
                        queue.append(b)
            out[s] = dist
        return out

    @property
    def n_segments(self) -> int:
        return len(self.edges) + len(self.rays)

    @property
    def end_labels(self) -> tuple[str, ...]:
        return tuple(e for _, e in self.rays)

    @property
    def boundary(self) -> FiniteBoundary:
        return FiniteBoundary(self.end_labels)

    def is_ray(self, seg: int) -> bool:
        return seg >= len(self.edges)

    def ray_of_end(self, end) -> int:
        if isinstance(end, int):
            if not 0 <= end < len(self.rays):
                raise DomainError(f"end index {end} out of range")
            return len(self.edges) + end
        labels = self.end_labels
        if end not in labels:
            raise DomainError(f"unknown end {end!r}")
        return len(self.edges) + labels.index(end)

    def segment_length(self, seg: int):
        """Edge length, or ``None`` for a ray."""
        self._check_segment(seg)
        return None if self.is_ray(seg) else self.edges[seg][2]

    def tail(self, seg: int) -> str:
        self._check_segment(seg)
        return self.rays[seg - len(self.edges)][0] if self.is_ray(seg) else self.edges[seg][0]

    def head(self, seg: int) -> str:
        if self.is_ray(seg):
            raise DomainError("a ray has no head vertex")
        return self.edges[seg][1]

    def _check_segment(self, seg):
        if not isinstance(seg, int) or not 0 <= seg < self.n_segments:
            raise DomainError(f"invalid segment id {seg!r}")

    def vertex_distance(self, u: str, v: str) -> Fraction:
        return self._vdist[u][v]

    def point(self, seg: int, offset) -> TreePoint:
        """Canonical point on a segment; vertices use their lowest incident segment."""
        self._check_segment(seg)
        offset = Fraction(offset)
        if offset < 0:
            raise DomainError("offset must be nonnegative")
        length = self.segment_length(seg)
        if length is not None and offset > length:
            raise DomainError(f"offset {offset} exceeds edge length {length}")
        if offset == 0:
            return self.vertex_point(self.tail(seg))
        if length is not None and offset == length:
            return self.vertex_point(self.head(seg))
        return TreePoint(seg, offset)

    def vertex_point(self, v: str) -> TreePoint:
        if v not in self._incident:
            raise DomainError(f"unknown vertex {v!r}")
        seg = self._incident[v][0]
        if self.is_ray(seg) or self.edges[seg][0] == v:
            return TreePoint(seg, Fraction(0))
        return TreePoint(seg, self.edges[seg][2])

    def canonical(self, x: TreePoint) -> TreePoint:
        return self.point(x.segment, x.offset)

    def _anchors(self, x: TreePoint):
        """Segment endpoints of ``x`` with the distance to each."""
        self._check_segment(x.segment)
        out = [(self.tail(x.segment), x.offset)]
        if not self.is_ray(x.segment):
            out.append((self.head(x.segment), self.edges[x.segment][2] - x.offset))
        return out

    def ray_offset(self, x: TreePoint, ray: int):
        """Offset of ``x`` along ``ray`` if it lies on it, else None."""
        x = self.canonical(x)
        if x.segment == ray:
            return x.offset
        if x.offset == 0 or (not self.is_ray(x.segment) and x.offset == self.edges[x.segment][2]):
            v = self.tail(x.segment) if x.offset == 0 else self.head(x.segment)
            if v == self.tail(ray):
                return Fraction(0)
        return None


def tree_distance(T: TreeSpace, x: TreePoint, y: TreePoint) -> Fraction:
    x, y = T.canonical(x), T.canonical(y)
    if x.segment == y.segment:
        return abs(x.offset - y.offset)
    return min(cx + T.vertex_distance(p, q) + cy for p, cx in T._anchors(x) for q, cy in T._anchors(y))


def _far_point(T: TreeSpace, end, *pts) -> TreePoint:
    ray = T.ray_of_end(end)
    depth = max((T.ray_offset(p, ray) or Fraction(0)) for p in pts)
    return TreePoint(ray, depth + 1)


def _end_levels(T: TreeSpace, x: TreePoint) -> list[Fraction]:
    """lim d(x, a) - (offset of a) as a runs out along each ray."""
    x = T.canonical(x)
    out = []
    for r, (v, _) in enumerate(T.rays):
        ray = len(T.edges) + r
        o = T.ray_offset(x, ray)
        out.append(-o if o is not None else tree_distance(T, x, T.vertex_point(v)))
    return out


def gromov_product(T: TreeSpace, x: TreePoint, xi, eta) -> Fraction:
    """Distance from ``x`` to the geodesic joining the ends ``xi`` and ``eta``."""
    if T.ray_of_end(xi) == T.ray_of_end(eta):
        raise DomainError("Gromov product of an end with itself")
    a = _far_point(T, xi, x)
    b = _far_point(T, eta, x)
    return (tree_distance(T, x, a) + tree_distance(T, x, b) - tree_distance(T, a, b)) / 2


def busemann_log(T: TreeSpace, xi, x: TreePoint, y: TreePoint) -> Fraction:
    """B(xi, x, y) = d(x, a) - d(y, a) for any a far enough along the ray to xi."""
    a = _far_point(T, xi, x, y)
    return tree_distance(T, x, a) - tree_distance(T, y, a)


def visual_log_metric(T: TreeSpace, x: TreePoint) -> LogMetric:
    """-(xi|eta)_x for all pairs of ends, from one Busemann level per end."""
    x = T.canonical(x)
    if x.offset == 0 or (not T.is_ray(x.segment) and x.offset == T.edges[x.segment][2]):
        key = T.tail(x.segment) if x.offset == 0 else T.head(x.segment)
        if key in T._vertex_metrics:
            return T._vertex_metrics[key]
    else:
        key = None
    lev = _end_levels(T, x)
    att = [v for v, _ in T.rays]
    rho = LogMetric.from_function(
        T.boundary, lambda i, j: (T.vertex_distance(att[i], att[j]) - lev[i] - lev[j]) / 2
    )
    if key is not None:
        T._vertex_metrics[key] = rho
    return rho


def _end_ahead(T: TreeSpace, seg: int, end_idx: int) -> bool:
    """Whether moving forward along ``seg`` moves toward the given end."""
    ray = len(T.edges) + end_idx
    if T.is_ray(seg):
        return seg == ray
    u, v, _ = T.edges[seg]
    root = T.tail(ray)
    return T.vertex_distance(v, root) < T.vertex_distance(u, root)


def _log_derivative_fast(r2: LogMetric, r1: LogMetric):
    """log d r2/d r1 at every point from a single auxiliary pair (no consistency check)."""
    n = len(r1)
    out = []
    for x in range(n):
        e, e2 = [k for k in range(n) if k != x][:2]
        out.append(
            r2.ld(x, e) + r2.ld(x, e2) + r1.ld(e, e2) - r1.ld(x, e) - r1.ld(x, e2) - r2.ld(e, e2)
        )
    return out


def project_metric_tree(T: TreeSpace, rho: LogMetric, validate: bool = True):
    """Point ``x`` minimizing dM(rho, rho_x), and the minimum.

    Along a segment at arclength ``s`` from its tail, log d rho/d rho_x at
    an end equals its value at the tail minus ``s`` for ends ahead and
    plus ``s`` for ends behind.  So dM is max(A - s, B + s) there and the
    exact minimizer is the clamp of (A - B)/2 to the segment.
    """
    if rho.boundary != T.boundary:
        raise DomainError("metric is not defined on the ends of this tree")
    if validate:
        base = visual_log_metric(T, T.vertex_point(T.vertices[0]))
        verdict = validate_membership(rho, base)
        if not verdict.member:
            raise DomainError("metric is not in the Moebius class: " + "; ".join(verdict.violations))
    n = len(rho)
    tail_logs = {}
    best = None
    for seg in range(T.n_segments):
        t = T.tail(seg)
        if t not in tail_logs:
            tail_logs[t] = _log_derivative_fast(rho, visual_log_metric(T, T.vertex_point(t)))
        e = tail_logs[t]
        ahead = [e[k] for k in range(n) if _end_ahead(T, seg, k)]
        behind = [e[k] for k in range(n) if not _end_ahead(T, seg, k)]
        A, B = max(ahead), max(behind)
        s = max((A - B) / 2, Fraction(0))
        length = T.segment_length(seg)
        if length is not None:
            s = min(s, length)
        value = max(A - s, B + s)
        if best is None or value < best[1]:
            best = (T.point(seg, s), value)
    if best[1] != 0:
        raise SurjectivityViolation(f"projection gap {best[1]} is not zero at {best[0]}")
    return best


# -- Moebius extension between trees ---------------------------------------


@dataclass
class TreeExtension:
    source: TreeSpace
    target: TreeSpace
    end_map: dict
    perm: list  # perm[k] = index in target of the image of source end k

    def pushforward(self, rho: LogMetric) -> LogMetric:
        inv = [0] * len(self.perm)
        for k, j in enumerate(self.perm):
            inv[j] = k
        return rho.relabel(inv, self.target.boundary)

    def __call__(self, x: TreePoint) -> TreePoint:
        pushed = self.pushforward(visual_log_metric(self.source, x))
        point, _ = project_metric_tree(self.target, pushed, validate=False)
        return point

    def distance_defect(self, pairs) -> Fraction:
        """Largest |d(Fx, Fy) - d(x, y)| over the given point pairs."""
        worst = Fraction(0)
        images = {}
        for x, y in pairs:
            for p in (x, y):
                if p not in images:
                    images[p] = self(p)
            d1 = tree_distance(self.source, x, y)
            d2 = tree_distance(self.target, images[x], images[y])
            worst = max(worst, abs(d2 - d1))
        return worst

    def boundary_coherent(self, end, offsets: Sequence = (10, 20, 40)) -> bool:
        """Images of far points on the ray to ``end`` sit on the ray to its image, going out."""
        ray = self.source.ray_of_end(end)
        target_ray = self.target.ray_of_end(self.end_map[end])
        last = None
        for o in offsets:
            img = self.target.ray_offset(self(TreePoint(ray, Fraction(o))), target_ray)
            if img is None or (last is not None and img <= last):
                return False
            last = img
        return True


def tree_moebius_extend(T1: TreeSpace, T2: TreeSpace, end_map: Mapping[str, str]) -> TreeExtension:
    labels1, labels2 = T1.end_labels, T2.end_labels
    if sorted(end_map) != sorted(labels1) or sorted(end_map.values()) != sorted(labels2):
        raise DomainError("end map is not a bijection between the two sets of ends")
    perm = [labels2.index(end_map[e]) for e in labels1]
    r1 = visual_log_metric(T1, T1.vertex_point(T1.vertices[0]))
    r2 = visual_log_metric(T2, T2.vertex_point(T2.vertices[0]))
    mismatch = cross_ratio_mismatch(r1, r2, perm)
    if mismatch is not None:
        quad, v1, v2 = mismatch
        witness = tuple(labels1[k] for k in quad)
        raise NotMoebius(
            "end map changes the cross-ratio of ({}): {} vs {}".format(", ".join(witness), v1, v2),
            witness=witness,
            values=(v1, v2),
        )
    return TreeExtension(T1, T2, dict(end_map), perm)


# -- construction helpers ----------------------------------------------------


def check_tree_structure(vertices, edges, rays, lines=None, path=None):
    """Raise on cycles, disconnection, low-degree vertices, bad lengths or too few ends.

    ``lines`` optionally maps ("vertex", v) / ("edge", k) / ("ray", r) to
    source line numbers for diagnostics.
    """
    lines = lines or {}

    def fail(msg, key=None):
        if path is not None or lines:
            raise ParseError(msg, lines.get(key), path)
        raise DomainError(msg)

    vset = set()
    for v in vertices:
        if v in vset:
            fail(f"duplicate vertex {v!r}", ("vertex", v))
        vset.add(v)
    if not vertices:
        fail("tree has no vertices")
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    degree = {v: 0 for v in vertices}
    for k, (u, v, w) in enumerate(edges):
        for a in (u, v):
            if a not in vset:
                fail(f"edge uses unknown vertex {a!r}", ("edge", k))
        if Fraction(w) <= 0:
            fail(f"edge length {w} is not positive", ("edge", k))
        ru, rv = find(u), find(v)
        if ru == rv:
            fail(f"edge {u}-{v} closes a cycle", ("edge", k))
        parent[ru] = rv
        degree[u] += 1
        degree[v] += 1
    ends = set()
    for r, (v, e) in enumerate(rays):
        if v not in vset:
            fail(f"end attached to unknown vertex {v!r}", ("ray", r))
        if e in ends:
            fail(f"duplicate end label {e!r}", ("ray", r))
        ends.add(e)
        degree[v] += 1
    roots = {find(v) for v in vertices}
    if len(roots) > 1:
        fail("tree is not connected")
    for v in vertices:
        if degree[v] < 2:
            fail(f"vertex {v!r} has degree {degree[v]} < 2; the tree is not geodesically complete", ("vertex", v))
    if len(rays) < 4:
        fail(f"tree has {len(rays)} ends; at least 4 are required")


def spider(k: int = 4, center: str = "c") -> TreeSpace:
    """A single vertex with ``k`` rays e1..ek."""
    return TreeSpace((center,), (), tuple((center, f"e{i}") for i in range(1, k + 1)))


def h_tree(L) -> TreeSpace:
    """Edge u-v of length L, ends a, b at u and c, d at v."""
    return TreeSpace(("u", "v"), (("u", "v", Fraction(L)),), (("u", "a"), ("u", "b"), ("v", "c"), ("v", "d")))


def _random_length(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 12), rng.choice((1, 2, 3, 4)))


def random_tree(rng: random.Random, n_ends: int) -> TreeSpace:
    if n_ends < 4:
        raise DomainError("need at least 4 ends")
    while True:
        m = rng.randint(1, n_ends - 2)
        names = [f"v{i}" for i in range(m)]
        edges = [(names[rng.randrange(i)], names[i], _random_length(rng)) for i in range(1, m)]
        degree = {v: 0 for v in names}
        for u, v, _ in edges:
            degree[u] += 1
            degree[v] += 1
        need = [v for v in names for _ in range(max(0, 2 - degree[v]))]
        if len(need) > n_ends:
            continue
        attach = need + [rng.choice(names) for _ in range(n_ends - len(need))]
        rng.shuffle(attach)
        rays = [(v, f"x{i}") for i, v in enumerate(attach)]
        return TreeSpace(tuple(names), tuple(edges), tuple(rays))


def random_point(T: TreeSpace, rng: random.Random, ray_depth: int = 4) -> TreePoint:
    seg = rng.randrange(T.n_segments)
    length = T.segment_length(seg)
    if length is None:
        length = Fraction(ray_depth)
    q = rng.choice((1, 2, 3, 5, 7))
    return T.point(seg, length * Fraction(rng.randint(0, q), q))


def relabeled_copy(T: TreeSpace, rng: random.Random):
    """An isometric copy with renamed vertices and ends, shuffled segments.

    Returns the copy and the end map from ``T``'s end labels to the copy's.
    """
    vnames = {v: f"w{i}" for i, v in enumerate(rng.sample(list(T.vertices), len(T.vertices)))}
    edges = []
    for u, v, w in T.edges:
        a, b = vnames[u], vnames[v]
        edges.append((b, a, w) if rng.random() < 0.5 else (a, b, w))
    rng.shuffle(edges)
    order = rng.sample(range(len(T.rays)), len(T.rays))
    end_map = {}
    rays = []
    for new_idx, r in enumerate(order):
        v, e = T.rays[r]
        end_map[e] = f"y{new_idx}"
        rays.append((vnames[v], f"y{new_idx}"))
    return TreeSpace(tuple(vnames[v] for v in T.vertices), tuple(edges), tuple(rays)), end_map


def sample_member_metric(T: TreeSpace, rng: random.Random, spread: int = 6, max_tries: int = 200):
    """Random metric in the Moebius class of the ends, not built from a tree point.

    A random conformal factor is pushed to the unique antipodal diameter-one
    rescaling reachable by the max-plus fixed point
    f_i = -max_j (2 l0_ij + f_j), then validated; failures are rejected.
    Returns ``(metric, rejections)``.
    """
    base = visual_log_metric(T, T.vertex_point(T.vertices[0]))
    n = len(base)
    rejections = 0
    for _ in range(max_tries):
        f = [Fraction(rng.randint(-spread * 4, spread * 4), 4) for _ in range(n)]
        for _sweep in range(4 * n):
            changed = False
            for i in range(n):
                new = -max(2 * base.ld(i, j) + f[j] for j in range(n) if j != i)
                if new != f[i]:
                    f[i] = new
                    changed = True
            if not changed:
                break
        rho = LogMetric.from_function(T.boundary, lambda i, j: base.ld(i, j) + (f[i] + f[j]) / 2)
        if validate_membership(rho, base).member:
            return rho, rejections
        rejections += 1
    raise RuntimeError("could not sample a member metric")


# -- file format -------------------------------------------------------------

HEADER = "tree v1"


def parse_tree(text: str, path=None) -> TreeSpace:
    vertices, edges, rays = [], [], []
    lines = {}
    seen_header = False
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        if not seen_header:
            if s != HEADER:
                raise ParseError(f"expected header '{HEADER}'", no, path)
            seen_header = True
            continue
        parts = s.split()
        kw = parts[0]
        if kw == "VERTEX" and len(parts) == 2:
            lines[("vertex", parts[1])] = no
            vertices.append(parts[1])
        elif kw == "EDGE" and len(parts) == 4:
            try:
                w = Fraction(parts[3])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad edge length {parts[3]!r}", no, path) from None
            lines[("edge", len(edges))] = no
            edges.append((parts[1], parts[2], w))
        elif kw == "END" and len(parts) == 4 and parts[2] == "AT":
            lines[("ray", len(rays))] = no
            rays.append((parts[3], parts[1]))
        else:
            raise ParseError(f"cannot parse line {s!r}", no, path)
    if not seen_header:
        raise ParseError(f"expected header '{HEADER}'", 1, path)
    check_tree_structure(vertices, edges, rays, lines=lines, path=path or "<tree>")
    return TreeSpace(tuple(vertices), tuple(edges), tuple(rays))


def format_tree(T: TreeSpace) -> str:
    out = [HEADER]
    out += [f"VERTEX {v}" for v in T.vertices]
    out += [f"EDGE {u} {v} {w.numerator}/{w.denominator}" for u, v, w in T.edges]
    out += [f"END {e} AT {v}" for v, e in T.rays]
    return "\n".join(out) + "\n"


def read_tree(path) -> TreeSpace:
    with open(path) as fh:
        return parse_tree(fh.read(), path=str(path))
