"""
Geometry on a convex planar domain.

Boundary points are addressed by a single parameter: the polar angle on the
unit disk, the arc length from the first vertex on a convex polygon. Chords
join two boundary points; a set of chords cuts the domain into faces, which
build_arrangement enumerates by walking half-edges around each face.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .conf import setting
from .exceptions import (
    CrossingChords, DegenerateArrangement, InvalidChord, NonConvexDomain, OnSkeleton, OutsideDomain,
)

logger = logging.getLogger(__name__)

TAU = 2.0 * math.pi
Point = Tuple[float, float]

CHORD = 'chord'
ARC = 'arc'

# Crossing points closer than this are treated as one vertex.
VERTEX_MERGE_TOL = 1e-10


@dataclass(frozen=True)
class ConvexDomain:
    """The unit disk or a strictly convex polygon listed counterclockwise."""
    kind: str
    vertices: Tuple[Point, ...] = ()

    UNIT_DISK = 'unit_disk'
    CONVEX_POLYGON = 'convex_polygon'

    @classmethod
    def unit_disk(cls) -> 'ConvexDomain':
        return cls(kind=cls.UNIT_DISK)

    @classmethod
    def polygon(cls, vertices: Sequence[Sequence[float]]) -> 'ConvexDomain':
        pts = tuple((float(x), float(y)) for x, y in vertices)
        if len(pts) < 3:
            raise NonConvexDomain("domain must be convex: a polygon needs at least 3 vertices")
        turning = 0.0
        for i in range(len(pts)):
            ax, ay = pts[i - 1]
            bx, by = pts[i]
            cx, cy = pts[(i + 1) % len(pts)]
            ux, uy = bx - ax, by - ay
            vx, vy = cx - bx, cy - by
            cross = ux * vy - uy * vx
            if cross <= 0.0:
                raise NonConvexDomain(
                    f"domain must be convex: vertex {i} at ({bx}, {by}) is not a strict left turn"
                )
            turning += math.atan2(cross, ux * vx + uy * vy)
        # A star polygon turns left everywhere but winds more than once.
        if abs(turning - TAU) > 1e-9:
            raise NonConvexDomain("domain must be convex: the vertex list winds more than once")
        return cls(kind=cls.CONVEX_POLYGON, vertices=pts)

    @property
    def is_disk(self) -> bool:
        return self.kind == self.UNIT_DISK

    # --- polygon bookkeeping ---

    @cached_property
    def _edge_lengths(self) -> np.ndarray:
        pts = np.asarray(self.vertices)
        return np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)

    @cached_property
    def _corners(self) -> np.ndarray:
        """Boundary parameter of every polygon vertex."""
        return np.concatenate(([0.0], np.cumsum(self._edge_lengths)[:-1]))

    def _edge_index(self, t: float, backward: bool = False) -> int:
        side = 'left' if backward else 'right'
        i = int(np.searchsorted(self._corners, t, side=side)) - 1
        return i % len(self.vertices)

    def _edge_direction(self, i: int) -> Point:
        ax, ay = self.vertices[i]
        bx, by = self.vertices[(i + 1) % len(self.vertices)]
        length = self._edge_lengths[i]
        return ((bx - ax) / length, (by - ay) / length)

    # --- boundary parameterization ---

    @property
    def period(self) -> float:
        if self.is_disk:
            return TAU
        return float(self._edge_lengths.sum())

    def normalize(self, t: float) -> float:
        period = self.period
        r = float(t) % period
        if period - r < setting('ANGLE_TOL'):
            r = 0.0
        return r

    def point(self, t: float) -> Point:
        t = self.normalize(t)
        if self.is_disk:
            return (math.cos(t), math.sin(t))
        i = self._edge_index(t)
        frac = (t - self._corners[i]) / self._edge_lengths[i]
        ax, ay = self.vertices[i]
        bx, by = self.vertices[(i + 1) % len(self.vertices)]
        return (ax + frac * (bx - ax), ay + frac * (by - ay))

    def tangent(self, t: float, backward: bool = False) -> Point:
        """Unit direction of travel leaving t counterclockwise (or clockwise)."""
        t = self.normalize(t)
        if self.is_disk:
            dx, dy = -math.sin(t), math.cos(t)
        else:
            dx, dy = self._edge_direction(self._edge_index(t, backward=backward))
        if backward:
            return (-dx, -dy)
        return (dx, dy)

    def outward_normal(self, t: float) -> Point:
        t = self.normalize(t)
        if self.is_disk:
            return (math.cos(t), math.sin(t))
        dx, dy = self._edge_direction(self._edge_index(t))
        return (dy, -dx)

    def project(self, x: float, y: float) -> float:
        """Boundary parameter of the boundary point nearest to (x, y)."""
        if self.is_disk:
            return self.normalize(math.atan2(y, x))
        best_t, best_d = 0.0, math.inf
        for i, (ax, ay) in enumerate(self.vertices):
            dx, dy = self._edge_direction(i)
            along = min(max((x - ax) * dx + (y - ay) * dy, 0.0), self._edge_lengths[i])
            d = math.hypot(ax + along * dx - x, ay + along * dy - y)
            if d < best_d:
                best_t, best_d = self._corners[i] + along, d
        return self.normalize(best_t)

    def contains(self, point: Point) -> bool:
        """Strict interior test."""
        x, y = point
        if self.is_disk:
            return x * x + y * y < 1.0
        n = len(self.vertices)
        for i in range(n):
            ax, ay = self.vertices[i]
            bx, by = self.vertices[(i + 1) % n]
            if (bx - ax) * (y - ay) - (by - ay) * (x - ax) <= 0.0:
                return False
        return True

    @property
    def area(self) -> float:
        if self.is_disk:
            return math.pi
        return _shoelace(self.vertices + self.vertices[:1])

    def arc_green(self, s: float, t: float) -> float:
        """Half the integral of x dy - y dx along the counterclockwise arc s -> t."""
        length = arc_length(self, s, t)
        if self.is_disk:
            return 0.5 * length
        return _shoelace(self.arc_polyline(s, t))

    def arc_polyline(self, s: float, t: float) -> List[Point]:
        """Boundary points from s to t counterclockwise, polygon corners included."""
        s = self.normalize(s)
        length = arc_length(self, s, t)
        inner = []
        if not self.is_disk:
            offsets = ((corner - s) % self.period for corner in self._corners)
            inner = [self.point(s + off) for off in sorted(off for off in offsets if 0.0 < off < length)]
        return [self.point(s)] + inner + [self.point(s + length)]

    def arc_midpoint(self, s: float, t: float) -> Point:
        return self.point(s + 0.5 * arc_length(self, s, t))


def _shoelace(points: Sequence[Point]) -> float:
    total = 0.0
    for (x1, y1), (x2, y2) in zip(points[:-1], points[1:]):
        total += x1 * y2 - x2 * y1
    return 0.5 * total


@dataclass(frozen=True, order=True)
class Chord:
    """A straight segment between two boundary parameters, stored with a < b."""
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise InvalidChord(f"chord endpoints must satisfy a < b, got ({self.a}, {self.b})")

    @classmethod
    def between(cls, a: float, b: float, domain: Optional[ConvexDomain] = None) -> 'Chord':
        domain = domain or ConvexDomain.unit_disk()
        a, b = domain.normalize(a), domain.normalize(b)
        if _circular_gap(a, b, domain.period) <= setting('ANGLE_TOL'):
            raise InvalidChord(f"zero-length chord at {a}")
        return cls(min(a, b), max(a, b))

    @property
    def endpoints(self) -> Tuple[float, float]:
        return (self.a, self.b)

    def segment(self, domain: ConvexDomain) -> Tuple[Point, Point]:
        return domain.point(self.a), domain.point(self.b)

    def __str__(self):
        return f"({self.a!r}, {self.b!r})"


def _circular_gap(s: float, t: float, period: float) -> float:
    d = abs(s - t) % period
    return min(d, period - d)


def arc_length(domain: ConvexDomain, a: float, b: float) -> float:
    """Counterclockwise boundary length from a to b; zero when a == b."""
    period = domain.period
    if _circular_gap(a, b, period) <= setting('ANGLE_TOL'):
        return 0.0
    return (b - a) % period


def chord_length(domain: ConvexDomain, a: float, b: float) -> float:
    if domain.is_disk:
        delta = _circular_gap(a, b, TAU)
        return 2.0 * math.sin(0.5 * delta)
    (x1, y1), (x2, y2) = domain.point(a), domain.point(b)
    return math.hypot(x2 - x1, y2 - y1)


def shares_endpoint(c1: Chord, c2: Chord, tol: Optional[float] = None) -> bool:
    tol = setting('ANGLE_TOL') if tol is None else tol
    return any(abs(x - y) <= tol for x in c1.endpoints for y in c2.endpoints)


def chords_interleave(c1: Chord, c2: Chord, tol: Optional[float] = None) -> bool:
    """True when the endpoints alternate strictly around the boundary."""
    tol = setting('ANGLE_TOL') if tol is None else tol
    if shares_endpoint(c1, c2, tol):
        return False
    inside_a = c1.a < c2.a < c1.b
    inside_b = c1.a < c2.b < c1.b
    return inside_a != inside_b


def chords_cross(c1: Chord, c2: Chord, tol: Optional[float] = None) -> bool:
    """True when the closed chords meet: interleaved endpoints or a shared endpoint."""
    return shares_endpoint(c1, c2, tol) or chords_interleave(c1, c2, tol)


def _segment_distance(p: Point, a: Point, b: Point) -> float:
    px, py = p
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    s = 0.0 if denom == 0.0 else min(max(((px - ax) * dx + (py - ay) * dy) / denom, 0.0), 1.0)
    return math.hypot(ax + s * dx - px, ay + s * dy - py)


def _signed_side(a: Point, b: Point, p: Point) -> float:
    """Signed distance of p from the line a -> b, positive on the left."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    return (dx * (p[1] - a[1]) - dy * (p[0] - a[0])) / math.hypot(dx, dy)


def _intersection(p1: Point, p2: Point, q1: Point, q2: Point) -> Tuple[Point, float, float]:
    rx, ry = p2[0] - p1[0], p2[1] - p1[1]
    sx, sy = q2[0] - q1[0], q2[1] - q1[1]
    denom = rx * sy - ry * sx
    wx, wy = q1[0] - p1[0], q1[1] - p1[1]
    u = (wx * sy - wy * sx) / denom
    v = (wx * ry - wy * rx) / denom
    return (p1[0] + u * rx, p1[1] + u * ry), u, v


@dataclass(frozen=True)
class Edge:
    """One side of a face: a chord segment or a counterclockwise boundary arc."""
    kind: str
    start: Point
    end: Point
    chord: Optional[int] = None
    arc: Optional[Tuple[float, float]] = None
    span: float = 0.0


@dataclass(frozen=True)
class Face:
    id: int
    edges: Tuple[Edge, ...]
    area: float
    sample: Point
    boundary_contact: float

    @property
    def arcs(self) -> List[Tuple[float, float]]:
        """(start, length) of every boundary arc on this face."""
        return [(e.arc[0], e.span) for e in self.edges if e.kind == ARC]

    @property
    def chord_edges(self) -> List[Edge]:
        return [e for e in self.edges if e.kind == CHORD]


@dataclass(frozen=True)
class Adjacency:
    """Two faces sharing a chord segment; left is on the left of start -> end."""
    left: int
    right: int
    chord: int
    start: Point
    end: Point
    length: float


@dataclass(frozen=True)
class Arrangement:
    domain: ConvexDomain
    chords: Tuple[Chord, ...]
    faces: Tuple[Face, ...]
    adjacency: Tuple[Adjacency, ...]

    def locate(self, point: Point) -> int:
        return locate(self, point)

    def face(self, face_id: int) -> Face:
        return self.faces[face_id]

    @property
    def total_area(self) -> float:
        return sum(face.area for face in self.faces)


class _HalfEdges:
    """Flat half-edge store used while tracing faces."""

    def __init__(self):
        self.origin: List[int] = []
        self.dest: List[int] = []
        self.kind: List[str] = []
        self.chord: List[Optional[int]] = []
        self.forward: List[bool] = []
        self.arc: List[Optional[Tuple[float, float]]] = []
        self.angle: List[float] = []
        self.twin: List[int] = []

    def add_pair(self, u, w, kind, angle_uw, angle_wu, chord=None, arc=None):
        base = len(self.origin)
        for origin, dest, angle, forward in ((u, w, angle_uw, True), (w, u, angle_wu, False)):
            self.origin.append(origin)
            self.dest.append(dest)
            self.kind.append(kind)
            self.chord.append(chord)
            self.forward.append(forward)
            self.arc.append(arc)
            self.angle.append(angle)
        self.twin.extend([base + 1, base])

    def __len__(self):
        return len(self.origin)


def _single_face(domain: ConvexDomain) -> Face:
    if domain.is_disk:
        sample = (0.0, 0.0)
    else:
        cx, cy = np.mean(np.asarray(domain.vertices), axis=0)
        sample = (float(cx), float(cy))
    edge = Edge(kind=ARC, start=domain.point(0.0), end=domain.point(0.0), arc=(0.0, 0.0),
                span=domain.period)
    return Face(id=0, edges=(edge,), area=domain.area, sample=sample,
                boundary_contact=domain.period)


def _dedupe(chords: Sequence[Chord], tol: float) -> List[Chord]:
    unique: List[Chord] = []
    for chord in sorted(chords):
        if unique and abs(unique[-1].a - chord.a) <= tol and abs(unique[-1].b - chord.b) <= tol:
            continue
        unique.append(chord)
    return unique


def build_arrangement(
    domain: ConvexDomain,
    chords: Sequence[Chord],
    allow_shared_endpoints: bool = False,
    allow_crossings: bool = False,
) -> Arrangement:
    """
    Enumerate the faces cut out of the domain by a chord system.

    By default chords must be pairwise disjoint in the closed domain. Shared
    endpoints may be allowed (skeletons assembled from several thresholds),
    and crossings may be allowed, in which case chords are split at their
    intersection points before faces are traced.
    """
    tol = setting('ANGLE_TOL')
    if allow_shared_endpoints or allow_crossings:
        ordered = _dedupe(chords, tol)
    else:
        ordered = sorted(chords)
    for chord in ordered:
        mid = tuple(0.5 * (p + q) for p, q in zip(*chord.segment(domain)))
        if not domain.contains(mid):
            raise InvalidChord(f"chord {chord} runs along the boundary")

    crossing_pairs = []
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            c1, c2 = ordered[i], ordered[j]
            if chords_interleave(c1, c2, tol):
                if not allow_crossings:
                    raise CrossingChords(f"chords {c1} and {c2} cross")
                crossing_pairs.append((i, j))
            elif shares_endpoint(c1, c2, tol) and not (allow_shared_endpoints or allow_crossings):
                raise CrossingChords(f"chords {c1} and {c2} share an endpoint")

    if not ordered:
        return Arrangement(domain=domain, chords=(), faces=(_single_face(domain),), adjacency=())

    # Boundary vertices in counterclockwise order.
    params: List[float] = []
    for t in sorted(t for chord in ordered for t in chord.endpoints):
        if not params or t - params[-1] > tol:
            params.append(t)
    points: List[Point] = [domain.point(t) for t in params]

    def boundary_vertex(t: float) -> int:
        return min(range(len(params)), key=lambda k: _circular_gap(params[k], t, domain.period))

    # Interior crossing vertices, with their position along each chord.
    stops: Dict[int, List[Tuple[float, int]]] = {i: [] for i in range(len(ordered))}
    for i, j in crossing_pairs:
        (p1, p2), (q1, q2) = ordered[i].segment(domain), ordered[j].segment(domain)
        x, u, v = _intersection(p1, p2, q1, q2)
        vid = next(
            (k for k in range(len(params), len(points))
             if math.hypot(points[k][0] - x[0], points[k][1] - x[1]) <= VERTEX_MERGE_TOL),
            None,
        )
        if vid is None:
            vid = len(points)
            points.append(x)
        stops[i].append((u, vid))
        stops[j].append((v, vid))

    def direction(u: int, w: int) -> float:
        return math.atan2(points[w][1] - points[u][1], points[w][0] - points[u][0])

    half = _HalfEdges()
    for i, chord in enumerate(ordered):
        path = [boundary_vertex(chord.a)] + [vid for _, vid in sorted(stops[i])] + [boundary_vertex(chord.b)]
        for u, w in zip(path[:-1], path[1:]):
            if u != w:
                half.add_pair(u, w, CHORD, direction(u, w), direction(w, u), chord=i)
    for k, s in enumerate(params):
        t = params[(k + 1) % len(params)]
        ccw = domain.tangent(s)
        cw = domain.tangent(t, backward=True)
        half.add_pair(k, (k + 1) % len(params), ARC,
                      math.atan2(ccw[1], ccw[0]), math.atan2(cw[1], cw[0]), arc=(s, t))

    outgoing: Dict[int, List[int]] = {}
    for e in range(len(half)):
        outgoing.setdefault(half.origin[e], []).append(e)
    position: Dict[int, int] = {}
    for vid, edges in outgoing.items():
        edges.sort(key=lambda e: half.angle[e])
        for pos, e in enumerate(edges):
            position[e] = pos

    def next_edge(e: int) -> int:
        around = outgoing[half.dest[e]]
        return around[(position[half.twin[e]] - 1) % len(around)]

    face_of_edge: Dict[int, int] = {}
    faces: List[Face] = []
    for start in range(len(half)):
        if start in face_of_edge:
            continue
        cycle = [start]
        e = next_edge(start)
        while e != start:
            cycle.append(e)
            e = next_edge(e)
        # The clockwise boundary walk is the unbounded side.
        if any(half.kind[c] == ARC and not half.forward[c] for c in cycle):
            for c in cycle:
                face_of_edge[c] = -1
            continue
        face_id = len(faces)
        for c in cycle:
            face_of_edge[c] = face_id
        faces.append(_make_face(domain, face_id, half, cycle, points))

    adjacency = []
    for e in range(len(half)):
        if half.kind[e] == CHORD and half.forward[e]:
            start, end = points[half.origin[e]], points[half.dest[e]]
            adjacency.append(Adjacency(
                left=face_of_edge[e], right=face_of_edge[half.twin[e]], chord=half.chord[e],
                start=start, end=end, length=math.hypot(end[0] - start[0], end[1] - start[1]),
            ))

    through: Dict[int, set] = {}
    for i, vids in stops.items():
        for _, vid in vids:
            through.setdefault(vid, set()).add(i)
    check_face_count(len(faces), len(ordered), [len(chords) for chords in through.values()])
    logger.debug(f"Arrangement of {len(ordered)} chords: {len(faces)} faces, {len(through)} crossing points")
    return Arrangement(domain=domain, chords=tuple(ordered), faces=tuple(faces), adjacency=tuple(adjacency))


def check_face_count(faces: int, chords: int, crossing_multiplicities: Sequence[int]):
    """
    Euler's relation for chords in a convex domain: one face, plus one per
    chord, plus k - 1 for every interior point where k chords meet.
    """
    expected = 1 + chords + sum(k - 1 for k in crossing_multiplicities)
    if faces != expected:
        raise DegenerateArrangement(f"arrangement of {chords} chords has {faces} faces, expected {expected}")


def _make_face(domain, face_id, half, cycle, points) -> Face:
    edges = []
    area = 0.0
    contact = 0.0
    anchors = []
    for e in cycle:
        start, end = points[half.origin[e]], points[half.dest[e]]
        anchors.append(start)
        if half.kind[e] == CHORD:
            edges.append(Edge(kind=CHORD, start=start, end=end, chord=half.chord[e]))
            area += 0.5 * (start[0] * end[1] - end[0] * start[1])
        else:
            s, t = half.arc[e]
            span = arc_length(domain, s, t)
            edges.append(Edge(kind=ARC, start=start, end=end, arc=(s, t), span=span))
            area += domain.arc_green(s, t)
            contact += span
            anchors.append(domain.arc_midpoint(s, t))
    sample = tuple(np.mean(np.asarray(anchors), axis=0))
    return Face(id=face_id, edges=tuple(edges), area=area, sample=(float(sample[0]), float(sample[1])),
                boundary_contact=contact)


def locate(arr: Arrangement, point: Point) -> int:
    """Id of the face containing an interior point off the skeleton."""
    x, y = float(point[0]), float(point[1])
    if not arr.domain.contains((x, y)):
        raise OutsideDomain(f"point ({x}, {y}) is outside the domain")
    tol = setting('ANGLE_TOL')
    for chord in arr.chords:
        a, b = chord.segment(arr.domain)
        if _segment_distance((x, y), a, b) <= tol:
            raise OnSkeleton(f"point ({x}, {y}) lies on chord {chord}")
    if len(arr.faces) == 1:
        return arr.faces[0].id
    # Faces are convex and lie left of their chord edges.
    best_face, best_margin = None, -math.inf
    for face in arr.faces:
        margin = min((_signed_side(e.start, e.end, (x, y)) for e in face.chord_edges), default=math.inf)
        if margin > best_margin:
            best_face, best_margin = face.id, margin
    return best_face


def locate_many(arr: Arrangement, xs, ys) -> np.ndarray:
    """
    Vectorised locate for arrays of points. No domain or skeleton checks:
    points on a chord go to one of its sides, points just outside the domain
    to the nearest face.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(arr.faces) == 1:
        return np.full(xs.shape, arr.faces[0].id)
    ids = np.zeros(xs.shape, dtype=int)
    best = np.full(xs.shape, -np.inf)
    for face in arr.faces:
        margin = np.full(xs.shape, np.inf)
        for e in face.chord_edges:
            (ax, ay), (bx, by) = e.start, e.end
            margin = np.minimum(margin, ((bx - ax) * (ys - ay) - (by - ay) * (xs - ax)) / math.hypot(bx - ax, by - ay))
        ids = np.where(margin > best, face.id, ids)
        best = np.maximum(best, margin)
    return ids
