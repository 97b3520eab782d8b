"""
Exact least gradient solutions for piecewise-constant boundary data.

For every threshold between consecutive boundary values the superlevel set
is bounded by a minimum-length non-crossing matching of the interface
points. Stacking those sets gives the canonical solution u0; ties between
equally short matchings are kept in TieRecords for the classifier.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .boundary_data import (
    RISE, ArcSet, BoundaryData, combine_traces, superlevel_arcs, thresholds,
)
from .conf import setting
from .exceptions import (
    DomainMismatch, EnumerationLimit, InvalidParameter, NestingConflict, TraceMismatch,
)
from .geometry import (
    Arrangement, Chord, ConvexDomain, Point, build_arrangement, chord_length, chords_interleave,
    locate_many,
)

logger = logging.getLogger(__name__)

LEFT = 'left'
RIGHT = 'right'

# Jumps below this are treated as no jump when pruning chords.
JUMP_TOL = 1e-12


@dataclass(frozen=True)
class ChordSystem:
    """Chords bounding the superlevel region at one threshold."""
    threshold: float
    chords: Tuple[Chord, ...]
    arcs: ArcSet
    sides: Tuple[str, ...] = ()  # superlevel side of each chord, seen from a to b

    def total_length(self, domain: ConvexDomain) -> float:
        return sum(chord_length(domain, c.a, c.b) for c in self.chords)


@dataclass(frozen=True)
class TieRecord:
    threshold: Optional[float]
    matchings: Tuple[Tuple[Chord, ...], ...]
    lengths: Tuple[float, ...]

    @property
    def canonical(self) -> Tuple[Chord, ...]:
        return self.matchings[0]

    @property
    def is_tied(self) -> bool:
        return len(self.matchings) > 1

    @property
    def all_chords(self) -> List[Chord]:
        return sorted(set(c for m in self.matchings for c in m))


@dataclass(frozen=True)
class PiecewiseSolution:
    domain: ConvexDomain
    arrangement: Arrangement
    face_values: Dict[int, float]
    boundary_trace: Optional[BoundaryData]
    tv_offset: float = 0.0
    chord_systems: Tuple[ChordSystem, ...] = field(default=())

    @property
    def chords(self) -> Tuple[Chord, ...]:
        return self.arrangement.chords

    def value(self, face_id: int) -> float:
        return self.face_values[face_id]

    def evaluate(self, point: Point) -> float:
        return self.face_values[self.arrangement.locate(point)]

    def evaluate_many(self, xs, ys) -> np.ndarray:
        table = np.array([self.face_values[face.id] for face in self.arrangement.faces])
        return table[locate_many(self.arrangement, xs, ys)]

    def trace_defect(self, h: BoundaryData) -> float:
        """Boundary mismatch: sum over faces of the integral of |value - h| on their arcs."""
        total = 0.0
        for face in self.arrangement.faces:
            for start, length in face.arcs:
                total += h.integrate_abs_diff(start, length, self.face_values[face.id])
        return total

    def superlevel_boundary(self, t: float) -> List[Chord]:
        """Chords separating faces with value > t from faces with value <= t."""
        chords = set()
        for adj in self.arrangement.adjacency:
            lo, hi = sorted((self.face_values[adj.left], self.face_values[adj.right]))
            if lo <= t < hi:
                chords.add(self.arrangement.chords[adj.chord])
        return sorted(chords)


# --- matching ---

def minimal_separators(domain: ConvexDomain, arcs: ArcSet, threshold: Optional[float] = None) -> TieRecord:
    """
    All minimum-length non-crossing matchings of the interface points of arcs.

    Interval DP over the circular order: point i is matched to some k with an
    even number of points strictly between them, which splits the rest into
    two independent intervals.
    """
    if arcs.is_empty or arcs.is_full:
        return TieRecord(threshold=threshold, matchings=((),), lengths=(0.0,))
    params = [t for t, _ in arcs.interface_points()]
    n = len(params)
    tie_tol = setting('LENGTH_TIE_TOL')
    cap = setting('MAX_TIED_MATCHINGS')

    def w(i, k):
        return chord_length(domain, params[i], params[k])

    best: Dict[Tuple[int, int], float] = {}

    def cost(i, j):
        return 0.0 if i > j else best[(i, j)]

    for width in range(1, n, 2):
        for i in range(0, n - width):
            j = i + width
            best[(i, j)] = min(w(i, k) + cost(i + 1, k - 1) + cost(k + 1, j) for k in range(i + 1, j + 1, 2))

    @lru_cache(maxsize=None)
    def optimal(i, j) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
        if i > j:
            return ((),)
        found = []
        for k in range(i + 1, j + 1, 2):
            if w(i, k) + cost(i + 1, k - 1) + cost(k + 1, j) <= best[(i, j)] + tie_tol:
                for inner in optimal(i + 1, k - 1):
                    for outer in optimal(k + 1, j):
                        found.append(((i, k),) + inner + outer)
                        if len(found) > cap:
                            raise EnumerationLimit(
                                f"more than {cap} tied minimal matchings at threshold {threshold}"
                            )
        return tuple(found)

    matchings = []
    for pairs in optimal(0, n - 1):
        chords = tuple(sorted(Chord.between(params[i], params[k], domain) for i, k in pairs))
        matchings.append((sum(w(i, k) for i, k in pairs), chords))
    shortest = min(length for length, _ in matchings)
    kept = sorted(
        (chords, length) for length, chords in matchings if length <= shortest + tie_tol
    )
    if len(kept) > 1:
        logger.info(f"Threshold {threshold}: {len(kept)} tied minimal matchings of length {shortest:.12g}")
    return TieRecord(
        threshold=threshold,
        matchings=tuple(chords for chords, _ in kept),
        lengths=tuple(length for _, length in kept),
    )


def _superlevel_sides(chords: Sequence[Chord], arcs: ArcSet) -> Tuple[str, ...]:
    rises = [t for t, kind in arcs.interface_points() if kind == RISE]
    sides = []
    for chord in chords:
        # The arc leaving b counterclockwise borders the left side of a -> b.
        sides.append(LEFT if any(abs(chord.b - r) <= setting('ANGLE_TOL') for r in rises) else RIGHT)
    return tuple(sides)


def build_solution(domain: ConvexDomain, h: BoundaryData) -> Tuple[PiecewiseSolution, List[TieRecord]]:
    """The canonical solution u0 and the tie record of every threshold."""
    if not domain.is_disk:
        raise InvalidParameter("the exact constructor works on the unit disk only")
    levels = h.levels()
    taus = thresholds(h)
    records: List[TieRecord] = []
    systems: List[ChordSystem] = []
    chosen: List[Chord] = []

    for tau in taus:
        arcs = superlevel_arcs(h, tau)
        record = minimal_separators(domain, arcs, threshold=tau)
        records.append(record)
        pick = next(
            (m for m in record.matchings
             if not any(chords_interleave(c, d) for c in m for d in chosen)),
            None,
        )
        if pick is None:
            raise NestingConflict(f"no tied matching at threshold {tau} avoids the chords already chosen")
        logger.info(f"Threshold {tau}: {len(pick)} chords, {len(record.matchings)} minimal matchings")
        chosen.extend(pick)
        systems.append(ChordSystem(threshold=tau, chords=pick, arcs=arcs, sides=_superlevel_sides(pick, arcs)))

    arrangement = build_arrangement(domain, chosen, allow_shared_endpoints=True)
    slices = [build_arrangement(domain, s.chords) for s in systems]
    face_values = {}
    for face in arrangement.faces:
        inside = []
        for system, sliced in zip(systems, slices):
            piece = sliced.face(sliced.locate(face.sample))
            start, length = piece.arcs[0]
            inside.append(h.value_at(start + 0.5 * length) > system.threshold)
        for lower, upper in zip(inside[:-1], inside[1:]):
            if upper and not lower:
                raise NestingConflict(f"superlevel regions are not nested at face {face.id}")
        face_values[face.id] = levels[0] + sum(
            (hi - lo) for (lo, hi), flag in zip(zip(levels[:-1], levels[1:]), inside) if flag
        )
    solution = PiecewiseSolution(
        domain=domain, arrangement=arrangement, face_values=face_values,
        boundary_trace=h, chord_systems=tuple(systems),
    )
    return solution, records


def assemble_solution(
    domain: ConvexDomain,
    chords: Sequence[Chord],
    h: Optional[BoundaryData],
    value_of: Callable[[Point], float],
    tv_offset: float = 0.0,
    prune: bool = True,
) -> PiecewiseSolution:
    """
    Build a solution from an explicit chord list and a value for each face,
    read off at the face's sample point. Chords with no jump across them are
    dropped when prune is set.
    """
    arrangement = build_arrangement(domain, chords, allow_shared_endpoints=True, allow_crossings=True)
    values = {face.id: float(value_of(face.sample)) for face in arrangement.faces}
    if prune:
        arrangement, values = _prune(domain, arrangement, values)
    return PiecewiseSolution(domain=domain, arrangement=arrangement, face_values=values,
                             boundary_trace=h, tv_offset=tv_offset)


def _prune(domain, arrangement, values):
    jumping = set()
    for adj in arrangement.adjacency:
        if abs(values[adj.left] - values[adj.right]) > JUMP_TOL:
            jumping.add(adj.chord)
    if len(jumping) == len(arrangement.chords):
        return arrangement, values
    kept = [c for i, c in enumerate(arrangement.chords) if i in jumping]
    coarse = build_arrangement(domain, kept, allow_shared_endpoints=True, allow_crossings=True)
    merged = {}
    for face in arrangement.faces:
        merged.setdefault(coarse.locate(face.sample), values[face.id])
    return coarse, merged


# --- energies ---

def total_variation(u: PiecewiseSolution) -> float:
    tv = sum(abs(u.face_values[a.left] - u.face_values[a.right]) * a.length for a in u.arrangement.adjacency)
    return tv + u.tv_offset


def coarea_total_variation(u: PiecewiseSolution) -> float:
    """Sum over thresholds of the jump times the chord length of that threshold's system."""
    if u.chord_systems:
        levels = u.boundary_trace.levels()
        jumps = [hi - lo for lo, hi in zip(levels[:-1], levels[1:])]
        return sum(j * s.total_length(u.domain) for j, s in zip(jumps, u.chord_systems)) + u.tv_offset
    levels = sorted(set(u.face_values.values()))
    total = 0.0
    for lo, hi in zip(levels[:-1], levels[1:]):
        tau = 0.5 * (lo + hi)
        cut = sum(
            a.length for a in u.arrangement.adjacency
            if min(u.face_values[a.left], u.face_values[a.right]) < tau < max(u.face_values[a.left], u.face_values[a.right])
        )
        total += (hi - lo) * cut
    return total + u.tv_offset


def energy_F_exact(u: PiecewiseSolution, h: BoundaryData) -> float:
    """Total variation plus the boundary mismatch."""
    return total_variation(u) + u.trace_defect(h)


def evaluate(u: PiecewiseSolution, point: Point) -> float:
    return u.evaluate(point)


# --- lattice operations and checks ---

def combine(u: PiecewiseSolution, v: PiecewiseSolution, mode: str) -> PiecewiseSolution:
    """Facewise min or max on the common refinement of both arrangements."""
    if u.domain != v.domain:
        raise DomainMismatch("cannot combine solutions on different domains")
    if mode not in ('min', 'max'):
        raise InvalidParameter(f"mode must be 'min' or 'max', got {mode!r}")
    if abs(u.tv_offset - v.tv_offset) > JUMP_TOL:
        raise DomainMismatch("cannot combine solutions with different external variation")
    pick = min if mode == 'min' else max
    if u.boundary_trace is not None and v.boundary_trace is not None:
        trace = combine_traces(u.boundary_trace, v.boundary_trace, mode)
    else:
        trace = u.boundary_trace or v.boundary_trace
    return assemble_solution(
        u.domain,
        list(u.chords) + list(v.chords),
        trace,
        lambda point: pick(u.evaluate(point), v.evaluate(point)),
        tv_offset=u.tv_offset,
    )


def verify_least_gradient(candidate: PiecewiseSolution, reference: PiecewiseSolution, h: BoundaryData) -> bool:
    """Both must attain h; then the candidate is a minimizer iff its TV matches the reference."""
    rel = setting('TV_REL_TOL')
    ref_tv = total_variation(reference)
    for label, u in (('candidate', candidate), ('reference', reference)):
        defect = u.trace_defect(h)
        if defect > rel * (1.0 + ref_tv):
            raise TraceMismatch(f"{label} misses the boundary data by {defect:.6g}")
    gap = abs(total_variation(candidate) - ref_tv)
    logger.info(f"TV gap between candidate and reference: {gap:.3g}")
    return gap <= rel * (1.0 + ref_tv)
