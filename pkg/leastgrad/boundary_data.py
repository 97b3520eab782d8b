"""
Piecewise-constant boundary data and its superlevel arcs.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .exceptions import InvalidParameter, PlateauThreshold
from .geometry import TAU

logger = logging.getLogger(__name__)

RISE = 'rise'
FALL = 'fall'


@dataclass(frozen=True)
class BoundaryData:
    """
    A circular list of (start, value) pieces. Each piece runs counterclockwise
    up to the next start; the last piece wraps through the seam.
    """
    pieces: Tuple[Tuple[float, float], ...]
    period: float = TAU

    @classmethod
    def from_pieces(cls, pieces: Iterable[Sequence[float]], period: float = TAU) -> 'BoundaryData':
        normalized = sorted((float(s) % period, float(v)) for s, v in pieces)
        if not normalized:
            raise InvalidParameter("boundary data needs at least one piece")
        for (s1, _), (s2, _) in zip(normalized[:-1], normalized[1:]):
            if s2 - s1 <= 0.0:
                raise InvalidParameter(f"two boundary pieces start at the same angle {s1}")
        merged = [normalized[0]]
        for start, value in normalized[1:]:
            if value != merged[-1][1]:
                merged.append((start, value))
        # The last piece continues into the first one when they agree.
        while len(merged) > 1 and merged[-1][1] == merged[0][1]:
            merged.pop(0)
        return cls(pieces=tuple(merged), period=period)

    @classmethod
    def constant(cls, value: float, period: float = TAU) -> 'BoundaryData':
        return cls(pieces=((0.0, float(value)),), period=period)

    @property
    def starts(self) -> np.ndarray:
        return np.array([s for s, _ in self.pieces])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.pieces])

    @property
    def is_constant(self) -> bool:
        return len(self.pieces) == 1

    def value_at(self, t: float) -> float:
        return float(self.sample(np.array([t]))[0])

    def sample(self, ts) -> np.ndarray:
        """Vectorised evaluation; index -1 wraps to the last piece."""
        ts = np.mod(np.asarray(ts, dtype=float), self.period)
        idx = np.searchsorted(self.starts, ts, side='right') - 1
        return self.values[idx]

    def levels(self) -> List[float]:
        return sorted(set(float(v) for _, v in self.pieces))

    def integrate_abs_diff(self, start: float, length: float, value: float) -> float:
        """Integral of |value - h| over the counterclockwise arc of given length from start."""
        if length <= 0.0:
            return 0.0
        offsets = sorted(o for o in ((s - start) % self.period for s, _ in self.pieces) if 0.0 < o < length)
        cuts = [0.0] + offsets + [length]
        total = 0.0
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            total += abs(value - self.value_at(start + 0.5 * (lo + hi))) * (hi - lo)
        return total

    def to_list(self) -> List[dict]:
        return [{'start_angle': s, 'value': v} for s, v in self.pieces]


def jump_points(h: BoundaryData) -> List[float]:
    if h.is_constant:
        return []
    return [s for s, _ in h.pieces]


def thresholds(h: BoundaryData) -> List[float]:
    """Midpoints between consecutive distinct values of h."""
    levels = h.levels()
    return [0.5 * (lo + hi) for lo, hi in zip(levels[:-1], levels[1:])]


@dataclass(frozen=True)
class ArcSet:
    """Disjoint counterclockwise arcs (start, end), sorted by start."""
    arcs: Tuple[Tuple[float, float], ...] = ()
    period: float = TAU
    full: bool = False

    @property
    def is_empty(self) -> bool:
        return not self.arcs and not self.full

    @property
    def is_full(self) -> bool:
        return self.full

    @property
    def total_length(self) -> float:
        if self.full:
            return self.period
        return sum((end - start) % self.period for start, end in self.arcs)

    def contains(self, t: float) -> bool:
        if self.full:
            return True
        return any(0.0 < (t - start) % self.period < (end - start) % self.period
                   for start, end in self.arcs)

    def interface_points(self) -> List[Tuple[float, str]]:
        """Arc starts (rise) and ends (fall) in counterclockwise order."""
        points = [(start, RISE) for start, _ in self.arcs] + [(end, FALL) for _, end in self.arcs]
        return sorted(points)

    def complement(self) -> 'ArcSet':
        if self.full:
            return ArcSet(period=self.period)
        if not self.arcs:
            return ArcSet(period=self.period, full=True)
        gaps = [(self.arcs[k][1], self.arcs[(k + 1) % len(self.arcs)][0]) for k in range(len(self.arcs))]
        return ArcSet(arcs=tuple(sorted(gaps)), period=self.period)


def superlevel_arcs(h: BoundaryData, t: float) -> ArcSet:
    """Maximal arcs where h > t, merged across the seam."""
    if any(v == t for _, v in h.pieces):
        raise PlateauThreshold(f"threshold {t} is a value of the boundary data")
    above = [v > t for _, v in h.pieces]
    if all(above):
        return ArcSet(period=h.period, full=True)
    if not any(above):
        return ArcSet(period=h.period)
    n = len(h.pieces)
    first_below = above.index(False)
    arcs = []
    k = 0
    while k < n:
        idx = (first_below + k) % n
        if above[idx]:
            run_start = h.pieces[idx][0]
            while above[(first_below + k) % n]:
                k += 1
            arcs.append((run_start, h.pieces[(first_below + k) % n][0]))
        else:
            k += 1
    return ArcSet(arcs=tuple(sorted(arcs)), period=h.period)


def combine_traces(h1: BoundaryData, h2: BoundaryData, mode: str) -> BoundaryData:
    """Pointwise min or max of two boundary functions."""
    if mode not in ('min', 'max'):
        raise InvalidParameter(f"mode must be 'min' or 'max', got {mode!r}")
    pick = min if mode == 'min' else max
    starts = sorted(set(s for s, _ in h1.pieces) | set(s for s, _ in h2.pieces))
    return BoundaryData.from_pieces(
        [(s, pick(h1.value_at(s), h2.value_at(s))) for s in starts], period=h1.period,
    )
