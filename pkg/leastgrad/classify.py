"""
Classification of all least gradient solutions sharing one structure.

A face of the reference solution touching the boundary on an arc of
positive length is pinned: its value is forced by the data. The remaining
faces form free components. Every other solution agrees with the reference
off the free components; inside each one it is constant on the regions of
some subdivision by diagonals, subject to a system of inequalities against
the pinned traces and between neighbouring regions.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .boundary_data import BoundaryData
from .conf import setting
from .construct import PiecewiseSolution, TieRecord, assemble_solution
from .exceptions import (
    AllFree, ConstraintViolation, EnumerationLimit, Infeasible, InvalidParameter,
)
from .geometry import Arrangement, Chord, ConvexDomain, Point, _shoelace, _signed_side

logger = logging.getLogger(__name__)

LOWER = 'lower'
UPPER = 'upper'

# Slack when checking a value assignment against its constraints.
CONSTRAINT_TOL = 1e-12
VERTEX_MATCH_TOL = 1e-9


def format_number(x: float) -> str:
    """Shortest round-trip form, without a trailing '.0'."""
    if math.isinf(x):
        return 'inf' if x > 0 else '-inf'
    text = repr(float(x))
    return text[:-2] if text.endswith('.0') else text


@dataclass(frozen=True)
class ImportedStructure:
    """
    A solution shell for data the exact constructor does not handle: a free
    polygon with vertices on the circle, the one-sided trace alpha on each
    of its sides, and the total variation of the flaps supplied externally.
    Side k runs from vertices[k] to vertices[k + 1].
    """
    domain: ConvexDomain
    vertices: Tuple[float, ...]
    alphas: Tuple[float, ...]
    reference_value: float = 0.0
    tv_offset: float = 0.0
    tolerance: Optional[float] = None
    name: str = ''

    def __post_init__(self):
        if len(self.vertices) != len(self.alphas):
            raise InvalidParameter("an imported structure needs one alpha per side")
        if len(self.vertices) < 3:
            raise InvalidParameter("the free polygon needs at least 3 vertices")
        if list(self.vertices) != sorted(self.vertices):
            raise InvalidParameter("free polygon vertices must be listed counterclockwise")

    @property
    def sides(self) -> List[Chord]:
        n = len(self.vertices)
        return [Chord.between(self.vertices[k], self.vertices[(k + 1) % n], self.domain) for k in range(n)]

    def flap_of(self, t: float) -> int:
        n = len(self.vertices)
        for k in range(n):
            start, end = self.vertices[k], self.vertices[(k + 1) % n]
            if 0.0 <= (t - start) % self.domain.period < (end - start) % self.domain.period:
                return k
        return n - 1

    def proxy_trace(self) -> BoundaryData:
        """Boundary data of the shell: each flap carries its alpha."""
        return BoundaryData.from_pieces(zip(self.vertices, self.alphas), period=self.domain.period)

    def base_solution(self) -> PiecewiseSolution:
        points = [self.domain.point(t) for t in self.vertices]

        def value_of(p: Point) -> float:
            if _inside_polygon(points, p):
                return self.reference_value
            return self.alphas[self.flap_of(self.domain.project(*p))]

        return assemble_solution(
            self.domain, self.sides, self.proxy_trace(), value_of, tv_offset=self.tv_offset, prune=False,
        )


def _inside_polygon(points: Sequence[Point], p: Point) -> bool:
    n = len(points)
    return all(_signed_side(points[k], points[(k + 1) % n], p) > 0.0 for k in range(n))


def _centroid(points: Sequence[Point]) -> Point:
    return (sum(x for x, _ in points) / len(points), sum(y for _, y in points) / len(points))


@dataclass(frozen=True)
class PinnedSide:
    """A side of a free component, shared with a pinned face whose trace is alpha."""
    start: float
    end: float
    free_face: int
    pinned_face: int
    alpha: float
    length: float


@dataclass(frozen=True)
class FreeComponent:
    index: int
    faces: Tuple[int, ...]
    sides: Tuple[PinnedSide, ...]
    points: Tuple[Point, ...]
    reference_tv: float
    green_tol: float

    @property
    def vertices(self) -> Tuple[float, ...]:
        return tuple(side.start for side in self.sides)

    @property
    def alphas(self) -> Tuple[float, ...]:
        return tuple(side.alpha for side in self.sides)

    @property
    def area(self) -> float:
        return _shoelace(self.points + self.points[:1])


@dataclass(frozen=True)
class RegionGraph:
    domain: ConvexDomain
    base: PiecewiseSolution
    arrangement: Arrangement
    face_values: Dict[int, float]
    pinned: Tuple[int, ...]
    components: Tuple[FreeComponent, ...]

    def value_at(self, p: Point) -> float:
        return self.face_values[self.arrangement.locate(p)]

    def component_of(self, p: Point) -> Optional[FreeComponent]:
        for comp in self.components:
            if _inside_polygon(comp.points, p):
                return comp
        return None


def region_graph(
    u0: Union[PiecewiseSolution, ImportedStructure],
    ties: Iterable[TieRecord] = (),
) -> RegionGraph:
    """Label faces pinned or free and describe each free component by its sides."""
    green_tol = setting('GREEN_REL_TOL')
    if isinstance(u0, ImportedStructure):
        base = u0.base_solution()
        if u0.tolerance is not None:
            green_tol = u0.tolerance
    else:
        base = u0
    domain = base.domain

    extra = sorted(set(c for record in ties for c in record.all_chords) - set(base.chords))
    if extra:
        augmented = assemble_solution(
            domain, list(base.chords) + extra, base.boundary_trace, base.evaluate,
            tv_offset=base.tv_offset, prune=False,
        )
        arrangement, values = augmented.arrangement, augmented.face_values
    else:
        arrangement, values = base.arrangement, base.face_values

    contact_tol = setting('ANGLE_TOL')
    pinned = tuple(f.id for f in arrangement.faces if f.boundary_contact > contact_tol)
    free = [f.id for f in arrangement.faces if f.boundary_contact <= contact_tol]
    if not pinned:
        raise AllFree("no face touches the boundary on an arc; nothing anchors the values")

    graph = nx.Graph()
    graph.add_nodes_from(free)
    for adj in arrangement.adjacency:
        if adj.left in graph and adj.right in graph:
            graph.add_edge(adj.left, adj.right)

    components = []
    for index, faces in enumerate(sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])):
        components.append(_describe_component(index, set(faces), arrangement, values, green_tol))
    logger.info(f"Region graph: {len(pinned)} pinned faces, {len(components)} free components")
    return RegionGraph(domain=domain, base=base, arrangement=arrangement, face_values=values,
                       pinned=pinned, components=tuple(components))


def _describe_component(index, faces, arrangement, values, green_tol) -> FreeComponent:
    domain = arrangement.domain
    segments = []
    internal_tv = 0.0
    for adj in arrangement.adjacency:
        left_in, right_in = adj.left in faces, adj.right in faces
        if left_in and right_in:
            internal_tv += abs(values[adj.left] - values[adj.right]) * adj.length
        elif left_in:
            segments.append((adj.start, adj.end, adj.left, adj.right, adj.length))
        elif right_in:
            segments.append((adj.end, adj.start, adj.right, adj.left, adj.length))

    for start, _, _, _, _ in segments:
        if math.dist(start, domain.point(domain.project(*start))) > VERTEX_MATCH_TOL:
            raise InvalidParameter(f"free component {index} has a corner inside the domain at {start}")

    # Chain the sides counterclockwise, starting from the smallest boundary parameter.
    remaining = sorted(segments, key=lambda s: domain.project(*s[0]))
    chain = [remaining.pop(0)]
    while remaining:
        tail = chain[-1][1]
        k = next((i for i, s in enumerate(remaining)
                  if math.hypot(s[0][0] - tail[0], s[0][1] - tail[1]) <= VERTEX_MATCH_TOL), None)
        if k is None:
            raise InvalidParameter(f"sides of free component {index} do not close up")
        chain.append(remaining.pop(k))

    sides = []
    boundary_tv = 0.0
    for start, end, free_face, pinned_face, length in chain:
        alpha = values[pinned_face]
        boundary_tv += abs(alpha - values[free_face]) * length
        sides.append(PinnedSide(
            start=domain.project(*start), end=domain.project(*end),
            free_face=free_face, pinned_face=pinned_face, alpha=alpha, length=length,
        ))
    return FreeComponent(
        index=index, faces=tuple(sorted(faces)), sides=tuple(sides),
        points=tuple(s[0] for s in chain), reference_tv=boundary_tv + internal_tv, green_tol=green_tol,
    )


@dataclass(frozen=True)
class Constraint:
    """t_region >= value, t_region <= value, or t_region >= t_other."""
    region: int
    op: str
    value: Optional[float] = None
    other: Optional[int] = None

    def holds(self, values: Sequence[float], tol: float = CONSTRAINT_TOL) -> bool:
        lhs = values[self.region]
        rhs = values[self.other] if self.other is not None else self.value
        return lhs >= rhs - tol if self.op == '>=' else lhs <= rhs + tol

    def __str__(self):
        rhs = f"t{self.other + 1}" if self.other is not None else format_number(self.value)
        return f"t{self.region + 1} {self.op} {rhs}"


@dataclass(frozen=True)
class SolutionFamily:
    component: int
    regions: Tuple[Tuple[int, ...], ...]        # component vertex indices, counterclockwise
    region_vertices: Tuple[Tuple[float, ...], ...]
    diagonals: Tuple[Tuple[int, int], ...]
    side_types: Tuple[Tuple[str, ...], ...]     # type of side (r[k], r[k+1]) of each region r
    constraints: Tuple[Constraint, ...]
    bounds: Tuple[Tuple[float, float], ...]
    region_areas: Tuple[float, ...]
    reference_values: Tuple[float, ...]

    @property
    def size(self) -> int:
        return len(self.regions)

    def describe_constraints(self) -> List[str]:
        return [str(c) for c in self.constraints]

    def is_feasible(self, values: Sequence[float]) -> bool:
        return all(c.holds(values) for c in self.constraints)

    def region_of(self, comp: FreeComponent, p: Point) -> Optional[int]:
        for i, region in enumerate(self.regions):
            if _inside_polygon([comp.points[k] for k in region], p):
                return i
        return None


@dataclass(frozen=True)
class DroppedFamily:
    family: SolutionFamily
    refined_by: int
    reason: str


def _propagate(n: int, constraints: Sequence[Constraint]) -> List[List[float]]:
    bounds = [[-math.inf, math.inf] for _ in range(n)]
    for c in constraints:
        if c.other is None:
            if c.op == '>=':
                bounds[c.region][0] = max(bounds[c.region][0], c.value)
            else:
                bounds[c.region][1] = min(bounds[c.region][1], c.value)
    changed = True
    while changed:
        changed = False
        for c in constraints:
            if c.other is None:
                continue
            hi, lo = c.region, c.other  # t_hi >= t_lo
            if bounds[lo][0] > bounds[hi][0]:
                bounds[hi][0] = bounds[lo][0]
                changed = True
            if bounds[hi][1] < bounds[lo][1]:
                bounds[lo][1] = bounds[hi][1]
                changed = True
    return bounds


class FamilyEnumerator:
    """
    Enumerates, per free component, every subdivision by diagonals whose
    regions have an even number of sides and satisfy Green's formula, types
    the sides alternately, and keeps the feasible and maximal families.
    """

    def __init__(self, graph: RegionGraph):
        self.graph = graph
        self.dropped: List[DroppedFamily] = []
        self.rejected = 0

    def enumerate(self) -> List[SolutionFamily]:
        families = []
        for comp in self.graph.components:
            found = self.families_for(comp)
            if not found:
                raise Infeasible(f"free component {comp.index} admits no feasible family")
            families.extend(found)
        return families

    def families_for(self, comp: FreeComponent) -> List[SolutionFamily]:
        n = len(comp.sides)
        cap = setting('MAX_FREE_VERTICES')
        if n > cap:
            raise EnumerationLimit(f"free component {comp.index} has {n} vertices, more than {cap}")
        candidates = []
        for dissection in self._dissections(n):
            if not all(self._satisfies_green(comp, region) for region in dissection):
                continue
            for root_parity in (0, 1):
                family = self._build_family(comp, dissection, root_parity)
                if family is None:
                    self.rejected += 1
                    continue
                candidates.append(family)
        kept = self._maximal(candidates)
        logger.info(
            f"Free component {comp.index}: {len(candidates)} feasible candidates, {len(kept)} maximal families"
        )
        return kept

    # --- subdivisions ---

    def _dissections(self, n: int) -> List[Tuple[Tuple[int, ...], ...]]:
        """All subdivisions of the n-gon into regions with an even number (>= 4) of sides."""

        @lru_cache(maxsize=None)
        def dissect(poly: Tuple[int, ...]) -> Tuple[Tuple[Tuple[int, ...], ...], ...]:
            if len(poly) % 2 or len(poly) < 4:
                return ()
            results = []
            first, rest = poly[0], poly[1:]
            # The region containing side (poly[-1], poly[0]) keeps both ends.
            inner = rest[:-1]
            for r in range(2, len(inner) + 1, 2):
                for chosen in itertools.combinations(inner, r):
                    region = (first,) + chosen + (poly[-1],)
                    gaps = []
                    ok = True
                    for a, b in zip(region[:-1], region[1:]):
                        piece = tuple(v for v in poly if a <= v <= b)
                        if len(piece) > 2:
                            sub = dissect(piece)
                            if not sub:
                                ok = False
                                break
                            gaps.append(sub)
                    if not ok:
                        continue
                    for combo in itertools.product(*gaps):
                        results.append((region,) + tuple(f for part in combo for f in part))
            return tuple(results)

        return [tuple(sorted(d)) for d in dissect(tuple(range(n)))]

    def _side_length(self, comp: FreeComponent, a: int, b: int) -> float:
        n = len(comp.sides)
        if b == (a + 1) % n:
            return comp.sides[a].length
        if a == (b + 1) % n:
            return comp.sides[b].length
        (x1, y1), (x2, y2) = comp.points[a], comp.points[b]
        return math.hypot(x2 - x1, y2 - y1)

    def _satisfies_green(self, comp: FreeComponent, region: Tuple[int, ...]) -> bool:
        lengths = [self._side_length(comp, a, b) for a, b in zip(region, region[1:] + region[:1])]
        even, odd = sum(lengths[0::2]), sum(lengths[1::2])
        return abs(even - odd) <= comp.green_tol * (even + odd)

    # --- typing and constraints ---

    def _build_family(self, comp, dissection, root_parity) -> Optional[SolutionFamily]:
        n = len(comp.sides)
        edges_of = []
        for region in dissection:
            edges_of.append([(a, b) for a, b in zip(region, region[1:] + region[:1])])
        owner = {}
        for i, edges in enumerate(edges_of):
            for pos, (a, b) in enumerate(edges):
                owner[(a, b)] = (i, pos)

        # Diagonals appear in both orientations; neighbours take opposite types.
        parity = {0: root_parity}
        tree = nx.Graph()
        tree.add_nodes_from(range(len(dissection)))
        diagonals = []
        for (a, b), (i, pos) in owner.items():
            if (b, a) in owner and a < b:
                j, pos_j = owner[(b, a)]
                tree.add_edge(i, j, positions=((i, pos), (j, pos_j)))
                diagonals.append((a, b))
        if not nx.is_tree(tree):
            return None
        for i, j in nx.bfs_edges(tree, 0):
            (pi, pos_i), (pj, pos_j) = tree.edges[i, j]['positions']
            if pi != i:
                (pi, pos_i), (pj, pos_j) = (pj, pos_j), (pi, pos_i)
            side_i = (pos_i + parity[i]) % 2
            # pick parity[j] so the shared side has the opposite type
            parity[j] = (1 - side_i - pos_j) % 2

        side_types = []
        constraints = []
        for i, edges in enumerate(edges_of):
            types = []
            for pos, (a, b) in enumerate(edges):
                kind = LOWER if (pos + parity[i]) % 2 == 0 else UPPER
                types.append(kind)
                if (b, a) in owner:
                    if kind == LOWER:
                        constraints.append(Constraint(region=i, op='>=', other=owner[(b, a)][0]))
                    continue
                alpha = comp.sides[a].alpha
                constraints.append(Constraint(region=i, op='>=' if kind == LOWER else '<=', value=alpha))
            side_types.append(tuple(types))
        constraints = sorted(set(constraints), key=lambda c: (c.region, c.other is not None, c.op, c.value or 0.0, c.other or 0))

        bounds = _propagate(len(dissection), constraints)
        if any(lo > hi for lo, hi in bounds):
            logger.debug(f"Rejected typing {root_parity} of subdivision {dissection}: empty bounds")
            return None

        regions = tuple(dissection)
        areas = tuple(_shoelace([comp.points[k] for k in r] + [comp.points[r[0]]]) for r in regions)
        references = tuple(
            self.graph.value_at(_centroid([comp.points[k] for k in r])) for r in regions
        )
        return SolutionFamily(
            component=comp.index,
            regions=regions,
            region_vertices=tuple(tuple(comp.sides[k].start for k in r) for r in regions),
            diagonals=tuple(sorted(diagonals)),
            side_types=tuple(side_types),
            constraints=tuple(constraints),
            bounds=tuple((lo, hi) for lo, hi in bounds),
            region_areas=areas,
            reference_values=references,
        )

    # --- maximality ---

    def _maximal(self, candidates: List[SolutionFamily]) -> List[SolutionFamily]:
        kept = []
        for idx, coarse in enumerate(candidates):
            finer = next(
                (j for j, fine in enumerate(candidates) if j != idx and self._refines(fine, coarse)), None,
            )
            if finer is None:
                kept.append(coarse)
                continue
            reason = (
                f"subdivision {list(coarse.regions)} is the equality section of {list(candidates[finer].regions)}"
            )
            logger.warning(f"Dropped family of free component {coarse.component}: {reason}")
            self.dropped.append(DroppedFamily(family=coarse, refined_by=finer, reason=reason))
        return sorted(kept, key=lambda f: (f.component, f.size, f.regions, f.side_types))

    @staticmethod
    def _refines(fine: SolutionFamily, coarse: SolutionFamily) -> bool:
        if not set(coarse.diagonals) < set(fine.diagonals):
            return False
        # map each fine region to the coarse region containing it
        parent = []
        for region in fine.regions:
            members = set(region)
            parent.append(next(i for i, r in enumerate(coarse.regions) if members <= set(r)))
        order = nx.DiGraph()
        order.add_nodes_from(range(coarse.size))
        order.add_edges_from((c.region, c.other) for c in coarse.constraints if c.other is not None)
        for c in fine.constraints:
            lo, hi = coarse.bounds[parent[c.region]]
            if c.other is None:
                implied = lo >= c.value if c.op == '>=' else hi <= c.value
            else:
                big, small = parent[c.region], parent[c.other]
                implied = (
                    big == small
                    or lo >= coarse.bounds[small][1]
                    or nx.has_path(order, big, small)
                )
            if not implied:
                return False
        return True


def enumerate_families(g: RegionGraph) -> List[SolutionFamily]:
    """Convenience wrapper around FamilyEnumerator."""
    return FamilyEnumerator(g).enumerate()


def _as_list(f: SolutionFamily, values) -> List[float]:
    if isinstance(values, dict):
        missing = [i for i in range(f.size) if i not in values]
        if missing:
            raise InvalidParameter(f"no value given for region(s) {[i + 1 for i in missing]}")
        return [float(values[i]) for i in range(f.size)]
    values = [float(v) for v in values]
    if len(values) != f.size:
        raise InvalidParameter(f"expected {f.size} region values, got {len(values)}")
    return values


def sample_member(f: SolutionFamily, values, base: RegionGraph) -> PiecewiseSolution:
    """The solution equal to the reference off the free component and to values on its regions."""
    t = _as_list(f, values)
    for c in f.constraints:
        if not c.holds(t):
            raise ConstraintViolation(f"constraint {c} fails for {format_number(t[c.region])}", constraint=c)
    comp = base.components[f.component]
    inside = set(comp.faces)
    arrangement = base.arrangement
    touching = {adj.chord for adj in arrangement.adjacency if not (adj.left in inside and adj.right in inside)}
    chords = [c for i, c in enumerate(arrangement.chords) if i in touching]
    chords += [Chord.between(comp.sides[a].start, comp.sides[b].start, base.domain) for a, b in f.diagonals]

    def value_of(p: Point) -> float:
        if _inside_polygon(comp.points, p):
            region = f.region_of(comp, p)
            if region is not None:
                return t[region]
        return base.value_at(p)

    return assemble_solution(
        base.domain, chords, base.base.boundary_trace, value_of, tv_offset=base.base.tv_offset,
    )


def family_energy_delta(f: SolutionFamily, values, base: RegionGraph) -> float:
    """TV(member) - TV(reference), from the free component's sides and diagonals only."""
    t = _as_list(f, values)
    comp = base.components[f.component]
    across = _directed_sides(f)
    total = 0.0
    for i, region in enumerate(f.regions):
        for a, b in zip(region, region[1:] + region[:1]):
            if (a, b) in across:
                j = across[(a, b)]
                if i < j:
                    total += abs(t[i] - t[j]) * math.dist(comp.points[a], comp.points[b])
            else:
                total += abs(comp.sides[a].alpha - t[i]) * comp.sides[a].length
    return total - comp.reference_tv


def _directed_sides(f: SolutionFamily) -> Dict[Tuple[int, int], int]:
    owner = {}
    for i, region in enumerate(f.regions):
        for a, b in zip(region, region[1:] + region[:1]):
            owner[(a, b)] = i
    return {(a, b): owner[(b, a)] for (a, b) in owner if (b, a) in owner}


def norm_objective(f: SolutionFamily, values, p: float) -> float:
    t = _as_list(f, values)
    return sum(area * abs(v) ** p for area, v in zip(f.region_areas, t))


def smallest_norm_member(f: SolutionFamily, p: float, base: Optional[RegionGraph] = None) -> Dict[int, float]:
    """
    Feasible values minimising sum(area_i * |t_i|^p). The objective is
    separable and the order constraints form a tree whose propagated bounds
    are monotone along each edge, so clipping 0 into every interval is
    feasible and optimal for every p >= 1.
    """
    if not 1.0 <= p < 2.0:
        raise InvalidParameter(f"p must lie in [1, 2), got {p}")
    if any(lo > hi for lo, hi in f.bounds):
        raise Infeasible("the family has an empty constraint set")
    return {i: min(max(0.0, lo), hi) for i, (lo, hi) in enumerate(f.bounds)}
