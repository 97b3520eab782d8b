"""
JSON documents read and written by the management commands.

Every document is a plain dict. `dumps` renders it canonically (sorted keys,
shortest round-trip floats) so identical inputs give byte-identical files.
Angles are radians throughout.
"""

import json
import math
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from .boundary_data import BoundaryData
from .classify import (
    Constraint, DroppedFamily, FamilyEnumerator, FreeComponent, ImportedStructure, RegionGraph,
    SolutionFamily, format_number, smallest_norm_member,
)
from .construct import PiecewiseSolution, TieRecord, total_variation
from .exceptions import InvalidParameter
from .geometry import Chord, ConvexDomain, Point, build_arrangement

DISK = 'disk'
POLYGON = 'polygon'
PINNED = 'pinned'
FREE = 'free'


def dumps(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + '\n'


def loads(text: str) -> Dict[str, Any]:
    return json.loads(text)


def _bound(x: float) -> Optional[float]:
    return None if math.isinf(x) else x


def _unbound(x: Optional[float], sign: float) -> float:
    return sign * math.inf if x is None else float(x)


# --- domain and boundary data ---

def serialize_domain(domain: ConvexDomain) -> Dict[str, Any]:
    if domain.is_disk:
        return {'type': DISK}
    return {'type': POLYGON, 'vertices': [[x, y] for x, y in domain.vertices]}


def parse_domain(doc: Dict[str, Any]) -> ConvexDomain:
    kind = doc.get('type') if isinstance(doc, dict) else None
    if kind == DISK:
        return ConvexDomain.unit_disk()
    if kind == POLYGON:
        vertices = doc.get('vertices')
        if not isinstance(vertices, list) or not all(isinstance(v, list) and len(v) == 2 for v in vertices):
            raise InvalidParameter("polygon vertices must be a list of [x, y] pairs")
        return ConvexDomain.polygon(vertices)
    raise InvalidParameter(f"unknown domain type {kind!r}")


def serialize_boundary(h: BoundaryData) -> List[Dict[str, float]]:
    return h.to_list()


def parse_boundary(pieces: List[Dict[str, Any]], domain: ConvexDomain) -> BoundaryData:
    try:
        pairs = [(float(p['start_angle']), float(p['value'])) for p in pieces]
    except (KeyError, TypeError, ValueError):
        raise InvalidParameter("boundary pieces need numeric 'start_angle' and 'value'")
    return BoundaryData.from_pieces(pairs, period=domain.period)


# --- imported structures ---

def serialize_structure(s: ImportedStructure) -> Dict[str, Any]:
    doc = {
        'name': s.name,
        'domain': serialize_domain(s.domain),
        'vertices': list(s.vertices),
        'alphas': list(s.alphas),
        'reference_value': s.reference_value,
        'tv_offset': s.tv_offset,
    }
    if s.tolerance is not None:
        doc['tolerance'] = s.tolerance
    return doc


def parse_structure(doc: Dict[str, Any]) -> ImportedStructure:
    if not isinstance(doc, dict):
        raise InvalidParameter("a structure document must be an object")
    domain = parse_domain(doc.get('domain', {'type': DISK}))
    try:
        return ImportedStructure(
            domain=domain,
            vertices=tuple(float(v) for v in doc['vertices']),
            alphas=tuple(float(a) for a in doc['alphas']),
            reference_value=float(doc.get('reference_value', 0.0)),
            tv_offset=float(doc.get('tv_offset', 0.0)),
            tolerance=float(doc['tolerance']) if doc.get('tolerance') is not None else None,
            name=str(doc.get('name', '')),
        )
    except KeyError as e:
        raise InvalidParameter(f"structure document is missing {e.args[0]!r}")
    except (TypeError, ValueError) as e:
        raise InvalidParameter(f"malformed structure document: {e}")


# --- problems ---

@dataclass(frozen=True)
class ProblemSpec:
    """A parsed P.json: a domain plus exactly one source of boundary data."""
    domain: ConvexDomain
    boundary: Optional[BoundaryData] = None
    structure: Optional[ImportedStructure] = None
    boundary_function: Optional[str] = None
    probe: Optional[Tuple[Point, ...]] = None

    @property
    def source(self):
        if self.boundary is not None:
            return self.boundary
        if self.structure is not None:
            return self.structure.proxy_trace()
        from .catalog import boundary_function
        return boundary_function(self.boundary_function)


def parse_problem(doc: Dict[str, Any]) -> ProblemSpec:
    if not isinstance(doc, dict):
        raise InvalidParameter("a problem document must be an object")
    domain = parse_domain(doc.get('domain'))
    sources = [key for key in ('boundary', 'structure', 'boundary_function') if key in doc]
    if len(sources) != 1:
        raise InvalidParameter("give exactly one of 'boundary', 'structure' or 'boundary_function'")
    probe = None
    if doc.get('probe') is not None:
        try:
            probe = tuple((float(x), float(y)) for x, y in doc['probe'])
        except (TypeError, ValueError):
            raise InvalidParameter("probe must be a list of [x, y] points")
    if 'boundary' in doc:
        return ProblemSpec(domain=domain, boundary=parse_boundary(doc['boundary'], domain), probe=probe)
    if 'structure' in doc:
        if not isinstance(doc['structure'], dict):
            raise InvalidParameter("'structure' must be an object")
        structure = parse_structure({'domain': doc['domain'], **doc['structure']})
        return ProblemSpec(domain=domain, structure=structure, probe=probe)
    from .catalog import BOUNDARY_FUNCTIONS
    name = doc['boundary_function']
    if name not in BOUNDARY_FUNCTIONS:
        raise InvalidParameter(f"unknown boundary function {name!r}")
    return ProblemSpec(domain=domain, boundary_function=name, probe=probe)


def serialize_problem(spec: ProblemSpec) -> Dict[str, Any]:
    doc: Dict[str, Any] = {'domain': serialize_domain(spec.domain)}
    if spec.boundary is not None:
        doc['boundary'] = serialize_boundary(spec.boundary)
    elif spec.structure is not None:
        structure = serialize_structure(spec.structure)
        del structure['domain']
        doc['structure'] = structure
    else:
        doc['boundary_function'] = spec.boundary_function
    if spec.probe is not None:
        doc['probe'] = [[x, y] for x, y in spec.probe]
    return doc


# --- solutions ---

def serialize_ties(records: List[TieRecord]) -> List[Dict[str, Any]]:
    return [
        {
            'threshold': r.threshold,
            'matchings': [[[c.a, c.b] for c in m] for m in r.matchings],
            'lengths': list(r.lengths),
        }
        for r in records
    ]


def serialize_solution(u: PiecewiseSolution, ties: Optional[List[TieRecord]] = None) -> Dict[str, Any]:
    doc = {
        'domain': serialize_domain(u.domain),
        'chords': [[c.a, c.b] for c in u.chords],
        'faces': [
            {'sample': list(face.sample), 'value': u.face_values[face.id], 'area': face.area}
            for face in u.arrangement.faces
        ],
        'tv_offset': u.tv_offset,
        'total_variation': total_variation(u),
    }
    if u.boundary_trace is not None:
        doc['boundary'] = serialize_boundary(u.boundary_trace)
    if ties is not None:
        doc['ties'] = serialize_ties(ties)
    return doc


def parse_solution(doc: Dict[str, Any]) -> PiecewiseSolution:
    """Rebuild the arrangement from the chords; each face takes the value of the stored sample inside it."""
    if not isinstance(doc, dict) or 'chords' not in doc or 'faces' not in doc:
        raise InvalidParameter("a solution document needs 'chords' and 'faces'")
    domain = parse_domain(doc.get('domain', {'type': DISK}))
    try:
        chords = [Chord.between(float(a), float(b), domain) for a, b in doc['chords']]
    except (TypeError, ValueError):
        raise InvalidParameter("chords must be a list of [a, b] angle pairs")
    arrangement = build_arrangement(domain, chords, allow_shared_endpoints=True, allow_crossings=True)
    values = {}
    try:
        for face in doc['faces']:
            x, y = face['sample']
            values[arrangement.locate((float(x), float(y)))] = float(face['value'])
    except (KeyError, TypeError, ValueError):
        raise InvalidParameter("each face needs a numeric [x, y] 'sample' and a 'value'")
    missing = [f.id for f in arrangement.faces if f.id not in values]
    if missing:
        raise InvalidParameter(f"no value given for face(s) {missing}")
    trace = parse_boundary(doc['boundary'], domain) if doc.get('boundary') is not None else None
    return PiecewiseSolution(domain=domain, arrangement=arrangement, face_values=values,
                             boundary_trace=trace, tv_offset=float(doc.get('tv_offset', 0.0)))


# --- families ---

CONSTRAINT_PATTERN = re.compile(r'^t(\d+) (>=|<=) (?:t(\d+)|(\S+))$')


def parse_constraint(text: str) -> Constraint:
    match = CONSTRAINT_PATTERN.match(text.strip())
    if not match:
        raise InvalidParameter(f"cannot read constraint {text!r}")
    region, op, other, value = match.groups()
    if other is not None:
        return Constraint(region=int(region) - 1, op=op, other=int(other) - 1)
    return Constraint(region=int(region) - 1, op=op, value=float(value))


def _vertex_angles(f: SolutionFamily) -> Dict[int, float]:
    angles = {}
    for region, angles_of in zip(f.regions, f.region_vertices):
        angles.update(zip(region, angles_of))
    return angles


def serialize_family(f: SolutionFamily, p_values: Tuple[float, ...] = (1.0, 1.5)) -> Dict[str, Any]:
    angles = _vertex_angles(f)
    return {
        'component': f.component,
        'region_indices': [list(r) for r in f.regions],
        'regions': [list(v) for v in f.region_vertices],
        'diagonal_indices': [list(d) for d in f.diagonals],
        'diagonals': [[angles[a], angles[b]] for a, b in f.diagonals],
        'side_types': [list(t) for t in f.side_types],
        'constraints': f.describe_constraints(),
        'bounds': [[_bound(lo), _bound(hi)] for lo, hi in f.bounds],
        'region_areas': list(f.region_areas),
        'reference_values': list(f.reference_values),
        'smallest_norm': {
            format_number(p): [v for _, v in sorted(smallest_norm_member(f, p).items())] for p in p_values
        },
    }


def parse_family(doc: Dict[str, Any]) -> SolutionFamily:
    try:
        return SolutionFamily(
            component=int(doc['component']),
            regions=tuple(tuple(int(k) for k in r) for r in doc['region_indices']),
            region_vertices=tuple(tuple(float(t) for t in r) for r in doc['regions']),
            diagonals=tuple((int(a), int(b)) for a, b in doc['diagonal_indices']),
            side_types=tuple(tuple(t) for t in doc['side_types']),
            constraints=tuple(parse_constraint(c) for c in doc['constraints']),
            bounds=tuple((_unbound(lo, -1.0), _unbound(hi, 1.0)) for lo, hi in doc['bounds']),
            region_areas=tuple(float(a) for a in doc['region_areas']),
            reference_values=tuple(float(v) for v in doc['reference_values']),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidParameter(f"malformed family document: {e}")


def serialize_region(graph: RegionGraph, face_id: int) -> Dict[str, Any]:
    face = graph.arrangement.face(face_id)
    return {
        'face': face_id,
        'role': PINNED if face_id in graph.pinned else FREE,
        'value': graph.face_values[face_id],
        'corners': [list(e.start) for e in face.edges],
        'arcs': [[start, length] for start, length in face.arcs],
    }


def serialize_component(comp: FreeComponent) -> Dict[str, Any]:
    return {
        'index': comp.index,
        'faces': list(comp.faces),
        'vertices': list(comp.vertices),
        'alphas': list(comp.alphas),
        'area': comp.area,
        'reference_tv': comp.reference_tv,
    }


def serialize_dropped(d: DroppedFamily) -> Dict[str, Any]:
    return {
        'component': d.family.component,
        'regions': [list(v) for v in d.family.region_vertices],
        'constraints': d.family.describe_constraints(),
        'reason': d.reason,
    }


def family_document(
    graph: RegionGraph,
    families: List[SolutionFamily],
    enumerator: Optional[FamilyEnumerator] = None,
    ties: Optional[List[TieRecord]] = None,
) -> Dict[str, Any]:
    doc = {
        'regions': [serialize_region(graph, face.id) for face in graph.arrangement.faces],
        'components': [serialize_component(c) for c in graph.components],
        'families': [serialize_family(f) for f in families],
        'reference': serialize_solution(graph.base),
        'ties': serialize_ties(ties or []),
    }
    if enumerator is not None:
        doc['diagnostics'] = {
            'dropped': [serialize_dropped(d) for d in enumerator.dropped],
            'rejected_typings': enumerator.rejected,
        }
    return doc
