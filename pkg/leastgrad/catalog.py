"""
Named problems and structures shipped as fixtures, plus the continuous
boundary functions `select` understands by name.
"""

import math
from typing import Callable, Dict

import numpy as np
from scipy import optimize

from .boundary_data import BoundaryData
from .classify import ImportedStructure
from .documents import ProblemSpec, serialize_problem, serialize_structure
from .exceptions import InvalidParameter
from .geometry import ConvexDomain, chord_length

DISK = ConvexDomain.unit_disk()
# Corners of the square inscribed in the unit circle.
INSCRIBED_SQUARE = tuple(
    (math.cos(a), math.sin(a)) for a in (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4)
)


def brothers(theta):
    """x^2 - y^2 + 1 on the arcs facing the x axis, x^2 - y^2 - 1 on the arcs facing the y axis."""
    theta = np.asarray(theta, dtype=float)
    return np.cos(2.0 * theta) + np.where(np.abs(np.cos(theta)) > 1.0 / math.sqrt(2.0), 1.0, -1.0)


BOUNDARY_FUNCTIONS: Dict[str, Callable] = {
    'brothers': brothers,
}


def boundary_function(name: str) -> Callable:
    try:
        return BOUNDARY_FUNCTIONS[name]
    except KeyError:
        raise InvalidParameter(f"unknown boundary function {name!r}")


# --- problems ---

def three_value() -> ProblemSpec:
    h = BoundaryData.from_pieces([(math.pi / 2, 0.0), (7 * math.pi / 6, 1.0), (11 * math.pi / 6, 2.0)])
    return ProblemSpec(domain=DISK, boundary=h)


def four_arc() -> ProblemSpec:
    """Value 1 on the quarter arcs around angles 0 and pi, 0 on the other two."""
    q = math.pi / 4
    h = BoundaryData.from_pieces([(q, 0.0), (3 * q, 1.0), (5 * q, 0.0), (7 * q, 1.0)])
    return ProblemSpec(domain=DISK, boundary=h)


def two_valued() -> ProblemSpec:
    h = BoundaryData.from_pieces([(math.pi / 6, 0.0), (11 * math.pi / 6, 1.0)])
    return ProblemSpec(domain=DISK, boundary=h)


def quarter_removed() -> Dict:
    """The unit ball of the 1-norm with one quarter cut away; rejected as non-convex."""
    return {
        'domain': {'type': 'polygon', 'vertices': [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]},
        'boundary': [{'start_angle': 0.0, 'value': 0.0}, {'start_angle': 1.0, 'value': 1.0}],
    }


def brothers_problem() -> ProblemSpec:
    return ProblemSpec(domain=DISK, boundary_function='brothers', probe=INSCRIBED_SQUARE)


# --- imported structures ---

def hexagon_equilateral() -> ImportedStructure:
    return ImportedStructure(
        domain=DISK,
        vertices=tuple(k * math.pi / 3 for k in range(6)),
        alphas=(-1.0, 1.0, -1.0, 1.0, -1.0, 1.0),
        name='hexagon_equilateral',
    )


def green_split_angle() -> float:
    """
    Angle b for which the quadrilateral 0, b, pi - b, pi satisfies Green's
    formula: two sides of chord length c(b) balance c(pi - 2b) plus the diameter.
    """
    def imbalance(b):
        return 2.0 * chord_length(DISK, 0.0, b) - (chord_length(DISK, 0.0, math.pi - 2.0 * b) + 2.0)

    return optimize.bisect(imbalance, 0.5, 1.5, xtol=1e-15, maxiter=200)


def hexagon_green_split() -> ImportedStructure:
    b = green_split_angle()
    return ImportedStructure(
        domain=DISK,
        vertices=(0.0, b, math.pi - b, math.pi, math.pi + b, 2.0 * math.pi - b),
        alphas=(-1.0, 1.0, -1.0, 1.0, -1.0, 1.0),
        name='hexagon_green_split',
    )


def brothers_structure() -> ImportedStructure:
    return ImportedStructure(
        domain=DISK,
        vertices=(math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4),
        alphas=(-1.0, 1.0, -1.0, 1.0),
        tv_offset=8.0 * math.sqrt(2.0) / 3.0,
        name='brothers',
    )


FIXTURES: Dict[str, Callable[[], Dict]] = {
    'three_value.json': lambda: serialize_problem(three_value()),
    'four_arc.json': lambda: serialize_problem(four_arc()),
    'two_valued.json': lambda: serialize_problem(two_valued()),
    'brothers_problem.json': lambda: serialize_problem(brothers_problem()),
    'quarter_removed.json': quarter_removed,
    'hexagon_equilateral.json': lambda: serialize_structure(hexagon_equilateral()),
    'hexagon_green_split.json': lambda: serialize_structure(hexagon_green_split()),
    'brothers_structure.json': lambda: serialize_structure(brothers_structure()),
}
