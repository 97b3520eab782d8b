import math

import numpy as np
from django.test import SimpleTestCase

from leastgrad import catalog
from leastgrad.classify import (
    Constraint, FamilyEnumerator, ImportedStructure, enumerate_families, family_energy_delta,
    format_number, norm_objective, region_graph, sample_member, smallest_norm_member,
)
from leastgrad.construct import build_solution, combine, total_variation, verify_least_gradient
from leastgrad.exceptions import ConstraintViolation, InvalidParameter

DISK = catalog.DISK


class FormatNumberTests(SimpleTestCase):

    def test_format(self):
        self.assertEqual(format_number(-1.0), '-1')
        self.assertEqual(format_number(1.5), '1.5')
        self.assertEqual(format_number(math.inf), 'inf')
        self.assertEqual(str(Constraint(region=1, op='>=', other=0)), 't2 >= t1')
        self.assertEqual(str(Constraint(region=0, op='<=', value=1.0)), 't1 <= 1')


class ImportedStructureTests(SimpleTestCase):

    def test_validation(self):
        with self.assertRaises(InvalidParameter):
            ImportedStructure(domain=DISK, vertices=(0.0, 1.0, 2.0), alphas=(0.0, 1.0))
        with self.assertRaises(InvalidParameter):
            ImportedStructure(domain=DISK, vertices=(0.0, 2.0, 1.0), alphas=(0.0, 1.0, 0.0))

    def test_base_solution_keeps_every_side(self):
        structure = catalog.hexagon_equilateral()
        base = structure.base_solution()
        self.assertEqual(len(base.chords), 6)
        self.assertEqual(base.evaluate((0.0, 0.0)), 0.0)
        self.assertAlmostEqual(total_variation(base), 6.0, places=9)


class RegionGraphTests(SimpleTestCase):

    def test_no_free_faces_for_three_values(self):
        h = catalog.three_value().boundary
        u0, ties = build_solution(DISK, h)
        graph = region_graph(u0, ties)
        self.assertEqual(graph.components, ())
        self.assertEqual(len(graph.pinned), 3)
        self.assertEqual(enumerate_families(graph), [])

    def test_hexagon_component(self):
        graph = region_graph(catalog.hexagon_equilateral())
        self.assertEqual(len(graph.components), 1)
        comp = graph.components[0]
        self.assertEqual(len(comp.sides), 6)
        self.assertEqual(comp.alphas, (-1.0, 1.0, -1.0, 1.0, -1.0, 1.0))
        for side in comp.sides:
            self.assertAlmostEqual(side.length, 1.0, places=12)
        self.assertAlmostEqual(comp.reference_tv, 6.0, places=9)
        self.assertAlmostEqual(comp.area, 1.5 * math.sqrt(3.0), places=9)


class HexagonFamilyTests(SimpleTestCase):

    def test_equilateral_hexagon_has_one_family(self):
        graph = region_graph(catalog.hexagon_equilateral())
        families = enumerate_families(graph)
        self.assertEqual(len(families), 1)
        family = families[0]
        self.assertEqual(family.size, 1)
        self.assertEqual(family.diagonals, ())
        self.assertEqual(family.bounds, ((-1.0, 1.0),))
        self.assertEqual(family.reference_values, (0.0,))

    def test_green_split_angle(self):
        b = catalog.green_split_angle()
        self.assertAlmostEqual(b, 1.3324788649850303, places=12)
        self.assertAlmostEqual(4.0 * math.sin(b / 2), 2.0 * math.sin(math.pi / 2 - b) + 2.0, places=12)

    def test_green_split_family(self):
        graph = region_graph(catalog.hexagon_green_split())
        enumerator = FamilyEnumerator(graph)
        families = enumerator.enumerate()
        self.assertEqual(len(families), 1)
        family = families[0]
        self.assertEqual(family.size, 2)
        self.assertEqual(family.diagonals, ((0, 3),))
        self.assertEqual(
            set(family.describe_constraints()),
            {'t1 >= -1', 't1 <= 1', 't2 >= -1', 't2 <= 1', 't2 >= t1'},
        )
        self.assertEqual(family.bounds, ((-1.0, 1.0), (-1.0, 1.0)))
        self.assertEqual(len(enumerator.dropped), 1)
        self.assertEqual(enumerator.dropped[0].family.size, 1)

    def test_green_split_members_keep_the_energy(self):
        graph = region_graph(catalog.hexagon_green_split())
        family = enumerate_families(graph)[0]
        rng = np.random.default_rng(3)
        for _ in range(20):
            a, b = sorted(rng.uniform(-1.0, 1.0, size=2))
            self.assertAlmostEqual(family_energy_delta(family, [a, b], graph), 0.0, places=9)

    def test_green_split_member_is_a_minimiser(self):
        structure = catalog.hexagon_green_split()
        graph = region_graph(structure)
        family = enumerate_families(graph)[0]
        for values in ([-0.5, 0.5], [0.0, 0.0], [1.0, 1.0], [-1.0, 0.25]):
            member = sample_member(family, values, graph)
            self.assertTrue(verify_least_gradient(member, graph.base, structure.proxy_trace()))

    def test_member_outside_constraints(self):
        graph = region_graph(catalog.hexagon_green_split())
        family = enumerate_families(graph)[0]
        with self.assertRaises(ConstraintViolation) as cm:
            sample_member(family, [0.5, 0.0], graph)
        self.assertEqual(str(cm.exception.constraint), 't2 >= t1')
        with self.assertRaises(InvalidParameter):
            sample_member(family, [0.0], graph)


class FourArcFamilyTests(SimpleTestCase):

    def setUp(self):
        self.h = catalog.four_arc().boundary
        self.u0, ties = build_solution(DISK, self.h)
        self.graph = region_graph(self.u0, ties)

    def test_tied_chords_free_the_centre(self):
        self.assertEqual(len(self.graph.components), 1)
        self.assertEqual(len(self.graph.components[0].sides), 4)
        self.assertEqual(len(self.graph.pinned), 4)

    def test_one_interval_family(self):
        families = enumerate_families(self.graph)
        self.assertEqual(len(families), 1)
        self.assertEqual(families[0].bounds, ((0.0, 1.0),))

    def test_every_member_is_a_minimiser(self):
        family = enumerate_families(self.graph)[0]
        for t in np.linspace(0.0, 1.0, 11):
            member = sample_member(family, [t], self.graph)
            self.assertTrue(verify_least_gradient(member, self.u0, self.h))
            self.assertAlmostEqual(total_variation(member), 2 * math.sqrt(2.0), places=9)


class SmallestNormTests(SimpleTestCase):

    def test_brothers_selects_zero(self):
        graph = region_graph(catalog.brothers_structure())
        family = enumerate_families(graph)[0]
        self.assertEqual(family.bounds, ((-1.0, 1.0),))
        for p in (1.0, 1.5):
            self.assertEqual(smallest_norm_member(family, p), {0: 0.0})

    def test_four_arc_selects_lower_end(self):
        h = catalog.four_arc().boundary
        u0, ties = build_solution(DISK, h)
        family = enumerate_families(region_graph(u0, ties))[0]
        best = smallest_norm_member(family, 1.5)
        self.assertEqual(best, {0: 0.0})
        self.assertLessEqual(norm_objective(family, best, 1.5), norm_objective(family, [0.5], 1.5))

    def test_p_out_of_range(self):
        graph = region_graph(catalog.brothers_structure())
        family = enumerate_families(graph)[0]
        with self.assertRaises(InvalidParameter):
            smallest_norm_member(family, 2.0)


def family_fixtures():
    """(graph, reference, trace) for every shipped structure with a free component."""
    fixtures = []
    for structure in (catalog.hexagon_equilateral(), catalog.hexagon_green_split(), catalog.brothers_structure()):
        graph = region_graph(structure)
        fixtures.append((graph, graph.base, structure.proxy_trace()))
    h = catalog.four_arc().boundary
    u0, ties = build_solution(DISK, h)
    fixtures.append((region_graph(u0, ties), u0, h))
    return fixtures


def feasible_samples(family, rng, count):
    samples = []
    while len(samples) < count:
        values = [rng.uniform(lo, hi) for lo, hi in family.bounds]
        if family.is_feasible(values):
            samples.append(values)
    return samples


def region_centre(graph, family, i):
    comp = graph.components[family.component]
    return tuple(np.mean([comp.points[k] for k in family.regions[i]], axis=0))


class FamilyMemberTests(SimpleTestCase):

    def setUp(self):
        self.fixtures = family_fixtures()
        self.rng = np.random.default_rng(5)

    def test_random_members_are_minimisers(self):
        for graph, reference, trace in self.fixtures:
            for family in enumerate_families(graph):
                for values in feasible_samples(family, self.rng, 10):
                    member = sample_member(family, values, graph)
                    self.assertTrue(verify_least_gradient(member, reference, trace))
                    self.assertAlmostEqual(family_energy_delta(family, values, graph), 0.0, places=9)

    def test_members_agree_with_the_reference_off_the_free_set(self):
        for graph, _, _ in self.fixtures:
            points = []
            while len(points) < 100:
                r, a = 0.999 * math.sqrt(self.rng.random()), 2 * math.pi * self.rng.random()
                p = (r * math.cos(a), r * math.sin(a))
                if graph.component_of(p) is None:
                    points.append(p)
            for family in enumerate_families(graph):
                member = sample_member(family, feasible_samples(family, self.rng, 1)[0], graph)
                for p in points:
                    self.assertEqual(member.evaluate(p), graph.value_at(p))

    def test_centre_lies_in_the_free_set(self):
        for graph, _, _ in self.fixtures:
            comp = graph.component_of((0.0, 0.0))
            self.assertIsNotNone(comp)
            self.assertIn(graph.arrangement.locate((0.0, 0.0)), comp.faces)
        self.assertIsNone(self.fixtures[0][0].component_of((0.0, 0.99)))

    def test_min_and_max_of_members_are_members(self):
        for graph, reference, trace in self.fixtures:
            for family in enumerate_families(graph):
                a, b = feasible_samples(family, self.rng, 2)
                members = sample_member(family, a, graph), sample_member(family, b, graph)
                for mode, pick in (('min', min), ('max', max)):
                    values = [pick(x, y) for x, y in zip(a, b)]
                    self.assertTrue(family.is_feasible(values))
                    combined = combine(*members, mode)
                    for i, value in enumerate(values):
                        self.assertAlmostEqual(combined.evaluate(region_centre(graph, family, i)), value, places=12)
                    self.assertTrue(verify_least_gradient(combined, reference, trace))

    def test_min_max_stability_on_random_pairs(self):
        for graph, reference, trace in (self.fixtures[1], self.fixtures[3]):
            family = enumerate_families(graph)[0]
            for _ in range(100):
                a, b = feasible_samples(family, self.rng, 2)
                u, v = sample_member(family, a, graph), sample_member(family, b, graph)
                low, high = combine(u, v, 'min'), combine(u, v, 'max')
                self.assertTrue(verify_least_gradient(low, reference, trace))
                self.assertTrue(verify_least_gradient(high, reference, trace))
                self.assertLessEqual(
                    total_variation(low) + total_variation(high),
                    total_variation(u) + total_variation(v) + 1e-9,
                )

    def test_brothers_member(self):
        structure = catalog.brothers_structure()
        graph = region_graph(structure)
        family = enumerate_families(graph)[0]
        member = sample_member(family, [-0.5], graph)
        self.assertEqual(member.evaluate((0.0, 0.0)), -0.5)
        self.assertEqual(member.evaluate((0.0, 0.95)), -1.0)
        self.assertEqual(member.evaluate((0.95, 0.0)), 1.0)
        self.assertTrue(verify_least_gradient(member, graph.base, structure.proxy_trace()))
        self.assertAlmostEqual(family_energy_delta(family, [0.7], graph), 0.0, places=9)

    def test_infeasible_value_costs_energy(self):
        graph = region_graph(catalog.hexagon_equilateral())
        family = enumerate_families(graph)[0]
        self.assertFalse(family.is_feasible([2.0]))
        self.assertAlmostEqual(family_energy_delta(family, [2.0], graph), 6.0, places=9)
        with self.assertRaises(ConstraintViolation):
            sample_member(family, [2.0], graph)
