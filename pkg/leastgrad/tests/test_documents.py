import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from leastgrad import catalog
from leastgrad.boundary_data import BoundaryData
from leastgrad.classify import Constraint, FamilyEnumerator, region_graph
from leastgrad.construct import build_solution, total_variation
from leastgrad.documents import (
    dumps, family_document, loads, parse_constraint, parse_family, parse_problem, parse_solution,
    parse_structure, serialize_family, serialize_problem, serialize_solution, serialize_structure,
)
from leastgrad.exceptions import InvalidParameter, NonConvexDomain
from leastgrad.exports import (
    CSV_HEADER, pgm_bytes, read_field_dump, report_csv, write_atomic, write_field_dump,
)
from leastgrad.forms import ProblemSpecForm, SweepParametersForm, first_error
from leastgrad.selector_grid import SelectionReport, SelectionStep, rasterize

FIXTURES = Path(catalog.__file__).resolve().parent / 'fixtures'
PROBLEMS = ['three_value.json', 'four_arc.json', 'two_valued.json', 'brothers_problem.json']
STRUCTURES = ['hexagon_equilateral.json', 'hexagon_green_split.json', 'brothers_structure.json']


def fixture(name):
    return loads((FIXTURES / name).read_text())


class FixtureTests(SimpleTestCase):

    def test_problem_fixtures_are_canonical(self):
        for name in PROBLEMS:
            with self.subTest(name=name):
                text = (FIXTURES / name).read_text()
                self.assertEqual(dumps(serialize_problem(parse_problem(loads(text)))), text)

    def test_structure_fixtures_are_canonical(self):
        for name in STRUCTURES:
            with self.subTest(name=name):
                text = (FIXTURES / name).read_text()
                self.assertEqual(dumps(serialize_structure(parse_structure(loads(text)))), text)

    def test_fixtures_match_catalog(self):
        shipped = parse_problem(fixture('three_value.json')).boundary
        for (s1, v1), (s2, v2) in zip(shipped.pieces, catalog.three_value().boundary.pieces):
            self.assertAlmostEqual(s1, s2, places=12)
            self.assertEqual(v1, v2)
        shipped = parse_structure(fixture('hexagon_green_split.json'))
        for got, want in zip(shipped.vertices, catalog.hexagon_green_split().vertices):
            self.assertAlmostEqual(got, want, places=12)

    def test_quarter_removed_is_rejected(self):
        with self.assertRaises(NonConvexDomain):
            parse_problem(fixture('quarter_removed.json'))


class ProblemDocumentTests(SimpleTestCase):

    def test_exactly_one_source(self):
        doc = fixture('three_value.json')
        doc['boundary_function'] = 'brothers'
        with self.assertRaises(InvalidParameter):
            parse_problem(doc)
        del doc['boundary']
        del doc['boundary_function']
        with self.assertRaises(InvalidParameter):
            parse_problem(doc)

    def test_unknown_boundary_function(self):
        with self.assertRaises(InvalidParameter):
            parse_problem({'domain': {'type': 'disk'}, 'boundary_function': 'cousins'})

    def test_unknown_domain(self):
        with self.assertRaises(InvalidParameter):
            parse_problem({'domain': {'type': 'annulus'}, 'boundary': []})

    def test_bad_boundary_piece(self):
        with self.assertRaises(InvalidParameter):
            parse_problem({'domain': {'type': 'disk'}, 'boundary': [{'start': 0.0, 'value': 1.0}]})

    def test_nested_structure(self):
        doc = {'domain': {'type': 'disk'}, 'structure': serialize_structure(catalog.brothers_structure())}
        del doc['structure']['domain']
        problem = parse_problem(doc)
        self.assertEqual(problem.structure, catalog.brothers_structure())
        self.assertEqual(problem.source, catalog.brothers_structure().proxy_trace())
        self.assertEqual(serialize_problem(problem), doc)

    def test_named_function_source(self):
        problem = parse_problem(fixture('brothers_problem.json'))
        self.assertIs(problem.source, catalog.brothers)
        self.assertEqual(len(problem.probe), 4)

    def test_dumps(self):
        text = dumps({'b': 1.5, 'a': [0.1]})
        self.assertTrue(text.endswith('\n'))
        self.assertLess(text.index('"a"'), text.index('"b"'))
        with self.assertRaises(ValueError):
            dumps({'x': math.nan})


class SolutionDocumentTests(SimpleTestCase):

    def setUp(self):
        self.h = catalog.three_value().boundary
        self.u0, self.ties = build_solution(catalog.DISK, self.h)

    def test_solution_survives_json(self):
        doc = loads(dumps(serialize_solution(self.u0, self.ties)))
        self.assertEqual(len(doc['ties']), 2)
        u = parse_solution(doc)
        self.assertAlmostEqual(total_variation(u), total_variation(self.u0), places=12)
        self.assertEqual(u.boundary_trace, self.h)
        for angle in (math.pi / 6, 5 * math.pi / 6, 3 * math.pi / 2):
            point = (0.9 * math.cos(angle), 0.9 * math.sin(angle))
            self.assertEqual(u.evaluate(point), self.u0.evaluate(point))

    def test_missing_face(self):
        doc = serialize_solution(self.u0)
        doc['faces'].pop()
        with self.assertRaises(InvalidParameter):
            parse_solution(doc)

    def test_not_a_solution(self):
        with self.assertRaises(InvalidParameter):
            parse_solution({'domain': {'type': 'disk'}})


class FamilyDocumentTests(SimpleTestCase):

    def test_constraint_text(self):
        for text in ('t2 >= t1', 't1 <= 1', 't3 >= -0.5'):
            self.assertEqual(str(parse_constraint(text)), text)
        self.assertEqual(parse_constraint('t2 >= t1'), Constraint(region=1, op='>=', other=0))
        with self.assertRaises(InvalidParameter):
            parse_constraint('t1 == 0')

    def test_green_split_document(self):
        graph = region_graph(catalog.hexagon_green_split())
        enumerator = FamilyEnumerator(graph)
        families = enumerator.enumerate()
        doc = loads(dumps(family_document(graph, families, enumerator)))
        self.assertEqual(len(doc['components']), 1)
        self.assertEqual(len(doc['families']), 1)
        family = doc['families'][0]
        self.assertEqual(family['bounds'], [[-1.0, 1.0], [-1.0, 1.0]])
        self.assertEqual(family['smallest_norm'], {'1': [0.0, 0.0], '1.5': [0.0, 0.0]})
        self.assertEqual(len(family['diagonals']), 1)
        self.assertEqual(len(doc['diagnostics']['dropped']), 1)
        roles = [region['role'] for region in doc['regions']]
        self.assertEqual(roles.count('free'), 1)
        self.assertEqual(roles.count('pinned'), 6)
        self.assertEqual(parse_family(family), families[0])

    def test_unbounded_family_bounds(self):
        graph = region_graph(catalog.hexagon_equilateral())
        family = FamilyEnumerator(graph).enumerate()[0]
        doc = serialize_family(family)
        self.assertEqual(doc['bounds'], [[-1.0, 1.0]])
        doc['bounds'] = [[None, 1.0]]
        self.assertEqual(parse_family(doc).bounds, ((-math.inf, 1.0),))

    def test_malformed_family(self):
        with self.assertRaises(InvalidParameter):
            parse_family({'component': 0})


class FormTests(SimpleTestCase):

    def test_problem_form(self):
        form = ProblemSpecForm(data={'document': (FIXTURES / 'three_value.json').read_text()})
        self.assertTrue(form.is_valid())
        self.assertEqual(form.cleaned_data['problem'].boundary.levels(), [0.0, 1.0, 2.0])

    def test_problem_form_errors(self):
        form = ProblemSpecForm(data={'document': '[1, 2]'})
        self.assertFalse(form.is_valid())
        self.assertIn('JSON object', first_error(form))
        form = ProblemSpecForm(data={'document': (FIXTURES / 'quarter_removed.json').read_text()})
        self.assertFalse(form.is_valid())
        self.assertIn('domain must be convex', first_error(form))

    def test_sweep_parameters(self):
        form = SweepParametersForm(data={'p': 1.5, 'grid': 32, 'eps_start': 0.1, 'eps_factor': 0.5, 'steps': 3})
        self.assertTrue(form.is_valid())
        for got, want in zip(form.schedule, [0.1, 0.05, 0.025]):
            self.assertAlmostEqual(got, want)
        for bad in ({'p': 2.0}, {'eps_start': 0.0}, {'eps_factor': 1.0}, {'steps': 2}):
            data = {'p': 1.5, 'grid': 32, 'eps_start': 0.1, 'eps_factor': 0.5, 'steps': 3, **bad}
            form = SweepParametersForm(data=data)
            self.assertFalse(form.is_valid())
            self.assertIn(next(iter(bad)), form.errors)


class ExportTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_write_atomic_leaves_no_temporaries(self):
        write_atomic(self.dir / 'out' / 'a.txt', 'hello\n')
        self.assertEqual((self.dir / 'out' / 'a.txt').read_text(), 'hello\n')
        self.assertEqual([p.name for p in (self.dir / 'out').iterdir()], ['a.txt'])

    def test_report_csv(self):
        field = rasterize(catalog.DISK, BoundaryData.constant(1.0), 16).template
        report = SelectionReport(p=1.5, schedule=[0.1, 0.01, 0.001], steps=[
            SelectionStep(eps=eps, F=1.0, G=2.0, pnorm=0.5, lambda_hat=None, field=field,
                          iterations=10, residual=0.0)
            for eps in (0.1, 0.01, 0.001)
        ])
        lines = report_csv(report).splitlines()
        self.assertEqual(lines[0], ','.join(CSV_HEADER))
        self.assertEqual(lines[0], 'eps,F,G,pnorm,lambda_hat')
        self.assertEqual(lines[1], '0.1,1,2,0.5,')
        self.assertEqual(len(lines), 4)

    def test_pgm(self):
        tmpl = rasterize(catalog.DISK, BoundaryData.constant(1.0), 16).template
        X, _ = tmpl.centers()
        data = pgm_bytes(tmpl.with_values(X))
        header = b'P5\n16 16\n255\n'
        self.assertTrue(data.startswith(header))
        self.assertEqual(len(data), len(header) + 256)
        pixels = np.frombuffer(data[len(header):], dtype=np.uint8)
        self.assertEqual(pixels.max(), 255)

    def test_field_dump(self):
        tmpl = rasterize(catalog.DISK, BoundaryData.constant(1.0), 16).template
        X, Y = tmpl.centers()
        field = tmpl.with_values(X * Y)
        write_field_dump(self.dir, 'u_00', field)
        sidecar = json.loads((self.dir / 'u_00.json').read_text())
        self.assertEqual(sidecar['values_file'], 'u_00.f64')
        back = read_field_dump(self.dir / 'u_00.json')
        np.testing.assert_array_equal(back.values, field.values)
        np.testing.assert_array_equal(back.mask, field.mask)
        self.assertEqual(back.spacing, field.spacing)
