import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import assume, given, settings as hsettings, strategies as st

from leastgrad.exceptions import (
    CrossingChords, DegenerateArrangement, InvalidChord, NonConvexDomain, OnSkeleton, OutsideDomain,
)
from leastgrad.geometry import (
    TAU, Chord, ConvexDomain, arc_length, build_arrangement, check_face_count, chord_length, chords_cross,
    chords_interleave, locate, locate_many,
)

DISK = ConvexDomain.unit_disk()
SQUARE = ConvexDomain.polygon([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def inscribed_square_chords():
    corners = [math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4]
    return [Chord.between(s, t) for s, t in zip(corners, corners[1:] + corners[:1])]


def circular_gap(s, t):
    d = abs(s - t) % TAU
    return min(d, TAU - d)


class ConvexDomainTests(SimpleTestCase):

    def test_rejects_reflex_vertex(self):
        with self.assertRaises(NonConvexDomain) as cm:
            ConvexDomain.polygon([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        self.assertTrue(str(cm.exception).startswith('domain must be convex'))

    def test_rejects_clockwise_polygon(self):
        with self.assertRaises(NonConvexDomain):
            ConvexDomain.polygon([[-1.0, 1.0], [1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]])

    def test_square_parameterization(self):
        self.assertAlmostEqual(SQUARE.period, 8.0)
        self.assertAlmostEqual(SQUARE.area, 4.0)
        x, y = SQUARE.point(1.0)
        self.assertAlmostEqual(x, 0.0)
        self.assertAlmostEqual(y, -1.0)
        self.assertAlmostEqual(SQUARE.project(0.0, -0.9), 1.0)
        nx, ny = SQUARE.outward_normal(1.0)
        self.assertAlmostEqual(nx, 0.0)
        self.assertAlmostEqual(ny, -1.0)

    def test_disk_point_wraps(self):
        x, y = DISK.point(TAU + math.pi / 2)
        self.assertAlmostEqual(x, 0.0)
        self.assertAlmostEqual(y, 1.0)
        self.assertEqual(DISK.normalize(TAU - 1e-14), 0.0)

    def test_arc_length(self):
        self.assertAlmostEqual(arc_length(DISK, 0.0, math.pi), math.pi)
        self.assertAlmostEqual(arc_length(DISK, math.pi / 2, math.pi / 6), 5 * math.pi / 3)
        self.assertEqual(arc_length(DISK, 1.3, 1.3), 0.0)
        self.assertAlmostEqual(arc_length(SQUARE, 7.0, 1.0), 2.0)

    def test_chord_length(self):
        self.assertAlmostEqual(chord_length(DISK, 0.0, math.pi), 2.0)
        self.assertAlmostEqual(chord_length(DISK, math.pi / 2, 7 * math.pi / 6), math.sqrt(3.0))
        self.assertAlmostEqual(chord_length(SQUARE, 1.0, 5.0), 2.0)


class ChordTests(SimpleTestCase):

    def test_endpoints_must_be_ordered(self):
        with self.assertRaises(InvalidChord):
            Chord(1.0, 0.5)

    def test_zero_length_chord(self):
        with self.assertRaises(InvalidChord):
            Chord.between(0.3, 0.3 + TAU)

    def test_between_sorts_endpoints(self):
        self.assertEqual(Chord.between(2.0, 1.0), Chord(1.0, 2.0))

    def test_interleave(self):
        self.assertTrue(chords_interleave(Chord(0.0, 2.0), Chord(1.0, 3.0)))
        self.assertFalse(chords_interleave(Chord(0.0, 1.0), Chord(2.0, 3.0)))
        self.assertFalse(chords_interleave(Chord(0.0, 3.0), Chord(1.0, 2.0)))

    def test_shared_endpoint_touches_but_does_not_interleave(self):
        c1, c2 = Chord(0.0, 1.0), Chord(1.0, 2.0)
        self.assertFalse(chords_interleave(c1, c2))
        self.assertTrue(chords_cross(c1, c2))

    @hsettings(max_examples=200, deadline=None)
    @given(
        ends=st.lists(st.floats(min_value=0.0, max_value=TAU, exclude_max=True), min_size=4, max_size=4),
        turn=st.floats(min_value=-2 * TAU, max_value=2 * TAU),
    )
    def test_cross_is_symmetric_and_rotation_invariant(self, ends, turn):
        for i in range(4):
            for j in range(i + 1, 4):
                assume(circular_gap(ends[i], ends[j]) > 1e-6)
        a, b, c, d = ends
        c1, c2 = Chord.between(a, b), Chord.between(c, d)
        r1, r2 = Chord.between(a + turn, b + turn), Chord.between(c + turn, d + turn)
        self.assertEqual(chords_cross(c1, c2), chords_cross(c2, c1))
        self.assertEqual(chords_cross(c1, c2), chords_cross(r1, r2))
        self.assertEqual(chords_cross(r1, r2), chords_cross(r2, r1))

    def test_shared_endpoint_survives_rotation(self):
        for turn in (0.0, 1.0, math.pi, 5.5):
            c1 = Chord.between(7 * math.pi / 4 + turn, math.pi / 4 + turn)
            c2 = Chord.between(math.pi / 4 + turn, 3 * math.pi / 4 + turn)
            self.assertTrue(chords_cross(c1, c2))
            self.assertTrue(chords_cross(c2, c1))
            self.assertFalse(chords_interleave(c1, c2))


class ArrangementTests(SimpleTestCase):

    @hsettings(max_examples=60, deadline=None)
    @given(
        start=st.floats(min_value=0.0, max_value=TAU, exclude_max=True),
        delta=st.floats(min_value=0.1, max_value=TAU - 0.1),
    )
    def test_single_chord_face_areas(self, start, delta):
        arr = build_arrangement(DISK, [Chord.between(start, start + delta)])
        self.assertEqual(len(arr.faces), 2)
        segment = 0.5 * (delta - math.sin(delta))
        expected = sorted([segment, math.pi - segment])
        for got, want in zip(sorted(f.area for f in arr.faces), expected):
            self.assertAlmostEqual(got, want, places=9)
        self.assertAlmostEqual(arr.total_area, math.pi, places=9)

    def test_parallel_chords(self):
        top = Chord(math.pi / 6, 5 * math.pi / 6)
        bottom = Chord(7 * math.pi / 6, 11 * math.pi / 6)
        arr = build_arrangement(DISK, [top, bottom])
        self.assertEqual(len(arr.faces), 3)
        self.assertEqual(len(arr.adjacency), 2)
        middle = locate(arr, (0.0, 0.0))
        self.assertNotEqual(locate(arr, (0.0, 0.9)), middle)
        self.assertNotEqual(locate(arr, (0.0, -0.9)), middle)
        self.assertAlmostEqual(arr.face(middle).boundary_contact, 2 * math.pi / 3)

    def test_locate_errors(self):
        arr = build_arrangement(DISK, [Chord(math.pi / 6, 5 * math.pi / 6)])
        with self.assertRaises(OnSkeleton):
            locate(arr, (0.0, 0.5))
        with self.assertRaises(OutsideDomain):
            locate(arr, (1.0, 1.0))

    def test_crossing_chords(self):
        chords = [Chord(0.0, math.pi), Chord(math.pi / 2, 3 * math.pi / 2)]
        with self.assertRaises(CrossingChords):
            build_arrangement(DISK, chords)
        arr = build_arrangement(DISK, chords, allow_crossings=True)
        self.assertEqual(len(arr.faces), 4)
        for face in arr.faces:
            self.assertAlmostEqual(face.area, math.pi / 4)

    def test_shared_endpoints_need_permission(self):
        chords = [Chord(math.pi / 2, 7 * math.pi / 6), Chord(math.pi / 2, 11 * math.pi / 6)]
        with self.assertRaises(CrossingChords):
            build_arrangement(DISK, chords)
        arr = build_arrangement(DISK, chords, allow_shared_endpoints=True)
        self.assertEqual(len(arr.faces), 3)

    def test_polygon_arrangement(self):
        arr = build_arrangement(SQUARE, [Chord(1.0, 5.0)])
        self.assertEqual(len(arr.faces), 2)
        for face in arr.faces:
            self.assertAlmostEqual(face.area, 2.0)

    def test_locate_many_agrees_with_locate(self):
        arr = build_arrangement(DISK, [Chord(math.pi / 6, 5 * math.pi / 6), Chord(7 * math.pi / 6, 11 * math.pi / 6)])
        rng = np.random.default_rng(7)
        r = 0.98 * np.sqrt(rng.random(200))
        a = TAU * rng.random(200)
        xs, ys = r * np.cos(a), r * np.sin(a)
        keep = np.abs(np.abs(ys) - 0.5) > 1e-6
        ids = locate_many(arr, xs[keep], ys[keep])
        for x, y, face_id in zip(xs[keep], ys[keep], ids):
            self.assertEqual(locate(arr, (x, y)), face_id)

    def test_inscribed_square(self):
        with self.assertRaises(CrossingChords):
            build_arrangement(DISK, inscribed_square_chords())
        arr = build_arrangement(DISK, inscribed_square_chords(), allow_shared_endpoints=True)
        self.assertEqual(len(arr.faces), 5)
        self.assertAlmostEqual(arr.total_area, math.pi, places=9)
        centre = locate(arr, (0.0, 0.0))
        self.assertAlmostEqual(arr.face(centre).area, 2.0, places=9)
        self.assertEqual(arr.face(centre).boundary_contact, 0.0)
        right = locate(arr, (0.9, 0.0))
        self.assertNotEqual(right, centre)
        self.assertAlmostEqual(arr.face(right).area, 0.5 * (math.pi / 2 - 1.0), places=9)
        self.assertAlmostEqual(arr.face(right).boundary_contact, math.pi / 2)
        with self.assertRaises(OutsideDomain):
            locate(arr, (2.0, 0.0))

    def test_random_points_land_in_exactly_one_face(self):
        arrangements = [
            build_arrangement(DISK, inscribed_square_chords(), allow_shared_endpoints=True),
            build_arrangement(DISK, [Chord(math.pi / 2, 7 * math.pi / 6), Chord(math.pi / 2, 11 * math.pi / 6)],
                              allow_shared_endpoints=True),
            build_arrangement(DISK, [Chord(0.3, 2.5), Chord(1.0, 4.0), Chord(3.5, 5.9)], allow_crossings=True),
        ]
        rng = np.random.default_rng(11)
        for arr in arrangements:
            r = 0.999 * np.sqrt(rng.random(1000))
            a = TAU * rng.random(1000)
            for x, y in zip(r * np.cos(a), r * np.sin(a)):
                try:
                    face_id = locate(arr, (x, y))
                except OnSkeleton:
                    continue
                holders = [
                    face.id for face in arr.faces
                    if all((e.end[0] - e.start[0]) * (y - e.start[1]) - (e.end[1] - e.start[1]) * (x - e.start[0]) > 0.0
                           for e in face.chord_edges)
                ]
                self.assertEqual(holders, [face_id])

    def test_concurrent_diagonals(self):
        diagonals = [Chord(0.0, math.pi), Chord(math.pi / 3, 4 * math.pi / 3), Chord(2 * math.pi / 3, 5 * math.pi / 3)]
        arr = build_arrangement(DISK, diagonals, allow_crossings=True)
        self.assertEqual(len(arr.faces), 6)
        for face in arr.faces:
            self.assertAlmostEqual(face.area, math.pi / 6, places=9)

    def test_face_count_check(self):
        check_face_count(5, 4, [])
        check_face_count(4, 2, [2])
        check_face_count(6, 3, [3])
        with self.assertRaises(DegenerateArrangement):
            check_face_count(5, 3, [3])
        with self.assertRaises(DegenerateArrangement):
            check_face_count(3, 2, [2])
