import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_array_equal

from core.exceptions import InputError
from core.utils.dynsys import Trajectory, coupled_cell_fixture
from core.utils.file_io import (
    load_fixture,
    load_system,
    load_trajectory,
    parse_entry,
    parse_matrix,
    parse_vector,
    read_manifest,
    save_system,
    save_trajectory,
    write_manifest,
)


class FixtureTests(SimpleTestCase):
    def test_fixtures_are_exact(self):
        expected = {
            'nonlocalizable_left': [['3/5', '-1/2', 0], ['-1/2', '-3/5', 0], [-1, '1/2', '-1/2']],
            'nonlocalizable_middle': [['1/2', '-2/5', '2/5'], ['-2/5', '-1/2', 0], ['2/5', 0, '-1/2']],
            'perturbed_middle': [['1/2', '-2/5', '2/5'], ['-2/5', '-2/5', 0], ['2/5', 0, '-1/2']],
            'nonlocalizable_right': [[1, 1, 2], [-1, '-1/3', -1], [-1, '-5/6', '-3/2']],
        }
        for name, rows in expected.items():
            with self.subTest(name=name):
                A = load_fixture(name).A
                exact = np.array([[float(Fraction(str(v))) for v in row] for row in rows])
                assert_array_equal(A, exact)

    def test_unknown_fixture(self):
        with self.assertRaises(InputError):
            load_fixture('missing_fixture')


class ParsingTests(SimpleTestCase):
    def test_entries(self):
        self.assertEqual(parse_entry('-5/6'), float(Fraction(-5, 6)))
        self.assertEqual(parse_entry(2), 2.0)
        for bad in ('1/0', 'x', True, None):
            with self.assertRaises(InputError):
                parse_entry(bad)

    def test_matrix_shape(self):
        with self.assertRaises(InputError):
            parse_matrix([[1, 2], [3]])
        with self.assertRaises(InputError):
            parse_matrix([[1, 2], [3, 4]], n=3)
        with self.assertRaises(InputError):
            parse_matrix('[[1]]')

    def test_vector(self):
        assert_array_equal(parse_vector('1, -1/2,0.25'), [1.0, -0.5, 0.25])
        with self.assertRaises(InputError):
            parse_vector('1,a')


class RoundTripTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_trajectory_csv_keeps_full_precision(self):
        states = np.array([[1 / 3, -2e-17], [np.pi, 1e300]])
        path = save_trajectory(Trajectory(states), self.dir / 'traj.csv')
        self.assertEqual(path.read_text().splitlines()[0], 'k,x1,x2')
        assert_array_equal(load_trajectory(path).states, states)

    def test_coupled_system_file(self):
        cells = coupled_cell_fixture(seed=3)
        loaded = load_system(save_system(cells, self.dir / 'coupled.json'))
        assert_array_equal(loaded.alpha, cells.alpha)
        self.assertEqual(loaded.epsilon, 0.1)

    def test_malformed_trajectory(self):
        path = self.dir / 'bad.csv'
        path.write_text('t,x1\n0,1\n')
        with self.assertRaises(InputError):
            load_trajectory(path)
        path.write_text('k,x1\n0,1,2\n')
        with self.assertRaises(InputError):
            load_trajectory(path)

    def test_manifest_sidecar(self):
        output = self.dir / 'out.json'
        written = write_manifest({'command': 'generate', 'seed': 7}, output)
        self.assertEqual(written.name, 'out.json.manifest.yaml')
        self.assertEqual(read_manifest(output), {'command': 'generate', 'seed': 7})
