import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import DataFileError, DegenerateDensityError, IncompatibleGridError, ParameterError

from .csvio import read_grid, write_grid
from .models import Grid2D, GridSpec
from .quadrature import complement_mask, integrate, integrate_masked, normalize, pointwise_max

UNIT = GridSpec(0.0, 0.0, 0.1, 0.1, 10, 10)


def gaussian_grid(nx=256):
    spec = GridSpec.from_extents(-6.0, 6.0, -6.0, 6.0, nx)
    x, y = spec.mesh()
    return Grid2D(spec, np.exp(-(x ** 2 + y ** 2) / 2) / (2 * np.pi))


class GridSpecTests(SimpleTestCase):

    def test_rejects_nonpositive_spacing(self):
        with self.assertRaises(ParameterError):
            GridSpec(0, 0, 0.0, 0.1, 4, 4)
        with self.assertRaises(ParameterError):
            GridSpec(0, 0, 0.1, -0.1, 4, 4)

    def test_rejects_empty_counts(self):
        with self.assertRaises(ParameterError):
            GridSpec(0, 0, 0.1, 0.1, 0, 4)

    def test_parse_round_trips_str(self):
        spec = GridSpec(-2.0, -1.75, 0.5, 0.25, 10, 16)
        self.assertEqual(GridSpec.parse(str(spec)), spec)

    def test_parse_reports_parameter(self):
        with self.assertRaises(ParameterError) as ctx:
            GridSpec.parse('1,2,3')
        self.assertEqual(ctx.exception.parameter, 'grid')

    def test_cell_index_marks_outside_points(self):
        ix, iy = UNIT.cell_index([[0.05, 0.95], [1.5, 0.5]])
        self.assertEqual((ix[0], iy[0]), (0, 9))
        self.assertEqual((ix[1], iy[1]), (-1, -1))


class Grid2DTests(SimpleTestCase):

    def test_values_are_read_only(self):
        g = Grid2D.constant(UNIT, 1.0)
        with self.assertRaises(ValueError):
            g.values[0, 0] = 5.0

    def test_rejects_negative_values(self):
        with self.assertRaises(ParameterError):
            Grid2D(UNIT, -np.ones(UNIT.shape))

    def test_rejects_wrong_shape(self):
        with self.assertRaises(ParameterError):
            Grid2D(UNIT, np.ones((3, 3)))


class IntegrateTests(SimpleTestCase):

    def test_constant_over_unit_square(self):
        self.assertAlmostEqual(integrate(Grid2D.constant(UNIT, 1.0)), 1.0, places=12)

    def test_zero_grid(self):
        self.assertEqual(integrate(Grid2D.zeros(UNIT)), 0.0)

    def test_standard_gaussian(self):
        self.assertAlmostEqual(integrate(gaussian_grid()), 1.0, delta=1e-6)

    def test_linearity(self):
        rng = np.random.default_rng(3)
        g1 = Grid2D(UNIT, rng.random(UNIT.shape))
        g2 = Grid2D(UNIT, rng.random(UNIT.shape))
        combined = Grid2D(UNIT, 2.5 * g1.values + 0.75 * g2.values)
        expected = 2.5 * integrate(g1) + 0.75 * integrate(g2)
        self.assertAlmostEqual(integrate(combined) / expected, 1.0, delta=1e-12)


class IntegrateMaskedTests(SimpleTestCase):

    def setUp(self):
        self.g = Grid2D(UNIT, np.random.default_rng(0).random(UNIT.shape))

    def test_full_mask_equals_integrate(self):
        self.assertAlmostEqual(integrate_masked(self.g, Grid2D.constant(UNIT, 1.0)), integrate(self.g), places=12)

    def test_empty_mask(self):
        self.assertEqual(integrate_masked(self.g, Grid2D.zeros(UNIT)), 0.0)

    def test_left_half_of_uniform(self):
        x, _ = UNIT.mesh()
        mask = Grid2D(UNIT, (x < 0.5).astype(float))
        self.assertAlmostEqual(integrate_masked(Grid2D.constant(UNIT, 1.0), mask), 0.5, delta=1e-9)

    def test_mask_and_complement_partition_mass(self):
        mask = Grid2D(UNIT, (np.random.default_rng(1).random(UNIT.shape) > 0.5).astype(float))
        total = integrate_masked(self.g, mask) + integrate_masked(self.g, complement_mask(mask))
        self.assertAlmostEqual(total / integrate(self.g), 1.0, delta=1e-12)

    def test_spec_mismatch(self):
        other = GridSpec(0.0, 0.0, 0.1, 0.1, 10, 11)
        with self.assertRaises(IncompatibleGridError):
            integrate_masked(self.g, Grid2D.constant(other, 1.0))

    def test_non_binary_mask(self):
        with self.assertRaises(ParameterError):
            integrate_masked(self.g, Grid2D.constant(UNIT, 0.5))


class NormalizeTests(SimpleTestCase):

    def test_constant_two_becomes_one(self):
        np.testing.assert_allclose(normalize(Grid2D.constant(UNIT, 2.0)).values, 1.0, rtol=1e-12)

    def test_idempotent(self):
        once = normalize(Grid2D(UNIT, np.random.default_rng(2).random(UNIT.shape)))
        np.testing.assert_allclose(normalize(once).values, once.values, rtol=1e-12)

    def test_random_grid_has_unit_mass(self):
        spec = GridSpec(0.0, 0.0, 0.03, 0.05, 32, 32)
        g = normalize(Grid2D(spec, np.random.default_rng(4).random(spec.shape)))
        self.assertAlmostEqual(integrate(g), 1.0, delta=1e-12)

    def test_zero_mass_is_degenerate(self):
        with self.assertRaises(DegenerateDensityError):
            normalize(Grid2D.zeros(UNIT))


class PointwiseMaxTests(SimpleTestCase):

    def test_single_grid(self):
        g = Grid2D(UNIT, np.random.default_rng(5).random(UNIT.shape))
        np.testing.assert_array_equal(pointwise_max([g]).values, g.values)

    def test_idempotent(self):
        g = Grid2D(UNIT, np.random.default_rng(6).random(UNIT.shape))
        np.testing.assert_array_equal(pointwise_max([g, g]).values, g.values)

    def test_constants(self):
        result = pointwise_max([Grid2D.constant(UNIT, 0.3), Grid2D.constant(UNIT, 0.7)])
        np.testing.assert_array_equal(result.values, 0.7)

    def test_empty_list(self):
        with self.assertRaises(ParameterError):
            pointwise_max([])

    def test_spec_mismatch(self):
        other = GridSpec(0.1, 0.0, 0.1, 0.1, 10, 10)
        with self.assertRaises(IncompatibleGridError):
            pointwise_max([Grid2D.zeros(UNIT), Grid2D.zeros(other)])


class GridFileTests(SimpleTestCase):

    def test_write_then_read_keeps_layout(self):
        spec = GridSpec(-1.0, 0.5, 0.25, 0.125, 3, 2)
        g = Grid2D(spec, np.arange(6, dtype=float).reshape(3, 2))
        with tempfile.TemporaryDirectory() as tmp:
            path = write_grid(g, Path(tmp) / 'g.csv', provenance='# robust-bound 0.1.0, command=test')
            lines = path.read_text().splitlines()
            # Rows run over y: the first data row is iy = 0.
            self.assertEqual(lines[2], '0,2,4')
            loaded = read_grid(path)
        self.assertEqual(loaded.spec, spec)
        np.testing.assert_array_equal(loaded.values, g.values)

    def test_missing_header(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bad.csv'
            path.write_text('1,2\n3,4\n')
            with self.assertRaises(DataFileError):
                read_grid(path)

    def test_not_utf8(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'latin.csv'
            path.write_bytes(b'# 0,0,1,1,2,1\n\xff\xfe,1\n')
            with self.assertRaises(DataFileError) as ctx:
                read_grid(path)
        self.assertIn('UTF-8', str(ctx.exception))
