import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, tag

from bayes.analysis import bayes_error
from core.exceptions import DataFileError, IncompatibleGridError, MassLeakError, ParameterError
from grid.models import Grid2D, GridSpec
from grid.quadrature import integrate

from .builders import make_gaussian_mixture, make_uniform_patches, overlapping_squares, rasterize
from .calibration import EXHAUSTIVE, calibrate_moons, sigma_lattice
from .kde import AUTO, bw_scott, kde_fit
from .models import LabeledDensity, MoonsParams, SampleSet
from .moons import default_spec, eval_moons, moons_convolved_point, moons_density, sample_moons
from .samples import read_samples, sample_density, write_samples
from .storage import load_density, save_density

UNIT = GridSpec(0.0, 0.0, 0.1, 0.1, 10, 10)
WIDE = GridSpec.from_extents(-6.0, 6.0, -6.0, 6.0, 256)


class LabeledDensityTests(SimpleTestCase):

    def test_rejects_single_class(self):
        with self.assertRaises(ParameterError):
            LabeledDensity([1.0], (Grid2D.constant(UNIT, 1.0),))

    def test_rejects_priors_not_summing_to_one(self):
        cond = Grid2D.constant(UNIT, 1.0)
        with self.assertRaises(ParameterError):
            LabeledDensity([0.6, 0.6], (cond, cond))

    def test_rejects_unnormalized_conditional(self):
        with self.assertRaises(ParameterError):
            LabeledDensity([0.5, 0.5], (Grid2D.constant(UNIT, 1.0), Grid2D.constant(UNIT, 2.0)))

    def test_rejects_mixed_grids(self):
        other = GridSpec(0.0, 0.0, 0.2, 0.2, 5, 5)
        with self.assertRaises(IncompatibleGridError):
            LabeledDensity([0.5, 0.5], (Grid2D.constant(UNIT, 1.0), Grid2D.constant(other, 1.0)))

    def test_empty_class_allowed_with_zero_prior(self):
        d = LabeledDensity([1.0, 0.0], (Grid2D.constant(UNIT, 1.0), Grid2D.zeros(UNIT)))
        self.assertEqual(d.num_classes, 2)

    def test_from_joints_recovers_priors(self):
        joints = np.stack([np.full(UNIT.shape, 0.25), np.full(UNIT.shape, 0.75)])
        d = LabeledDensity.from_joints(joints, UNIT)
        np.testing.assert_allclose(d.priors, [0.25, 0.75], atol=1e-12)
        np.testing.assert_allclose(d.evidence().values, 1.0, atol=1e-12)

    def test_permuted_swaps_classes(self):
        d = overlapping_squares(priors=(0.3, 0.7))
        swapped = d.permuted([1, 0])
        np.testing.assert_allclose(swapped.priors, [0.7, 0.3])
        np.testing.assert_array_equal(swapped.conditionals[0].values, d.conditionals[1].values)


class SampleSetTests(SimpleTestCase):

    def test_rejects_length_mismatch(self):
        with self.assertRaises(ParameterError):
            SampleSet([[0, 0], [1, 1]], [0])

    def test_rejects_negative_labels(self):
        with self.assertRaises(ParameterError):
            SampleSet([[0, 0]], [-1])

    def test_counts_and_head(self):
        s = SampleSet([[0, 0], [1, 1], [2, 2], [3, 3]], [0, 1, 1, 2])
        np.testing.assert_array_equal(s.counts(), [1, 2, 1])
        self.assertEqual(len(s.head(2)), 2)
        self.assertEqual(s.num_classes, 3)


class MoonsTests(SimpleTestCase):

    def test_upper_moon_is_symmetric(self):
        params = MoonsParams(sigma=0.2)
        x = np.array([0.3, 0.9, 1.4, 0.05])
        y = np.array([0.8, -0.2, 0.4, 1.1])
        np.testing.assert_allclose(eval_moons(0, x, y, params), eval_moons(0, -x, y, params), rtol=1e-10)

    def test_lower_moon_is_the_upper_moon_rotated(self):
        params = MoonsParams(sigma=0.2)
        # (x1, x2) -> (1 - x1, 0.5 - x2) maps the upper arc onto the lower one.
        self.assertAlmostEqual(eval_moons(1, 1 - 0.4, 0.5 - 0.7, params), eval_moons(0, 0.4, 0.7, params), places=12)

    def test_far_from_the_arc_is_negligible(self):
        self.assertLess(eval_moons(0, 0.0, 0.0, MoonsParams(sigma=0.05)), 1e-80)

    def test_past_the_arc_ends_at_the_smallest_sigma(self):
        # Domain corners lie past the arc ends, where the integrand is a steep one-sided tail.
        for sigma in (0.10, 0.12):
            value = eval_moons(0, -2.0, -1.75, MoonsParams(sigma))
            self.assertGreaterEqual(value, 0.0)
            self.assertLess(value, 1e-50)

    def test_smallest_calibration_sigma_rasterizes(self):
        d = moons_density(MoonsParams(0.10), default_spec(64))
        for cond in d.conditionals:
            self.assertAlmostEqual(integrate(cond), 1.0, delta=1e-9)

    def test_nonnegative(self):
        params = MoonsParams(sigma=0.15)
        x1, x2 = default_spec(32).mesh()
        self.assertGreaterEqual(eval_moons(1, x1, x2, params).min(), 0.0)

    def test_scalar_in_scalar_out(self):
        self.assertIsInstance(eval_moons(0, 0.0, 1.0, MoonsParams(sigma=0.2)), float)

    def test_unknown_class(self):
        with self.assertRaises(ParameterError):
            eval_moons(2, 0.0, 0.0, MoonsParams(sigma=0.2))

    def test_params_validation(self):
        with self.assertRaises(ParameterError):
            MoonsParams(sigma=0.0)
        with self.assertRaises(ParameterError):
            MoonsParams(sigma=0.2, quadrature_points=8)
        with self.assertRaises(ParameterError):
            MoonsParams(sigma=0.2, atol=-1.0)

    def test_convolved_point_tends_to_the_density(self):
        params = MoonsParams(sigma=0.2)
        for k, (x1, x2) in ((0, (0.1, 0.95)), (1, (1.2, -0.3))):
            exact = eval_moons(k, x1, x2, params)
            self.assertAlmostEqual(moons_convolved_point(k, x1, x2, params, 1e-4) / exact, 1.0, delta=1e-3)

    def test_convolved_point_takes_per_axis_half_widths(self):
        params = MoonsParams(sigma=0.2)
        self.assertEqual(
            moons_convolved_point(1, 0.7, -0.2, params, (0.1, 0.1)),
            moons_convolved_point(1, 0.7, -0.2, params, 0.1),
        )
        with self.assertRaises(ParameterError):
            moons_convolved_point(1, 0.7, -0.2, params, (0.1, 0.0))

    def test_convolved_point_is_symmetric(self):
        params = MoonsParams(sigma=0.2)
        self.assertAlmostEqual(
            moons_convolved_point(0, 0.4, 0.6, params, 0.1),
            moons_convolved_point(0, -0.4, 0.6, params, 0.1),
            places=10,
        )

    def test_sampling_is_reproducible(self):
        params = MoonsParams(sigma=0.2)
        a = sample_moons(500, params, np.random.default_rng(4))
        b = sample_moons(500, params, np.random.default_rng(4))
        np.testing.assert_array_equal(a.points, b.points)
        np.testing.assert_array_equal(a.labels, b.labels)
        self.assertEqual(set(a.labels.tolist()), {0, 1})

    def test_coarse_density_is_valid(self):
        d = moons_density(MoonsParams(sigma=0.2), default_spec(128))
        for cond in d.conditionals:
            self.assertAlmostEqual(integrate(cond), 1.0, places=9)

    def test_tight_domain_leaks(self):
        with self.assertRaises(MassLeakError):
            moons_density(MoonsParams(sigma=0.3), GridSpec.from_extents(-1.0, 1.0, 0.0, 1.0, 64))

    @tag('slow')
    def test_rasterized_mass_at_full_resolution(self):
        params = MoonsParams(sigma=0.25)
        spec = default_spec(512)
        for k in (0, 1):
            raw = rasterize(lambda x1, x2: eval_moons(k, x1, x2, params), spec)
            self.assertAlmostEqual(integrate(raw), 1.0, delta=1e-3)


class BuilderTests(SimpleTestCase):

    def test_rasterize_constant(self):
        g = rasterize(lambda x1, x2: 1.0, UNIT)
        np.testing.assert_array_equal(g.values, np.ones(UNIT.shape))

    def test_rasterize_gaussian_mass(self):
        g = rasterize(lambda x1, x2: np.exp(-(x1 ** 2 + x2 ** 2) / 2) / (2 * np.pi), WIDE)
        self.assertAlmostEqual(integrate(g), 1.0, delta=1e-6)

    def test_two_gaussians(self):
        d = make_gaussian_mixture((0.5, 0.5), ((-1.0, 0.0), (1.0, 0.0)), (1.0, 1.0), WIDE)
        for cond in d.conditionals:
            self.assertAlmostEqual(integrate(cond), 1.0, delta=1e-9)

    def test_single_class_mixture_rejected(self):
        with self.assertRaises(ParameterError):
            make_gaussian_mixture((1.0,), ((0.0, 0.0),), (1.0,), WIDE)

    def test_nonpositive_sigma_rejected(self):
        with self.assertRaises(ParameterError):
            make_gaussian_mixture((0.5, 0.5), ((0.0, 0.0), (1.0, 0.0)), (1.0, 0.0), WIDE)

    def test_squares_are_normalized(self):
        for cond in overlapping_squares().conditionals:
            self.assertAlmostEqual(integrate(cond), 1.0, delta=1e-9)

    def test_rectangle_outside_domain_rejected(self):
        with self.assertRaises(ParameterError):
            make_uniform_patches((0.5, 0.5), ((0.0, 0.0, 0.5, 0.5), (0.5, 0.5, 1.5, 1.5)), UNIT)


class KdeTests(SimpleTestCase):

    def test_single_point_gives_its_gaussian(self):
        samples = SampleSet([[0.5, -0.5], [3.0, 3.0]], [0, 1])
        d = kde_fit(samples, 0.7, WIDE)
        x1, x2 = WIDE.mesh()
        expected = np.exp(-((x1 - 0.5) ** 2 + (x2 + 0.5) ** 2) / (2 * 0.49)) / (2 * np.pi * 0.49)
        self.assertAlmostEqual(integrate(d.conditionals[0]), 1.0, delta=1e-4)
        np.testing.assert_allclose(d.conditionals[0].values, expected, rtol=1e-6, atol=1e-12)

    def test_priors_are_class_frequencies(self):
        samples = SampleSet([[0, 0], [0.5, 0], [0, 0.5], [2, 2]], [0, 0, 0, 1])
        d = kde_fit(samples, 0.5, WIDE)
        np.testing.assert_allclose(d.priors, [0.75, 0.25])

    def test_empty_class_is_named(self):
        samples = SampleSet([[0, 0], [1, 1]], [0, 2])
        with self.assertRaises(ParameterError) as ctx:
            kde_fit(samples, 0.5, WIDE)
        self.assertIn('class 1', str(ctx.exception))

    def test_bandwidth_must_be_positive(self):
        samples = SampleSet([[0, 0], [1, 1]], [0, 1])
        with self.assertRaises(ParameterError):
            kde_fit(samples, -0.1, WIDE)

    def test_auto_bandwidth_needs_two_points(self):
        samples = SampleSet([[0, 0], [1, 1], [1.5, 1]], [0, 1, 1])
        with self.assertRaises(ParameterError):
            kde_fit(samples, AUTO, WIDE)

    def test_scott_rule(self):
        points = np.random.default_rng(1).normal(0.0, 2.0, size=(4096, 2))
        self.assertAlmostEqual(bw_scott(points), 4096 ** (-1 / 6) * 2.0, delta=0.05)

    def test_mass_is_kept_for_any_bandwidth(self):
        samples = sample_moons(300, MoonsParams(sigma=0.15), np.random.default_rng(8))
        for bandwidth in (0.05, 0.2, AUTO):
            d = kde_fit(samples, bandwidth, default_spec(128))
            for cond in d.conditionals:
                self.assertAlmostEqual(integrate(cond), 1.0, delta=1e-4)

    @tag('slow')
    def test_fit_tracks_the_analytic_bayes_error(self):
        params = MoonsParams(sigma=0.3)
        spec = default_spec(256)
        samples = sample_moons(10_000, params, np.random.default_rng(2023))
        fit = kde_fit(samples, AUTO, spec)
        h = np.mean([bw_scott(samples.class_points(k)) for k in (0, 1)])
        # A Gaussian KDE of Moons at sigma is, in expectation, Moons at sqrt(sigma^2 + h^2).
        smoothed = bayes_error(moons_density(MoonsParams(sigma=math.hypot(params.sigma, h)), spec))
        analytic = bayes_error(moons_density(params, spec))
        self.assertAlmostEqual(bayes_error(fit), smoothed, delta=0.01)
        self.assertGreater(smoothed, analytic)
        self.assertAlmostEqual(bayes_error(fit), analytic, delta=0.025)


class SampleFileTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_written_samples_read_back(self):
        s = SampleSet([[0.1, -2.5], [1e-17, 3.0]], [1, 0])
        path = write_samples(s, self.dir / 's.csv', '# robust-bound test')
        back = read_samples(path)
        np.testing.assert_array_equal(back.points, s.points)
        np.testing.assert_array_equal(back.labels, s.labels)

    def test_missing_header(self):
        path = self.dir / 'bad.csv'
        path.write_text('1,2,0\n')
        with self.assertRaises(DataFileError):
            read_samples(path)

    def test_malformed_row(self):
        path = self.dir / 'bad.csv'
        path.write_text('x1,x2,label\n1,2,zero\n')
        with self.assertRaises(DataFileError):
            read_samples(path)

    def test_missing_file(self):
        with self.assertRaises(DataFileError):
            read_samples(self.dir / 'nope.csv')

    def test_not_utf8(self):
        path = self.dir / 'latin.csv'
        path.write_bytes(b'x1,x2,label\n\xff\xfe,0,1\n')
        with self.assertRaises(DataFileError) as ctx:
            read_samples(path)
        self.assertIn('UTF-8', str(ctx.exception))

    def test_sample_density_stays_in_class_support(self):
        d = overlapping_squares()
        s = sample_density(d, 2000, np.random.default_rng(0))
        zero, one = s.class_points(0), s.class_points(1)
        self.assertTrue(np.all((zero >= -1e-9) & (zero <= 1 + 1e-9)))
        self.assertTrue(np.all((one[:, 0] >= 0.5 - 1e-9) & (one[:, 0] <= 1.5 + 1e-9)))
        self.assertAlmostEqual(len(zero) / len(s), 0.5, delta=0.05)


class StorageTests(SimpleTestCase):

    def test_saved_density_loads_identically(self):
        d = overlapping_squares(priors=(0.25, 0.75))
        with tempfile.TemporaryDirectory() as tmp:
            save_density(d, Path(tmp) / 'd', '# robust-bound test')
            back = load_density(Path(tmp) / 'd')
        np.testing.assert_array_equal(back.priors, d.priors)
        for a, b in zip(back.conditionals, d.conditionals):
            self.assertEqual(a.spec, b.spec)
            np.testing.assert_array_equal(a.values, b.values)

    def test_missing_directory(self):
        with self.assertRaises(DataFileError):
            load_density('/nonexistent/robust-bound/density')

    def test_priors_not_utf8(self):
        with tempfile.TemporaryDirectory() as tmp:
            save_density(overlapping_squares(), Path(tmp) / 'd')
            (Path(tmp) / 'd' / 'priors.csv').write_bytes(b'class,prior\n0,\xff\n')
            with self.assertRaises(DataFileError):
                load_density(Path(tmp) / 'd')


class CalibrationTests(SimpleTestCase):

    def test_lattice(self):
        lattice = sigma_lattice()
        self.assertEqual(len(lattice), 51)
        self.assertAlmostEqual(lattice[0], 0.10)
        self.assertAlmostEqual(lattice[-1], 0.35)

    def test_rejects_impossible_target(self):
        with self.assertRaises(ParameterError):
            calibrate_moons(target_beta=0.7)

    def test_coarse_bisection_hits_the_target(self):
        spec = default_spec(96)
        result = calibrate_moons(target_beta=0.08, sigmas=[0.1, 0.15, 0.2, 0.25, 0.3, 0.35], spec=spec)
        self.assertLess(result.gap, 1e-3)
        self.assertTrue(0.1 <= result.sigma <= 0.35)
        self.assertIn('sigma=', result.as_config())

    def test_exhaustive_table_is_monotone(self):
        spec = default_spec(64)
        result = calibrate_moons(target_beta=0.08, sigmas=[0.1, 0.2, 0.3], spec=spec, refine=False, search=EXHAUSTIVE)
        betas = [beta for _, beta in result.table]
        self.assertEqual(len(betas), 3)
        self.assertEqual(betas, sorted(betas))

    @tag('slow')
    def test_full_calibration_within_a_tenth_of_a_point(self):
        result = calibrate_moons(spec=default_spec(512))
        self.assertLess(abs(result.beta - 0.0854), 0.001)
        self.assertTrue(math.isfinite(result.sigma))
