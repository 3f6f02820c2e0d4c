import numpy as np
from django.test import SimpleTestCase
from scipy.stats import norm

from core.exceptions import ParameterError
from core.testing import disjoint_squares, random_mixture, squares, two_gaussians
from density.builders import make_gaussian_mixture
from density.models import LabeledDensity, SampleSet
from grid.models import Grid2D, GridSpec

from .analysis import (
    bayes_classifier,
    bayes_error,
    bayes_error_growth,
    classifier_error,
    duplicated_input_check,
    empirical_bayes_error,
    posterior,
    uncertainty_region,
)
from .models import OUT_OF_SUPPORT

UNIT = GridSpec(0.0, 0.0, 0.5, 0.5, 2, 2)


def cell_value(field, spec, x1, x2):
    ix, iy = spec.cell_index([[x1, x2]])
    return field[ix[0], iy[0]]


class PosteriorTests(SimpleTestCase):

    def test_posteriors_sum_to_one_on_the_support(self):
        field = posterior(two_gaussians(128))
        total = field.posteriors.sum(axis=0)
        np.testing.assert_allclose(total[field.support], 1.0, atol=1e-12)
        np.testing.assert_array_equal(total[~field.support], 0.0)

    def test_degenerate_prior_gives_certain_posterior(self):
        cond = Grid2D.constant(UNIT, 1.0)
        field = posterior(LabeledDensity([1.0, 0.0], (cond, cond)))
        np.testing.assert_array_equal(field.posteriors[0], 1.0)
        np.testing.assert_array_equal(field.posteriors[1], 0.0)

    def test_posterior_on_the_squares(self):
        d = squares()
        field = posterior(d)
        self.assertEqual(cell_value(field.posteriors[0], d.spec, 0.25, 0.5), 1.0)
        self.assertEqual(cell_value(field.posteriors[1], d.spec, 1.25, 0.5), 1.0)
        self.assertAlmostEqual(cell_value(field.posteriors[0], d.spec, 0.75, 0.5), 0.5, places=12)
        self.assertFalse(cell_value(field.support, d.spec, -0.25, 0.5))

    def test_unequal_priors_shift_the_posterior(self):
        joints = np.stack([np.full(UNIT.shape, 0.3), np.full(UNIT.shape, 0.7)])
        field = posterior(LabeledDensity.from_joints(joints, UNIT))
        np.testing.assert_allclose(field.posteriors[1], 0.7, atol=1e-12)


class BayesErrorTests(SimpleTestCase):

    def test_disjoint_supports_have_zero_error(self):
        self.assertEqual(bayes_error(disjoint_squares()), 0.0)

    def test_identical_classes_have_error_one_half(self):
        spec = GridSpec.from_extents(-6.0, 6.0, -6.0, 6.0, 128)
        d = make_gaussian_mixture((0.5, 0.5), ((0.0, 0.0), (0.0, 0.0)), (1.0, 1.0), spec)
        self.assertAlmostEqual(bayes_error(d), 0.5, delta=1e-6)

    def test_two_gaussians_match_the_normal_tail(self):
        self.assertAlmostEqual(bayes_error(two_gaussians()), norm.cdf(-1.0), delta=1e-3)
        self.assertAlmostEqual(bayes_error(two_gaussians()), 0.15866, delta=1e-3)

    def test_squares(self):
        # Half the overlap strip's evidence is misclassified.
        self.assertAlmostEqual(bayes_error(squares()), 0.25, places=9)

    def test_invariant_under_relabelling(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            d = random_mixture(rng)
            order = rng.permutation(d.num_classes)
            self.assertAlmostEqual(bayes_error(d.permuted(order)), bayes_error(d), places=12)

    def test_bounded_by_the_uncertainty_region_mass(self):
        rng = np.random.default_rng(22)
        for _ in range(10):
            d = random_mixture(rng)
            self.assertLessEqual(bayes_error(d), uncertainty_region(d, tau_unc=0.0).mass + 1e-12)

    def test_at_most_one_minus_one_over_k(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            d = random_mixture(rng)
            self.assertLessEqual(bayes_error(d), 1 - 1 / d.num_classes + 1e-12)

    def test_agrees_with_monte_carlo_on_the_gaussians(self):
        d = two_gaussians()
        classifier = bayes_classifier(d)
        rng = np.random.default_rng(31415)
        n = 1_000_000
        labels = rng.integers(0, 2, size=n)
        points = rng.standard_normal((n, 2))
        points[:, 0] += np.where(labels == 0, -1.0, 1.0)
        estimate = classifier_error(classifier, SampleSet(points, labels))
        stderr = np.sqrt(estimate * (1 - estimate) / n)
        self.assertLessEqual(abs(estimate - bayes_error(d)), 3 * stderr)

    def test_growth(self):
        self.assertAlmostEqual(bayes_error_growth(0.1, 0.15), 0.5)
        self.assertIsNone(bayes_error_growth(0.0, 0.1))


class UncertaintyRegionTests(SimpleTestCase):

    def test_squares_overlap_strip(self):
        region = uncertainty_region(squares())
        self.assertAlmostEqual(region.volume, 0.5, places=9)
        self.assertAlmostEqual(region.mass, 0.5, places=9)
        self.assertTrue(region.mask.is_mask())

    def test_disjoint_supports_have_an_empty_region(self):
        region = uncertainty_region(disjoint_squares())
        self.assertTrue(region.is_empty)
        self.assertEqual(region.volume, 0.0)

    def test_tolerance_must_stay_below_one_half(self):
        for bad in (-0.1, 0.5, 0.7):
            with self.assertRaises(ParameterError):
                uncertainty_region(squares(), tau_unc=bad)

    def test_tolerance_shrinks_the_region(self):
        d = two_gaussians(128)
        wide = uncertainty_region(d, tau_unc=1e-4)
        narrow = uncertainty_region(d, tau_unc=1e-2)
        self.assertLess(narrow.volume, wide.volume)
        self.assertTrue(np.all(narrow.mask.values <= wide.mask.values))


class ClassifierTests(SimpleTestCase):

    def test_tie_goes_to_the_lowest_label(self):
        d = squares()
        labels = bayes_classifier(d).predict([[0.25, 0.5], [0.75, 0.5], [1.25, 0.5]])
        np.testing.assert_array_equal(labels, [0, 0, 1])

    def test_outside_the_grid_or_support(self):
        labels = bayes_classifier(squares()).predict([[-0.25, 0.5], [10.0, 10.0]])
        np.testing.assert_array_equal(labels, [OUT_OF_SUPPORT, OUT_OF_SUPPORT])

    def test_classifier_error(self):
        samples = SampleSet([[0.25, 0.5], [1.25, 0.5], [0.3, 0.3], [1.2, 0.9]], [0, 0, 0, 1])
        self.assertEqual(classifier_error(bayes_classifier(squares()), samples), 0.25)

    def test_classifier_error_needs_samples(self):
        with self.assertRaises(ParameterError):
            classifier_error(bayes_classifier(squares()), SampleSet(np.empty((0, 2)), []))


class SampleCheckTests(SimpleTestCase):

    def test_duplicate_with_two_labels(self):
        self.assertTrue(duplicated_input_check(SampleSet([[0, 0], [1, 1], [0, 0]], [0, 1, 1])))

    def test_duplicate_with_one_label(self):
        self.assertFalse(duplicated_input_check(SampleSet([[0, 0], [0, 0], [1, 1]], [1, 1, 0])))

    def test_distinct_points(self):
        self.assertFalse(duplicated_input_check(SampleSet([[0, 0], [0, 1e-12]], [0, 1])))
        self.assertFalse(duplicated_input_check(SampleSet([[0, 0]], [0])))

    def test_empirical_bayes_error(self):
        samples = SampleSet([[0, 0], [0, 0], [0, 0], [1, 1]], [0, 0, 1, 1])
        self.assertEqual(empirical_bayes_error(samples), 0.25)

    def test_empirical_bayes_error_without_duplicates_is_zero(self):
        samples = SampleSet(np.random.default_rng(0).random((50, 2)), np.arange(50) % 3)
        self.assertEqual(empirical_bayes_error(samples), 0.0)
