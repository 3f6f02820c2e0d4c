import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, tag

from bayes.analysis import bayes_classifier
from core.exceptions import DataFileError, IncompatibleGridError, ParameterError
from core.testing import calibrated_moons, disjoint_squares, two_gaussians
from density.models import LabeledDensity, SampleSet
from density.samples import sample_density
from grid.models import Grid2D, GridSpec
from vicinity.kernels import build_kernel, kernel_for
from vicinity.models import Norm

from .algorithms import all_correct_probability, neighbor_correctness, neighbor_correctness_self
from .models import MonteCarloEstimate
from .predictions import read_predictions, write_predictions
from .spatial import SpatialHash


def random_samples(seed, n=400, classes=2):
    rng = np.random.default_rng(seed)
    return SampleSet(rng.random((n, 2)), rng.integers(0, classes, size=n))


class SpatialHashTests(SimpleTestCase):

    def test_matches_brute_force(self):
        rng = np.random.default_rng(5)
        points = rng.random((300, 2))
        queries = rng.random((50, 2))
        theta = 0.07
        index = SpatialHash(points, theta)
        brute = np.abs(queries[:, None, :] - points[None, :, :]).max(axis=2) <= theta
        counted = np.zeros(len(queries), dtype=np.int64)
        for members, near, found in index.within(queries, theta):
            counted[members] = near.sum(axis=1)
            for row, query in zip(near, members):
                self.assertEqual(set(found[row].tolist()), set(np.flatnonzero(brute[query]).tolist()))
        np.testing.assert_array_equal(counted, brute.sum(axis=1))

    def test_zero_cell_matches_exact_coordinates(self):
        index = SpatialHash([[0.5, 0.5], [0.5, 0.5], [0.5, 0.50001]], 0.0)
        [(members, near, found)] = list(index.within([[0.5, 0.5]], 0.0))
        self.assertEqual(near.sum(), 2)
        self.assertEqual(sorted(found.tolist()), [0, 1])


class NeighborCorrectnessTests(SimpleTestCase):

    def test_all_correct(self):
        s = random_samples(1)
        result = neighbor_correctness_self(s, s.labels, 0.05)
        self.assertEqual(result.alpha, 1.0)
        self.assertEqual(result.coverage, 1.0)

    def test_all_wrong(self):
        s = random_samples(2)
        result = neighbor_correctness_self(s, 1 - s.labels, 0.05)
        self.assertEqual(result.alpha, 0.0)
        self.assertEqual(result.alpha_vacuous, 0.0)

    def test_zero_theta_is_plain_accuracy(self):
        s = random_samples(3)
        predictions = s.labels.copy()
        predictions[::7] = 1 - predictions[::7]
        result = neighbor_correctness_self(s, predictions, 0.0)
        self.assertEqual(result.alpha, float(np.mean(predictions == s.labels)))

    def test_self_variant_is_the_two_set_variant(self):
        s = random_samples(4)
        predictions = np.where(np.random.default_rng(4).random(len(s)) < 0.9, s.labels, 1 - s.labels)
        self.assertEqual(neighbor_correctness_self(s, predictions, 0.04), neighbor_correctness(s, s, predictions, 0.04))

    def test_larger_theta_is_harder(self):
        test, reference = random_samples(5, n=200), random_samples(6)
        predictions = np.where(np.random.default_rng(6).random(len(reference)) < 0.95, reference.labels, 1 - reference.labels)
        results = [neighbor_correctness(test, reference, predictions, theta) for theta in (0.0, 0.01, 0.03, 0.1)]
        for before, after in zip(results, results[1:]):
            self.assertLessEqual(after.alpha_vacuous, before.alpha_vacuous)
            self.assertGreaterEqual(after.coverage, before.coverage)

    def test_empty_neighbourhoods(self):
        test = SampleSet([[10.0, 10.0], [0.5, 0.5]], [0, 0])
        reference = SampleSet([[0.5, 0.52]], [1])
        result = neighbor_correctness(test, reference, [1], 0.05)
        self.assertEqual(result.alpha, 0.5)
        self.assertEqual(result.alpha_vacuous, 1.0)
        self.assertEqual(result.coverage, 0.5)

    def test_rejects_bad_input(self):
        s = random_samples(7, n=10)
        with self.assertRaises(ParameterError):
            neighbor_correctness_self(s, s.labels[:5], 0.1)
        with self.assertRaises(ParameterError):
            neighbor_correctness_self(s, s.labels, -0.1)
        with self.assertRaises(ParameterError):
            neighbor_correctness(SampleSet(np.empty((0, 2)), []), s, s.labels, 0.1)


class AllCorrectProbabilityTests(SimpleTestCase):

    def setUp(self):
        self.d = two_gaussians(64)
        self.kernel = kernel_for(Norm.L_INF, 0.5, self.d.spec)

    def test_no_samples_is_certain(self):
        result = all_correct_probability(self.d, self.kernel, 0, 10)
        self.assertEqual(result.estimate, 1.0)
        self.assertEqual(result.stderr, 0.0)

    def test_separated_classes_are_always_right(self):
        d = disjoint_squares()
        result = all_correct_probability(d, kernel_for(Norm.L2, 0.1, d.spec), 50, 20, seed=1)
        self.assertEqual(result.estimate, 1.0)

    def test_single_cell_is_a_power(self):
        spec = GridSpec(0.0, 0.0, 1.0, 1.0, 1, 1)
        cond = Grid2D.constant(spec, 1.0)
        d = LabeledDensity([0.9, 0.1], (cond, cond))
        kernel = build_kernel(Norm.L_INF, 0.0, (1.0, 1.0))
        for n in (1, 3, 10):
            self.assertAlmostEqual(all_correct_probability(d, kernel, n, 5, seed=2).estimate, 0.9 ** n, places=12)

    def test_reproducible(self):
        a = all_correct_probability(self.d, self.kernel, 10, 50, seed=9)
        b = all_correct_probability(self.d, self.kernel, 10, 50, seed=9)
        self.assertEqual(a, b)

    def test_more_samples_never_raise_the_estimate(self):
        estimates = [all_correct_probability(self.d, self.kernel, n, 200, seed=3).estimate for n in (1, 5, 20, 100)]
        self.assertEqual(estimates, sorted(estimates, reverse=True))
        self.assertLess(estimates[-1], estimates[0])

    def test_kernel_spacing_must_match(self):
        with self.assertRaises(IncompatibleGridError):
            all_correct_probability(self.d, build_kernel(Norm.L_INF, 0.1, (0.05, 0.05)), 5, 5)

    def test_rejects_bad_counts(self):
        with self.assertRaises(ParameterError):
            all_correct_probability(self.d, self.kernel, -1, 5)
        with self.assertRaises(ParameterError):
            all_correct_probability(self.d, self.kernel, 5, 0)

    def test_single_trial_has_no_error_bar(self):
        self.assertEqual(MonteCarloEstimate.from_draws([0.5], 3).stderr, float('inf'))

    def test_error_bar_is_the_standard_error_of_the_mean(self):
        estimate = MonteCarloEstimate.from_draws([0.0, 1.0, 1.0, 0.0], 4)
        self.assertEqual(estimate.estimate, 0.5)
        self.assertAlmostEqual(estimate.stderr, math.sqrt(1 / 3) / 2, places=12)


class PredictionFileTests(SimpleTestCase):

    def test_write_then_read(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_predictions([1, 0, 2], Path(tmp) / 'preds.csv', provenance='# robust-bound test')
            self.assertEqual(path.read_text(encoding='utf-8').splitlines()[1], 'index,predicted_label')
            np.testing.assert_array_equal(read_predictions(path, expected=3), [1, 0, 2])

    def test_rejects_malformed_files(self):
        bodies = {
            'header.csv': 'i,label\n0,1\n',
            'row.csv': 'index,predicted_label\n0,one\n',
            'order.csv': 'index,predicted_label\n1,0\n',
        }
        with tempfile.TemporaryDirectory() as tmp:
            for name, body in bodies.items():
                path = Path(tmp) / name
                path.write_text(body, encoding='utf-8')
                with self.assertRaises(DataFileError):
                    read_predictions(path)

    def test_length_mismatch(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_predictions([0, 1], Path(tmp) / 'preds.csv')
            with self.assertRaises(DataFileError):
                read_predictions(path, expected=3)

    def test_missing_file(self):
        with self.assertRaises(DataFileError):
            read_predictions('/nonexistent/preds.csv')

    def test_not_utf8(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'preds.csv'
            path.write_bytes(b'index,predicted_label\n0,\xff\n')
            with self.assertRaises(DataFileError):
                read_predictions(path)


@tag('slow')
class MoonsNeighborTests(SimpleTestCase):

    def test_more_reference_points_lower_alpha(self):
        d = calibrated_moons(512)
        classifier = bayes_classifier(d)
        rng = np.random.default_rng(2023)
        test = sample_density(d, 10_000, rng)
        reference = sample_density(d, 10_000, rng)
        alphas = []
        for n in (100, 1_000, 10_000):
            subset = reference.head(n)
            result = neighbor_correctness(test, subset, classifier.predict(subset.points), 0.15)
            alphas.append(result.alpha_vacuous)
        self.assertGreaterEqual(alphas[0], alphas[1])
        self.assertGreaterEqual(alphas[1], alphas[2])
        self.assertLess(alphas[2], alphas[0])
