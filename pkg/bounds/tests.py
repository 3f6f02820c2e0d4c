import csv
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, tag

from bayes.analysis import bayes_error
from core.exceptions import ParameterError
from core.testing import calibrated_moons, disjoint_squares, random_mixture, squares, two_gaussians
from density.models import LabeledDensity
from grid.models import GridSpec
from vicinity.kernels import kernel_for
from vicinity.models import Norm

from .calculators import (
    compute_bounds,
    cor1_lower,
    cor2_lower,
    cor2_margin,
    harden,
    min_evidence,
    thm3_lower,
    zeta_d,
    zeta_sharp,
)
from .models import CSV_COLUMNS
from .sweep import epsilon_sweep, tau_sensitivity, write_sweep_csv

SLACK = 1e-9


class OrderingMixin:

    def assertOrdered(self, zeta_thm3, zeta_cor1, zeta_cor2, beta):
        self.assertGreaterEqual(zeta_cor2, zeta_thm3 - SLACK)
        self.assertGreaterEqual(zeta_thm3, zeta_cor1 - SLACK)
        self.assertGreaterEqual(zeta_cor1, beta - SLACK)


class ScalarBoundTests(SimpleTestCase):

    def test_cor1_binary(self):
        self.assertAlmostEqual(cor1_lower(0.0854, 2), 0.1708, places=12)

    def test_cor1_ten_classes(self):
        self.assertAlmostEqual(cor1_lower(0.0524, 10), 0.0524 * 10 / 9, delta=1e-9)
        self.assertAlmostEqual(cor1_lower(0.0524, 10), 0.05822, places=5)

    def test_cor1_at_the_ceiling(self):
        self.assertAlmostEqual(cor1_lower(0.5, 2), 1.0, places=12)
        self.assertAlmostEqual(cor1_lower(0.0, 3), 0.0, places=12)

    def test_cor1_rejects_out_of_range(self):
        for beta, classes in ((0.6, 2), (-0.1, 2), (0.1, 1), (0.1, 2.5)):
            with self.assertRaises(ParameterError):
                cor1_lower(beta, classes)

    def test_cor2_margin(self):
        # 2 * 0.1 * 0.5 * sqrt(0.25)
        self.assertAlmostEqual(cor2_margin(0.1, 0.5, 0.25), 0.05, places=12)
        self.assertEqual(cor2_margin(0.0, 0.5, 0.25), 0.0)
        self.assertAlmostEqual(cor2_margin(0.1, 1.0, 8.0, dim=3), 0.8, places=12)

    def test_cor2_margin_rejects_negative_inputs(self):
        with self.assertRaises(ParameterError):
            cor2_margin(-0.1, 0.5, 0.25)
        with self.assertRaises(ParameterError):
            cor2_margin(0.1, 0.5, 0.25, dim=0)


class SquaresBoundTests(OrderingMixin, SimpleTestCase):

    def setUp(self):
        self.d = squares()

    def test_thm3_is_the_overlap_mass(self):
        self.assertAlmostEqual(thm3_lower(self.d), 0.5, places=9)
        self.assertAlmostEqual(thm3_lower(disjoint_squares()), 0.0, places=12)

    def test_min_evidence(self):
        self.assertAlmostEqual(min_evidence(self.d), 0.5, places=9)

    def test_cor2(self):
        kernel = kernel_for(Norm.L_INF, 0.05, self.d.spec)
        # 0.5 + 2 * (0.1 / sqrt(pi)) * 0.5 * sqrt(0.5)
        self.assertAlmostEqual(cor2_lower(self.d, kernel), 0.5 + 0.1 / np.sqrt(np.pi) * np.sqrt(0.5), places=9)
        self.assertAlmostEqual(cor2_lower(self.d, kernel), 0.5399, delta=1e-4)

    def test_cor2_without_margin_is_thm3(self):
        thm3 = thm3_lower(self.d)
        self.assertAlmostEqual(cor2_lower(self.d, kernel_for(Norm.L_INF, 0.0, self.d.spec)), thm3, places=12)
        kernel = kernel_for(Norm.L2, 0.1, self.d.spec)
        self.assertAlmostEqual(cor2_lower(self.d, kernel, p_min_override=0.0), thm3, places=12)

    def test_cor2_is_capped(self):
        kernel = kernel_for(Norm.L_INF, 0.1, self.d.spec)
        self.assertEqual(cor2_lower(self.d, kernel, p_min_override=100.0), 1.0)

    def test_zeta_sharp_grows_with_epsilon(self):
        previous = 0.0
        for eps in (0.0, 0.05, 0.1):
            current = zeta_sharp(self.d, kernel_for(Norm.L_INF, eps, self.d.spec))
            self.assertGreaterEqual(current, previous - SLACK)
            previous = current
        self.assertGreater(previous, 0.5)

    def test_report(self):
        report = compute_bounds(self.d, kernel_for(Norm.L_INF, 0.05, self.d.spec))
        self.assertAlmostEqual(report.beta_D, 0.25, places=9)
        self.assertGreaterEqual(report.beta_Dprime, report.beta_D - SLACK)
        self.assertAlmostEqual(report.zeta_cor2, 0.5399, delta=1e-4)
        self.assertAlmostEqual(report.ub_zeta_D, 1 - report.zeta_D)
        self.assertOrdered(report.zeta_thm3, report.zeta_cor1, report.zeta_cor2, report.beta_D)
        self.assertIsNone(report.stages)
        self.assertIn('zeta_D', str(report))

    def test_keep_stages(self):
        report = compute_bounds(self.d, kernel_for(Norm.L2, 0.05, self.d.spec), keep_stages=True)
        stages = report.stages
        self.assertEqual(bayes_error(stages.hardened), 0.0)
        self.assertEqual(stages.dagger.spec, self.d.spec)
        self.assertAlmostEqual(stages.region_d.mass, report.zeta_thm3)


class HardenTests(SimpleTestCase):

    def test_argmax_takes_the_whole_evidence(self):
        spec = GridSpec(0.0, 0.0, 0.5, 0.5, 2, 2)
        joints = np.array([
            [[1.0, 0.2], [0.7, 0.1]],
            [[0.2, 1.0], [0.5, 0.3]],
        ])
        hardened = harden(LabeledDensity.from_joints(joints, spec))
        expected = np.array([
            [[1.2, 0.0], [1.2, 0.0]],
            [[0.0, 1.2], [0.0, 0.4]],
        ])
        np.testing.assert_allclose(hardened.joint_values(), expected, atol=1e-12)
        np.testing.assert_allclose(hardened.priors, [0.6, 0.4], atol=1e-12)

    def test_hardened_distribution_has_no_bayes_error(self):
        for d in (squares(), two_gaussians(128)):
            hardened = harden(d)
            self.assertEqual(bayes_error(hardened), 0.0)
            np.testing.assert_allclose(hardened.evidence().values, d.evidence().values, atol=1e-12)

    def test_squares_overlap_goes_to_class_zero(self):
        np.testing.assert_allclose(harden(squares()).priors, [0.75, 0.25], atol=1e-9)


class ZetaDTests(SimpleTestCase):

    def test_zero_epsilon_gives_the_bayes_error(self):
        for d in (squares(), two_gaussians(128)):
            self.assertAlmostEqual(zeta_d(d, kernel_for(Norm.L_INF, 0.0, d.spec)), bayes_error(d), delta=1e-9)

    def test_disjoint_supports_far_apart(self):
        d = disjoint_squares()
        kernel = kernel_for(Norm.L_INF, 0.1, d.spec)
        self.assertAlmostEqual(zeta_d(d, kernel), 0.0, delta=1e-9)
        self.assertAlmostEqual(zeta_sharp(d, kernel), 0.0, delta=1e-9)

    def test_gaussians_are_almost_all_uncertain(self):
        d = two_gaussians(128)
        self.assertGreater(zeta_sharp(d, kernel_for(Norm.L2, 0.1, d.spec)), 0.98)


class OrderingTests(OrderingMixin, SimpleTestCase):

    def test_fixtures(self):
        for d in (squares(), two_gaussians(128)):
            for norm in Norm:
                report = compute_bounds(d, kernel_for(norm, 0.1, d.spec), tau_unc=0.0)
                self.assertOrdered(report.zeta_thm3, report.zeta_cor1, report.zeta_cor2, report.beta_D)

    def test_random_mixtures(self):
        rng = np.random.default_rng(777)
        for _ in range(50):
            d = random_mixture(rng)
            kernel = kernel_for(Norm.L_INF, 0.1, d.spec)
            beta = bayes_error(d)
            self.assertOrdered(
                thm3_lower(d, tau_unc=0.0),
                cor1_lower(beta, d.num_classes),
                cor2_lower(d, kernel, tau_unc=0.0),
                beta,
            )


class SweepTests(SimpleTestCase):

    def test_zero_epsilon_row(self):
        d = squares()
        [report] = epsilon_sweep(d, Norm.L_INF, [0.0])
        self.assertEqual(report.epsilon, 0.0)
        self.assertAlmostEqual(report.beta_Dprime, report.beta_D, delta=1e-9)
        self.assertAlmostEqual(report.zeta_D, report.beta_D, delta=1e-9)
        self.assertAlmostEqual(report.zeta_sharp, report.zeta_thm3, delta=1e-9)

    def test_box_dominates_disc(self):
        d = squares()
        [box] = epsilon_sweep(d, Norm.L_INF, [0.1])
        [disc] = epsilon_sweep(d, Norm.L2, [0.1])
        self.assertGreater(box.eps_eff, disc.eps_eff)
        self.assertGreater(box.zeta_cor2, disc.zeta_cor2)
        for report in (box, disc):
            self.assertGreater(report.zeta_sharp, report.zeta_thm3)

    def test_rejects_bad_lists(self):
        for eps_list in ([], [0.1, -0.05], [0.1, 0.05]):
            with self.assertRaises(ParameterError):
                epsilon_sweep(squares(), Norm.L_INF, eps_list)

    def test_csv_layout(self):
        reports = epsilon_sweep(squares(), Norm.L2, [0.0, 0.05])
        with tempfile.TemporaryDirectory() as tmp:
            path = write_sweep_csv(reports, Path(tmp) / 'nested' / 'sweep.csv', provenance='# robust-bound test')
            lines = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], '# robust-bound test')
        rows = list(csv.reader(lines[1:]))
        self.assertEqual(tuple(rows[0]), CSV_COLUMNS)
        self.assertEqual(len(rows), 3)
        self.assertEqual(rows[1][:4], ['0', 'l2', '0.001', '250x200'])
        self.assertEqual(rows[1][4], '0.25')
        for row in rows[1:]:
            self.assertEqual(len(row), len(CSV_COLUMNS))
            self.assertAlmostEqual(float(row[-1]), 1 - float(row[-2]), places=8)

    def test_tau_sensitivity(self):
        d = two_gaussians(128)
        kernel = kernel_for(Norm.L_INF, 0.1, d.spec)
        reports = tau_sensitivity(d, kernel)
        self.assertEqual([r.tau_unc for r in reports], [1e-2, 1e-3, 1e-4])
        masses = [r.zeta_thm3 for r in reports]
        self.assertEqual(masses, sorted(masses))
        single = compute_bounds(d, kernel, tau_unc=1e-3)
        self.assertEqual(reports[1].zeta_thm3, single.zeta_thm3)
        self.assertAlmostEqual(reports[1].zeta_D, single.zeta_D, places=12)


@tag('slow')
class MoonsBoundTests(OrderingMixin, SimpleTestCase):

    def test_convolved_bayes_error_and_zeta_d(self):
        d = calibrated_moons(512)
        report = compute_bounds(d, kernel_for(Norm.L_INF, 0.15, d.spec))
        self.assertAlmostEqual(report.beta_D, 0.0854, delta=1e-3)
        self.assertAlmostEqual(report.beta_Dprime, 0.0924, delta=0.007)
        # Every point within eps of the D' boundary counts in full.
        self.assertAlmostEqual(report.zeta_D, 0.2137, delta=0.01)
        self.assertOrdered(report.zeta_thm3, report.zeta_cor1, report.zeta_cor2, report.beta_D)

    def test_zeta_d_for_a_box_of_side_eps(self):
        d = calibrated_moons(512)
        report = compute_bounds(d, kernel_for(Norm.L_INF, 0.075, d.spec))
        self.assertAlmostEqual(report.zeta_D, 0.1428, delta=0.015)
        self.assertAlmostEqual(report.beta_Dprime, 0.0924, delta=0.007)

    def test_sweep_is_monotone_for_both_norms(self):
        d = calibrated_moons(512)
        for norm in Norm:
            reports = epsilon_sweep(d, norm, [0.0, 0.05, 0.1, 0.15, 0.2])
            self.assertAlmostEqual(reports[0].zeta_D, reports[0].beta_D, delta=1e-9)
            for before, after in zip(reports, reports[1:]):
                self.assertLessEqual(after.ub_zeta_D, before.ub_zeta_D + 1e-6)

    def test_grid_refinement(self):
        coarse, fine = calibrated_moons(512), calibrated_moons(1024)
        zetas = [compute_bounds(d, kernel_for(Norm.L_INF, 0.15, d.spec)).zeta_D for d in (coarse, fine)]
        self.assertLess(abs(zetas[0] - zetas[1]), 0.002)
