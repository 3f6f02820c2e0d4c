import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ParameterError

from .kernels import build_kernel, effective_radius, support_volume
from .models import Norm


def offsets(kernel):
    hx, hy = kernel.half_widths
    ix, iy = np.nonzero(kernel.support())
    return set(zip((ix - hx).tolist(), (iy - hy).tolist()))


class BuildKernelTests(SimpleTestCase):

    def test_linf_box_of_radius_fifteen_cells(self):
        k = build_kernel(Norm.L_INF, 0.15, (0.01, 0.01))
        self.assertEqual(k.shape, (31, 31))
        self.assertEqual(k.support_cells, 31 * 31)
        self.assertAlmostEqual(k.eps_v, 0.09, places=12)
        self.assertAlmostEqual(k.kernel.values.sum() * 1e-4, 1.0, delta=1e-12)

    def test_zero_epsilon_is_discrete_delta(self):
        k = build_kernel('linf', 0.0, (0.02, 0.05))
        self.assertTrue(k.is_delta)
        self.assertAlmostEqual(k.kernel.values[0, 0] * 0.02 * 0.05, 1.0, places=12)
        self.assertEqual(k.eps_v, 0.0)

    def test_l2_raw_height_is_inverse_pi(self):
        k = build_kernel(Norm.L2, 1.0, (0.25, 0.25))
        self.assertAlmostEqual(k.raw_value, 1 / math.pi, places=12)
        self.assertAlmostEqual(k.eps_v, math.pi, places=12)

    def test_support_carries_a_single_value(self):
        k = build_kernel(Norm.L2, 0.3, (0.02, 0.03))
        nonzero = np.unique(k.kernel.values[k.kernel.values > 0])
        self.assertEqual(len(nonzero), 1)

    def test_kernel_is_even(self):
        for norm in Norm:
            k = build_kernel(norm, 0.37, (0.03, 0.05))
            values = k.kernel.values
            self.assertTrue(np.array_equal(values, values[::-1, ::-1]))
            self.assertTrue(np.array_equal(values, values[::-1, :]))

    def test_discrete_mass_is_one(self):
        for norm in Norm:
            for eps in (0.0, 0.01, 0.07, 0.2, 0.5):
                k = build_kernel(norm, eps, (0.01, 0.02))
                self.assertAlmostEqual(k.kernel.values.sum() * 0.01 * 0.02, 1.0, delta=1e-12)

    def test_support_grows_with_epsilon(self):
        for norm in Norm:
            previous = set()
            for eps in (0.0, 0.03, 0.05, 0.1, 0.15):
                current = offsets(build_kernel(norm, eps, (0.01, 0.01)))
                self.assertTrue(previous <= current)
                previous = current

    def test_l2_support_inside_linf_support(self):
        box = offsets(build_kernel(Norm.L_INF, 0.1, (0.01, 0.01)))
        disc = offsets(build_kernel(Norm.L2, 0.1, (0.01, 0.01)))
        self.assertTrue(disc < box)

    def test_rejects_negative_epsilon(self):
        with self.assertRaises(ParameterError) as ctx:
            build_kernel(Norm.L_INF, -0.1, (0.01, 0.01))
        self.assertEqual(ctx.exception.parameter, 'epsilon')

    def test_unknown_norm(self):
        with self.assertRaises(ParameterError):
            Norm.parse('l1')


class EffectiveRadiusTests(SimpleTestCase):

    def test_l2_is_the_radius(self):
        for dim in (1, 2, 3, 784):
            self.assertEqual(effective_radius(Norm.L2, 0.15, dim), 0.15)

    def test_linf_in_two_dimensions(self):
        self.assertAlmostEqual(effective_radius(Norm.L_INF, 0.15, 2), 0.3 / math.sqrt(math.pi), places=12)
        self.assertAlmostEqual(effective_radius(Norm.L_INF, 0.15, 2), 0.169257, places=6)

    def test_linf_in_one_dimension_is_epsilon(self):
        self.assertAlmostEqual(effective_radius(Norm.L_INF, 0.4, 1), 0.4, places=12)

    def test_equal_volume(self):
        # pi r^2 equals the box area (2 eps)^2
        r = effective_radius(Norm.L_INF, 0.2, 2)
        self.assertAlmostEqual(math.pi * r ** 2, support_volume(Norm.L_INF, 0.2), places=12)

    def test_high_dimension_stays_finite(self):
        r = effective_radius(Norm.L_INF, 8 / 255, 3 * 32 * 32)
        self.assertTrue(math.isfinite(r))
        self.assertGreater(r, 8 / 255)
