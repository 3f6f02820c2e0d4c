import numpy as np
from django.test import SimpleTestCase, tag

from bayes.analysis import bayes_error, uncertainty_region
from core.exceptions import IncompatibleGridError, KernelTooLargeError, MassLeakError
from core.testing import random_mixture, squares
from density.builders import make_uniform_patches, rasterize
from density.moons import default_params, default_spec, eval_moons, moons_convolved_point
from grid.models import Grid2D, GridSpec
from grid.quadrature import integrate
from vicinity.kernels import build_kernel, kernel_for
from vicinity.models import Norm

from .engine import convolve_direct, convolve_distribution, convolve_fft

UNIT_CELLS = GridSpec(0.0, 0.0, 1.0, 1.0, 64, 64)


def random_grid(rng, spec=UNIT_CELLS, border=6):
    """Random nonnegative field that vanishes within `border` cells of the edge"""
    values = np.zeros(spec.shape)
    values[border:-border, border:-border] = rng.random((spec.nx - 2 * border, spec.ny - 2 * border))
    return Grid2D(spec, values)


def relative_max_error(a, b):
    return np.max(np.abs(a.values - b.values)) / np.max(np.abs(b.values))


class ConvolveFftTests(SimpleTestCase):

    def test_delta_kernel_is_identity(self):
        g = random_grid(np.random.default_rng(0))
        delta = build_kernel(Norm.L_INF, 0.0, (1.0, 1.0))
        np.testing.assert_allclose(convolve_fft(g, delta).values, g.values, rtol=0, atol=1e-12)
        np.testing.assert_allclose(convolve_direct(g, delta).values, g.values, rtol=1e-12, atol=1e-12)

    def test_impulse_response_is_uniform(self):
        spec = GridSpec(0.0, 0.0, 1.0, 1.0, 3, 3)
        impulse = np.zeros((3, 3))
        impulse[1, 1] = 1.0
        kernel = build_kernel(Norm.L_INF, 1.0, (1.0, 1.0))
        for convolve in (convolve_fft, convolve_direct):
            out = convolve(Grid2D(spec, impulse), kernel)
            np.testing.assert_allclose(out.values * spec.cell_area, np.full((3, 3), 1 / 9), atol=1e-12)

    def test_matches_direct_summation(self):
        rng = np.random.default_rng(2024)
        kernel = build_kernel(Norm.L_INF, 5.0, (1.0, 1.0))
        for _ in range(20):
            g = random_grid(rng)
            fast, slow = convolve_fft(g, kernel), convolve_direct(g, kernel)
            self.assertLessEqual(relative_max_error(fast, slow), 1e-9)
            self.assertAlmostEqual(integrate(fast) / integrate(g), 1.0, delta=1e-9)
            self.assertAlmostEqual(integrate(slow) / integrate(g), 1.0, delta=1e-9)

    def test_matches_direct_summation_for_l2_disc(self):
        rng = np.random.default_rng(7)
        spec = GridSpec(0.0, 0.0, 0.5, 0.25, 48, 80)
        kernel = build_kernel(Norm.L2, 1.5, (0.5, 0.25))
        g = random_grid(rng, spec, border=7)
        self.assertLessEqual(relative_max_error(convolve_fft(g, kernel), convolve_direct(g, kernel)), 1e-9)

    def test_constant_interior_is_preserved(self):
        g = Grid2D.constant(GridSpec(0.0, 0.0, 1.0, 1.0, 40, 40), 2.5)
        out = convolve_direct(g, build_kernel(Norm.L2, 3.0, (1.0, 1.0)))
        np.testing.assert_allclose(out.values[3:-3, 3:-3], 2.5, rtol=1e-12)

    def test_smoothing_cannot_raise_the_maximum(self):
        rng = np.random.default_rng(11)
        for eps in (1.0, 2.0, 4.0):
            g = random_grid(rng)
            out = convolve_fft(g, build_kernel(Norm.L2, eps, (1.0, 1.0)))
            self.assertLessEqual(out.max(), g.max() + 1e-12)

    def test_output_is_nonnegative(self):
        g = random_grid(np.random.default_rng(5))
        self.assertGreaterEqual(convolve_fft(g, build_kernel(Norm.L_INF, 3.0, (1.0, 1.0))).values.min(), 0.0)

    def test_kernel_larger_than_grid(self):
        g = Grid2D.constant(GridSpec(0.0, 0.0, 1.0, 1.0, 5, 5), 1.0)
        with self.assertRaises(KernelTooLargeError):
            convolve_fft(g, build_kernel(Norm.L_INF, 3.0, (1.0, 1.0)))

    def test_cell_spacing_must_match(self):
        g = Grid2D.constant(UNIT_CELLS, 1.0)
        with self.assertRaises(IncompatibleGridError):
            convolve_fft(g, build_kernel(Norm.L_INF, 1.0, (0.5, 0.5)))


class ConvolveDistributionTests(SimpleTestCase):

    def test_zero_epsilon_leaves_distribution_unchanged(self):
        d = squares()
        dprime = convolve_distribution(d, kernel_for(Norm.L_INF, 0.0, d.spec))
        np.testing.assert_array_equal(dprime.priors, d.priors)
        for before, after in zip(d.conditionals, dprime.conditionals):
            np.testing.assert_allclose(after.values, before.values, rtol=0, atol=1e-12)

    def test_priors_kept_and_conditionals_normalized(self):
        d = random_mixture(np.random.default_rng(3))
        dprime = convolve_distribution(d, kernel_for(Norm.L2, 0.4, d.spec))
        np.testing.assert_array_equal(dprime.priors, d.priors)
        for cond in dprime.conditionals:
            self.assertAlmostEqual(integrate(cond), 1.0, delta=1e-6)

    def test_leak_past_the_edge_is_an_error(self):
        spec = GridSpec(0.0, 0.0, 0.1, 0.1, 20, 20)
        d = make_uniform_patches((0.5, 0.5), ((0.0, 0.0, 0.5, 2.0), (1.5, 0.0, 2.0, 2.0)), spec)
        with self.assertRaises(MassLeakError) as ctx:
            convolve_distribution(d, kernel_for(Norm.L_INF, 0.3, spec))
        self.assertGreater(ctx.exception.leak, 1e-3)
        self.assertIn('--grid', str(ctx.exception))

    def test_overlap_mass_grows_on_squares(self):
        d = squares()
        before = uncertainty_region(d).mass
        for eps in (0.02, 0.05, 0.1):
            dprime = convolve_distribution(d, kernel_for(Norm.L_INF, eps, d.spec))
            self.assertGreater(uncertainty_region(dprime).mass, before)

    def test_bayes_error_never_decreases(self):
        rng = np.random.default_rng(12345)
        checked = 0
        for _ in range(50):
            d = random_mixture(rng)
            beta = bayes_error(d)
            for eps in (0.1, 0.25, 0.5):
                norm = Norm.L_INF if rng.random() < 0.5 else Norm.L2
                beta_prime = bayes_error(convolve_distribution(d, kernel_for(norm, eps, d.spec)))
                self.assertGreaterEqual(beta_prime, beta - 1e-9)
                checked += 1
        self.assertEqual(checked, 150)


@tag('slow')
class MoonsPointOracleTests(SimpleTestCase):

    def test_fft_pipeline_matches_nested_quadrature(self):
        params = default_params()
        spec = default_spec(512)
        kernel = kernel_for(Norm.L_INF, 0.15, spec)
        # Whole cells: the discrete box spans +-(h + 1/2) cells on each axis, and dx != dy here.
        half_widths = ((kernel.half_widths[0] + 0.5) * spec.dx, (kernel.half_widths[1] + 0.5) * spec.dy)
        rng = np.random.default_rng(99)
        ix = rng.integers(kernel.half_widths[0], spec.nx - kernel.half_widths[0], size=20)
        iy = rng.integers(kernel.half_widths[1], spec.ny - kernel.half_widths[1], size=20)
        xs, ys = spec.x_centers(), spec.y_centers()
        for k in (0, 1):
            raw = rasterize(lambda x1, x2: eval_moons(k, x1, x2, params), spec)
            smoothed = convolve_fft(raw, kernel)
            for i, j in zip(ix, iy):
                oracle = moons_convolved_point(k, xs[i], ys[j], params, half_widths)
                self.assertAlmostEqual(smoothed.values[i, j], oracle, delta=1e-3)
