import csv
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from grid.csvio import write_grid
from grid.models import Grid2D, GridSpec

from .base import EXIT_IO, EXIT_NUMERIC, EXIT_USAGE
from .heatmap import block_average, render_heatmap


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.out = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def run_command(self, *args):
        stdout = StringIO()
        call_command(*args, '--out', str(self.out), verbosity=0, stdout=stdout)
        return stdout.getvalue()

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as ctx:
            self.run_command(*args)
        self.assertEqual(ctx.exception.returncode, code)
        return ctx.exception


class SweepCommandTests(CommandTestCase):

    def test_writes_one_row_per_epsilon(self):
        self.run_command('sweep', '--dist', 'squares', '--norm', 'linf', '--eps', '0,0.05,0.1,0.15')
        lines = (self.out / 'sweep.csv').read_text(encoding='utf-8').splitlines()
        self.assertTrue(lines[0].startswith('# robust-bound '))
        self.assertIn('command=sweep', lines[0])
        self.assertIn('grid=-0.5,-0.5,0.01,0.01,250,200', lines[0])
        rows = list(csv.DictReader(lines[1:]))
        self.assertEqual(len(rows), 4)
        self.assertEqual([float(r['epsilon']) for r in rows], [0.0, 0.05, 0.1, 0.15])
        self.assertTrue(all(r['norm'] == 'linf' for r in rows))

    def test_unsorted_radii(self):
        self.assertExitCode(EXIT_USAGE, 'sweep', '--dist', 'squares', '--eps', '0.1,0.05')

    def test_eps_is_required(self):
        self.assertExitCode(EXIT_USAGE, 'sweep', '--dist', 'squares')

    def test_dump_intermediates_per_radius(self):
        self.run_command('sweep', '--dist', 'squares', '--eps', '0,0.05', '--dump-intermediates')
        for eps in ('0', '0.05'):
            stage_dir = self.out / 'intermediates' / f'eps_{eps}'
            for name in ('dprime', 'hardened', 'dagger'):
                self.assertTrue((stage_dir / name / 'priors.csv').exists())
            self.assertTrue((stage_dir / 'region_Ddagger.csv').exists())

    def test_flag_only_on_commands_with_stages(self):
        with self.assertRaises(CommandError):
            self.run_command('density', 'squares', '--dump-intermediates')


class BoundsCommandTests(CommandTestCase):

    def test_squares_report(self):
        stdout = self.run_command('bounds', '--dist', 'squares', '--eps', '0.05')
        self.assertIn('zeta_cor2    0.539894', stdout)
        self.assertIn('beta_D       0.250000', stdout)
        self.assertTrue((self.out / 'bounds.txt').exists())

    def test_scalar_mode(self):
        stdout = self.run_command('bounds', '--beta', '0.0854', '--classes', '2')
        self.assertIn('zeta_cor1 0.1708', stdout)
        self.assertFalse((self.out / 'bounds.txt').exists())

    def test_scalar_mode_needs_classes(self):
        self.assertExitCode(EXIT_USAGE, 'bounds', '--beta', '0.1')

    def test_dump_intermediates(self):
        self.run_command('bounds', '--dist', 'squares', '--eps', '0.02', '--dump-intermediates')
        intermediates = self.out / 'intermediates'
        for name in ('dprime', 'hardened', 'dagger'):
            self.assertTrue((intermediates / name / 'priors.csv').exists())
        for name in ('region_D.csv', 'region_Dprime.csv', 'region_Ddagger.csv'):
            self.assertTrue((intermediates / name).exists())

    def test_tau_sensitivity(self):
        stdout = self.run_command('bounds', '--dist', 'squares', '--eps', '0.05', '--tau-sensitivity')
        self.assertIn('tau_unc=0.01 ', stdout)
        self.assertIn('tau_unc=0.0001 ', stdout)

    def test_exit_codes(self):
        self.assertExitCode(EXIT_USAGE, 'bounds', '--dist', 'squares', '--eps', '-0.1')
        self.assertExitCode(EXIT_USAGE, 'bounds', '--dist', 'squares', '--eps', '0.05', '--tau-unc', '0.7')
        self.assertExitCode(EXIT_IO, 'bounds', '--dist', 'kde', '--samples', '/nonexistent/samples.csv', '--eps', '0.1')
        error = self.assertExitCode(
            EXIT_NUMERIC, 'bounds', '--dist', 'squares', '--grid', '0,0,0.01,0.01,150,100', '--eps', '0.05',
        )
        self.assertIn('--grid', str(error))


class ConfigFileTests(CommandTestCase):

    def write_config(self, body):
        path = self.out / 'robust-bound.cfg'
        path.write_text(body, encoding='utf-8')
        return str(path)

    def test_flags_override_config_values(self):
        config = self.write_config('eps=0.1\nnorm=l2\ntau-unc=0.01\ndist=squares\n')
        self.run_command('bounds', '--config', config, '--eps', '0.05')
        report = (self.out / 'bounds.txt').read_text(encoding='utf-8')
        self.assertIn('norm=l2 epsilon=0.05 ', report)
        self.assertIn('tau_unc=0.01 ', report)

    def test_unknown_keys_are_reported(self):
        config = self.write_config('dist=squares\neps=0.02\ncolour=blue\n')
        with self.assertLogs('cli.base', 'WARNING') as logs:
            self.run_command('bounds', '--config', config)
        self.assertIn('colour', logs.output[0])

    def test_bad_config_value(self):
        config = self.write_config('dist=squares\neps=wide\n')
        self.assertExitCode(EXIT_USAGE, 'bounds', '--config', config)

    def test_bad_choice(self):
        config = self.write_config('dist=circles\neps=0.1\n')
        self.assertExitCode(EXIT_USAGE, 'bounds', '--config', config)

    def test_missing_config(self):
        self.assertExitCode(EXIT_IO, 'bounds', '--config', str(self.out / 'missing.cfg'))


class DensityCommandTests(CommandTestCase):

    def test_saved_density_round_trips_through_dir(self):
        self.run_command('density', 'squares')
        stdout = self.run_command('bayes_error', '--dist', 'dir', '--density-dir', str(self.out / 'density'))
        self.assertIn('beta_D 0.250000', stdout)
        self.assertIn('K_D mass 0.500000 volume 0.500000', stdout)

    def test_convolve(self):
        stdout = self.run_command('convolve', '--dist', 'squares', '--norm', 'l2', '--eps', '0.05')
        self.assertIn('beta_Dprime', stdout)
        self.assertTrue((self.out / 'convolved' / 'conditional_1.csv').exists())

    def test_mixture_needs_means(self):
        self.assertExitCode(EXIT_USAGE, 'bayes_error', '--dist', 'mixture')

    def test_zeta_sharp(self):
        stdout = self.run_command('zeta_sharp', '--dist', 'squares', '--eps', '0.05')
        self.assertTrue(stdout.startswith('zeta_sharp '))

    def test_convolve_and_zeta_sharp_dump_their_stages(self):
        self.run_command('convolve', '--dist', 'squares', '--eps', '0.05', '--dump-intermediates')
        for name in ('kernel.csv', 'region_D.csv', 'region_Dprime.csv'):
            self.assertTrue((self.out / 'intermediates' / name).exists())
        self.run_command('zeta_sharp', '--dist', 'squares', '--eps', '0.05', '--dump-intermediates')
        self.assertTrue((self.out / 'intermediates' / 'dprime' / 'conditional_0.csv').exists())


class SampleCommandTests(CommandTestCase):

    def test_samples_and_predictions(self):
        self.run_command('sample', '--dist', 'squares', '--n', '50', '--seed', '3', '--with-predictions')
        samples = (self.out / 'samples.csv').read_text(encoding='utf-8').splitlines()
        self.assertIn('seed=3', samples[0])
        self.assertEqual(samples[1], 'x1,x2,label')
        self.assertEqual(len(samples), 52)
        predictions = (self.out / 'samples_predictions.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(len(predictions), 52)

    def test_identical_runs_write_identical_files(self):
        self.run_command('sample', '--dist', 'moons', '--n', '20', '--seed', '8', '--name', 'first')
        self.run_command('sample', '--dist', 'moons', '--n', '20', '--seed', '8', '--name', 'second')
        first = (self.out / 'first.csv').read_bytes()
        self.assertEqual(first, (self.out / 'second.csv').read_bytes())

    def test_neighbour_correctness_on_drawn_samples(self):
        self.run_command('sample', '--dist', 'squares', '--n', '100', '--seed', '4')
        samples = str(self.out / 'samples.csv')
        self.run_command('correctness', 'alg2', '--dist', 'squares', '--test', samples, '--theta', '0')
        lines = (self.out / 'correctness_alg2.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[1], 'theta,alpha,alpha_vacuous,coverage,n_test,n_reference')
        self.assertEqual(lines[2].split(',')[3], '1')

    def test_product(self):
        self.run_command('correctness', 'product', '--dist', 'squares', '--eps', '0.05', '--n', '0,10', '--trials', '20')
        lines = (self.out / 'correctness_product.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[2].split(',')[:2], ['0', '1'])
        self.assertEqual(len(lines), 4)


class RenderTests(CommandTestCase):

    def test_render_command(self):
        spec = GridSpec(0.0, 0.0, 0.1, 0.1, 20, 10)
        source = write_grid(Grid2D(spec, np.random.default_rng(1).random(spec.shape)), self.out / 'field.csv')
        self.run_command('render', str(source), '--center', '0.5', '--max-cells', '10')
        svg = (self.out / 'field.svg').read_text(encoding='utf-8')
        self.assertTrue(svg.startswith('<?xml'))
        self.assertIn('<!-- robust-bound ', svg)
        self.assertIn('center="0.5"', svg)
        self.assertIn('blocks="10x10"', svg)
        # 10 x 10 averaged cells plus the 32 legend swatches
        self.assertEqual(svg.count('<rect'), 100 + 32)

    def test_block_average_keeps_the_mean(self):
        values = np.arange(16, dtype=float).reshape(4, 4)
        np.testing.assert_allclose(block_average(values, 2), [[2.5, 4.5], [10.5, 12.5]])

    def test_rejects_a_degenerate_scale(self):
        g = Grid2D.constant(GridSpec(0.0, 0.0, 1.0, 1.0, 4, 4), 1.0)
        with self.assertRaises(ValueError):
            render_heatmap(g, vmin=1.0, vmax=0.0)


class UnreadableInputTests(CommandTestCase):

    def write_bytes(self, name, body):
        path = self.out / name
        path.write_bytes(body)
        return str(path)

    def test_sample_file_not_utf8(self):
        path = self.write_bytes('samples.csv', b'x1,x2,label\n\xff\xfe,0,1\n')
        error = self.assertExitCode(EXIT_IO, 'bayes_error', '--dist', 'kde', '--samples', path)
        self.assertIn('UTF-8', str(error))

    def test_grid_file_not_utf8(self):
        path = self.write_bytes('field.csv', b'# 0,0,1,1,2,1\n\xff\xfe,1\n')
        self.assertExitCode(EXIT_IO, 'render', path)

    def test_config_not_utf8(self):
        path = self.write_bytes('robust-bound.cfg', b'dist=squares\neps=\xff\n')
        self.assertExitCode(EXIT_IO, 'bounds', '--config', path)
