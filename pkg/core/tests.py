from django.test import SimpleTestCase, override_settings

from grid.models import GridSpec
from robustbound import __version__

from .conf import DEFAULTS, get_setting
from .exceptions import DataFileError, MassLeakError, NumericError, ParameterError, RobustBoundError
from .provenance import provenance_line


class ExceptionTests(SimpleTestCase):

    def test_parameter_error_names_the_parameter(self):
        error = ParameterError('epsilon', 'must be >= 0, got -1')
        self.assertEqual(error.parameter, 'epsilon')
        self.assertEqual(str(error), 'epsilon: must be >= 0, got -1')
        self.assertIsInstance(error, ValueError)
        self.assertIsInstance(error, RobustBoundError)

    def test_mass_leak_is_numeric(self):
        error = MassLeakError('class 0', 0.02, 1e-3)
        self.assertIsInstance(error, NumericError)
        self.assertIn('0.02', str(error))
        self.assertIn('--grid', str(error))

    def test_data_file_error_keeps_the_path(self):
        error = DataFileError('samples.csv', 'line 3: malformed row')
        self.assertEqual(error.path, 'samples.csv')
        self.assertTrue(str(error).startswith('samples.csv: '))


class ProvenanceTests(SimpleTestCase):

    def test_full_line(self):
        line = provenance_line('sweep', 7, GridSpec(-2.0, -1.75, 0.25, 0.25, 20, 16), 1e-3)
        self.assertEqual(
            line,
            f'# robust-bound {__version__}, command=sweep, seed=7, grid=-2,-1.75,0.25,0.25,20,16, tau_unc=0.001',
        )

    def test_missing_values_are_dashes(self):
        self.assertEqual(provenance_line('render'), f'# robust-bound {__version__}, command=render, seed=-, grid=-, tau_unc=-')

    def test_no_timestamp(self):
        self.assertEqual(provenance_line('bounds', 0), provenance_line('bounds', 0))


class SettingsTests(SimpleTestCase):

    def test_defaults(self):
        self.assertEqual(get_setting('ROBUST_BOUND_TAU_UNC'), DEFAULTS['ROBUST_BOUND_TAU_UNC'])
        self.assertEqual(list(get_setting('ROBUST_BOUND_MOONS_EXTENTS')), [-2.0, 3.0, -1.75, 2.25])

    @override_settings(ROBUST_BOUND_RESOLUTION=64)
    def test_settings_take_precedence(self):
        self.assertEqual(get_setting('ROBUST_BOUND_RESOLUTION'), 64)
