"""
Shared plumbing for the robust-bound management commands: global flags,
--config files, distribution selection, provenance and exit codes.
"""
import logging
from pathlib import Path

import numpy as np
from decouple import Config, Csv, RepositoryEnv
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from core.conf import get_setting
from core.exceptions import DataFileError, NumericError, ParameterError, RobustBoundError
from core.provenance import provenance_line
from density.builders import make_gaussian_mixture, make_uniform_patches, overlapping_squares
from density.kde import AUTO, default_kde_spec, kde_fit
from density.models import MoonsParams
from density.moons import default_spec, moons_density
from density.samples import read_samples
from density.storage import load_density, save_density
from grid.csvio import write_grid
from grid.models import GridSpec
from vicinity.models import Norm

logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

DISTRIBUTIONS = ('moons', 'squares', 'mixture', 'kde', 'dir')
VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def float_list(name):
    """argparse type for comma-separated reals"""
    parse = Csv(cast=float)

    def cast(text):
        try:
            return parse(text)
        except ValueError:
            raise ParameterError(name, f'expected comma-separated numbers, got {text!r}')
    cast.__name__ = name
    return cast


def bandwidth_value(text):
    text = str(text).strip()
    return AUTO if text.lower() == AUTO else float(text)


class BoundCommand(BaseCommand):
    """Base for every robust-bound sub-command"""
    requires_system_checks = []
    uses_distribution = False
    dumps_intermediates = False

    # Parser

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        self.option_actions = {action.dest: action for action in parser._actions}
        return parser

    def add_arguments(self, parser):
        group = parser.add_argument_group('global options')
        group.add_argument('--grid', type=GridSpec.parse, help='Grid as x0,y0,dx,dy,nx,ny')
        group.add_argument('--tau-unc', type=float, help='Uncertainty tolerance in [0, 0.5)')
        group.add_argument('--seed', type=int, help='Random seed')
        group.add_argument('--out', help='Output directory (default: out)')
        group.add_argument('--config', help='key=value file mirroring the long flags')
        if self.dumps_intermediates:
            group.add_argument('--dump-intermediates', action='store_true', help='Also write every intermediate grid')
        if self.uses_distribution:
            self.add_distribution_arguments(parser)
        self.add_command_arguments(parser)

    def add_distribution_arguments(self, parser, kind_positional=False):
        group = parser.add_argument_group('distribution')
        if kind_positional:
            group.add_argument('dist', choices=DISTRIBUTIONS[:-1], help='Distribution to build')
        else:
            group.add_argument('--dist', choices=DISTRIBUTIONS, help='Distribution to use (default: moons)')
        group.add_argument('--sigma', type=float, help='Moons smearing std-dev')
        group.add_argument('--resolution', type=int, help='Cells per axis when --grid is not given')
        group.add_argument('--samples', help='Labelled sample CSV for --dist kde')
        group.add_argument('--bandwidth', type=bandwidth_value, help='KDE bandwidth or "auto"')
        group.add_argument('--density-dir', help='Saved density directory for --dist dir')
        group.add_argument('--priors', type=float_list('priors'), help='Class priors for mixture/squares')
        group.add_argument('--means', type=float_list('means'), help='Mixture means x,y per class')
        group.add_argument('--sigmas', type=float_list('sigmas'), help='Mixture std-devs, one per class')
        group.add_argument('--rectangles', type=float_list('rectangles'),
                           help='Uniform patches as x_min,y_min,x_max,y_max per class')

    def add_command_arguments(self, parser):
        pass

    # Execution

    def execute(self, *args, **options):
        level = VERBOSITY_LEVELS.get(options.get('verbosity', 1), logging.DEBUG)
        for app in settings.LOCAL_APPS:
            logging.getLogger(app).setLevel(level)
        try:
            options = self.apply_config(options)
            return super().execute(*args, **options)
        except ParameterError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE)
        except NumericError as exc:
            raise CommandError(str(exc), returncode=EXIT_NUMERIC)
        except (DataFileError, OSError) as exc:
            raise CommandError(str(exc), returncode=EXIT_IO)
        except RobustBoundError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE)

    def apply_config(self, options):
        """Fill options the command line left unset from the --config file"""
        path = options.get('config')
        if not path:
            return options
        try:
            repository = RepositoryEnv(path)
        except OSError as exc:
            raise DataFileError(path, f'cannot read config ({exc.strerror})')
        except UnicodeDecodeError as exc:
            raise DataFileError(path, f'not UTF-8 text (byte {exc.start})')
        values = Config(repository)
        options = dict(options)
        actions = getattr(self, 'option_actions', {})
        for key in repository.data:
            dest = key.replace('-', '_')
            action = actions.get(dest)
            if action is None or dest == 'config':
                logger.warning(f'config {path}: ignoring unknown key {key!r}')
                continue
            current = options.get(dest)
            if current is not None and not (action.nargs == 0 and current is False):
                continue
            if action.nargs == 0:
                options[dest] = values(key, cast=bool)
                continue
            try:
                value = values(key, cast=action.type) if action.type else values(key)
            except ValueError:
                raise ParameterError(dest, f'bad value {repository.data[key]!r} in {path}')
            if action.choices is not None and value not in action.choices:
                raise ParameterError(dest, f'{value!r} is not one of {list(action.choices)}')
            options[dest] = value
        return options

    # Helpers

    def tau_unc(self, options):
        value = options.get('tau_unc')
        return get_setting('ROBUST_BOUND_TAU_UNC') if value is None else value

    def seed(self, options):
        value = options.get('seed')
        return get_setting('ROBUST_BOUND_SEED') if value is None else value

    def out_dir(self, options):
        path = Path(options.get('out') or 'out')
        path.mkdir(parents=True, exist_ok=True)
        return path

    def provenance(self, options, grid=None, tau_unc=None):
        grid = grid if grid is not None else options.get('grid')
        return provenance_line(self.command_name, self.seed(options), grid, tau_unc)

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1].replace('_', '-')

    def required(self, options, dest):
        value = options.get(dest)
        if value is None:
            raise ParameterError(dest, f'--{dest.replace("_", "-")} is required (flag or config key)')
        return value

    def norm(self, options):
        return Norm.parse(options.get('norm') or 'linf')

    def say(self, message):
        self.stdout.write(message)

    def done(self, message):
        self.stdout.write(self.style.SUCCESS(message))

    def dump_stages(self, stages, out, header):
        """Every grid of one bounds evaluation under `out`"""
        save_density(stages.dprime, out / 'dprime', header)
        save_density(stages.hardened, out / 'hardened', header)
        save_density(stages.dagger, out / 'dagger', header)
        write_grid(stages.region_d.mask, out / 'region_D.csv', header)
        write_grid(stages.region_dprime.mask, out / 'region_Dprime.csv', header)
        write_grid(stages.region_dagger.mask, out / 'region_Ddagger.csv', header)

    # Distributions

    def build_distribution(self, options):
        """The LabeledDensity selected by --dist and its parameters"""
        kind = options.get('dist') or 'moons'
        spec = options.get('grid')
        resolution = options.get('resolution') or get_setting('ROBUST_BOUND_RESOLUTION')
        priors = options.get('priors')

        if kind == 'moons':
            sigma = options.get('sigma')
            params = MoonsParams(
                sigma=get_setting('ROBUST_BOUND_MOONS_SIGMA') if sigma is None else sigma,
                quadrature_points=get_setting('ROBUST_BOUND_MOONS_QUADRATURE_POINTS'),
            )
            return moons_density(params, spec or default_spec(resolution), priors or (0.5, 0.5))

        if kind == 'squares':
            if options.get('rectangles'):
                return make_uniform_patches(
                    priors or self._even_priors(len(options['rectangles']) // 4),
                    self._reshape(options['rectangles'], 4, 'rectangles'),
                    self._require(spec, 'grid', '--dist squares with --rectangles'),
                )
            return overlapping_squares(spec, priors or (0.5, 0.5))

        if kind == 'mixture':
            means = self._reshape(self._require(options.get('means'), 'means', '--dist mixture'), 2, 'means')
            sigmas = options.get('sigmas') or [1.0] * len(means)
            spec = spec or GridSpec.from_extents(-6.0, 6.0, -6.0, 6.0, resolution)
            return make_gaussian_mixture(priors or self._even_priors(len(means)), means, sigmas, spec)

        if kind == 'kde':
            samples = read_samples(self._require(options.get('samples'), 'samples', '--dist kde'))
            bandwidth = options.get('bandwidth') or AUTO
            spec = spec or default_kde_spec(samples, bandwidth, resolution)
            return kde_fit(samples, bandwidth, spec)

        if kind == 'dir':
            return load_density(self._require(options.get('density_dir'), 'density_dir', '--dist dir'))

        raise ParameterError('dist', f'unknown distribution {kind!r}')

    @staticmethod
    def _require(value, name, context):
        if value is None:
            raise ParameterError(name, f'required with {context}')
        return value

    @staticmethod
    def _reshape(values, width, name):
        if len(values) % width:
            raise ParameterError(name, f'expected groups of {width} numbers, got {len(values)} values')
        return np.asarray(values, dtype=float).reshape(-1, width)

    @staticmethod
    def _even_priors(k):
        return np.full(k, 1.0 / k)
