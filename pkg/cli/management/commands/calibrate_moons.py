from cli.base import BoundCommand
from core.conf import get_setting
from density.calibration import BISECT, EXHAUSTIVE, calibrate_moons
from density.moons import default_spec

CONFIG_FILE = 'moons_sigma.cfg'
TABLE_FILE = 'calibration.csv'


class Command(BoundCommand):
    help = 'Find the Moons sigma whose Bayes error matches a target'

    def add_command_arguments(self, parser):
        parser.add_argument('--target-beta', type=float, help='Bayes error to hit (default 0.0854)')
        parser.add_argument('--resolution', type=int, help='Cells per axis when --grid is not given')
        parser.add_argument('--search', choices=(BISECT, EXHAUSTIVE), default=BISECT)
        parser.add_argument('--no-refine', action='store_true', help='Stop at the best lattice sigma')

    def handle(self, *args, **options):
        spec = options.get('grid') or default_spec(options.get('resolution') or get_setting('ROBUST_BOUND_RESOLUTION'))
        result = calibrate_moons(
            target_beta=options.get('target_beta'),
            spec=spec,
            refine=not options['no_refine'],
            search=options['search'],
        )

        out = self.out_dir(options)
        header = self.provenance(options, grid=spec)
        (out / CONFIG_FILE).write_text(f'{header}\n{result.as_config()}', encoding='utf-8')
        rows = [header, 'sigma,beta'] + [f'{s:.9g},{b:.9g}' for s, b in result.table]
        (out / TABLE_FILE).write_text('\n'.join(rows) + '\n', encoding='utf-8')

        self.say(str(result))
        self.done(f'sigma={result.sigma:.6g} written to {out / CONFIG_FILE}')
