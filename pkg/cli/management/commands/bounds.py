from bounds.calculators import compute_bounds, cor1_lower
from bounds.sweep import DEFAULT_TAUS, tau_sensitivity, write_report
from cli.base import BoundCommand
from core.exceptions import ParameterError
from vicinity.kernels import kernel_for


class Command(BoundCommand):
    help = 'Robustness error bounds for one vicinity, or zeta_cor1 for a given Bayes error'
    uses_distribution = True
    dumps_intermediates = True

    def add_command_arguments(self, parser):
        parser.add_argument('--norm', choices=('linf', 'l2'), help='Vicinity norm (default linf)')
        parser.add_argument('--eps', type=float, help='Vicinity radius')
        parser.add_argument('--p-min', type=float, help='Override p_min in the zeta_cor2 margin')
        parser.add_argument('--tau-sensitivity', action='store_true',
                            help='Also report every bound at tau_unc 1e-2, 1e-3 and 1e-4')
        scalar = parser.add_argument_group('scalar mode')
        scalar.add_argument('--beta', type=float, help='Known Bayes error; prints beta * K / (K - 1)')
        scalar.add_argument('--classes', type=int, help='Number of classes K for --beta')

    def handle(self, *args, **options):
        if options.get('beta') is not None:
            return self.scalar(options)
        if options.get('eps') is None:
            raise ParameterError('eps', 'required unless --beta is given')

        d = self.build_distribution(options)
        tau = self.tau_unc(options)
        kernel = kernel_for(self.norm(options), options['eps'], d.spec)
        report = compute_bounds(d, kernel, tau, options.get('p_min'), keep_stages=options['dump_intermediates'])
        reports = [report]
        if options['tau_sensitivity']:
            reports += tau_sensitivity(d, kernel, DEFAULT_TAUS, options.get('p_min'))

        out = self.out_dir(options)
        header = self.provenance(options, grid=d.spec, tau_unc=tau)
        write_report(reports, out / 'bounds.txt', header)
        if options['tau_sensitivity']:
            self.say('tau_unc sensitivity:')
            for row in reports[1:]:
                self.say(f'  tau_unc={row.tau_unc:g} zeta_thm3={row.zeta_thm3:.6f} '
                         f'zeta_sharp={row.zeta_sharp:.6f} zeta_D={row.zeta_D:.6f}')
        if options['dump_intermediates']:
            self.dump_stages(report.stages, out / 'intermediates', header)
            self.say(f'Intermediates written to {out / "intermediates"}')

        self.say(str(report))
        self.done(f'Report written to {out / "bounds.txt"}')

    def scalar(self, options):
        classes = options.get('classes')
        if classes is None:
            raise ParameterError('classes', 'required with --beta')
        zeta = cor1_lower(options['beta'], classes)
        self.say(f'zeta_cor1 {zeta:.9g}  upper bound {1.0 - zeta:.9g}')
