from bounds.sweep import epsilon_sweep, write_sweep_csv
from cli.base import BoundCommand, float_list


class Command(BoundCommand):
    help = 'Bounds over a list of vicinity radii, written to sweep.csv'
    uses_distribution = True
    dumps_intermediates = True

    def add_command_arguments(self, parser):
        parser.add_argument('--norm', choices=('linf', 'l2'), help='Vicinity norm (default linf)')
        parser.add_argument('--eps', type=float_list('eps'), help='Ascending radii, e.g. 0,0.05,0.1')
        parser.add_argument('--p-min', type=float, help='Override p_min in the zeta_cor2 margin')

    def handle(self, *args, **options):
        d = self.build_distribution(options)
        tau = self.tau_unc(options)
        norm = self.norm(options)
        dump = options['dump_intermediates']
        reports = epsilon_sweep(d, norm, self.required(options, 'eps'), tau, options.get('p_min'), keep_stages=dump)

        out = self.out_dir(options)
        header = self.provenance(options, grid=d.spec, tau_unc=tau)
        path = out / 'sweep.csv'
        write_sweep_csv(reports, path, header)
        for report in reports:
            self.say(f'eps={report.epsilon:g} beta_Dprime={report.beta_Dprime:.6f} '
                     f'zeta_D={report.zeta_D:.6f} upper bound {report.ub_zeta_D:.6f}')
            if dump:
                self.dump_stages(report.stages, out / 'intermediates' / f'eps_{report.epsilon:g}', header)
        if dump:
            self.say(f'Intermediates written to {out / "intermediates"}')
        self.done(f'{len(reports)} rows written to {path}')
