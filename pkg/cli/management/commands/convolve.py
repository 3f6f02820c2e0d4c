from bayes.analysis import bayes_error, bayes_error_growth, uncertainty_region
from cli.base import BoundCommand
from convolution.engine import convolve_distribution
from density.storage import save_density
from grid.csvio import write_grid
from vicinity.kernels import kernel_for


class Command(BoundCommand):
    help = "Convolve a distribution with a vicinity kernel (D' = D * v) and save the result"
    uses_distribution = True
    dumps_intermediates = True

    def add_command_arguments(self, parser):
        parser.add_argument('--norm', choices=('linf', 'l2'), help='Vicinity norm (default linf)')
        parser.add_argument('--eps', type=float, help='Vicinity radius')

    def handle(self, *args, **options):
        d = self.build_distribution(options)
        tau = self.tau_unc(options)
        kernel = kernel_for(self.norm(options), self.required(options, 'eps'), d.spec)
        dprime = convolve_distribution(d, kernel)

        target = self.out_dir(options) / 'convolved'
        save_density(dprime, target, self.provenance(options, grid=d.spec))

        beta, beta_prime = bayes_error(d), bayes_error(dprime)
        growth = bayes_error_growth(beta, beta_prime)
        self.say(f'{kernel.label()} kernel {kernel.shape[0]}x{kernel.shape[1]} cells, eps_eff {kernel.eps_eff:.6g}')
        self.say(f'beta_D      {beta:.6f}')
        self.say(f'beta_Dprime {beta_prime:.6f}' + (f' (growth {growth:+.2%})' if growth is not None else ''))
        if options['dump_intermediates']:
            out = self.out_dir(options) / 'intermediates'
            header = self.provenance(options, grid=d.spec, tau_unc=tau)
            write_grid(kernel.kernel, out / 'kernel.csv', header)
            write_grid(uncertainty_region(d, tau).mask, out / 'region_D.csv', header)
            write_grid(uncertainty_region(dprime, tau).mask, out / 'region_Dprime.csv', header)
            self.say(f'Intermediates written to {out}')
        self.done(f'Convolved density written to {target}')
