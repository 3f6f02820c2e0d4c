from bayes.analysis import bayes_classifier, bayes_error, classifier_error, duplicated_input_check, uncertainty_region
from cli.base import BoundCommand
from density.samples import read_samples
from grid.csvio import write_grid


class Command(BoundCommand):
    help = 'Bayes error and uncertainty region of a distribution'
    uses_distribution = True
    dumps_intermediates = True

    def add_command_arguments(self, parser):
        parser.add_argument('--evaluate', help='Sample CSV to score the grid Bayes classifier on')

    def handle(self, *args, **options):
        d = self.build_distribution(options)
        tau = self.tau_unc(options)
        beta = bayes_error(d)
        region = uncertainty_region(d, tau)

        self.say(str(d))
        self.say(f'beta_D {beta:.6f}')
        self.say(f'K_D mass {region.mass:.6f} volume {region.volume:.6f} (tau_unc {tau:g})')

        if options.get('evaluate'):
            samples = read_samples(options['evaluate'])
            error = classifier_error(bayes_classifier(d), samples)
            self.say(f'classifier error on {len(samples)} samples: {error:.6f}')
            self.say(f'duplicated inputs with conflicting labels: {duplicated_input_check(samples)}')

        if options['dump_intermediates']:
            out = self.out_dir(options) / 'intermediates'
            header = self.provenance(options, grid=d.spec, tau_unc=tau)
            write_grid(d.evidence(), out / 'evidence.csv', header)
            write_grid(region.mask, out / 'region_D.csv', header)
            self.done(f'Intermediates written to {out}')
