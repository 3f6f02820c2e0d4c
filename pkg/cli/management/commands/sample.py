import numpy as np

from bayes.analysis import bayes_classifier
from cli.base import BoundCommand
from core.conf import get_setting
from correctness.predictions import write_predictions
from density.models import MoonsParams
from density.moons import sample_moons
from density.samples import sample_density, write_samples


class Command(BoundCommand):
    help = 'Draw labelled samples from a distribution into samples.csv'
    uses_distribution = True

    def add_command_arguments(self, parser):
        parser.add_argument('--n', type=int, default=1000, help='Number of samples')
        parser.add_argument('--name', default='samples', help='Output file stem')
        parser.add_argument('--with-predictions', action='store_true',
                            help='Also write the grid Bayes classifier predictions for the samples')

    def handle(self, *args, **options):
        rng = np.random.default_rng(self.seed(options))
        kind = options.get('dist') or 'moons'
        d = None
        if kind == 'moons':
            # The generative model, not the rasterized grid.
            sigma = options.get('sigma')
            params = MoonsParams(get_setting('ROBUST_BOUND_MOONS_SIGMA') if sigma is None else sigma)
            samples = sample_moons(options['n'], params, rng, options.get('priors') or (0.5, 0.5))
        else:
            d = self.build_distribution(options)
            samples = sample_density(d, options['n'], rng)

        out = self.out_dir(options)
        header = self.provenance(options)
        path = write_samples(samples, out / f'{options["name"]}.csv', header)
        self.done(f'{len(samples)} samples written to {path}')

        if options['with_predictions']:
            d = d or self.build_distribution(options)
            labels = bayes_classifier(d).predict(samples.points)
            target = write_predictions(labels, out / f'{options["name"]}_predictions.csv', header)
            self.done(f'Bayes classifier predictions written to {target}')
