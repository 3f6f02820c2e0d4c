from bayes.analysis import bayes_classifier
from cli.base import BoundCommand, float_list
from core.exceptions import ParameterError
from correctness.algorithms import all_correct_probability, neighbor_correctness, neighbor_correctness_self
from correctness.predictions import read_predictions
from density.samples import read_samples
from vicinity.kernels import kernel_for

ALG1 = 'alg1'
ALG2 = 'alg2'
PRODUCT = 'product'


class Command(BoundCommand):
    help = 'Sample-based robustness: neighbour correctness (alg1, alg2) or the all-correct product'
    uses_distribution = True

    def add_command_arguments(self, parser):
        parser.add_argument('mode', choices=(ALG1, ALG2, PRODUCT))
        parser.add_argument('--test', help='Sample CSV of test points (alg1, alg2)')
        parser.add_argument('--reference', help='Sample CSV of reference points (alg1)')
        parser.add_argument('--predictions', help='index,predicted_label CSV for the reference points; '
                                                  'default is the grid Bayes classifier of --dist')
        parser.add_argument('--theta', type=float, help='Chebyshev neighbourhood radius')
        parser.add_argument('--norm', choices=('linf', 'l2'), help='Vicinity norm for product (default linf)')
        parser.add_argument('--eps', type=float, help='Vicinity radius for product')
        parser.add_argument('--n', type=float_list('n'), help='Sample counts for product, e.g. 0,1,10,100')
        parser.add_argument('--trials', type=int, default=1000, help='Monte-Carlo trials for product')

    def handle(self, *args, **options):
        out = self.out_dir(options)
        header = self.provenance(options, tau_unc=None)
        if options['mode'] == PRODUCT:
            rows = self.product(options)
            columns = 'n_samples,estimate,stderr,trials'
        else:
            rows = self.neighbours(options)
            columns = 'theta,alpha,alpha_vacuous,coverage,n_test,n_reference'
        path = out / f'correctness_{options["mode"]}.csv'
        path.write_text('\n'.join([header, columns] + rows) + '\n', encoding='utf-8')
        self.done(f'Results written to {path}')

    def neighbours(self, options):
        theta = self.required(options, 'theta')
        test = read_samples(self.required(options, 'test'))
        if options['mode'] == ALG1:
            reference = read_samples(self.required(options, 'reference'))
        else:
            reference = test
        predictions = self.predictions(options, reference)

        if options['mode'] == ALG1:
            result = neighbor_correctness(test, reference, predictions, theta)
        else:
            result = neighbor_correctness_self(test, predictions, theta)
        self.say(str(result))
        return [
            f'{result.theta:.9g},{result.alpha:.9g},{result.alpha_vacuous:.9g},'
            f'{result.coverage:.9g},{result.n_test},{result.n_reference}'
        ]

    def predictions(self, options, reference):
        if options.get('predictions'):
            return read_predictions(options['predictions'], expected=len(reference))
        return bayes_classifier(self.build_distribution(options)).predict(reference.points)

    def product(self, options):
        counts = [int(n) for n in self.required(options, 'n')]
        if any(n < 0 for n in counts):
            raise ParameterError('n', f'sample counts must be >= 0, got {counts}')
        d = self.build_distribution(options)
        kernel = kernel_for(self.norm(options), self.required(options, 'eps'), d.spec)
        rows = []
        for n in counts:
            estimate = all_correct_probability(d, kernel, n, options['trials'], self.seed(options))
            self.say(str(estimate))
            rows.append(f'{n},{estimate.estimate:.9g},{estimate.stderr:.9g},{estimate.trials}')
        return rows
