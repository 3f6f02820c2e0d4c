from cli.base import BoundCommand
from density.storage import save_density
from grid.quadrature import integrate


class Command(BoundCommand):
    help = 'Build a labelled grid distribution (moons, mixture, squares or kde) and save it'

    def add_command_arguments(self, parser):
        self.add_distribution_arguments(parser, kind_positional=True)

    def handle(self, *args, **options):
        d = self.build_distribution(options)
        target = self.out_dir(options) / 'density'
        save_density(d, target, self.provenance(options, grid=d.spec))

        self.say(str(d))
        for k, cond in enumerate(d.conditionals):
            self.say(f'  class {k}: prior {d.priors[k]:.6g}, mass {integrate(cond):.9g}')
        self.done(f'Density written to {target}')
