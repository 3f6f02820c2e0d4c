from pathlib import Path

from cli.base import BoundCommand
from cli.heatmap import render_heatmap
from grid.csvio import read_grid


class Command(BoundCommand):
    help = 'Render grid files as SVG heatmaps with a fixed diverging colour scale'

    def add_command_arguments(self, parser):
        parser.add_argument('grids', nargs='+', help='Grid CSV files')
        parser.add_argument('--vmin', type=float, help='Low end of the colour scale (default: grid minimum)')
        parser.add_argument('--vmax', type=float, help='High end of the colour scale (default: grid maximum)')
        parser.add_argument('--center', type=float, help='Value drawn white (default: midpoint)')
        parser.add_argument('--max-cells', type=int, help='Cells per axis after block averaging')

    def handle(self, *args, **options):
        out = self.out_dir(options)
        for source in options['grids']:
            g = read_grid(source)
            svg = render_heatmap(
                g,
                title=Path(source).stem,
                vmin=options.get('vmin'),
                vmax=options.get('vmax'),
                center=options.get('center'),
                max_cells=options.get('max_cells'),
                provenance=self.provenance(options, grid=g.spec),
            )
            target = out / f'{Path(source).stem}.svg'
            target.write_text(svg, encoding='utf-8')
            self.done(f'{source} -> {target}')
