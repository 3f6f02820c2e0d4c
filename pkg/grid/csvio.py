"""
Plain-text grid files.

Layout: optional provenance comment lines, the header `# x0,y0,dx,dy,nx,ny`,
then ny lines of nx comma-separated values, row index increasing in y.
"""
from pathlib import Path

import numpy as np

from core.exceptions import DataFileError, ParameterError

from .models import Grid2D, GridSpec


def format_grid(g, provenance=None):
    lines = []
    if provenance:
        lines.append(provenance)
    lines.append(f'# {g.spec.x0!r},{g.spec.y0!r},{g.spec.dx!r},{g.spec.dy!r},{g.spec.nx},{g.spec.ny}')
    for row in g.values.T:
        lines.append(','.join(f'{v:.17g}' for v in row))
    return '\n'.join(lines) + '\n'


def write_grid(g, path, provenance=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_grid(g, provenance), encoding='utf-8')
    return path


def read_grid(path):
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise DataFileError(path, f'cannot read grid file ({exc.strerror})')
    except UnicodeDecodeError as exc:
        raise DataFileError(path, f'not UTF-8 text (byte {exc.start})')

    spec = None
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith('#'):
            # Provenance lines are comments too; the header is the one that parses.
            try:
                spec = GridSpec.parse(line)
            except ParameterError:
                pass
            continue
        try:
            rows.append([float(v) for v in line.split(',')])
        except ValueError:
            raise DataFileError(path, f'non-numeric grid row: {line[:40]!r}')

    if spec is None:
        raise DataFileError(path, 'missing "# x0,y0,dx,dy,nx,ny" header')
    if len(rows) != spec.ny or any(len(r) != spec.nx for r in rows):
        raise DataFileError(path, f'expected {spec.ny} rows of {spec.nx} values')
    try:
        return Grid2D(spec, np.array(rows).T)
    except ParameterError as exc:
        raise DataFileError(path, str(exc))
