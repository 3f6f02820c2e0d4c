"""SVG heatmaps of Grid2D fields, rendered through the template engine."""
import math

import numpy as np
from django.template.loader import render_to_string

from core.conf import get_setting
from core.exceptions import ParameterError

TEMPLATE = 'render/heatmap.svg'
CELL_PX = 4

# Diverging ramp: blue at the low end, white at the center, red at the high end.
LOW = (33, 102, 172)
MID = (247, 247, 247)
HIGH = (178, 24, 43)


def block_average(values, max_cells):
    """Average non-overlapping blocks so neither axis exceeds max_cells"""
    nx, ny = values.shape
    fx, fy = math.ceil(nx / max_cells), math.ceil(ny / max_cells)
    px, py = -nx % fx, -ny % fy
    # Edge padding keeps partial blocks from being diluted by zeros.
    padded = np.pad(values, ((0, px), (0, py)), mode='edge')
    return padded.reshape(padded.shape[0] // fx, fx, padded.shape[1] // fy, fy).mean(axis=(1, 3))


def _mix(a, b, t):
    return tuple(int(round(a[i] + (b[i] - a[i]) * t)) for i in range(3))


def colour(value, vmin, vmax, center):
    if value <= center:
        t = 0.0 if center == vmin else (center - value) / (center - vmin)
        rgb = _mix(MID, LOW, min(max(t, 0.0), 1.0))
    else:
        t = 0.0 if vmax == center else (value - center) / (vmax - center)
        rgb = _mix(MID, HIGH, min(max(t, 0.0), 1.0))
    return '#{:02x}{:02x}{:02x}'.format(*rgb)


def render_heatmap(g, title='', vmin=None, vmax=None, center=None, max_cells=None, provenance=None):
    """SVG text for g. The colour scale is fixed by vmin/vmax/center and recorded in the output"""
    max_cells = max_cells or get_setting('ROBUST_BOUND_RENDER_MAX_CELLS')
    values = block_average(g.values, max_cells)
    vmin = float(g.values.min()) if vmin is None else float(vmin)
    vmax = float(g.values.max()) if vmax is None else float(vmax)
    if not vmax >= vmin:
        raise ParameterError('vmax', f'must be >= vmin ({vmin:g}), got {vmax:g}')
    center = (vmin + vmax) / 2.0 if center is None else float(center)
    if not vmin <= center <= vmax:
        raise ParameterError('center', f'must lie in [{vmin:g}, {vmax:g}], got {center:g}')

    nx, ny = values.shape
    cells = []
    for i in range(nx):
        for j in range(ny):
            # SVG y grows downward; row 0 of the picture is the top of the grid.
            cells.append({'x': i * CELL_PX, 'y': (ny - 1 - j) * CELL_PX, 'fill': colour(values[i, j], vmin, vmax, center)})

    legend = [
        {'x': k * CELL_PX * 2, 'fill': colour(vmin + (vmax - vmin) * k / 31, vmin, vmax, center)}
        for k in range(32)
    ]
    x0, x1, y0, y1 = g.spec.extents
    return render_to_string(TEMPLATE, {
        'title': title,
        'provenance': (provenance or '').lstrip('# ').replace('--', '- -'),
        'width': nx * CELL_PX,
        'height': ny * CELL_PX,
        'cell': CELL_PX,
        'cells': cells,
        'legend': legend,
        'legend_y': ny * CELL_PX + 8,
        'total_height': ny * CELL_PX + 40,
        'vmin': f'{vmin:.6g}',
        'vmax': f'{vmax:.6g}',
        'center': f'{center:.6g}',
        'extents': f'{x0:g},{x1:g},{y0:g},{y1:g}',
        'source': g.spec,
        'blocks': f'{nx}x{ny}',
    })
