"""Sample files (`x1,x2,label`) and sampling from grid densities."""
import csv
import logging
from pathlib import Path

import numpy as np

from core.exceptions import DataFileError, ParameterError

from .models import SampleSet

logger = logging.getLogger(__name__)

HEADER = ['x1', 'x2', 'label']


def read_samples(path):
    path = Path(path)
    points, labels = [], []
    try:
        with path.open(encoding='utf-8', newline='') as handle:
            rows = [row for row in csv.reader(handle) if row and not row[0].startswith('#')]
    except OSError as exc:
        raise DataFileError(path, f'cannot read sample file ({exc.strerror})')
    except UnicodeDecodeError as exc:
        raise DataFileError(path, f'not UTF-8 text (byte {exc.start})')

    if not rows or [c.strip() for c in rows[0]] != HEADER:
        raise DataFileError(path, 'expected header "x1,x2,label"')
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise DataFileError(path, f'line {number}: expected 3 fields, got {len(row)}')
        try:
            points.append((float(row[0]), float(row[1])))
            label = int(row[2])
        except ValueError:
            raise DataFileError(path, f'line {number}: malformed row {row!r}')
        if label < 0:
            raise DataFileError(path, f'line {number}: label must be >= 0, got {label}')
        labels.append(label)

    logger.info(f'Read {len(labels)} samples from {path}')
    return SampleSet(np.array(points).reshape(-1, 2), np.array(labels, dtype=np.int64))


def write_samples(samples, path, provenance=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='') as handle:
        if provenance:
            handle.write(provenance + '\n')
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(HEADER)
        for (x1, x2), label in zip(samples.points, samples.labels):
            writer.writerow([f'{x1:.17g}', f'{x2:.17g}', int(label)])
    return path


def sample_density(d, n, rng):
    """
    Draw n labelled points from a grid distribution: class by prior, cell by
    conditional mass, position uniform inside the cell.
    """
    if n < 0:
        raise ParameterError('n', f'must be >= 0, got {n}')
    spec = d.spec
    labels = rng.choice(d.num_classes, size=n, p=d.priors / d.priors.sum())
    flat_cells = np.empty(n, dtype=np.int64)
    for k in range(d.num_classes):
        chosen = np.flatnonzero(labels == k)
        if not len(chosen):
            continue
        weights = d.conditionals[k].values.reshape(-1)
        flat_cells[chosen] = rng.choice(weights.size, size=len(chosen), p=weights / weights.sum())
    ix, iy = np.unravel_index(flat_cells, spec.shape)
    jitter = rng.random((n, 2))
    points = np.column_stack([
        spec.x0 + (ix + jitter[:, 0]) * spec.dx,
        spec.y0 + (iy + jitter[:, 1]) * spec.dy,
    ])
    return SampleSet(points, labels)
