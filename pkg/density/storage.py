"""LabeledDensity on disk: a directory with priors.csv and one grid file per class."""
import logging
from pathlib import Path

import numpy as np

from core.exceptions import DataFileError
from grid.csvio import read_grid, write_grid

from .models import LabeledDensity

logger = logging.getLogger(__name__)

PRIORS_FILE = 'priors.csv'


def conditional_file(k):
    return f'conditional_{k}.csv'


def save_density(d, directory, provenance=None):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [provenance] if provenance else []
    lines.append('class,prior')
    lines.extend(f'{k},{p:.17g}' for k, p in enumerate(d.priors))
    (directory / PRIORS_FILE).write_text('\n'.join(lines) + '\n', encoding='utf-8')
    for k, cond in enumerate(d.conditionals):
        write_grid(cond, directory / conditional_file(k), provenance)
    logger.info(f'Wrote {d.num_classes}-class density to {directory}')
    return directory


def load_density(directory):
    directory = Path(directory)
    path = directory / PRIORS_FILE
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise DataFileError(path, f'cannot read priors ({exc.strerror})')
    except UnicodeDecodeError as exc:
        raise DataFileError(path, f'not UTF-8 text (byte {exc.start})')

    priors = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith('#') or line == 'class,prior':
            continue
        try:
            k, prior = line.split(',')
            if int(k) != len(priors):
                raise ValueError
            priors.append(float(prior))
        except ValueError:
            raise DataFileError(path, f'malformed prior line {line!r}')

    conditionals = tuple(read_grid(directory / conditional_file(k)) for k in range(len(priors)))
    return LabeledDensity(np.array(priors), conditionals)
