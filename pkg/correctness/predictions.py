"""Prediction files: `index,predicted_label`, one row per reference sample in file order."""
import csv
from pathlib import Path

import numpy as np

from core.exceptions import DataFileError

HEADER = ['index', 'predicted_label']


def write_predictions(labels, path, provenance=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='') as handle:
        if provenance:
            handle.write(provenance + '\n')
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(HEADER)
        writer.writerows(enumerate(int(label) for label in labels))
    return path


def read_predictions(path, expected=None):
    path = Path(path)
    try:
        with path.open(encoding='utf-8', newline='') as handle:
            rows = [row for row in csv.reader(handle) if row and not row[0].startswith('#')]
    except OSError as exc:
        raise DataFileError(path, f'cannot read predictions ({exc.strerror})')
    except UnicodeDecodeError as exc:
        raise DataFileError(path, f'not UTF-8 text (byte {exc.start})')

    if not rows or [c.strip() for c in rows[0]] != HEADER:
        raise DataFileError(path, 'expected header "index,predicted_label"')
    labels = []
    for number, row in enumerate(rows[1:], start=2):
        try:
            index, label = (int(v) for v in row)
        except ValueError:
            raise DataFileError(path, f'line {number}: malformed row {row!r}')
        if index != len(labels):
            raise DataFileError(path, f'line {number}: expected index {len(labels)}, got {index}')
        labels.append(label)

    if expected is not None and len(labels) != expected:
        raise DataFileError(path, f'{len(labels)} predictions for {expected} reference samples')
    return np.array(labels, dtype=np.int64)
