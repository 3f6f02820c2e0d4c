"""Bounds over a range of vicinity sizes or uncertainty tolerances, and their files."""
import csv
import logging
from pathlib import Path

from core.exceptions import ParameterError
from vicinity.kernels import kernel_for

from .calculators import compute_bounds, run_stages
from .models import CSV_COLUMNS

logger = logging.getLogger(__name__)

DEFAULT_TAUS = (1e-2, 1e-3, 1e-4)


def epsilon_sweep(d, norm, eps_list, tau_unc=None, p_min_override=None, tau_density=None, leak_threshold=None,
                  keep_stages=False):
    """One BoundsReport per epsilon, all on the same distribution and tau_unc"""
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ParameterError('eps', 'the sweep needs at least one epsilon')
    if any(e < 0 for e in eps_list):
        raise ParameterError('eps', f'values must be >= 0, got {eps_list}')
    if eps_list != sorted(eps_list):
        raise ParameterError('eps', f'values must be sorted ascending, got {eps_list}')

    reports = []
    for i, eps in enumerate(eps_list, start=1):
        logger.info(f'Sweep point {i}/{len(eps_list)}: {norm} eps={eps:g}')
        kernel = kernel_for(norm, eps, d.spec)
        reports.append(compute_bounds(
            d, kernel, tau_unc, p_min_override, tau_density, leak_threshold, keep_stages=keep_stages,
        ))
    return reports


def tau_sensitivity(d, kernel, taus=DEFAULT_TAUS, p_min_override=None, tau_density=None, leak_threshold=None):
    """Bounds at several tau_unc values; the convolutions run once"""
    stages = run_stages(d, kernel, taus[0], tau_density, leak_threshold)
    return [
        compute_bounds(d, kernel, tau, p_min_override, tau_density, stages=stages)
        for tau in taus
    ]


def write_sweep_csv(reports, path, provenance=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='') as handle:
        if provenance:
            handle.write(provenance + '\n')
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for report in reports:
            writer.writerow(report.as_row())
    logger.info(f'Wrote {len(reports)} sweep rows to {path}')
    return path


def format_report(reports, provenance=None):
    blocks = [provenance] if provenance else []
    blocks.extend(str(report) for report in reports)
    return '\n\n'.join(blocks) + '\n'


def write_report(reports, path, provenance=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_report(reports, provenance), encoding='utf-8')
    return path
