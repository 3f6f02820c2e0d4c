"""Midpoint-rule integration and normalization on Grid2D fields."""
import logging

import numpy as np

from core.exceptions import DegenerateDensityError, ParameterError

from .models import Grid2D

logger = logging.getLogger(__name__)


def integrate(g):
    """Total mass: sum of cell values times the cell area"""
    return float(g.values.sum() * g.spec.cell_area)


def integrate_masked(g, mask):
    """Mass of g restricted to the cells where mask is 1"""
    g.check_compatible(mask, 'mask')
    if not mask.is_mask():
        raise ParameterError('mask', 'mask values must be exactly 0 or 1')
    return float((g.values * mask.values).sum() * g.spec.cell_area)


def normalize(g):
    """Rescale g to unit mass"""
    mass = integrate(g)
    if not mass > 0 or not np.isfinite(mass):
        raise DegenerateDensityError(f'cannot normalize a grid with mass {mass!r}')
    return g.with_values(g.values / mass)


def pointwise_max(gs):
    """Cellwise maximum of one or more grids sharing a spec"""
    gs = list(gs)
    if not gs:
        raise ParameterError('gs', 'pointwise_max needs at least one grid')
    first = gs[0]
    for other in gs[1:]:
        first.check_compatible(other, 'take the maximum of')
    return Grid2D(first.spec, np.maximum.reduce([g.values for g in gs]))


def complement_mask(mask):
    """1 - mask for a 0/1 grid"""
    if not mask.is_mask():
        raise ParameterError('mask', 'mask values must be exactly 0 or 1')
    return mask.with_values(1.0 - mask.values)
