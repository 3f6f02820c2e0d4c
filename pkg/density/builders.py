"""Rasterization and the synthetic test distributions (Gaussian mixtures, uniform patches)."""
import logging

import numpy as np

from core.conf import get_setting
from core.exceptions import MassLeakError, ParameterError
from grid.models import Grid2D, GridSpec
from grid.quadrature import integrate, normalize

from .models import LabeledDensity

logger = logging.getLogger(__name__)


def rasterize(f, spec):
    """
    Evaluate a vectorised density f(x1, x2) at every cell center.
    The result is not normalized; callers decide what to do with the leak.
    """
    x1, x2 = spec.mesh()
    values = np.broadcast_to(np.asarray(f(x1, x2), dtype=float), spec.shape)
    return Grid2D(spec, values)


def normalize_checked(g, what, leak_threshold=None):
    """
    Normalize a rasterized density after checking how much mass fell outside
    the grid. Returns the normalized grid and the leak (1 - raw mass).
    """
    if leak_threshold is None:
        leak_threshold = get_setting('ROBUST_BOUND_LEAK_THRESHOLD')
    mass = integrate(g)
    leak = 1.0 - mass
    if leak > leak_threshold:
        logger.error(f'{what}: raw mass {mass:.6g} below 1 - {leak_threshold:g}')
        raise MassLeakError(what, leak, leak_threshold)
    if abs(leak) > 1e-9:
        logger.debug(f'{what}: renormalized raw mass {mass:.9g}')
    return normalize(g), leak


def _as_priors(priors):
    priors = np.asarray(priors, dtype=float).reshape(-1)
    if len(priors) < 2:
        raise ParameterError('priors', f'at least two classes are required, got {len(priors)}')
    return priors


def make_gaussian_mixture(priors, means, sigmas, spec, leak_threshold=None):
    """
    One isotropic (or axis-aligned) Gaussian per class.
    sigmas may hold one std-dev per class or an (x, y) pair per class.
    """
    priors = _as_priors(priors)
    means = np.asarray(means, dtype=float).reshape(len(priors), 2)
    sigmas = np.asarray(sigmas, dtype=float)
    if sigmas.ndim == 1:
        sigmas = np.repeat(sigmas.reshape(-1, 1), 2, axis=1)
    sigmas = sigmas.reshape(len(priors), 2)
    if np.any(sigmas <= 0):
        raise ParameterError('sigmas', f'standard deviations must be > 0, got {sigmas.tolist()}')

    conditionals = []
    for k, ((mx, my), (sx, sy)) in enumerate(zip(means, sigmas)):
        raw = rasterize(
            lambda x1, x2: np.exp(-0.5 * (((x1 - mx) / sx) ** 2 + ((x2 - my) / sy) ** 2)) / (2 * np.pi * sx * sy),
            spec,
        )
        cond, _ = normalize_checked(raw, f'gaussian class {k}', leak_threshold)
        conditionals.append(cond)
    return LabeledDensity(priors, tuple(conditionals))


def make_uniform_patches(priors, rectangles, spec):
    """
    One uniform rectangle (x_min, y_min, x_max, y_max) per class.
    Cells belong to a rectangle when their centers lie in [min, max).
    """
    priors = _as_priors(priors)
    rectangles = np.asarray(rectangles, dtype=float).reshape(len(priors), 4)
    x1, x2 = spec.mesh()

    conditionals = []
    for k, (ax, ay, bx, by) in enumerate(rectangles):
        if not (bx > ax and by > ay):
            raise ParameterError('rectangles', f'class {k} rectangle {ax, ay, bx, by} is empty')
        if not spec.contains(ax, bx, ay, by):
            raise ParameterError('rectangles', f'class {k} rectangle {ax, ay, bx, by} lies outside the grid {spec.extents}')
        inside = (x1 >= ax) & (x1 < bx) & (x2 >= ay) & (x2 < by)
        if not inside.any():
            raise ParameterError('rectangles', f'class {k} rectangle covers no cell center')
        conditionals.append(normalize(Grid2D(spec, inside.astype(float))))
    return LabeledDensity(priors, tuple(conditionals))


# Two unit squares overlapping on the strip [0.5, 1] x [0, 1].
SQUARES_RECTANGLES = ((0.0, 0.0, 1.0, 1.0), (0.5, 0.0, 1.5, 1.0))
SQUARES_SPEC = GridSpec(-0.5, -0.5, 0.01, 0.01, 250, 200)


def overlapping_squares(spec=None, priors=(0.5, 0.5)):
    return make_uniform_patches(priors, SQUARES_RECTANGLES, spec or SQUARES_SPEC)
