"""
Gaussian kernel density estimates of labelled samples on a grid.

The isotropic Gaussian kernel is separable, so the sum over points is a
product of two (cells x points) matrices instead of a per-cell loop.
"""
import logging

import numpy as np
from scipy.stats import norm

from core.exceptions import ParameterError
from grid.models import Grid2D, GridSpec

from .builders import normalize_checked
from .models import LabeledDensity

logger = logging.getLogger(__name__)

AUTO = 'auto'
POINT_CHUNK = 4096


def bw_scott(points):
    """
    Scott's rule in two dimensions: h = n^(-1/6) * sigma_hat, with sigma_hat
    the mean of the two marginal standard deviations.
    """
    n = len(points)
    if n < 2:
        raise ParameterError('bandwidth', f'automatic bandwidth needs >= 2 samples per class, got {n}')
    sigma_hat = float(np.mean(np.std(points, axis=0, ddof=1)))
    if not sigma_hat > 0:
        raise ParameterError('bandwidth', 'automatic bandwidth is zero: all samples of a class coincide')
    return n ** (-1.0 / 6.0) * sigma_hat


def resolve_bandwidth(bandwidth, points):
    if isinstance(bandwidth, str):
        if bandwidth.lower() != AUTO:
            raise ParameterError('bandwidth', f'expected a positive number or "auto", got {bandwidth!r}')
        return bw_scott(points)
    bandwidth = float(bandwidth)
    if not bandwidth > 0:
        raise ParameterError('bandwidth', f'must be > 0, got {bandwidth}')
    return bandwidth


def gaussian_kde_grid(points, bandwidth, spec):
    """Unnormalized mean of Gaussian kernels centered at points, sampled at cell centers"""
    xs, ys = spec.x_centers(), spec.y_centers()
    values = np.zeros(spec.shape)
    for start in range(0, len(points), POINT_CHUNK):
        chunk = points[start:start + POINT_CHUNK]
        ax = norm.pdf(xs[:, None], loc=chunk[None, :, 0], scale=bandwidth)
        ay = norm.pdf(ys[:, None], loc=chunk[None, :, 1], scale=bandwidth)
        values += ax @ ay.T
    return Grid2D(spec, values / len(points))


def kde_fit(samples, bandwidth, spec, num_classes=None, leak_threshold=None):
    """
    One Gaussian KDE per class, normalized on spec; priors are the empirical
    class frequencies. bandwidth is a positive float or AUTO (per class).
    """
    num_classes = num_classes or samples.num_classes
    if num_classes < 2:
        raise ParameterError('samples', f'need samples from at least two classes, got {num_classes}')

    counts = samples.counts(num_classes)
    conditionals = []
    for k in range(num_classes):
        if counts[k] == 0:
            raise ParameterError('samples', f'class {k} has no samples')
        points = samples.class_points(k)
        h = resolve_bandwidth(bandwidth, points)
        if h < min(spec.dx, spec.dy):
            logger.warning(f'KDE class {k}: bandwidth {h:.3g} is finer than a grid cell')
        logger.info(f'KDE class {k}: {counts[k]} points, bandwidth {h:.4g}')
        cond, _ = normalize_checked(gaussian_kde_grid(points, h, spec), f'kde class {k}', leak_threshold)
        conditionals.append(cond)

    priors = counts / counts.sum()
    return LabeledDensity(priors, tuple(conditionals))


def default_kde_spec(samples, bandwidth, resolution, margin=5.0):
    """Square-celled grid around the samples, padded by `margin` of the widest class bandwidth"""
    widest = max(resolve_bandwidth(bandwidth, samples.class_points(k)) for k in range(samples.num_classes))
    lo = samples.points.min(axis=0) - margin * widest
    hi = samples.points.max(axis=0) + margin * widest
    cell = float(max(hi - lo)) / resolution
    nx, ny = (int(np.ceil((hi - lo)[i] / cell)) for i in (0, 1))
    return GridSpec(float(lo[0]), float(lo[1]), cell, cell, nx, ny)
