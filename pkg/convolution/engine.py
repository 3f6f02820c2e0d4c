"""
Linear convolution of grid densities with vicinity kernels.

Both paths zero-pad: mass pushed past the grid edge is lost, never wrapped
around. convolve_distribution measures that loss per class and refuses to
continue when it exceeds the leak threshold.
"""
import logging

import numpy as np
from scipy.signal import fftconvolve

from core.conf import get_setting
from core.exceptions import IncompatibleGridError, KernelTooLargeError, MassLeakError
from density.models import LabeledDensity
from grid.models import Grid2D
from grid.quadrature import integrate, normalize

logger = logging.getLogger(__name__)

FFT = 'fft'
DIRECT = 'direct'
CELL_RTOL = 1e-9


def _check_kernel(g, k):
    kspec = k.kernel.spec
    if not (np.isclose(kspec.dx, g.spec.dx, rtol=CELL_RTOL, atol=0) and np.isclose(kspec.dy, g.spec.dy, rtol=CELL_RTOL, atol=0)):
        raise IncompatibleGridError(g.spec, kspec, 'convolve (cell spacing differs)')
    if kspec.nx > g.spec.nx or kspec.ny > g.spec.ny:
        raise KernelTooLargeError(
            f'kernel {k.label()} spans {kspec.resolution} cells but the grid is only {g.spec.resolution}'
        )


def convolve_fft(g, k):
    """(g * v) by zero-padded FFT; negative round-off is clamped to zero"""
    _check_kernel(g, k)
    if k.is_delta:
        return Grid2D(g.spec, g.values)
    values = fftconvolve(g.values, k.kernel.values, mode='same') * g.spec.cell_area
    return Grid2D(g.spec, np.clip(values, 0.0, None))


def convolve_direct(g, k):
    """
    Reference (g * v) by explicit summation: one shifted copy of the
    zero-padded grid per kernel cell.
    """
    _check_kernel(g, k)
    hx, hy = k.half_widths
    nx, ny = g.spec.shape
    padded = np.pad(g.values, ((hx, hx), (hy, hy)))
    out = np.zeros(g.spec.shape)
    weights = k.kernel.values
    for a in range(-hx, hx + 1):
        for b in range(-hy, hy + 1):
            w = weights[a + hx, b + hy]
            if w == 0:
                continue
            # out[i, j] += g[i - a, j - b] * v[a, b]
            out += w * padded[hx - a:hx - a + nx, hy - b:hy - b + ny]
    return Grid2D(g.spec, out * g.spec.cell_area)


def convolve(g, k, method=FFT):
    if method == FFT:
        return convolve_fft(g, k)
    if method == DIRECT:
        return convolve_direct(g, k)
    raise ValueError(f'unknown convolution method {method!r}')


def convolve_distribution(d, k, leak_threshold=None, method=FFT):
    """
    D' = D * v: priors unchanged, each conditional q_k = p_k * v.
    The mass lost at the grid edge is checked against the leak threshold
    before q_k is renormalized.
    """
    if leak_threshold is None:
        leak_threshold = get_setting('ROBUST_BOUND_LEAK_THRESHOLD')
    logger.info(f'Convolving {d.num_classes}-class density on {d.spec.resolution} with {k.label()}')

    conditionals = []
    for index, cond in enumerate(d.conditionals):
        before = integrate(cond)
        if before == 0:
            conditionals.append(cond)
            continue
        q = convolve(cond, k, method)
        leak = 1.0 - integrate(q) / before
        if leak > leak_threshold:
            logger.error(f'class {index}: convolution with {k.label()} leaks {leak:.3g} of its mass')
            raise MassLeakError(f'class {index} convolved with {k.label()}', leak, leak_threshold)
        if leak > 1e-9:
            logger.warning(f'class {index}: renormalized after a {leak:.3g} edge leak')
        conditionals.append(normalize(q))
    return LabeledDensity(d.priors, tuple(conditionals), d.mass_tolerance)
