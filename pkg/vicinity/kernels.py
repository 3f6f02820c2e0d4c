"""Vicinity kernels and the effective radius."""
import logging
import math

import numpy as np
from scipy.special import gammaln

from core.exceptions import ParameterError
from grid.models import Grid2D, GridSpec

from .models import Norm, VicinityKernel

logger = logging.getLogger(__name__)

# Relative slack for "center lies on the ball boundary" (0.15 / 0.01 is 14.999...).
BOUNDARY_SLACK = 1e-9


def support_volume(norm, epsilon, dim=2):
    """Continuous volume of the eps-ball under the given norm"""
    norm = Norm.parse(norm)
    if norm is Norm.L_INF:
        return (2.0 * epsilon) ** dim
    return math.exp((dim / 2.0) * math.log(math.pi) - gammaln(dim / 2.0 + 1.0)) * epsilon ** dim


def effective_radius(norm, epsilon, dim=2):
    """
    Radius of the Euclidean ball whose volume equals the vicinity support:
    pi^(d/2) / Gamma(d/2 + 1) * r^d = vol(support).
    """
    norm = Norm.parse(norm)
    if dim < 1 or int(dim) != dim:
        raise ParameterError('dim', f'must be an integer >= 1, got {dim}')
    if epsilon < 0:
        raise ParameterError('epsilon', f'must be >= 0, got {epsilon}')
    if norm is Norm.L2:
        return float(epsilon)
    # 2 eps * Gamma(d/2 + 1)^(1/d) / sqrt(pi), in log space for large d
    return float(2.0 * epsilon * math.exp(gammaln(dim / 2.0 + 1.0) / dim) / math.sqrt(math.pi))


def build_kernel(norm, epsilon, cell):
    """
    Vicinity kernel for cell spacing (dx, dy). Odd-sized and centered at the
    origin; epsilon = 0 gives the one-cell discrete delta.
    """
    norm = Norm.parse(norm)
    dx, dy = cell
    if epsilon < 0:
        raise ParameterError('epsilon', f'must be >= 0, got {epsilon}')
    if not (dx > 0 and dy > 0):
        raise ParameterError('cell', f'cell spacing must be > 0, got {cell}')

    hx = int(math.floor(epsilon / dx * (1 + BOUNDARY_SLACK)))
    hy = int(math.floor(epsilon / dy * (1 + BOUNDARY_SLACK)))
    ox = np.arange(-hx, hx + 1) * dx
    oy = np.arange(-hy, hy + 1) * dy
    u, w = np.meshgrid(ox, oy, indexing='ij')
    limit = epsilon * (1 + BOUNDARY_SLACK)

    if norm is Norm.L_INF:
        inside = (np.abs(u) <= limit) & (np.abs(w) <= limit)
    else:
        inside = u ** 2 + w ** 2 <= limit ** 2

    eps_v = support_volume(norm, epsilon)
    raw_value = 1.0 / eps_v if eps_v > 0 else math.inf
    # The continuous height 1/eps_v is replaced by the discrete one so the kernel sums to 1.
    height = 1.0 / (inside.sum() * dx * dy)
    spec = GridSpec(-(hx + 0.5) * dx, -(hy + 0.5) * dy, dx, dy, 2 * hx + 1, 2 * hy + 1)
    kernel = Grid2D(spec, np.where(inside, height, 0.0))

    logger.debug(f'{norm.value} kernel eps={epsilon:g}: {spec.nx}x{spec.ny} cells, {int(inside.sum())} in support')
    return VicinityKernel(
        norm=norm,
        epsilon=float(epsilon),
        kernel=kernel,
        eps_v=eps_v,
        eps_eff=effective_radius(norm, epsilon, dim=2),
        raw_value=raw_value,
    )


def kernel_for(norm, epsilon, spec):
    """Kernel matching the cell spacing of a grid spec"""
    return build_kernel(norm, epsilon, (spec.dx, spec.dy))
