"""
Analytic Moons likelihoods.

Each class is a uniform distribution along a half-circle arc smeared by an
isotropic Gaussian of std-dev sigma:

    upper moon (y=0): arc (cos t, sin t),             t in [0, pi]
    lower moon (y=1): arc (1 - cos t, 0.5 - sin t),   t in [0, pi]

so p(x|y) = 1 / (2 pi^2 sigma^2) * int_0^pi exp(-|x - arc(t)|^2 / (2 sigma^2)) dt.
The integrand is written through the distance to the arc, which is the
expanded exp(-(r^2+1)/2s^2) exp(+-(...)/s^2) form without the overflow.
"""
import logging
import math

import numpy as np
from scipy.integrate import simpson

from core.conf import get_setting
from core.exceptions import ParameterError, QuadratureError
from grid.models import GridSpec

from .builders import normalize_checked, rasterize
from .models import LabeledDensity, MoonsParams, SampleSet

logger = logging.getLogger(__name__)

# (center x, center y, orientation) of each arc
ARCS = {
    0: (0.0, 0.0, 1.0),
    1: (1.0, 0.5, -1.0),
}

CHUNK = 2048
ABS_FLOOR = 1e-300


def default_params(sigma=None):
    return MoonsParams(
        sigma=get_setting('ROBUST_BOUND_MOONS_SIGMA') if sigma is None else sigma,
        quadrature_points=get_setting('ROBUST_BOUND_MOONS_QUADRATURE_POINTS'),
    )


def default_spec(resolution=None):
    """The Moons domain [-2, 3] x [-1.75, 2.25] (configurable) at the working resolution"""
    x_min, x_max, y_min, y_max = get_setting('ROBUST_BOUND_MOONS_EXTENTS')
    n = resolution or get_setting('ROBUST_BOUND_RESOLUTION')
    return GridSpec.from_extents(x_min, x_max, y_min, y_max, n)


def arc_points(class_index, t):
    cx, cy, sign = _arc(class_index)
    return cx + sign * np.cos(t), cy + sign * np.sin(t)


def _arc(class_index):
    try:
        return ARCS[int(class_index)]
    except (KeyError, ValueError):
        raise ParameterError('class_index', f'Moons has classes 0 and 1, got {class_index!r}')


def _arc_integral_chunk(class_index, x1, x2, params):
    """Simpson over t, doubled until successive Richardson values agree"""
    inv_two_var = 1.0 / (2.0 * params.sigma ** 2)
    # Past the arc ends the integral is ~1e-90 and converges slowly in relative terms.
    floor = max(params.atol * math.sqrt(2.0 * math.pi) * params.sigma, ABS_FLOOR)

    def integrand(t, u, w):
        ax, ay = arc_points(class_index, t)
        return np.exp(-((u[:, None] - ax) ** 2 + (w[:, None] - ay) ** 2) * inv_two_var)

    result = np.empty(len(x1))
    active = np.arange(len(x1))
    u, w = x1, x2

    panels = params.quadrature_points
    nodes = np.linspace(0.0, math.pi, panels + 1)
    samples = integrand(nodes, u, w)
    coarse = simpson(samples, dx=math.pi / panels, axis=1)
    previous = None

    while True:
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        finer = np.empty((len(active), 2 * panels + 1))
        finer[:, 0::2] = samples
        finer[:, 1::2] = integrand(mids, u, w)
        panels *= 2
        nodes = np.linspace(0.0, math.pi, panels + 1)
        samples = finer
        fine = simpson(samples, dx=math.pi / panels, axis=1)
        refined = fine + (fine - coarse) / 15.0

        if previous is not None:
            done = np.abs(refined - previous) <= params.rtol * np.abs(refined) + floor
            result[active[done]] = refined[done]
            if done.all():
                return result
            if 2 * panels > params.max_panels:
                worst = int(np.argmax(np.abs(refined - previous) / (np.abs(refined) + ABS_FLOOR)))
                raise QuadratureError(
                    f'moons class {class_index} arc integral', float(previous[worst]), float(refined[worst]), panels
                )
            keep = ~done
            active, u, w = active[keep], u[keep], w[keep]
            samples, fine, refined = samples[keep], fine[keep], refined[keep]

        coarse = fine
        previous = refined


def eval_moons(class_index, x1, x2, params):
    """Moons likelihood p(x|y=class_index); accepts scalars or arrays"""
    _arc(class_index)
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    shape = x1.shape
    flat1, flat2 = x1.reshape(-1), x2.reshape(-1)

    integral = np.empty(flat1.size)
    for start in range(0, flat1.size, CHUNK):
        stop = start + CHUNK
        integral[start:stop] = _arc_integral_chunk(class_index, flat1[start:stop], flat2[start:stop], params)

    density = np.clip(integral, 0.0, None) / (2.0 * math.pi ** 2 * params.sigma ** 2)
    density = density.reshape(shape)
    return float(density) if density.ndim == 0 else density


def moons_convolved_point(class_index, x1, x2, params, eps, abscissae=64):
    """
    (p(.|y) * v)(x1, x2) for the L-infinity box of half-width eps, by nested
    quadrature: a midpoint rule over the box around the arc integral.
    eps may be one half-width or an (x, y) pair. Independent of the grid
    pipeline, so it serves as its oracle.
    """
    half = np.broadcast_to(np.asarray(eps, dtype=float), (2,))
    if not np.all(half > 0):
        raise ParameterError('eps', f'must be > 0, got {eps}')
    if abscissae < 64:
        raise ParameterError('abscissae', f'must be >= 64, got {abscissae}')
    unit = (np.arange(abscissae) + 0.5) / abscissae * 2.0 - 1.0
    u1, u2 = np.meshgrid(x1 + half[0] * unit, x2 + half[1] * unit, indexing='ij')
    # v is constant over the box, so the box integral is the mean value.
    return float(np.mean(eval_moons(class_index, u1, u2, params)))


def rasterize_moons(class_index, params, spec):
    return rasterize(lambda x1, x2: eval_moons(class_index, x1, x2, params), spec)


def moons_density(params=None, spec=None, priors=(0.5, 0.5), leak_threshold=None):
    """Both Moons likelihoods rasterized, leak-checked and normalized"""
    params = params or default_params()
    spec = spec or default_spec()
    logger.info(f'Rasterizing Moons sigma={params.sigma:g} on {spec.resolution}')
    conditionals = []
    for k in (0, 1):
        cond, leak = normalize_checked(rasterize_moons(k, params, spec), f'moons class {k}', leak_threshold)
        logger.debug(f'Moons class {k} leak {leak:.3g}')
        conditionals.append(cond)
    return LabeledDensity(priors, tuple(conditionals), mass_tolerance=1e-3)


def sample_moons(n, params, rng, priors=(0.5, 0.5)):
    """Draw n labelled points from the generative Moons model"""
    if n < 0:
        raise ParameterError('n', f'must be >= 0, got {n}')
    labels = rng.choice(2, size=n, p=np.asarray(priors, dtype=float))
    t = rng.uniform(0.0, math.pi, size=n)
    points = np.empty((n, 2))
    for k in (0, 1):
        chosen = labels == k
        ax, ay = arc_points(k, t[chosen])
        points[chosen, 0] = ax
        points[chosen, 1] = ay
    points += rng.normal(0.0, params.sigma, size=(n, 2))
    return SampleSet(points, labels)
