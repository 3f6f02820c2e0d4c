"""
Choose the Moons smearing sigma so the analytic density hits a target Bayes
error. beta grows monotonically with sigma, so the search brackets the target
on a sigma lattice and then refines inside the bracket.
"""
import logging

import numpy as np
from scipy.optimize import brentq

from bayes.analysis import bayes_error
from core.conf import get_setting
from core.exceptions import ParameterError

from .models import CalibrationResult, MoonsParams
from .moons import default_spec, moons_density

logger = logging.getLogger(__name__)

SIGMA_MIN = 0.10
SIGMA_MAX = 0.35
SIGMA_STEP = 0.005

BISECT = 'bisect'
EXHAUSTIVE = 'exhaustive'


def sigma_lattice(lo=SIGMA_MIN, hi=SIGMA_MAX, step=SIGMA_STEP):
    count = int(round((hi - lo) / step)) + 1
    return np.round(lo + step * np.arange(count), 6)


def moons_beta(sigma, spec, quadrature_points=None, tau_density=None):
    """Bayes error of the rasterized Moons density at a given sigma"""
    params = MoonsParams(
        sigma=float(sigma),
        quadrature_points=quadrature_points or get_setting('ROBUST_BOUND_MOONS_QUADRATURE_POINTS'),
    )
    return bayes_error(moons_density(params, spec), tau_density)


def calibrate_moons(target_beta=None, sigmas=None, spec=None, refine=True, search=BISECT, xtol=1e-5):
    """
    Find sigma with beta(sigma) closest to target_beta.

    search=BISECT evaluates O(log n) lattice points, EXHAUSTIVE evaluates all
    of them (useful for plotting the curve). With refine, Brent's method
    solves beta(sigma) = target inside the bracketing lattice interval.
    """
    target_beta = get_setting('ROBUST_BOUND_MOONS_TARGET_BETA') if target_beta is None else float(target_beta)
    if not 0.0 < target_beta < 0.5:
        raise ParameterError('target_beta', f'must lie in (0, 0.5), got {target_beta}')
    if search not in (BISECT, EXHAUSTIVE):
        raise ParameterError('search', f'expected {BISECT!r} or {EXHAUSTIVE!r}, got {search!r}')
    sigmas = sigma_lattice() if sigmas is None else np.sort(np.asarray(sigmas, dtype=float))
    if len(sigmas) < 2 or sigmas[0] <= 0:
        raise ParameterError('sigmas', 'need at least two positive sigma values')
    spec = spec or default_spec()

    cache = {}

    def beta_at(sigma):
        sigma = float(sigma)
        if sigma not in cache:
            cache[sigma] = moons_beta(sigma, spec)
            logger.info(f'calibration: sigma={sigma:.6g} beta={cache[sigma]:.6g}')
        return cache[sigma]

    if search == EXHAUSTIVE:
        betas = np.array([beta_at(s) for s in sigmas])
        above = np.flatnonzero(betas >= target_beta)
        hi = int(above[0]) if len(above) else len(sigmas) - 1
    else:
        lo, hi = 0, len(sigmas) - 1
        if beta_at(sigmas[lo]) >= target_beta:
            hi = lo
        elif beta_at(sigmas[hi]) < target_beta:
            lo = hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if beta_at(sigmas[mid]) >= target_beta:
                hi = mid
            else:
                lo = mid

    # Closest lattice point, then Brent inside the bracket when one exists.
    candidates = [i for i in (hi - 1, hi) if 0 <= i < len(sigmas)]
    best = min(candidates, key=lambda i: abs(beta_at(sigmas[i]) - target_beta))
    sigma_star = float(sigmas[best])

    bracketed = hi > 0 and beta_at(sigmas[hi - 1]) < target_beta <= beta_at(sigmas[hi])
    if refine and bracketed:
        sigma_star = float(brentq(lambda s: beta_at(s) - target_beta, sigmas[hi - 1], sigmas[hi], xtol=xtol))
    elif not bracketed:
        logger.warning(f'calibration: target beta {target_beta:g} lies outside the lattice range; using the nearest end')

    table = tuple(sorted(cache.items()))
    result = CalibrationResult(
        sigma=sigma_star,
        beta=beta_at(sigma_star),
        target_beta=target_beta,
        table=table,
        resolution=spec.resolution,
    )
    logger.info(f'calibration: {result}')
    return result
