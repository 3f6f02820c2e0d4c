"""Distributions shared by the test suites of several apps."""
from functools import lru_cache

import numpy as np

from density.builders import make_gaussian_mixture, make_uniform_patches, overlapping_squares
from grid.models import GridSpec

MIXTURE_SPEC = GridSpec.from_extents(-6.0, 6.0, -6.0, 6.0, 128)


def squares():
    """Class 0 uniform on [0,1]^2, class 1 uniform on [0.5,1.5]x[0,1], equal priors"""
    return overlapping_squares()


def disjoint_squares(gap=0.5):
    """Two unit squares side by side, `gap` apart along x"""
    spec = GridSpec(-0.5, -0.5, 0.01, 0.01, int(round((3.0 + gap) / 0.01)), 200)
    return make_uniform_patches((0.5, 0.5), ((0.0, 0.0, 1.0, 1.0), (1.0 + gap, 0.0, 2.0 + gap, 1.0)), spec)


def two_gaussians(nx=256, distance=2.0):
    """Unit-variance Gaussians at (+-distance/2, 0) on [-6, 6]^2; x = 0 is a cell boundary"""
    spec = GridSpec.from_extents(-6.0, 6.0, -6.0, 6.0, nx)
    half = distance / 2.0
    return make_gaussian_mixture((0.5, 0.5), ((-half, 0.0), (half, 0.0)), (1.0, 1.0), spec)


def random_mixture(rng, spec=MIXTURE_SPEC):
    """2 or 3 axis-aligned Gaussian classes kept well inside the grid"""
    k = int(rng.integers(2, 4))
    priors = rng.dirichlet(np.full(k, 2.0))
    means = rng.uniform(-1.5, 1.5, size=(k, 2))
    sigmas = rng.uniform(0.3, 0.6, size=(k, 2))
    return make_gaussian_mixture(priors, means, sigmas, spec)


@lru_cache(maxsize=None)
def calibrated_sigma(resolution=512):
    from density.calibration import calibrate_moons
    from density.moons import default_spec

    return calibrate_moons(spec=default_spec(resolution)).sigma


@lru_cache(maxsize=None)
def calibrated_moons(resolution=512):
    """Moons at the sigma calibrated on the 512 grid, rasterized at `resolution`"""
    from density.moons import default_params, default_spec, moons_density

    return moons_density(default_params(calibrated_sigma()), default_spec(resolution))
