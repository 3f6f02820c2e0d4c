from dataclasses import dataclass, field

import numpy as np

from core.exceptions import IncompatibleGridError, ParameterError
from grid.models import Grid2D
from grid.quadrature import integrate

PRIOR_TOLERANCE = 1e-9
DEFAULT_MASS_TOLERANCE = 1e-4


@dataclass(frozen=True)
class LabeledDensity:
    """
    A classification distribution on a grid: class priors P(y=k) and the
    class-conditional densities p(x|y=k), all on one GridSpec.

    A class with prior 0 may carry an all-zero conditional (hardening can
    empty a class); every other conditional must have unit mass.
    """
    priors: np.ndarray
    conditionals: tuple
    mass_tolerance: float = DEFAULT_MASS_TOLERANCE

    def __post_init__(self):
        priors = np.array(self.priors, dtype=float, copy=True).reshape(-1)
        conditionals = tuple(self.conditionals)

        if len(priors) < 2:
            raise ParameterError('priors', f'a classification distribution needs >= 2 classes, got {len(priors)}')
        if len(conditionals) != len(priors):
            raise ParameterError('conditionals', f'{len(conditionals)} conditionals for {len(priors)} priors')
        if np.any(priors < 0) or not np.all(np.isfinite(priors)):
            raise ParameterError('priors', f'priors must be finite and >= 0, got {priors.tolist()}')
        if abs(priors.sum() - 1.0) > PRIOR_TOLERANCE:
            raise ParameterError('priors', f'priors must sum to 1, got {priors.sum():.12g}')

        spec = conditionals[0].spec
        for k, cond in enumerate(conditionals):
            if cond.spec != spec:
                raise IncompatibleGridError(spec, cond.spec, f'use conditional {k} with')
            mass = integrate(cond)
            if priors[k] == 0 and mass == 0:
                continue
            if abs(mass - 1.0) > self.mass_tolerance:
                raise ParameterError(f'conditionals[{k}]', f'mass {mass:.9g} is not 1 within {self.mass_tolerance:g}')

        priors.setflags(write=False)
        object.__setattr__(self, 'priors', priors)
        object.__setattr__(self, 'conditionals', conditionals)

    def __str__(self):
        priors = ', '.join(f'{p:.4g}' for p in self.priors)
        return f'LabeledDensity({self.num_classes} classes, priors=({priors}), grid={self.spec})'

    @classmethod
    def from_joints(cls, joints, spec, mass_tolerance=DEFAULT_MASS_TOLERANCE):
        """Build from per-class joint densities p(x, y=k); priors are their masses"""
        joints = np.asarray(joints, dtype=float)
        masses = joints.reshape(len(joints), -1).sum(axis=1) * spec.cell_area
        total = masses.sum()
        if not total > 0:
            raise ParameterError('joints', 'joint densities carry no mass')
        priors = masses / total
        conditionals = []
        for k, joint in enumerate(joints):
            if masses[k] > 0:
                conditionals.append(Grid2D(spec, joint / masses[k]))
            else:
                conditionals.append(Grid2D.zeros(spec))
        # Priors must sum to 1 exactly enough for validation.
        priors[-1] = 1.0 - priors[:-1].sum()
        return cls(np.clip(priors, 0.0, None), tuple(conditionals), mass_tolerance)

    @property
    def spec(self):
        return self.conditionals[0].spec

    @property
    def num_classes(self):
        return len(self.priors)

    def joint_values(self):
        """Stack of P(y=k) p(x|y=k), shape (K, nx, ny)"""
        return np.stack([p * c.values for p, c in zip(self.priors, self.conditionals)])

    def evidence(self):
        """Marginal density p(x) = sum_k p(x|y=k) P(y=k)"""
        return Grid2D(self.spec, self.joint_values().sum(axis=0))

    def permuted(self, order):
        """Same distribution with classes relabelled in the given order"""
        order = list(order)
        if sorted(order) != list(range(self.num_classes)):
            raise ParameterError('order', f'{order} is not a permutation of the classes')
        return LabeledDensity(self.priors[order], tuple(self.conditionals[k] for k in order), self.mass_tolerance)


@dataclass(frozen=True)
class SampleSet:
    """Labelled points; labels are 0-based class indices"""
    points: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)

    def __post_init__(self):
        points = np.array(self.points, dtype=float, copy=True).reshape(-1, 2)
        labels = np.array(self.labels, copy=True).reshape(-1)
        if len(points) != len(labels):
            raise ParameterError('labels', f'{len(labels)} labels for {len(points)} points')
        if labels.size and (not np.all(labels == np.round(labels)) or labels.min() < 0):
            raise ParameterError('labels', 'labels must be integers >= 0')
        labels = labels.astype(np.int64)
        if not np.all(np.isfinite(points)):
            raise ParameterError('points', 'sample coordinates must be finite')
        points.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'labels', labels)

    def __len__(self):
        return len(self.labels)

    def __str__(self):
        return f'SampleSet({len(self)} points, {self.num_classes} classes)'

    @property
    def num_classes(self):
        return int(self.labels.max()) + 1 if len(self) else 0

    def class_points(self, k):
        return self.points[self.labels == k]

    def counts(self, num_classes=None):
        return np.bincount(self.labels, minlength=num_classes or self.num_classes)

    def head(self, n):
        """The first n samples"""
        return SampleSet(self.points[:n], self.labels[:n])


@dataclass(frozen=True)
class MoonsParams:
    """Gaussian smearing and arc-quadrature controls for the Moons likelihoods"""
    sigma: float
    quadrature_points: int = 64
    rtol: float = 1e-8
    # absolute floor, as a fraction of the on-arc integral sqrt(2 pi) sigma
    atol: float = 1e-12
    max_panels: int = 2 ** 12

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError('sigma', f'must be > 0, got {self.sigma}')
        if self.quadrature_points < 16:
            raise ParameterError('quadrature_points', f'must be >= 16, got {self.quadrature_points}')
        if self.quadrature_points % 2:
            raise ParameterError('quadrature_points', 'Simpson panels must be even')
        if self.max_panels < self.quadrature_points:
            raise ParameterError('max_panels', 'refinement cap is below the starting panel count')
        if not self.rtol > 0 or self.atol < 0:
            raise ParameterError('rtol', f'tolerances must be rtol > 0 and atol >= 0, got {self.rtol}, {self.atol}')


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of the Moons sigma search: the chosen sigma and every (sigma, beta) evaluated"""
    sigma: float
    beta: float
    target_beta: float
    table: tuple = field(repr=False)
    resolution: str = ''

    def __str__(self):
        return f'sigma={self.sigma:.6g} beta={self.beta:.6g} (target {self.target_beta:g}, {len(self.table)} evaluations)'

    @property
    def gap(self):
        return abs(self.beta - self.target_beta)

    def as_config(self):
        """Body of a --config file pinning the calibrated sigma"""
        return f'sigma={self.sigma!r}\n'
