from dataclasses import dataclass, field

import numpy as np

from grid.models import Grid2D, GridSpec

OUT_OF_SUPPORT = -1


@dataclass(frozen=True)
class PosteriorField:
    """Per-class posteriors p(y=k|x), the evidence p(x) and the numerical support"""
    posteriors: np.ndarray = field(repr=False)
    evidence: Grid2D = field(repr=False)
    support: np.ndarray = field(repr=False)
    tau_density: float = 0.0

    @property
    def spec(self):
        return self.evidence.spec

    @property
    def num_classes(self):
        return len(self.posteriors)

    def max_posterior(self):
        """Cellwise max_k p(y=k|x); zero outside the support"""
        return self.posteriors.max(axis=0)


@dataclass(frozen=True)
class UncertaintyRegion:
    """
    Cells whose label is uncertain: max posterior < 1 - tolerance, on the
    support. Holds K_D, and the same region for any derived distribution.
    """
    mask: Grid2D = field(repr=False)
    volume: float
    mass: float
    tolerance: float

    def __str__(self):
        return f'UncertaintyRegion(volume={self.volume:.6g}, mass={self.mass:.6g}, tau_unc={self.tolerance:g})'

    @property
    def is_empty(self):
        return not self.mask.values.any()

    @property
    def cells(self):
        return int(self.mask.values.sum())


@dataclass(frozen=True)
class LabelGrid:
    """Bayes-classifier decisions per cell; OUT_OF_SUPPORT where p(x) vanishes"""
    spec: GridSpec
    labels: np.ndarray = field(repr=False)

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        labels.setflags(write=False)
        object.__setattr__(self, 'labels', labels)

    def predict(self, points):
        """Label of the cell each point falls in; OUT_OF_SUPPORT outside the grid"""
        ix, iy = self.spec.cell_index(points)
        predicted = np.full(len(ix), OUT_OF_SUPPORT, dtype=np.int64)
        inside = ix >= 0
        predicted[inside] = self.labels[ix[inside], iy[inside]]
        return predicted
