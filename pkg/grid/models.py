from dataclasses import dataclass, field

import numpy as np

from core.exceptions import IncompatibleGridError, ParameterError


@dataclass(frozen=True)
class GridSpec:
    """
    Rectangular lattice over the 2-D input space.
    Cell (i, j) has its center at (x0 + (i + 0.5) dx, y0 + (j + 0.5) dy).
    """
    x0: float
    y0: float
    dx: float
    dy: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.dx > 0):
            raise ParameterError('dx', f'cell spacing must be > 0, got {self.dx}')
        if not (self.dy > 0):
            raise ParameterError('dy', f'cell spacing must be > 0, got {self.dy}')
        if int(self.nx) != self.nx or self.nx < 1:
            raise ParameterError('nx', f'cell count must be an integer >= 1, got {self.nx}')
        if int(self.ny) != self.ny or self.ny < 1:
            raise ParameterError('ny', f'cell count must be an integer >= 1, got {self.ny}')
        object.__setattr__(self, 'nx', int(self.nx))
        object.__setattr__(self, 'ny', int(self.ny))

    def __str__(self):
        return f'{self.x0:g},{self.y0:g},{self.dx:g},{self.dy:g},{self.nx},{self.ny}'

    @classmethod
    def from_extents(cls, x_min, x_max, y_min, y_max, nx, ny=None):
        """Spec covering [x_min, x_max] x [y_min, y_max] with nx x ny cells"""
        ny = nx if ny is None else ny
        if not x_max > x_min:
            raise ParameterError('extents', f'x_max ({x_max}) must exceed x_min ({x_min})')
        if not y_max > y_min:
            raise ParameterError('extents', f'y_max ({y_max}) must exceed y_min ({y_min})')
        return cls(x_min, y_min, (x_max - x_min) / nx, (y_max - y_min) / ny, nx, ny)

    @classmethod
    def parse(cls, text):
        """Parse the `x0,y0,dx,dy,nx,ny` form used by --grid and the CSV header"""
        parts = [p.strip() for p in text.strip().lstrip('#').split(',')]
        if len(parts) != 6:
            raise ParameterError('grid', f'expected x0,y0,dx,dy,nx,ny, got {text!r}')
        try:
            x0, y0, dx, dy = (float(p) for p in parts[:4])
            nx, ny = (int(p) for p in parts[4:])
        except ValueError:
            raise ParameterError('grid', f'expected x0,y0,dx,dy,nx,ny, got {text!r}')
        return cls(x0, y0, dx, dy, nx, ny)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def cell_area(self):
        return self.dx * self.dy

    @property
    def extents(self):
        return (self.x0, self.x0 + self.nx * self.dx, self.y0, self.y0 + self.ny * self.dy)

    @property
    def resolution(self):
        return f'{self.nx}x{self.ny}'

    def x_centers(self):
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self):
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dy

    def mesh(self):
        """Cell-center coordinates as two nx x ny arrays"""
        return np.meshgrid(self.x_centers(), self.y_centers(), indexing='ij')

    def cell_index(self, points):
        """
        Map (n, 2) points onto (ix, iy) cell indices.
        Points outside the domain get -1 in both.
        """
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        ix = np.floor((points[:, 0] - self.x0) / self.dx).astype(np.int64)
        iy = np.floor((points[:, 1] - self.y0) / self.dy).astype(np.int64)
        inside = (ix >= 0) & (ix < self.nx) & (iy >= 0) & (iy < self.ny)
        ix[~inside] = -1
        iy[~inside] = -1
        return ix, iy

    def contains(self, x_min, x_max, y_min, y_max):
        gx0, gx1, gy0, gy1 = self.extents
        return gx0 <= x_min and x_max <= gx1 and gy0 <= y_min and y_max <= gy1

    def same_cells(self, other):
        return self.dx == other.dx and self.dy == other.dy


@dataclass(frozen=True)
class Grid2D:
    """
    Nonnegative scalar field sampled at cell centers.
    Holds densities (per unit area), masks and posteriors alike.
    """
    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.shape != self.spec.shape:
            raise ParameterError('values', f'shape {values.shape} does not match grid {self.spec.shape}')
        if not np.all(np.isfinite(values)):
            raise ParameterError('values', 'grid values must be finite')
        if values.size and values.min() < 0:
            raise ParameterError('values', f'grid values must be >= 0, found {values.min():.3g}')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, spec):
        return cls(spec, np.zeros(spec.shape))

    @classmethod
    def constant(cls, spec, value):
        return cls(spec, np.full(spec.shape, float(value)))

    def with_values(self, values):
        """New grid on the same spec"""
        return Grid2D(self.spec, values)

    def scaled(self, factor):
        return Grid2D(self.spec, self.values * factor)

    def check_compatible(self, other, operation='combine'):
        if self.spec != other.spec:
            raise IncompatibleGridError(self.spec, other.spec, operation)

    def is_mask(self):
        return bool(np.all((self.values == 0) | (self.values == 1)))

    def max(self):
        return float(self.values.max())
