from dataclasses import dataclass, field
from enum import Enum

from core.exceptions import ParameterError
from grid.models import Grid2D


class Norm(str, Enum):
    L_INF = 'linf'
    L2 = 'l2'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {'linf': cls.L_INF, 'l_inf': cls.L_INF, 'inf': cls.L_INF, 'l2': cls.L2}
        try:
            return aliases[str(value).strip().lower()]
        except KeyError:
            raise ParameterError('norm', f'expected linf or l2, got {value!r}')


@dataclass(frozen=True)
class VicinityKernel:
    """
    Discretized uniform vicinity density v: constant on the cells whose
    centers lie in the eps-ball, zero elsewhere, summing to exactly 1.

    eps_v is the continuous support area, raw_value = 1 / eps_v the height
    before the discrete renormalization, eps_eff the radius of the Euclidean
    ball with the same volume.
    """
    norm: Norm
    epsilon: float
    kernel: Grid2D = field(repr=False)
    eps_v: float
    eps_eff: float
    raw_value: float

    @property
    def shape(self):
        return self.kernel.spec.shape

    @property
    def half_widths(self):
        nx, ny = self.shape
        return nx // 2, ny // 2

    @property
    def is_delta(self):
        return self.shape == (1, 1)

    @property
    def support_cells(self):
        return int((self.kernel.values > 0).sum())

    def support(self):
        return self.kernel.values > 0

    def label(self):
        return f'{self.norm.value} eps={self.epsilon:g}'
