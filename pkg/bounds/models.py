from dataclasses import dataclass, field

CSV_COLUMNS = (
    'epsilon', 'norm', 'tau_unc', 'resolution', 'beta_D', 'beta_Dprime',
    'zeta_thm3', 'zeta_cor1', 'zeta_cor2', 'zeta_sharp', 'zeta_D', 'ub_zeta_D',
)


def _fmt(value):
    return f'{value:.9g}'


@dataclass(frozen=True)
class PipelineStages:
    """
    Intermediates of one bounds evaluation, in evaluation order:
    D' = D * v, its hardened version, D-dagger = hard(D') * v and the
    uncertainty regions of D, D' and D-dagger.
    """
    dprime: object = field(repr=False)
    hardened: object = field(repr=False)
    dagger: object = field(repr=False)
    region_d: object = None
    region_dprime: object = None
    region_dagger: object = None


@dataclass(frozen=True)
class BoundsReport:
    """
    Bayes errors and irreducible robustness error bounds for one distribution
    and one vicinity. Upper bounds are always derived as 1 - zeta.
    """
    epsilon: float
    norm: str
    tau_unc: float
    resolution: str
    num_classes: int
    beta_D: float
    beta_Dprime: float
    zeta_thm3: float
    zeta_cor1: float
    zeta_cor2: float
    zeta_sharp: float
    zeta_D: float
    eps_eff: float = 0.0
    p_min: float = 0.0
    stages: PipelineStages = field(default=None, repr=False, compare=False)

    @property
    def ub_thm3(self):
        return 1.0 - self.zeta_thm3

    @property
    def ub_cor1(self):
        return 1.0 - self.zeta_cor1

    @property
    def ub_cor2(self):
        return 1.0 - self.zeta_cor2

    @property
    def ub_zeta_sharp(self):
        return 1.0 - self.zeta_sharp

    @property
    def ub_zeta_D(self):
        return 1.0 - self.zeta_D

    @property
    def beta_growth(self):
        """Relative increase of the Bayes error caused by the convolution"""
        if self.beta_D <= 0:
            return None
        return (self.beta_Dprime - self.beta_D) / self.beta_D

    def as_row(self):
        """Sweep CSV fields in CSV_COLUMNS order"""
        return [
            _fmt(self.epsilon), self.norm, _fmt(self.tau_unc), self.resolution,
            _fmt(self.beta_D), _fmt(self.beta_Dprime), _fmt(self.zeta_thm3), _fmt(self.zeta_cor1),
            _fmt(self.zeta_cor2), _fmt(self.zeta_sharp), _fmt(self.zeta_D), _fmt(self.ub_zeta_D),
        ]

    def lines(self):
        growth = self.beta_growth
        out = [
            f'norm={self.norm} epsilon={self.epsilon:g} eps_eff={self.eps_eff:.6g} '
            f'tau_unc={self.tau_unc:g} grid={self.resolution} classes={self.num_classes}',
            f'beta_D       {self.beta_D:.6f}',
            f'beta_Dprime  {self.beta_Dprime:.6f}' + (f'  (growth {growth:+.2%})' if growth is not None else ''),
            f'zeta_thm3    {self.zeta_thm3:.6f}  upper bound {self.ub_thm3:.6f}',
            f'zeta_cor1    {self.zeta_cor1:.6f}  upper bound {self.ub_cor1:.6f}',
            f'zeta_cor2    {self.zeta_cor2:.6f}  upper bound {self.ub_cor2:.6f}  (p_min {self.p_min:.6g})',
            f'zeta_sharp   {self.zeta_sharp:.6f}  upper bound {self.ub_zeta_sharp:.6f}  (tau_unc {self.tau_unc:g})',
            f'zeta_D       {self.zeta_D:.6f}  upper bound {self.ub_zeta_D:.6f}',
        ]
        return out

    def __str__(self):
        return '\n'.join(self.lines())
