import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NeighborCorrectness:
    """
    Outcome of a neighbourhood robustness test.

    alpha counts a test point only when it has at least one neighbour and all
    of them are predicted correctly. alpha_vacuous also counts points without
    neighbours. coverage is the share of test points with a neighbour.
    """
    alpha: float
    alpha_vacuous: float
    coverage: float
    n_test: int
    n_reference: int
    theta: float

    def __str__(self):
        return (
            f'theta={self.theta:g} test={self.n_test} reference={self.n_reference}: '
            f'alpha={self.alpha:.6g} alpha_vacuous={self.alpha_vacuous:.6g} coverage={self.coverage:.6g}'
        )


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    n_samples: int
    trials: int

    def __str__(self):
        return f'n={self.n_samples}: {self.estimate:.6g} +- {self.stderr:.2g} ({self.trials} trials)'

    @classmethod
    def from_draws(cls, draws, n_samples):
        draws = np.asarray(draws, dtype=float)
        trials = len(draws)
        mean = float(np.mean(draws))
        if trials < 2:
            return cls(mean, math.inf, n_samples, trials)
        return cls(mean, float(np.std(draws, ddof=1) / math.sqrt(trials)), n_samples, trials)
