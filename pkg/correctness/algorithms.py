"""
Sample-based robustness checks.

neighbor_correctness looks at the reference points within Chebyshev
distance theta of each test point and asks whether the classifier got all
of them right. all_correct_probability estimates the chance that n points
drawn from a vicinity are all classified correctly by the Bayes classifier.
"""
import logging

import numpy as np

from bayes.analysis import posterior
from core.conf import get_setting
from core.exceptions import IncompatibleGridError, ParameterError

from .models import MonteCarloEstimate, NeighborCorrectness
from .spatial import SpatialHash

logger = logging.getLogger(__name__)


def _check_predictions(predictions, reference):
    predictions = np.asarray(predictions, dtype=np.int64).reshape(-1)
    if len(predictions) != len(reference):
        raise ParameterError('predictions', f'{len(predictions)} predictions for {len(reference)} reference points')
    return predictions


def neighbor_correctness(test, reference, predictions, theta):
    """Robust correctness of test points judged by their labelled reference neighbours"""
    if not theta >= 0:
        raise ParameterError('theta', f'must be >= 0, got {theta}')
    predictions = _check_predictions(predictions, reference)
    if not len(test):
        raise ParameterError('test', 'no test points')

    wrong = predictions != reference.labels
    neighbours = np.zeros(len(test), dtype=np.int64)
    failures = np.zeros(len(test), dtype=np.int64)
    index = SpatialHash(reference.points, theta)
    for members, near, found in index.within(test.points, theta):
        neighbours[members] = near.sum(axis=1)
        failures[members] = (near & wrong[found][None, :]).sum(axis=1)

    clean = failures == 0
    covered = neighbours > 0
    result = NeighborCorrectness(
        alpha=float(np.mean(clean & covered)),
        alpha_vacuous=float(np.mean(clean)),
        coverage=float(np.mean(covered)),
        n_test=len(test),
        n_reference=len(reference),
        theta=float(theta),
    )
    logger.info(f'neighbour correctness: {result}')
    return result


def neighbor_correctness_self(samples, predictions, theta):
    """Test and reference are the same set; every point is its own neighbour"""
    return neighbor_correctness(samples, samples, predictions, theta)


def _trial_generators(seed, trials):
    """Independent counter-based streams, one per trial"""
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(seed).spawn(trials)]


def all_correct_probability(d, k, n_samples, trials, seed=None, tau_density=None):
    """
    Monte-Carlo estimate of E_x[prod_i max_k p(y=k|x_i)], x ~ p(x) and the
    x_i uniform over the kernel support around x.

    Each trial draws its x and then its offsets from its own stream, so a
    run with more samples extends the products of a run with fewer.
    """
    if n_samples < 0:
        raise ParameterError('n_samples', f'must be >= 0, got {n_samples}')
    if trials < 1:
        raise ParameterError('trials', f'must be >= 1, got {trials}')
    if n_samples == 0:
        return MonteCarloEstimate(1.0, 0.0, 0, trials)
    seed = get_setting('ROBUST_BOUND_SEED') if seed is None else seed
    spec = d.spec
    if not spec.same_cells(k.kernel.spec):
        raise IncompatibleGridError(spec, k.kernel.spec, 'sample a vicinity (cell spacing differs)')

    field = posterior(d, tau_density)
    # Off-support cells have no label to get wrong.
    factors = np.where(field.support, field.max_posterior(), 1.0)
    cdf = np.cumsum(field.evidence.values.reshape(-1))
    cdf /= cdf[-1]

    hx, hy = k.half_widths
    ox, oy = np.nonzero(k.support())
    ox, oy = ox - hx, oy - hy

    draws = []
    for rng in _trial_generators(seed, trials):
        cell = min(int(np.searchsorted(cdf, rng.random(), side='right')), cdf.size - 1)
        ix, iy = np.unravel_index(cell, spec.shape)
        jitter = rng.random(2)
        x = (spec.x0 + (ix + jitter[0]) * spec.dx, spec.y0 + (iy + jitter[1]) * spec.dy)
        pick = np.minimum((rng.random(n_samples) * len(ox)).astype(np.int64), len(ox) - 1)
        cix, ciy = spec.cell_index(np.column_stack([x[0] + ox[pick] * spec.dx, x[1] + oy[pick] * spec.dy]))
        inside = cix >= 0
        values = np.ones(n_samples)
        values[inside] = factors[cix[inside], ciy[inside]]
        draws.append(float(np.prod(values)))

    result = MonteCarloEstimate.from_draws(draws, n_samples)
    logger.info(f'all-correct probability {result}')
    return result
