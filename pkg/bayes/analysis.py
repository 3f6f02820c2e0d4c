"""
Bayes rule on grid distributions: posteriors, Bayes error, the uncertainty
region and the Bayes classifier, plus the sample-level duplicated-input test.
"""
import logging

import numpy as np

from core.conf import get_setting
from core.exceptions import ParameterError
from grid.models import Grid2D

from .models import OUT_OF_SUPPORT, LabelGrid, PosteriorField, UncertaintyRegion

logger = logging.getLogger(__name__)


def _resolve_tau_density(tau_density):
    return get_setting('ROBUST_BOUND_TAU_DENSITY') if tau_density is None else tau_density


def numerical_support(evidence_values, tau_density):
    """Cells with p(x) above tau_density times the largest evidence value"""
    tau_density = _resolve_tau_density(tau_density)
    peak = evidence_values.max()
    return evidence_values > tau_density * peak if peak > 0 else np.zeros(evidence_values.shape, dtype=bool)


def posterior(d, tau_density=None):
    """Bayes' theorem cellwise; out-of-support cells carry zero posteriors"""
    joints = d.joint_values()
    evidence = joints.sum(axis=0)
    support = numerical_support(evidence, tau_density)
    posteriors = np.zeros_like(joints)
    np.divide(joints, evidence, out=posteriors, where=support[None, :, :])
    return PosteriorField(posteriors, Grid2D(d.spec, evidence), support, _resolve_tau_density(tau_density))


def bayes_error(d, tau_density=None):
    """beta_D = integral of (1 - max_k p(y=k|x)) p(x) over the support"""
    joints = d.joint_values()
    evidence = joints.sum(axis=0)
    support = numerical_support(evidence, tau_density)
    # (1 - max posterior) p(x) is evidence minus the largest joint.
    pointwise = np.clip(evidence - joints.max(axis=0), 0.0, None)
    return float(pointwise[support].sum() * d.spec.cell_area)


def check_tau_unc(tau_unc):
    if tau_unc is None:
        tau_unc = get_setting('ROBUST_BOUND_TAU_UNC')
    if not 0.0 <= tau_unc < 0.5:
        raise ParameterError('tau_unc', f'must lie in [0, 0.5), got {tau_unc}')
    return tau_unc


def uncertainty_region(d, tau_unc=None, tau_density=None):
    """K_D: support cells whose max posterior is below 1 - tau_unc"""
    tau_unc = check_tau_unc(tau_unc)
    field = posterior(d, tau_density)
    inside = field.support & (field.max_posterior() < 1.0 - tau_unc)
    area = d.spec.cell_area
    volume = float(inside.sum() * area)
    mass = float(field.evidence.values[inside].sum() * area)
    return UncertaintyRegion(Grid2D(d.spec, inside.astype(float)), volume, mass, tau_unc)


def bayes_classifier(d, tau_density=None):
    """Argmax-posterior label per cell; ties go to the lowest class index"""
    joints = d.joint_values()
    evidence = joints.sum(axis=0)
    support = numerical_support(evidence, tau_density)
    # argmax over joints orders classes exactly like argmax over posteriors.
    labels = np.argmax(joints, axis=0)
    labels[~support] = OUT_OF_SUPPORT
    return LabelGrid(d.spec, labels)


def classifier_error(classifier, samples):
    """Fraction of samples the grid classifier gets wrong"""
    if not len(samples):
        raise ParameterError('samples', 'cannot measure an error rate on an empty sample set')
    return float(np.mean(classifier.predict(samples.points) != samples.labels))


def duplicated_input_check(samples):
    """True iff some exact input point carries two or more distinct labels"""
    if len(samples) < 2:
        return False
    _, inverse = np.unique(samples.points, axis=0, return_inverse=True)
    pairs = np.unique(np.column_stack([inverse.reshape(-1), samples.labels]), axis=0)
    # More (point, label) pairs than points means some point has two labels.
    return len(pairs) > len(np.unique(inverse))


def empirical_bayes_error(samples):
    """
    Bayes error of the point-mass distribution of a sample set: at each
    distinct input, every label except the most frequent one is an error.
    """
    if not len(samples):
        return 0.0
    _, inverse = np.unique(samples.points, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    counts = np.zeros((inverse.max() + 1, samples.num_classes), dtype=np.int64)
    np.add.at(counts, (inverse, samples.labels), 1)
    errors = counts.sum(axis=1) - counts.max(axis=1)
    return float(errors.sum() / len(samples))


def bayes_error_growth(beta, beta_prime):
    """Relative growth of the Bayes error after convolution; None when beta is 0"""
    return (beta_prime - beta) / beta if beta > 0 else None
