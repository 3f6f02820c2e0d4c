"""
Lower bounds on the irreducible robustness error and the hardened-convolved
estimate zeta_D.

Evaluation order is fixed: D' = D * v, hard(D'), D-dagger = hard(D') * v,
then regions and integrals. compute_bounds runs the convolutions once and
derives every number from the shared stages.
"""
import logging

import numpy as np

from bayes.analysis import bayes_error, check_tau_unc, numerical_support, uncertainty_region
from convolution.engine import convolve_distribution
from core.exceptions import ParameterError
from density.models import LabeledDensity
from vicinity.kernels import effective_radius

from .models import BoundsReport, PipelineStages

logger = logging.getLogger(__name__)

GRID_DIM = 2
BETA_SLACK = 1e-9


def thm3_lower(d, tau_unc=None, tau_density=None):
    """Probability mass of the uncertainty region K_D"""
    return uncertainty_region(d, tau_unc, tau_density).mass


def cor1_lower(beta, num_classes):
    """beta * K / (K - 1)"""
    if int(num_classes) != num_classes or num_classes < 2:
        raise ParameterError('num_classes', f'must be an integer >= 2, got {num_classes}')
    ceiling = 1.0 - 1.0 / num_classes
    if not -BETA_SLACK <= beta <= ceiling + BETA_SLACK:
        raise ParameterError('beta', f'must lie in [0, {ceiling:g}] for {num_classes} classes, got {beta}')
    beta = min(max(beta, 0.0), ceiling)
    return beta * num_classes / (num_classes - 1)


def cor2_margin(eps_eff, p_min, volume, dim=GRID_DIM):
    """2 eps_eff p_min vol^((dim - 1) / dim)"""
    if eps_eff < 0 or p_min < 0 or volume < 0:
        raise ParameterError('cor2', f'eps_eff, p_min and volume must be >= 0, got {eps_eff}, {p_min}, {volume}')
    if dim < 1:
        raise ParameterError('dim', f'must be >= 1, got {dim}')
    return 2.0 * eps_eff * p_min * volume ** ((dim - 1) / dim)


def min_evidence(d, tau_density=None):
    """Smallest p(x) over the numerical support"""
    evidence = d.evidence().values
    support = numerical_support(evidence, tau_density)
    return float(evidence[support].min()) if support.any() else 0.0


def cor2_lower(d, k, tau_unc=None, p_min_override=None, tau_density=None):
    """Mass of K_D plus the margin of width eps_eff around it, capped at 1"""
    region = uncertainty_region(d, tau_unc, tau_density)
    p_min = min_evidence(d, tau_density) if p_min_override is None else float(p_min_override)
    eps_eff = effective_radius(k.norm, k.epsilon, GRID_DIM)
    return min(1.0, region.mass + cor2_margin(eps_eff, p_min, region.volume, GRID_DIM))


def harden(dprime):
    """Give each cell's whole evidence to its argmax class (ties to the lowest index)"""
    joints = dprime.joint_values()
    winners = np.argmax(joints, axis=0)
    hard = np.zeros_like(joints)
    np.put_along_axis(hard, winners[None, :, :], joints.sum(axis=0)[None, :, :], axis=0)
    return LabeledDensity.from_joints(hard, dprime.spec, dprime.mass_tolerance)


def run_stages(d, k, tau_unc=None, tau_density=None, leak_threshold=None):
    tau_unc = check_tau_unc(tau_unc)
    logger.info(f'Bounds pipeline for {k.label()}: convolve')
    dprime = convolve_distribution(d, k, leak_threshold)
    logger.info('Bounds pipeline: harden and convolve again')
    hardened = harden(dprime)
    dagger = convolve_distribution(hardened, k, leak_threshold)
    return PipelineStages(
        dprime=dprime,
        hardened=hardened,
        dagger=dagger,
        region_d=uncertainty_region(d, tau_unc, tau_density),
        region_dprime=uncertainty_region(dprime, tau_unc, tau_density),
        region_dagger=uncertainty_region(dagger, tau_unc, tau_density),
    )


def convolved_region(d, k, tau_unc=None, tau_density=None, leak_threshold=None):
    """D' = D * v and its uncertainty region"""
    dprime = convolve_distribution(d, k, leak_threshold)
    return dprime, uncertainty_region(dprime, tau_unc, tau_density)


def zeta_sharp(d, k, tau_unc=None, tau_density=None, leak_threshold=None):
    """Mass of the uncertainty region of D' = D * v"""
    return convolved_region(d, k, tau_unc, tau_density, leak_threshold)[1].mass


def _zeta_d_from(dprime, region_dagger, tau_density=None):
    """
    D' evidence inside K_dagger plus the D' Bayes-error density outside it.
    The second integral runs over the D' support only.
    """
    joints = dprime.joint_values()
    evidence = joints.sum(axis=0)
    inside = region_dagger.mask.values.astype(bool)
    outside = numerical_support(evidence, tau_density) & ~inside
    area = dprime.spec.cell_area
    first = evidence[inside].sum() * area
    second = np.clip(evidence - joints.max(axis=0), 0.0, None)[outside].sum() * area
    return float(first + second)


def zeta_d(d, k, tau_unc=None, tau_density=None, leak_threshold=None):
    stages = run_stages(d, k, tau_unc, tau_density, leak_threshold)
    return _zeta_d_from(stages.dprime, stages.region_dagger, tau_density)


def compute_bounds(d, k, tau_unc=None, p_min_override=None, tau_density=None, leak_threshold=None,
                   stages=None, keep_stages=False):
    """Every bound for one distribution and kernel; pass stages to reuse the convolutions"""
    tau_unc = check_tau_unc(tau_unc)
    if stages is None:
        stages = run_stages(d, k, tau_unc, tau_density, leak_threshold)
    elif stages.region_d is None or stages.region_d.tolerance != tau_unc:
        stages = PipelineStages(
            dprime=stages.dprime,
            hardened=stages.hardened,
            dagger=stages.dagger,
            region_d=uncertainty_region(d, tau_unc, tau_density),
            region_dprime=uncertainty_region(stages.dprime, tau_unc, tau_density),
            region_dagger=uncertainty_region(stages.dagger, tau_unc, tau_density),
        )

    beta = bayes_error(d, tau_density)
    p_min = min_evidence(d, tau_density) if p_min_override is None else float(p_min_override)
    eps_eff = effective_radius(k.norm, k.epsilon, GRID_DIM)
    region = stages.region_d
    report = BoundsReport(
        epsilon=k.epsilon,
        norm=k.norm.value,
        tau_unc=tau_unc,
        resolution=d.spec.resolution,
        num_classes=d.num_classes,
        beta_D=beta,
        beta_Dprime=bayes_error(stages.dprime, tau_density),
        zeta_thm3=region.mass,
        zeta_cor1=cor1_lower(beta, d.num_classes),
        zeta_cor2=min(1.0, region.mass + cor2_margin(eps_eff, p_min, region.volume, GRID_DIM)),
        zeta_sharp=stages.region_dprime.mass,
        zeta_D=_zeta_d_from(stages.dprime, stages.region_dagger, tau_density),
        eps_eff=eps_eff,
        p_min=p_min,
        stages=stages if keep_stages else None,
    )
    logger.info(f'{k.label()}: beta_D={report.beta_D:.6g} beta_Dprime={report.beta_Dprime:.6g} zeta_D={report.zeta_D:.6g}')
    return report
