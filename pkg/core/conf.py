from django.conf import settings

# Used when the library runs without a configured Django settings module.
DEFAULTS = {
    'ROBUST_BOUND_RESOLUTION': 512,
    'ROBUST_BOUND_TAU_UNC': 1e-3,
    'ROBUST_BOUND_TAU_DENSITY': 1e-12,
    'ROBUST_BOUND_LEAK_THRESHOLD': 1e-3,
    'ROBUST_BOUND_SEED': 0,
    'ROBUST_BOUND_MOONS_SIGMA': 0.25,
    'ROBUST_BOUND_MOONS_QUADRATURE_POINTS': 64,
    'ROBUST_BOUND_MOONS_EXTENTS': [-2.0, 3.0, -1.75, 2.25],
    'ROBUST_BOUND_MOONS_TARGET_BETA': 0.0854,
    'ROBUST_BOUND_RENDER_MAX_CELLS': 128,
}


def get_setting(name):
    """Read a numerics setting, falling back to the built-in default"""
    if settings.configured:
        return getattr(settings, name, DEFAULTS[name])
    return DEFAULTS[name]
