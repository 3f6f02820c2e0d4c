from pathlib import Path
from decouple import config, Csv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Only the template engine and the management framework are used; nothing is served.
SECRET_KEY = config('SECRET_KEY', default='robust-bound-offline-tool')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

LOCAL_APPS = [
    'core',
    'grid',
    'density',
    'vicinity',
    'convolution',
    'bayes',
    'bounds',
    'correctness',
    'cli',
]

INSTALLED_APPS = [
    *LOCAL_APPS,
]

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [BASE_DIR / 'templates'],
        'APP_DIRS': True,
        'OPTIONS': {
            'autoescape': False,
        },
    },
]

# No persistence: every artifact is a file written by the CLI.
DATABASES = {}

USE_TZ = True


# Numerics Configuration
ROBUST_BOUND_RESOLUTION = config('ROBUST_BOUND_RESOLUTION', default=512, cast=int)
ROBUST_BOUND_TAU_UNC = config('ROBUST_BOUND_TAU_UNC', default=1e-3, cast=float)
ROBUST_BOUND_TAU_DENSITY = config('ROBUST_BOUND_TAU_DENSITY', default=1e-12, cast=float)
ROBUST_BOUND_LEAK_THRESHOLD = config('ROBUST_BOUND_LEAK_THRESHOLD', default=1e-3, cast=float)
ROBUST_BOUND_SEED = config('ROBUST_BOUND_SEED', default=0, cast=int)

# Moons: sigma is not published, run `robust-bound calibrate-moons` and feed the
# written config back in. The default below is only a starting point.
ROBUST_BOUND_MOONS_SIGMA = config('ROBUST_BOUND_MOONS_SIGMA', default=0.25, cast=float)
ROBUST_BOUND_MOONS_QUADRATURE_POINTS = config('ROBUST_BOUND_MOONS_QUADRATURE_POINTS', default=64, cast=int)
ROBUST_BOUND_MOONS_EXTENTS = config(
    'ROBUST_BOUND_MOONS_EXTENTS', default='-2.0,3.0,-1.75,2.25', cast=Csv(float)
)
ROBUST_BOUND_MOONS_TARGET_BETA = config('ROBUST_BOUND_MOONS_TARGET_BETA', default=0.0854, cast=float)

# Heatmap rendering
ROBUST_BOUND_RENDER_MAX_CELLS = config('ROBUST_BOUND_RENDER_MAX_CELLS', default=128, cast=int)


# Logging Configuration
LOG_LEVEL = config('LOG_LEVEL', default='INFO')
LOG_FILE = config('LOG_FILE', default='')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': True,
        },
    },
}

for _app in LOCAL_APPS:
    LOGGING['loggers'][_app] = {
        'handlers': ['console'],
        'level': LOG_LEVEL,
        'propagate': False,
    }

# File logging is opt-in; the CLI must not write outside --out by default.
if LOG_FILE:
    LOG_PATH = Path(LOG_FILE)
    LOG_PATH.parent.mkdir(parents=True, exist_ok=True)
    LOGGING['handlers']['file'] = {
        'level': 'WARNING',
        'class': 'logging.FileHandler',
        'filename': LOG_PATH,
        'formatter': 'verbose',
    }
    for _logger in LOGGING['loggers'].values():
        _logger['handlers'].append('file')
