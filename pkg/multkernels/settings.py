"""
Django settings for the multiplication kernels project.

The project has no database and no web surface: everything runs through
management commands of the ``kernels`` application.
"""

import os
import sys

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

SECRET_KEY = os.environ.get('SECRET_KEY')

DEBUG = True

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'rest_framework',
    'kernels',
]
try:
    # noinspection PyUnresolvedReferences
    import django_extensions

    INSTALLED_APPS.append('django_extensions')
except ImportError:
    pass

CHECK_MODULES = [
    'kernels.checks.expansion',
    'kernels.checks.structure',
    'kernels.checks.kernel',
    'kernels.checks.residue',
    'kernels.checks.oracles',
    'kernels.checks.birational',
    'kernels.checks.verlinde',
    'kernels.checks.cache',
]

MIDDLEWARE = []

DATABASES = {}

LOGS_DIR = os.path.join(BASE_DIR, 'logs')
os.makedirs(LOGS_DIR, exist_ok=True)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(levelname)s %(asctime)s %(name)s %(pathname)s:%(lineno)d %(message)s',
        },
        'simple': {
            'format': '%(levelname)s %(message)s',
        },
    },
    'handlers': {
        'null': {
            'class': 'logging.NullHandler',
        },
        'file': {
            'level': 'DEBUG',
            'class': 'logging.FileHandler',
            'filename': os.path.join(LOGS_DIR, 'debug.log'),
            'formatter': 'verbose',
        },
        'console': {
            'level': 'INFO',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['file'],
            'level': 'WARNING',
            'propagate': True,
        },
        'kernels': {
            'handlers': ['file', 'console'],
            'level': 'DEBUG',
            'propagate': False,
        },
        'filelock': {
            'handlers': ['null'],
            'propagate': False,
        },
    },
}

LANGUAGE_CODE = 'en-US'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# Rest Framework: serializers only, used to validate run configs
REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}

# Testing
TESTING = sys.argv[1:2] in (['test'], ['test_coverage'])

# Exact engine
KERNELS_CACHE_DIR = os.environ.get('KERNELS_CACHE_DIR') or os.path.join(BASE_DIR, 'cache')
KERNELS_CACHE_VERSION = 2

# height bound for sampled rational coordinates
SAMPLE_BOUND = 10 ** 4
SAMPLE_COUNT = 20

BIGF_PRECISION = 200
BIGF_TOLERANCE_BITS = 150

# closed tetrahedron x + y + z <= TETRA_SUM_BOUND
TETRA_SUM_BOUND = 2

from multkernels.local_settings import *

if TESTING:
    LOGGING['loggers']['kernels']['level'] = 'WARNING'
