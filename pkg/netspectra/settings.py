"""
Django settings for the netspectra project.

netspectra has no web surface: Django provides the settings layer, the
management-command CLI, the ORM used for run manifests and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = os.environ.get(
    'NETSPECTRA_SECRET_KEY',
    'django-insecure-netspectra-local-only-0p5k2x8w1q7r3m9v',
)

DEBUG = os.environ.get('NETSPECTRA_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'core',
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('NETSPECTRA_DB', BASE_DIR / 'db.sqlite3'),
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True


DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging
# Library modules log under "core.*"; commands lower it to WARNING on --quiet.

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'core': {
            'handlers': ['console'],
            'level': os.environ.get('NETSPECTRA_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# Numerical defaults
# Every library function accepts these as arguments; None reads them here.

# Numeric rank: singular values <= RANK_REL_TOL * sigma_max count as zero
RANK_REL_TOL = 1e-10
# Two eigenvalues closer than this are treated as one
DISTINCT_TOL = 1e-9
# Truncation threshold of every SVD pseudoinverse
SVD_REL_TOL = 1e-10
# Components with |Re| <= SIGN_TOL resolve to "+"
SIGN_TOL = 1e-9
# Pairing distance for the lambda -> -lambda spectrum test
BIPARTITE_TOL = 1e-6
# Modes with fitted amplitude below this share of the largest are not ranked
AMPLITUDE_REL_TOL = 1e-6
# Largest allowed distance between two vertices' leading cluster eigenvalues
SPECTRUM_AGREEMENT_TOL = 1e-4

SBM_MAX_RETRIES = 100
COUPLED_MAX_REDRAWS = 100

# Thread pool size for per-vertex analyses in the cluster command
CLUSTER_WORKERS = 1

# Store a RunManifest row for every command invocation
RECORD_RUNS = True
