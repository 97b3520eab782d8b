"""
Django settings for lgp_project project.

The project has no web surface: everything runs through manage.py commands
(solve, classify, select, verify, write_fixtures, clear_runs).
"""

import os
import dj_database_url
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# --- Core Settings ---

SECRET_KEY = os.environ.get('SECRET_KEY', 'django-insecure-local-key-for-development-only')

DEBUG = os.environ.get('DEBUG', 'True').lower() == 'true'

ALLOWED_HOSTS = []


# --- Application Definition ---

INSTALLED_APPS = [
    'leastgrad',
    'django.contrib.contenttypes',
]


# --- Database Configuration ---

# Run archive only (--record); SQLite is enough for local work.
DATABASES = {
    'default': dj_database_url.parse(
        os.environ.get('DATABASE_URL', f"sqlite:///{BASE_DIR / 'leastgrad.sqlite3'}")
    )
}


# --- Internationalization & Time Zone ---

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True


# --- Numerical policy ---
# Every entry can be overridden with a LEASTGRAD_<NAME> environment variable.

def _env_number(name, default):
    raw = os.environ.get(f'LEASTGRAD_{name}')
    if raw is None:
        return default
    return type(default)(raw)


LEASTGRAD = {
    name: _env_number(name, default)
    for name, default in {
        'ANGLE_TOL': 1e-12,
        'LENGTH_TIE_TOL': 1e-9,
        'TV_REL_TOL': 1e-9,
        'GREEN_REL_TOL': 1e-9,
        'MAX_FREE_VERTICES': 12,
        'MAX_TIED_MATCHINGS': 1000,
        'SOLVER_MAX_ITERS': 50000,
        'SOLVER_TOL': 1e-10,
        'SOLVER_ACCEPT_TOL': 1e-4,
        'MONITOR_EVERY': 50,
        'MONOTONE_TOL': 1e-6,
        'PROBE_MARGIN_CELLS': 2,
        'MIN_GRID': 16,
    }.items()
}


# --- Logging Configuration ---
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'leastgrad': {
            'handlers': ['console'],
            'level': os.environ.get('LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
    },
}

# --- General Settings ---

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
