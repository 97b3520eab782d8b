"""
Numerical policy constants.

Values come from settings.LEASTGRAD when Django is configured, otherwise the
built-in defaults apply so the numerical modules import cleanly on their own.
"""

from django.conf import settings

DEFAULTS = {
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
}


def setting(name):
    """Look up one policy constant by name."""
    if name not in DEFAULTS:
        raise KeyError(f"Unknown leastgrad setting: {name}")
    if settings.configured:
        return getattr(settings, 'LEASTGRAD', {}).get(name, DEFAULTS[name])
    return DEFAULTS[name]
