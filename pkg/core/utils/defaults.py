"""Fallback numeric defaults, read from Django settings at call time."""
from django.conf import settings

_FALLBACKS = {
    'RANK_REL_TOL': 1e-10,
    'DISTINCT_TOL': 1e-9,
    'SVD_REL_TOL': 1e-10,
    'SIGN_TOL': 1e-9,
    'BIPARTITE_TOL': 1e-6,
    'AMPLITUDE_REL_TOL': 1e-6,
    'SPECTRUM_AGREEMENT_TOL': 1e-4,
    'SBM_MAX_RETRIES': 100,
    'COUPLED_MAX_REDRAWS': 100,
    'CLUSTER_WORKERS': 1,
    'RECORD_RUNS': True,
}


def setting(name: str, value=None):
    """Return `value` if given, else the project setting `name`."""
    if value is not None:
        return value
    return getattr(settings, name, _FALLBACKS[name])
