"""Numeric tolerances of the nctorus app.

Defaults live here; a Django project may override any of them through the
``NCTORUS_TOLERANCES`` setting, e.g.::

    NCTORUS_TOLERANCES = {"gap": 1e-6, "gauge_residual": 1e-5}

The library itself never requires Django settings to be configured.
"""
import dataclasses
import logging
from dataclasses import dataclass

from django.conf import settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    """Every numeric threshold used by the library, in one place."""

    # coefficients below this magnitude are deleted after every operation
    drop: float = 1e-14
    equality: float = 1e-10
    skew: float = 1e-10
    unitary: float = 1e-8
    curvature: float = 1e-9
    # eigenvalue clustering
    gap: float = 1e-7
    joint_eigen: float = 1e-8
    annihilation: float = 1e-6
    # relative cut applied when an eigenvector becomes a matrix element
    chop: float = 1e-11
    rank: float = 1e-6
    boundary_mass: float = 1e-10
    gauge_residual: float = 1e-6
    commutator: float = 1e-10
    snap: float = 1e-9
    # default circular tolerance when deciding equivalence of moduli points
    equivalence: float = 1e-5
    matching: float = 1e-12
    lattice_condition: float = 1e12
    lattice_identity: float = 1e-12
    pairing: float = 1e-9
    joint_retries: int = 5

    def replace(self, **changes) -> "Tolerances":
        """Return a copy with some thresholds changed."""
        return dataclasses.replace(self, **changes)


DEFAULT_TOLERANCES = Tolerances()


def get_tolerances() -> Tolerances:
    """Return the active tolerances.

    Returns:
        Tolerances: the defaults, updated with ``settings.NCTORUS_TOLERANCES``
            when Django settings are configured and define it.
    """
    if not settings.configured:
        return DEFAULT_TOLERANCES
    overrides = getattr(settings, "NCTORUS_TOLERANCES", None) or {}
    known = {field.name for field in dataclasses.fields(Tolerances)}
    unknown = set(overrides) - known
    if unknown:
        logger.warning("Ignoring unknown NCTORUS_TOLERANCES keys: %s", sorted(unknown))
    return DEFAULT_TOLERANCES.replace(
        **{key: value for key, value in overrides.items() if key in known}
    )
