"""This module contains small numeric and bookkeeping helpers"""

import hashlib
import json
from typing import Optional, Union

import numpy as np
from scipy.linalg import eigh

SeedLike = Union[None, int, np.random.Generator]


def frac(values):
    """Fractional part in [0, 1), elementwise.

    Args:
        values: A real scalar or array

    Returns:
        The values reduced modulo one, with the same shape as the input.
    """
    reduced = np.mod(values, 1.0)
    # np.mod may round a tiny negative input up to exactly 1.0
    return np.where(reduced >= 1.0, 0.0, reduced)


def circular_distance(first, second):
    """Distance on the circle ℝ/ℤ, elementwise."""
    difference = frac(np.asarray(first, dtype=float) - np.asarray(second, dtype=float))
    return np.minimum(difference, 1.0 - difference)


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """Build the random generator used by the randomized algorithms.

    Passing an existing generator returns it untouched so that callers can
    thread a single stream through several operations.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def digest(document) -> str:
    """SHA-256 of the canonical JSON encoding of a problem document.

    Args:
        document: Any JSON serializable value

    Returns:
        str: The hexadecimal digest, independent of key order and whitespace.
    """
    payload = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def sorted_eigh(matrix: np.ndarray, subset: Optional[tuple] = None):
    """Hermitian eigendecomposition of the symmetrized matrix, ascending."""
    hermitian = (matrix + matrix.conj().T) / 2
    if subset is None:
        return eigh(hermitian)
    return eigh(hermitian, subset_by_index=list(subset))
