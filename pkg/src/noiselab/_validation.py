"""Input validation helpers for the estimator-facing API."""

from __future__ import annotations

import numpy as np

from .errors import AmbientMismatchError


def check_syndrome_matrix(x, n_generators: int) -> np.ndarray:
    """Validate a (rows, generators) binary outcome matrix and return uint8."""
    arr = np.asarray(x)
    if arr.ndim != 2:
        raise ValueError(f"syndrome data must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[1] != n_generators:
        raise ValueError(
            f"syndrome data has {arr.shape[1]} columns, code measures "
            f"{n_generators} generators"
        )
    if arr.shape[0] == 0:
        raise ValueError("syndrome data has no rows")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("syndrome data must contain only 0/1 outcomes")
    return arr.astype(np.uint8)


def check_matching_ambient(code, model) -> None:
    if code.ambient != model.ambient:
        raise AmbientMismatchError(
            f"code ambient {code.ambient} disagrees with noise ambient {model.ambient}"
        )
