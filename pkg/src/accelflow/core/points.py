"""Dense real vectors with construction-time finiteness checks.

Primal points x and dual vectors w share one representation: everything lives
in R^d with the inner-product norm, so a point is a 1-D float64 array and the
dual norm coincides with the primal one.
"""

from __future__ import annotations

import numpy as np

from ..errors import InputError

Point = np.ndarray


def as_point(x, dim: int | None = None) -> Point:
    """Coerce to a finite 1-D float64 array (scalars become length-1 vectors).

    Always copies, so callers may mutate their input afterwards. Raises
    InputError on NaN/Inf coordinates, empty input, or a dimension mismatch.
    """
    arr = np.array(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size < 1:
        raise InputError(f"expected a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("point has non-finite coordinates")
    if dim is not None and arr.size != dim:
        raise InputError(f"expected dimension {dim}, got {arr.size}")
    return arr


def check_same_dim(*points: Point) -> int:
    """Return the common dimension of the given vectors or raise InputError."""
    dims = {int(p.shape[0]) for p in points}
    if len(dims) != 1:
        raise InputError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()
