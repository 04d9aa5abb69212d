"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

# Grid generators and text round trips leave ~1-ulp deviations from unit
# norm; anything beyond this is treated as not a point on the sphere.
UNIT_NORM_TOL = 1e-6

ROTATION_ORTHO_TOL = 1e-12
ROTATION_DET_TOL = 1e-10


def check_unit_vectors(X, *, name: str = "X") -> np.ndarray:
    """Coerce ``X`` to an (m, d) float array of renormalized unit vectors.

    Rows must have Euclidean norm within ``UNIT_NORM_TOL`` of 1 and are
    renormalized exactly; d must be at least 2.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"{name} must be a vector or a 2-d array of row "
                         f"vectors, got shape {X.shape}")
    if X.shape[1] < 2:
        raise ValueError(f"{name} must have dimension >= 2, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite entries")
    norms = np.linalg.norm(X, axis=1)
    bad = np.abs(norms - 1.0) > UNIT_NORM_TOL
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValueError(
            f"{name}[{i}] has norm {norms[i]:.9g}, farther than "
            f"{UNIT_NORM_TOL:g} from 1; not a point on the unit sphere")
    return X / norms[:, None]


def check_unit_vector(y, *, name: str = "y") -> np.ndarray:
    """Like :func:`check_unit_vectors` for a single (d,) vector."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {y.shape}")
    return check_unit_vectors(y, name=name)[0]


def check_samples(values, n: int, *, name: str = "samples") -> np.ndarray:
    """Coerce sample values to a finite float vector of length ``n``."""
    values = np.asarray(values, dtype=float)
    if values.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{name} contains non-finite entries")
    return values


def is_rotation(R, *, ortho_tol: float = ROTATION_ORTHO_TOL,
                det_tol: float = ROTATION_DET_TOL) -> bool:
    """True if ``R`` is orthogonal within tolerance with determinant +1."""
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        return False
    d = R.shape[0]
    if np.abs(R.T @ R - np.eye(d)).max() > ortho_tol:
        return False
    return abs(np.linalg.det(R) - 1.0) <= det_tol
