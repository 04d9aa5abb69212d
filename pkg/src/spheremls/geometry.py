"""Geometry of the unit sphere ``S^{d-1}`` embedded in ``R^d``.

Points are plain numpy arrays of unit Euclidean norm (d >= 2), rotations
are (d, d) orthogonal matrices with determinant +1, and a spherical cap
is described by its center and an opening angle in radians.  The module
also provides the orthogonal chart between the open unit ball in
``R^{d-1}`` and the open upper hemisphere, which underpins both the local
Taylor analysis and the tangent-plane ansatz space.
"""

from __future__ import annotations

import numpy as np

from ._validation import check_unit_vector

__all__ = [
    "SphereDomainError",
    "geodesic_distance",
    "geodesic_distances",
    "north_pole",
    "project_to_sphere",
    "inverse_projection",
    "rotation_to_north",
    "cap_contains",
]

# Below this inner product with the north pole the in-plane rotation
# formula loses precision (its error grows like eps / (1 + <y, e_d>)),
# so the point is first reflected through the last two axes.
MIRROR_THRESHOLD = -0.5


class SphereDomainError(ValueError):
    """A point lies outside the domain of a chart operation."""


def geodesic_distance(y, z) -> float:
    """Great circle distance ``arccos(<y, z>)`` between two unit vectors.

    The inner product is clamped to [-1, 1] before ``arccos`` because
    floating-point dot products of unit vectors can exceed 1 in magnitude
    by a few ulp, which would otherwise produce NaN.

    Returns a value in [0, pi].
    """
    y = check_unit_vector(y, name="y")
    z = check_unit_vector(z, name="z")
    if y.shape != z.shape:
        raise ValueError(f"dimension mismatch: {y.shape[0]} vs {z.shape[0]}")
    return float(np.arccos(np.clip(y @ z, -1.0, 1.0)))


def geodesic_distances(points, center) -> np.ndarray:
    """Great circle distances from each row of ``points`` to ``center``.

    Vectorized companion of :func:`geodesic_distance`; inputs are assumed
    to already be unit vectors (no validation, used in inner loops).
    """
    points = np.asarray(points, dtype=float)
    center = np.asarray(center, dtype=float)
    return np.arccos(np.clip(points @ center, -1.0, 1.0))


def north_pole(d: int) -> np.ndarray:
    """The point ``e_d = (0, ..., 0, 1)`` on ``S^{d-1}``."""
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    e = np.zeros(d)
    e[-1] = 1.0
    return e


def project_to_sphere(x) -> np.ndarray:
    """Map ``x`` in the open unit ball of ``R^{d-1}`` onto the upper hemisphere.

    Appends the coordinate ``sqrt(1 - |x|^2)``, so the image lies in the open
    cap of radius pi/2 around the north pole.

    Parameters
    ----------
    x : array_like, shape (d-1,) or (m, d-1)
        Points with Euclidean norm strictly below 1.

    Raises
    ------
    SphereDomainError
        If any input point has norm >= 1.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.ndim != 2 or X.shape[1] < 1:
        raise ValueError(f"expected points in R^(d-1), got shape {x.shape}")
    sq = np.einsum("ij,ij->i", X, X)
    if np.any(sq >= 1.0):
        i = int(np.argmax(sq))
        raise SphereDomainError(
            f"point {i} has norm {np.sqrt(sq[i]):.9g} >= 1, outside the "
            f"open unit ball")
    out = np.concatenate([X, np.sqrt(1.0 - sq)[:, None]], axis=1)
    return out[0] if single else out


def inverse_projection(y) -> np.ndarray:
    """Drop the last coordinate of points in the open upper hemisphere.

    Inverse of :func:`project_to_sphere`.  Requires ``y_d > 0``, i.e. the
    point must lie strictly inside the cap of radius pi/2 around the
    north pole.
    """
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    Y = y[None, :] if single else y
    if Y.ndim != 2 or Y.shape[1] < 2:
        raise ValueError(f"expected points in R^d, d >= 2, got shape {y.shape}")
    if np.any(Y[:, -1] <= 0.0):
        i = int(np.argmax(Y[:, -1] <= 0.0))
        raise SphereDomainError(
            f"point {i} has last coordinate {Y[i, -1]:.9g} <= 0, outside "
            f"the open upper hemisphere")
    out = Y[:, :-1]
    return out[0] if single else out


def _plane_rotation_to_pole(y: np.ndarray, e: np.ndarray) -> np.ndarray:
    # rotation in span{y, e} mapping y to e, identity elsewhere, written
    # as a product of two reflections so the determinant is +1; only
    # well conditioned while <y, e> stays away from -1
    c = float(y @ e)
    v = y + e
    return np.eye(y.shape[0]) + 2.0 * np.outer(e, y) \
        - np.outer(v, v) / (1.0 + c)


def rotation_to_north(y) -> np.ndarray:
    """A rotation ``R`` in SO(d) with ``R y = e_d``, chosen deterministically.

    For ``<y, e_d> > MIRROR_THRESHOLD`` the matrix is the rotation acting
    in the plane spanned by ``y`` and the north pole (identity on the
    orthogonal complement), built from two reflections:

        R = I + 2 e_d y^T - (y + e_d)(y + e_d)^T / (1 + <y, e_d>)

    For d = 3 this coincides with the rotation about the axis ``y x e_3``
    by the geodesic angle between ``y`` and ``e_3``.  Points on the
    southern side are first reflected through the last two coordinate
    axes (a proper rotation) and then rotated in-plane, which keeps the
    construction accurate arbitrarily close to the antipode; the antipode
    itself maps through exactly that axis flip.  Any deterministic choice
    with ``R y = e_d`` serves equally well because the ansatz spaces
    built on top are rotation invariant.
    """
    y = check_unit_vector(y, name="y")
    d = y.shape[0]
    e = north_pole(d)
    c = float(y @ e)
    if c < MIRROR_THRESHOLD:
        flip = np.eye(d)
        flip[d - 2, d - 2] = -1.0
        flip[d - 1, d - 1] = -1.0
        return _plane_rotation_to_pole(flip @ y, e) @ flip
    return _plane_rotation_to_pole(y, e)


def cap_contains(center, radius: float, z) -> bool:
    """Whether ``z`` lies in the open spherical cap of ``radius`` around ``center``.

    The cap is open: points at geodesic distance exactly ``radius`` are
    outside.
    """
    if not 0.0 < radius <= np.pi:
        raise ValueError(f"cap radius must be in (0, pi], got {radius}")
    return geodesic_distance(center, z) < radius
