"""Ansatz spaces for local approximation on the sphere.

Five families are supported, named after the columns of the benchmark
output files:

``all_harm``
    Real orthonormal spherical harmonics of all degrees up to L (d = 3).
``even_harm``
    Real orthonormal harmonics of the degrees congruent to L mod 2 only,
    the parity-reduced space of minimal dimension (d = 3).
``even_mon``
    The monomial basis of the same parity-reduced space: monomials
    ``y^alpha`` with ``|alpha| <= L``, ``|alpha| = L mod 2`` and
    ``alpha_d <= 1``, valid for any d.
``even_mon_cent``
    The ``even_mon`` basis composed with a rotation taking the query
    center to the north pole; spans the same space but stays well
    conditioned on small caps.
``tangent``
    Polynomials of degree up to L on the tangent plane at the center,
    pulled onto the sphere through the upper-hemisphere chart.  The
    spanned space itself depends on the center, and functions are only
    defined on the open half-sphere around it.

The parity-reduced and tangent families all have dimension
``C(d-1+L, L)``; the full harmonic space adds ``C(d-2+L, L-1)`` more.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from ._validation import check_unit_vector
from .geometry import SphereDomainError, inverse_projection, rotation_to_north

__all__ = [
    "ANSATZ_KINDS",
    "AnsatzSpec",
    "BasisEvaluator",
    "UnsupportedAnsatzError",
    "NearZeroBasisError",
    "parity_multiindices",
    "tangent_multiindices",
    "eval_monomial",
    "monomial_matrix",
    "eval_real_harmonics",
    "build_evaluator",
    "rescale_unit_diagonal",
]

ANSATZ_KINDS = ("all_harm", "even_harm", "even_mon", "even_mon_cent", "tangent")

_HARMONIC_KINDS = ("all_harm", "even_harm")
_CENTER_DEPENDENT = ("even_mon_cent", "tangent")


class UnsupportedAnsatzError(ValueError):
    """Requested an ansatz outside its supported configuration."""


class NearZeroBasisError(ValueError):
    """A basis function (nearly) vanishes on the whole active node set."""


def _index_sort_key(alpha):
    # graded order, ties broken so (1,0,0) precedes (0,1,0) precedes (0,0,1)
    return (sum(alpha), tuple(-a for a in alpha))


def _compositions(total: int, length: int):
    """All exponent vectors of the given length summing to ``total``."""
    if length == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, length - 1):
            yield (head,) + tail


def parity_multiindices(L: int, d: int) -> list[tuple[int, ...]]:
    """Exponents of the parity-reduced monomial basis on ``S^{d-1}``.

    All ``alpha`` in ``N_0^d`` with ``|alpha| <= L``, ``|alpha|`` congruent
    to L mod 2 and ``alpha_d <= 1``, ordered by ascending total degree and
    graded ties as in :func:`_index_sort_key`.  The count equals
    ``C(d-1+L, L)``.
    """
    if L < 0:
        raise ValueError("L must be >= 0")
    if d < 2:
        raise ValueError("d must be >= 2")
    out = []
    for total in range(L % 2, L + 1, 2):
        block = [a for a in _compositions(total, d) if a[-1] <= 1]
        block.sort(key=_index_sort_key)
        out.extend(block)
    return out


def tangent_multiindices(L: int, d: int) -> list[tuple[int, ...]]:
    """Exponents of all monomials of degree <= L in ``d - 1`` variables."""
    if L < 0:
        raise ValueError("L must be >= 0")
    if d < 2:
        raise ValueError("d must be >= 2")
    out = []
    for total in range(0, L + 1):
        block = sorted(_compositions(total, d - 1), key=_index_sort_key)
        out.extend(block)
    return out


def eval_monomial(alpha, y) -> float:
    """``prod_i y_i^alpha_i``; the empty exponent gives 1."""
    y = np.asarray(y, dtype=float)
    alpha = np.asarray(alpha)
    if y.shape != alpha.shape:
        raise ValueError(f"length mismatch: alpha {alpha.shape}, y {y.shape}")
    return float(np.prod(y ** alpha))


def monomial_matrix(points, indices) -> np.ndarray:
    """Stack of monomials: entry (i, j) is ``points[i] ** indices[j]``."""
    points = np.asarray(points, dtype=float)
    cols = [np.prod(points ** np.asarray(a, dtype=float), axis=1)
            for a in indices]
    return np.column_stack(cols)


def _normalized_legendre(x: np.ndarray, lmax: int) -> dict:
    """Fully normalized associated Legendre values ``P_l^m(x)``, m >= 0.

    Normalization makes the resulting real harmonics orthonormal with
    respect to the surface measure; no Condon-Shortley sign is applied.
    Standard three-term recurrence in l for each order m, stable for the
    small degrees used here.
    """
    s = np.sqrt(np.maximum(1.0 - x * x, 0.0))
    P: dict[tuple[int, int], np.ndarray] = {}
    for m in range(lmax + 1):
        amm = 1.0
        for k in range(1, m + 1):
            amm *= (2 * k + 1) / (2 * k)
        P[(m, m)] = np.sqrt(amm / (4.0 * np.pi)) * s ** m
        if m + 1 <= lmax:
            a = np.sqrt((4.0 * (m + 1) ** 2 - 1.0) / ((m + 1) ** 2 - m * m))
            P[(m + 1, m)] = a * x * P[(m, m)]
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt((2.0 * l + 1.0) * ((l - 1) ** 2 - m * m)
                        / ((2.0 * l - 3.0) * (l * l - m * m)))
            P[(l, m)] = a * x * P[(l - 1, m)] - b * P[(l - 2, m)]
    return P


def harmonic_degrees(L: int, parity_only: bool) -> list[int]:
    """Degrees making up the full or parity-reduced harmonic space."""
    if parity_only:
        return list(range(L % 2, L + 1, 2))
    return list(range(0, L + 1))


def eval_real_harmonics(points, L: int, parity_only: bool = False) -> np.ndarray:
    """Real orthonormal spherical harmonics on ``S^2`` up to degree ``L``.

    Columns are ordered by degree l ascending and order m = -l..l; with
    ``parity_only`` only degrees congruent to L mod 2 appear.  The basis
    is orthonormal for the surface measure: its Gram matrix under any
    quadrature exact to degree 2L is the identity.

    Raises
    ------
    UnsupportedAnsatzError
        If the points do not live on ``S^2`` (d must be 3).
    """
    points = np.asarray(points, dtype=float)
    single = points.ndim == 1
    pts = points[None, :] if single else points
    if pts.shape[1] != 3:
        raise UnsupportedAnsatzError(
            f"orthonormal harmonics are implemented for d = 3 only, "
            f"got d = {pts.shape[1]}")
    x = pts[:, 2]
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    P = _normalized_legendre(x, L)
    cols = []
    sqrt2 = np.sqrt(2.0)
    for l in harmonic_degrees(L, parity_only):
        for m in range(-l, l + 1):
            if m == 0:
                cols.append(P[(l, 0)])
            elif m > 0:
                cols.append(sqrt2 * P[(l, m)] * np.cos(m * phi))
            else:
                cols.append(sqrt2 * P[(l, -m)] * np.sin(-m * phi))
    out = np.column_stack(cols)
    return out[0] if single else out


@dataclass(frozen=True)
class AnsatzSpec:
    """Declarative description of an ansatz space.

    Parameters
    ----------
    kind : str
        One of :data:`ANSATZ_KINDS`.
    degree : int
        Maximal polynomial / harmonic degree L >= 0.
    dim : int
        Ambient dimension d >= 2 (harmonic kinds require d = 3).
    """

    kind: str
    degree: int
    dim: int = 3

    def __post_init__(self):
        if self.kind not in ANSATZ_KINDS:
            raise UnsupportedAnsatzError(
                f"unknown ansatz kind {self.kind!r}; expected one of "
                f"{ANSATZ_KINDS}")
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.kind in _HARMONIC_KINDS and self.dim != 3:
            raise UnsupportedAnsatzError(
                f"{self.kind} requires dim = 3, got {self.dim}")

    @property
    def center_dependent(self) -> bool:
        return self.kind in _CENTER_DEPENDENT

    @property
    def basis_size(self) -> int:
        """Dimension of the spanned space.

        ``C(d-1+L, L)`` for the parity-reduced and tangent families;
        the full harmonic space additionally contains the complementary
        parity block of dimension ``C(d-2+L, L-1)``.
        """
        L, d = self.degree, self.dim
        size = comb(d - 1 + L, L)
        if self.kind == "all_harm" and L >= 1:
            size += comb(d - 2 + L, L - 1)
        return size


class BasisEvaluator:
    """Evaluates all basis functions of an ansatz space at sphere points.

    Center-dependent kinds carry the rotation taking their center to the
    north pole; evaluation composes the basis with that rotation.  The
    instance is immutable and evaluation is pure.
    """

    def __init__(self, spec: AnsatzSpec, center=None):
        if spec.center_dependent:
            if center is None:
                raise ValueError(f"ansatz {spec.kind!r} needs a center")
            center = check_unit_vector(center, name="center")
            if center.shape[0] != spec.dim:
                raise ValueError(
                    f"center has dimension {center.shape[0]}, spec {spec.dim}")
            rotation = rotation_to_north(center)
        else:
            if center is not None:
                raise ValueError(f"ansatz {spec.kind!r} takes no center")
            rotation = None
        self.spec = spec
        self.center = center
        self.rotation = rotation
        if spec.kind in ("even_mon", "even_mon_cent"):
            self._indices = parity_multiindices(spec.degree, spec.dim)
        elif spec.kind == "tangent":
            self._indices = tangent_multiindices(spec.degree, spec.dim)
        else:
            self._indices = None

    @property
    def basis_size(self) -> int:
        return self.spec.basis_size

    def design_matrix(self, points) -> np.ndarray:
        """(m, basis_size) matrix of basis values at ``points``.

        Row i holds every basis function evaluated at the i-th point, in
        the fixed enumeration order of the family.

        Raises
        ------
        SphereDomainError
            For the tangent family, if any point leaves the open
            half-sphere around the center after rotation.
        """
        points = np.asarray(points, dtype=float)
        single = points.ndim == 1
        pts = points[None, :] if single else points
        if pts.shape[1] != self.spec.dim:
            raise ValueError(
                f"points have dimension {pts.shape[1]}, spec {self.spec.dim}")
        kind = self.spec.kind
        if kind == "all_harm":
            out = eval_real_harmonics(pts, self.spec.degree, parity_only=False)
        elif kind == "even_harm":
            out = eval_real_harmonics(pts, self.spec.degree, parity_only=True)
        elif kind == "even_mon":
            out = monomial_matrix(pts, self._indices)
        elif kind == "even_mon_cent":
            out = monomial_matrix(pts @ self.rotation.T, self._indices)
        else:  # tangent
            rotated = pts @ self.rotation.T
            if np.any(rotated[:, -1] <= 0.0):
                i = int(np.argmax(rotated[:, -1] <= 0.0))
                raise SphereDomainError(
                    f"point {i} is not in the open half-sphere around the "
                    f"center (rotated height {rotated[i, -1]:.6g})")
            out = monomial_matrix(inverse_projection(rotated), self._indices)
        return out[0] if single else out


def build_evaluator(spec: AnsatzSpec, center=None) -> BasisEvaluator:
    """Construct a :class:`BasisEvaluator`; ``center`` is required exactly
    for the center-dependent kinds."""
    return BasisEvaluator(spec, center)


def rescale_unit_diagonal(design: np.ndarray, weights: np.ndarray):
    """Rescale design columns so the weighted Gram diagonal is all ones.

    Column j is divided by ``sqrt(sum_i weights_i * design_ij^2)``.
    Returns the scaled design and the scale factors; dividing solved
    coefficients by the factors maps them back to the original basis.

    Raises
    ------
    NearZeroBasisError
        If a column's weighted norm vanishes, naming the column.
    """
    design = np.asarray(design, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if design.ndim != 2 or weights.shape != (design.shape[0],):
        raise ValueError("design must be (m, M) and weights (m,)")
    diag = weights @ (design * design)
    bad = ~(diag > 0)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise NearZeroBasisError(
            f"basis column {j} has zero weighted norm on the active set")
    factors = np.sqrt(diag)
    return design / factors, factors
