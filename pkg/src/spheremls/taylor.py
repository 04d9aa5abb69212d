"""Exact Taylor expansion of parity-basis monomials through the hemisphere chart.

Composing a monomial ``y^alpha`` (``alpha_d <= 1``) with the chart
``x -> (x, sqrt(1 - |x|^2))`` yields a smooth function on the open unit
ball whose degree-L Taylor polynomial at 0 is computed here in exact
rational arithmetic.  Collecting these polynomials over the whole
parity basis gives a square matrix that is unit lower triangular after
pairing each column ``alpha`` with the row ``beta = alpha_without_last``,
hence has determinant of absolute value exactly 1.  That unimodularity
is what makes the parity-reduced space locally as expressive as all
polynomials of degree L on the tangent space.

Everything here is verification tooling; the runtime solver never calls
into this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bases import parity_multiindices, tangent_multiindices

__all__ = [
    "TruncatedPolynomial",
    "TaylorMatrix",
    "sqrt_series",
    "pullback_polynomial",
    "taylor_matrix",
]


def sqrt_series(L: int) -> list[Fraction]:
    """Coefficients ``c_0..c_{L//2}`` of ``sqrt(1 - t) = sum c_k t^k``.

    ``c_0 = 1`` and ``c_k = c_{k-1} (2k - 3) / (2k)``; only powers up to
    ``t^{L//2}`` can contribute to a degree-L expansion in ``x`` because
    ``t = |x|^2`` has degree 2.
    """
    if L < 0:
        raise ValueError("L must be >= 0")
    coeffs = [Fraction(1)]
    for k in range(1, L // 2 + 1):
        coeffs.append(coeffs[-1] * Fraction(2 * k - 3, 2 * k))
    return coeffs


@dataclass(frozen=True)
class TruncatedPolynomial:
    """Polynomial with rational coefficients, truncated at a total degree.

    ``coeffs`` maps exponent tuples to :class:`fractions.Fraction`; terms
    beyond ``degree_cap`` are dropped by every operation.
    """

    coeffs: dict
    degree_cap: int

    @classmethod
    def zero(cls, degree_cap: int, nvars: int) -> "TruncatedPolynomial":
        del nvars
        return cls({}, degree_cap)

    @classmethod
    def monomial(cls, exponents, degree_cap: int,
                 coefficient=Fraction(1)) -> "TruncatedPolynomial":
        exponents = tuple(int(e) for e in exponents)
        if sum(exponents) > degree_cap:
            return cls({}, degree_cap)
        return cls({exponents: Fraction(coefficient)}, degree_cap)

    def coefficient(self, exponents) -> Fraction:
        return self.coeffs.get(tuple(exponents), Fraction(0))

    def __add__(self, other: "TruncatedPolynomial") -> "TruncatedPolynomial":
        cap = min(self.degree_cap, other.degree_cap)
        out = {k: v for k, v in self.coeffs.items() if sum(k) <= cap}
        for k, v in other.coeffs.items():
            if sum(k) <= cap:
                s = out.get(k, Fraction(0)) + v
                if s:
                    out[k] = s
                elif k in out:
                    del out[k]
        return TruncatedPolynomial(out, cap)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return TruncatedPolynomial({}, self.degree_cap)
            return TruncatedPolynomial(
                {k: v * other for k, v in self.coeffs.items()},
                self.degree_cap)
        cap = min(self.degree_cap, other.degree_cap)
        out: dict = {}
        for ka, va in self.coeffs.items():
            da = sum(ka)
            for kb, vb in other.coeffs.items():
                if da + sum(kb) > cap:
                    continue
                key = tuple(a + b for a, b in zip(ka, kb))
                s = out.get(key, Fraction(0)) + va * vb
                if s:
                    out[key] = s
                elif key in out:
                    del out[key]
        return TruncatedPolynomial(out, cap)

    __rmul__ = __mul__


def pullback_polynomial(alpha, L: int, d: int) -> TruncatedPolynomial:
    """Degree-L Taylor polynomial at 0 of ``y^alpha`` composed with the chart.

    For ``alpha_d = 0`` the composition is the monomial
    ``x^(alpha_1..alpha_{d-1})`` itself; for ``alpha_d = 1`` it picks up
    the factor ``sqrt(1 - |x|^2)``, expanded via :func:`sqrt_series` with
    ``t = x_1^2 + ... + x_{d-1}^2`` and truncated at total degree L.
    Coefficients are exact rationals in ``d - 1`` variables.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != d:
        raise ValueError(f"alpha must have length d = {d}, got {len(alpha)}")
    if any(a < 0 for a in alpha):
        raise ValueError("exponents must be non-negative")
    if alpha[-1] > 1:
        raise ValueError(
            f"alpha_d = {alpha[-1]} >= 2: not a member of the parity basis")
    if sum(alpha) > L:
        raise ValueError(f"|alpha| = {sum(alpha)} exceeds L = {L}")
    nvars = d - 1
    base = TruncatedPolynomial.monomial(alpha[:-1], L)
    if alpha[-1] == 0:
        return base
    t = TruncatedPolynomial({}, L)
    for j in range(nvars):
        exps = tuple(2 if i == j else 0 for i in range(nvars))
        t = t + TruncatedPolynomial.monomial(exps, L)
    series = TruncatedPolynomial.monomial((0,) * nvars, L, sqrt_series(L)[0])
    t_power = TruncatedPolynomial.monomial((0,) * nvars, L)
    for c_k in sqrt_series(L)[1:]:
        t_power = t_power * t
        series = series + t_power * c_k
    return base * series


@dataclass(frozen=True)
class TaylorMatrix:
    """Matrix of Taylor coefficients of the chart pullbacks of the parity basis.

    ``entries[i][j]`` is the coefficient of ``x^row_index[i]`` in the
    expansion of the column-j basis monomial; rows run over all exponents
    ``beta`` with ``|beta| <= L`` and columns over the parity basis, both
    in graded order.
    """

    entries: tuple
    row_index: tuple
    col_index: tuple
    degree: int
    dim: int

    @property
    def size(self) -> int:
        return len(self.row_index)

    def to_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])

    def pairing_permutation(self) -> list[int]:
        """Row order placing the row ``alpha_without_last`` of column j at j.

        Dropping the last exponent maps the parity basis bijectively onto
        all tangent exponents of degree <= L, so the permutation exists
        and is unique.
        """
        row_pos = {beta: i for i, beta in enumerate(self.row_index)}
        return [row_pos[alpha[:-1]] for alpha in self.col_index]

    def paired_entries(self) -> list[list[Fraction]]:
        perm = self.pairing_permutation()
        return [list(self.entries[i]) for i in perm]

    def is_unit_lower_triangular_after_pairing(self) -> bool:
        paired = self.paired_entries()
        for i, row in enumerate(paired):
            if row[i] != 1:
                return False
            if any(v != 0 for v in row[i + 1:]):
                return False
        return True

    def determinant(self) -> Fraction:
        """Exact determinant by fraction-free Gaussian elimination."""
        return _det_fraction([list(row) for row in self.entries])

    def solve(self, rhs: list) -> list[Fraction]:
        """Exact solution of ``M c = rhs`` (rhs indexed like the rows)."""
        n = self.size
        aug = [list(row) + [Fraction(rhs[i])]
               for i, row in enumerate(self.entries)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if pivot is None:
                raise ValueError("matrix is singular")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            inv = Fraction(1) / aug[col][col]
            aug[col] = [v * inv for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    factor = aug[r][col]
                    aug[r] = [a - factor * b
                              for a, b in zip(aug[r], aug[col])]
        return [aug[i][-1] for i in range(n)]


def _det_fraction(rows: list) -> Fraction:
    n = len(rows)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = Fraction(1) / rows[col][col]
        for r in range(col + 1, n):
            if rows[r][col]:
                factor = rows[r][col] * inv
                rows[r] = [a - factor * b
                           for a, b in zip(rows[r], rows[col])]
    return det


def taylor_matrix(L: int, d: int) -> TaylorMatrix:
    """Assemble the Taylor coefficient matrix for degree ``L`` on ``S^{d-1}``.

    Columns follow :func:`parity_multiindices`, rows
    :func:`tangent_multiindices`; the matrix is square of size
    ``C(d-1+L, L)`` and unimodular (see :class:`TaylorMatrix`).
    """
    if L < 0 or d < 2:
        raise ValueError("need L >= 0 and d >= 2")
    cols = parity_multiindices(L, d)
    rows = tangent_multiindices(L, d)
    polys = [pullback_polynomial(alpha, L, d) for alpha in cols]
    entries = tuple(
        tuple(p.coefficient(beta) for p in polys) for beta in rows)
    return TaylorMatrix(entries=entries,
                        row_index=tuple(rows),
                        col_index=tuple(cols),
                        degree=L, dim=d)
