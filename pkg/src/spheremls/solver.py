"""Per-center weighted least squares solves and their optimal-recovery form.

For a center ``y`` the approximation value is obtained by minimizing
``sum_i w_i |f(y_i) - g(y_i)|^2`` over the ansatz space and evaluating
the minimizer at ``y``.  The same value equals ``sum_i a*_i f(y_i)``
where the Backus-Gilbert coefficients ``a*`` minimize
``sum_i a_i^2 / w_i`` subject to reproducing every ansatz function at
the center; ``sum_i |a*_i|`` is the Lebesgue constant that controls
stability.

All solves go through one singular value decomposition of the weighted
design matrix ``diag(sqrt(w)) B`` (never through explicitly inverted
normal equations), which simultaneously yields the fitted value, the
recovery coefficients, the rank check and the Gram condition number.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from ._validation import check_samples, check_unit_vector, check_unit_vectors
from .bases import AnsatzSpec, build_evaluator
from .geometry import SphereDomainError, geodesic_distances
from .nodes import NodeSet
from .weights import WeightProfile, hat_squared

__all__ = [
    "RANK_RTOL",
    "MlsError",
    "NotEnoughNodesError",
    "NotUnisolventError",
    "FixedDelta",
    "MultipleOfFill",
    "MlsConfig",
    "MlsFit",
    "FieldDiagnostics",
    "active_nodes",
    "solve_local",
    "backus_gilbert_coefficients",
    "lebesgue_constant",
    "gram_condition",
    "mls_evaluate_field",
    "evaluate_field_diagnostics",
]

# Relative singular value cutoff below which the active set is declared
# not unisolvent for the ansatz space.
RANK_RTOL = 1e-12


class MlsError(Exception):
    """Base class for local solve failures; carries center and counts."""

    def __init__(self, message, center=None, n_active=None, basis_size=None):
        super().__init__(message)
        self.center = center
        self.n_active = n_active
        self.basis_size = basis_size


class NotEnoughNodesError(MlsError):
    """Fewer active nodes than basis functions."""


class NotUnisolventError(MlsError):
    """Active nodes fail to determine the ansatz coefficients uniquely."""


@dataclass(frozen=True)
class FixedDelta:
    """Use the same support radius (radians) for every solve."""

    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("delta must be positive")

    def resolve(self, h=None) -> float:
        return self.value


@dataclass(frozen=True)
class MultipleOfFill:
    """Support radius ``delta = factor * h`` tied to the fill distance."""

    factor: float

    def __post_init__(self):
        if not self.factor > 0:
            raise ValueError("factor must be positive")

    def resolve(self, h=None) -> float:
        if h is None:
            raise ValueError("fill distance h required to resolve delta")
        return self.factor * h


@dataclass
class MlsConfig:
    """Everything a local solve needs besides the data.

    Parameters
    ----------
    ansatz : AnsatzSpec
        The ansatz space.
    profile : WeightProfile
        Radial weight profile (support radius comes from ``delta_rule``).
    delta_rule : FixedDelta or MultipleOfFill
        How the support radius is chosen.
    rescale_diagonal : bool
        Solve in the column-rescaled basis whose Gram diagonal is 1; the
        reported coefficients always refer to the original basis.  This
        is what keeps centers near basis zeros from poisoning the
        conditioning.
    condition_report : bool
        Attach the Gram condition number to each fit.
    on_error : str
        Batch policy: ``"raise"`` stops at the first failing point,
        ``"skip"`` records NaN for it and carries on.
    """

    ansatz: AnsatzSpec
    profile: WeightProfile = field(default_factory=hat_squared)
    delta_rule: FixedDelta | MultipleOfFill = MultipleOfFill(3.5)
    rescale_diagonal: bool = True
    condition_report: bool = False
    on_error: str = "raise"

    def __post_init__(self):
        if self.on_error not in ("raise", "skip"):
            raise ValueError("on_error must be 'raise' or 'skip'")

    def resolve_delta(self, h=None) -> float:
        return self.delta_rule.resolve(h)


@dataclass
class MlsFit:
    """Result of one local solve.

    ``coefficients`` are in the original basis enumeration order and
    satisfy ``value_at_center = coefficients . basis(center)``;
    ``bg_coefficients`` (when present) align with ``active_indices``.
    """

    center: np.ndarray
    active_indices: np.ndarray
    coefficients: np.ndarray
    value_at_center: float
    bg_coefficients: np.ndarray | None = None
    lebesgue: float | None = None
    gram_condition: float | None = None


class _LocalSystem:
    """Shared SVD factorization of one local weighted design matrix."""

    __slots__ = ("indices", "weights", "sqrt_w", "U", "s", "Vt",
                 "scale", "b_center", "center")

    def __init__(self, indices, weights, sqrt_w, U, s, Vt, scale,
                 b_center, center):
        self.indices = indices
        self.weights = weights
        self.sqrt_w = sqrt_w
        self.U = U
        self.s = s
        self.Vt = Vt
        self.scale = scale
        self.b_center = b_center
        self.center = center

    def coefficients(self, values: np.ndarray) -> np.ndarray:
        """Minimizer coefficients in the original basis."""
        c = self.Vt.T @ ((self.U.T @ (self.sqrt_w * values)) / self.s)
        return c / self.scale

    def value(self, values: np.ndarray) -> float:
        return float(self.b_center @ self.coefficients(values))

    def bg_coefficients(self) -> np.ndarray:
        # a* = W B (B^T W B)^{-1} b  ==  sqrt(w) * U S^{-1} V^T b_scaled,
        # independent of the diagonal rescaling (same span).
        b_scaled = self.b_center / self.scale
        return self.sqrt_w * (self.U @ ((self.Vt @ b_scaled) / self.s))

    def gram_condition(self) -> float:
        return float((self.s[0] / self.s[-1]) ** 2)


def active_nodes(config: MlsConfig, nodes: NodeSet, center, delta: float):
    """Indices and weights of the nodes with positive weight around ``center``.

    Nodes at geodesic distance exactly ``delta`` get weight zero (the cap
    is open) and are excluded.
    """
    center = check_unit_vector(center, name="center")
    idx = nodes.neighbors_in_cap(center, delta)
    if idx.size == 0:
        return idx, np.empty(0)
    dist = geodesic_distances(nodes.points[idx], center)
    w = np.asarray(config.profile.phi(dist / delta), dtype=float)
    positive = w > 0
    return idx[positive], w[positive]


def _factorize(config: MlsConfig, nodes: NodeSet, center, delta: float,
               node_design: np.ndarray | None = None) -> _LocalSystem:
    """Build and factorize the local weighted system for one center.

    ``node_design`` may hold the precomputed design matrix over all nodes
    for center-independent ansatz kinds (the batch fast path).
    """
    center = check_unit_vector(center, name="center")
    idx, w = active_nodes(config, nodes, center, delta)
    spec = config.ansatz
    M = spec.basis_size
    if idx.size < M:
        raise NotEnoughNodesError(
            f"{idx.size} active nodes for basis size {M} "
            f"(delta={delta:.6g}, center={np.array2string(center, precision=4)})",
            center=center, n_active=int(idx.size), basis_size=M)
    if spec.center_dependent:
        evaluator = build_evaluator(spec, center)
    else:
        evaluator = build_evaluator(spec)
    if node_design is not None and not spec.center_dependent:
        B = node_design[idx]
    else:
        B = evaluator.design_matrix(nodes.points[idx])
    b_center = evaluator.design_matrix(center)
    if config.rescale_diagonal:
        diag = w @ (B * B)
        if not np.all(diag > 0):
            j = int(np.argmax(~(diag > 0)))
            raise NotUnisolventError(
                f"basis column {j} vanishes on all {idx.size} active nodes",
                center=center, n_active=int(idx.size), basis_size=M)
        scale = np.sqrt(diag)
    else:
        scale = np.ones(M)
    sqrt_w = np.sqrt(w)
    U, s, Vt = np.linalg.svd(sqrt_w[:, None] * (B / scale),
                             full_matrices=False)
    if s[-1] <= RANK_RTOL * s[0]:
        raise NotUnisolventError(
            f"active set is numerically rank deficient: "
            f"sigma_min/sigma_max = {s[-1] / s[0]:.3e} <= {RANK_RTOL:g} "
            f"({idx.size} nodes, basis size {M})",
            center=center, n_active=int(idx.size), basis_size=M)
    return _LocalSystem(idx, w, sqrt_w, U, s, Vt, scale, b_center, center)


def solve_local(config: MlsConfig, nodes: NodeSet, samples, center,
                delta: float, recovery: bool = False) -> MlsFit:
    """Weighted least squares fit around one center.

    Parameters
    ----------
    samples : array_like, shape (N,)
        Function values at all nodes; only the active ones enter the solve.
    delta : float
        Support radius in radians (see :meth:`MlsConfig.resolve_delta`).
    recovery : bool
        Also attach the optimal recovery coefficients and the Lebesgue
        constant to the fit (no extra factorization).

    Raises
    ------
    NotEnoughNodesError
        If fewer active nodes than basis functions are available.
    NotUnisolventError
        If the weighted design matrix is numerically rank deficient.
    """
    samples = check_samples(samples, nodes.n)
    system = _factorize(config, nodes, center, delta)
    values = samples[system.indices]
    coeffs = system.coefficients(values)
    fit = MlsFit(
        center=system.center,
        active_indices=system.indices,
        coefficients=coeffs,
        value_at_center=float(system.b_center @ coeffs),
    )
    if recovery:
        fit.bg_coefficients = system.bg_coefficients()
        fit.lebesgue = lebesgue_constant(fit.bg_coefficients)
    if config.condition_report:
        fit.gram_condition = system.gram_condition()
    return fit


def backus_gilbert_coefficients(config: MlsConfig, nodes: NodeSet, center,
                                delta: float) -> np.ndarray:
    """Optimal recovery coefficients ``a*`` for one center.

    The vector aligns with ``active_nodes(config, nodes, center, delta)``
    and satisfies ``sum_i a*_i g(y_i) = g(center)`` for every ansatz
    function ``g`` while minimizing ``sum_i a_i^2 / w_i``.
    """
    return _factorize(config, nodes, center, delta).bg_coefficients()


def lebesgue_constant(a_star) -> float:
    """``sum_i |a*_i|``; at least 1 whenever constants lie in the ansatz span."""
    return float(np.abs(np.asarray(a_star, dtype=float)).sum())


def gram_condition(config: MlsConfig, nodes: NodeSet, center,
                   delta: float) -> float:
    """2-norm condition number of the (optionally rescaled) Gram matrix.

    Computed as the squared singular value ratio of the weighted design
    matrix; always >= 1.
    """
    return _factorize(config, nodes, center, delta).gram_condition()


@dataclass
class FieldDiagnostics:
    """Per-point batch results; failed points hold NaN entries.

    ``failures`` lists ``(point_index, error_class, message)`` for every
    skipped point.
    """

    values: np.ndarray
    gram_condition: np.ndarray
    lebesgue: np.ndarray
    n_active: np.ndarray
    failures: list

    @property
    def n_failed(self) -> int:
        return len(self.failures)


_BATCHABLE_ERRORS = (MlsError, SphereDomainError)


def _evaluate_chunk(config, nodes, samples, points, delta, offset,
                    node_design, collect):
    m = points.shape[0]
    values = np.full(m, np.nan)
    conds = np.full(m, np.nan)
    lebs = np.full(m, np.nan)
    n_act = np.zeros(m, dtype=np.intp)
    failures = []
    for i in range(m):
        try:
            system = _factorize(config, nodes, points[i], delta,
                                node_design=node_design)
        except _BATCHABLE_ERRORS as exc:
            if config.on_error == "raise":
                raise type(exc)(
                    f"evaluation point {offset + i}: {exc}") from exc
            failures.append((offset + i, type(exc).__name__, str(exc)))
            continue
        values[i] = system.value(samples[system.indices])
        n_act[i] = system.indices.size
        if collect:
            conds[i] = system.gram_condition()
            lebs[i] = lebesgue_constant(system.bg_coefficients())
    return values, conds, lebs, n_act, failures


def evaluate_field_diagnostics(config: MlsConfig, nodes: NodeSet, samples,
                               eval_points, h: float | None = None,
                               delta: float | None = None,
                               n_jobs: int = 1,
                               collect: bool = True) -> FieldDiagnostics:
    """Independent local solves at each evaluation point, with diagnostics.

    ``delta`` overrides the config's delta rule; otherwise the rule is
    resolved from ``h``.  Results are ordered like ``eval_points`` and do
    not depend on ``n_jobs`` (chunks only partition the points).
    """
    samples = check_samples(samples, nodes.n)
    if np.size(eval_points):
        eval_points = np.asarray(eval_points, dtype=float)
        if eval_points.ndim == 1:
            eval_points = eval_points[None, :]
        # validation only; the raw rows go into the per-point solves so a
        # batch call is bitwise identical to the per-point solve_local
        check_unit_vectors(eval_points, name="eval_points")
    else:
        eval_points = np.empty((0, nodes.dim))
    if delta is None:
        delta = config.resolve_delta(h)
    m = eval_points.shape[0]
    if m == 0:
        empty = np.empty(0)
        return FieldDiagnostics(empty, empty.copy(), empty.copy(),
                                np.empty(0, dtype=np.intp), [])
    node_design = None
    if not config.ansatz.center_dependent:
        node_design = build_evaluator(config.ansatz).design_matrix(nodes.points)
    nodes.tree  # materialize once so parallel workers inherit it
    n_jobs = max(1, int(n_jobs))
    if n_jobs == 1 or m < 2 * n_jobs:
        parts = [_evaluate_chunk(config, nodes, samples, eval_points, delta,
                                 0, node_design, collect)]
    else:
        bounds = np.linspace(0, m, n_jobs + 1).astype(int)
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_evaluate_chunk)(
                config, nodes, samples, eval_points[lo:hi], delta, lo,
                node_design, collect)
            for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo)
    values = np.concatenate([p[0] for p in parts])
    conds = np.concatenate([p[1] for p in parts])
    lebs = np.concatenate([p[2] for p in parts])
    n_act = np.concatenate([p[3] for p in parts])
    failures = [f for p in parts for f in p[4]]
    return FieldDiagnostics(values, conds, lebs, n_act, failures)


def mls_evaluate_field(config: MlsConfig, nodes: NodeSet, samples,
                       eval_points, h: float | None = None,
                       delta: float | None = None,
                       n_jobs: int = 1) -> np.ndarray:
    """Approximation values at each evaluation point.

    One independent local solve per point; with ``on_error='skip'`` a
    failed point yields NaN, with ``on_error='raise'`` the first failure
    propagates, its message naming the point index.
    """
    result = evaluate_field_diagnostics(config, nodes, samples, eval_points,
                                        h=h, delta=delta, n_jobs=n_jobs,
                                        collect=False)
    return result.values
