"""scikit-learn style front end for the per-center solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_samples, check_unit_vectors
from .bases import AnsatzSpec
from .nodes import NodeSet
from .solver import (FieldDiagnostics, FixedDelta, MlsConfig, MultipleOfFill,
                     evaluate_field_diagnostics, mls_evaluate_field)
from .weights import WeightProfile, hat_power, hat_squared

__all__ = ["SphericalMLS"]


class SphericalMLS(RegressorMixin, BaseEstimator):
    """Moving least squares regressor for scattered data on the unit sphere.

    ``fit`` stores the sample sites and values; ``predict`` solves one
    small weighted least squares problem per query point, fitting the
    chosen ansatz space on the nodes inside a geodesic cap and evaluating
    the local fit at the query point.

    Parameters
    ----------
    ansatz : str, default="even_mon_cent"
        Ansatz family: "all_harm", "even_harm", "even_mon",
        "even_mon_cent" or "tangent".  The center-rotated monomial
        basis is the numerically robust default.
    degree : int, default=3
        Maximal polynomial / harmonic degree L.
    fill_multiple : float, default=3.5
        Cap radius as a multiple of the estimated fill distance of the
        training nodes (ignored when ``delta`` is given).  For "all_harm"
        the larger space typically needs about 4.5.
    delta : float, optional
        Fixed cap radius in radians, overriding ``fill_multiple``.
    weight : str or WeightProfile, default="hat_squared"
        Radial weight profile; "hat_power" uses ``hat_exponent``.
    hat_exponent : float, default=2.0
        Exponent for the "hat_power" profile.
    rescale_diagonal : bool, default=True
        Solve in the basis rescaled to a unit Gram diagonal.
    on_error : str, default="raise"
        Per-point failure policy for predict: "raise" or "skip" (NaN).
    fill_samples : int, default=20000
        Random probes for the fill distance estimate.
    fill_seed : int, default=0
        Seed for those probes.
    n_jobs : int, default=1
        Parallel chunks for batch prediction.

    Attributes
    ----------
    nodes_ : NodeSet
        Training sites.
    values_ : ndarray of shape (n_samples,)
        Training values.
    fill_distance_ : float
        Estimated fill distance of the training sites (radians).
    delta_ : float
        Cap radius used by predict (radians).

    Examples
    --------
    >>> import numpy as np
    >>> from spheremls import SphericalMLS, fibonacci_grid
    >>> nodes = fibonacci_grid(160)
    >>> f = lambda p: np.exp(-2 * (1 - p[:, 2]))
    >>> model = SphericalMLS(degree=3).fit(nodes.points, f(nodes.points))
    >>> t = np.array([[0.0, 0.6, 0.8]])
    >>> bool(np.abs(model.predict(t) - f(t))[0] < 1e-4)
    True
    """

    def __init__(self, ansatz="even_mon_cent", degree=3, fill_multiple=3.5,
                 delta=None, weight="hat_squared", hat_exponent=2.0,
                 rescale_diagonal=True, on_error="raise",
                 fill_samples=20_000, fill_seed=0, n_jobs=1):
        self.ansatz = ansatz
        self.degree = degree
        self.fill_multiple = fill_multiple
        self.delta = delta
        self.weight = weight
        self.hat_exponent = hat_exponent
        self.rescale_diagonal = rescale_diagonal
        self.on_error = on_error
        self.fill_samples = fill_samples
        self.fill_seed = fill_seed
        self.n_jobs = n_jobs

    def _profile(self) -> WeightProfile:
        if isinstance(self.weight, WeightProfile):
            return self.weight
        if self.weight == "hat_squared":
            return hat_squared()
        if self.weight == "hat_power":
            return hat_power(self.hat_exponent)
        raise ValueError(f"unknown weight {self.weight!r}")

    def _config(self) -> MlsConfig:
        rule = FixedDelta(self.delta) if self.delta is not None \
            else MultipleOfFill(self.fill_multiple)
        return MlsConfig(
            ansatz=AnsatzSpec(self.ansatz, self.degree,
                              dim=self.n_features_in_),
            profile=self._profile(),
            delta_rule=rule,
            rescale_diagonal=self.rescale_diagonal,
            on_error=self.on_error,
        )

    def fit(self, X, y):
        """Store unit-vector sites ``X`` of shape (n, d) and values ``y``."""
        X = check_unit_vectors(X, name="X")
        y = check_samples(y, X.shape[0], name="y")
        self.n_features_in_ = X.shape[1]
        self._config()  # surface bad ansatz / weight combinations here
        self.nodes_ = NodeSet(X)
        self.values_ = y
        if self.delta is not None:
            self.fill_distance_ = None
            self.delta_ = float(self.delta)
        else:
            self.fill_distance_ = self.nodes_.fill_distance_estimate(
                samples=self.fill_samples, seed=self.fill_seed)
            self.delta_ = self.fill_multiple * self.fill_distance_
        return self

    def predict(self, X) -> np.ndarray:
        """Approximation values at the query points ``X`` of shape (m, d)."""
        check_is_fitted(self, "nodes_")
        X = check_unit_vectors(X, name="X")
        return mls_evaluate_field(self._config(), self.nodes_, self.values_,
                                  X, delta=self.delta_, n_jobs=self.n_jobs)

    def predict_diagnostics(self, X) -> FieldDiagnostics:
        """Like predict, additionally reporting per-point Gram condition
        numbers, Lebesgue constants and active node counts."""
        check_is_fitted(self, "nodes_")
        X = check_unit_vectors(X, name="X")
        return evaluate_field_diagnostics(
            self._config(), self.nodes_, self.values_, X,
            delta=self.delta_, n_jobs=self.n_jobs)
