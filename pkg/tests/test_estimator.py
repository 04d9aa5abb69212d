import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from spheremls import (AnsatzSpec, SphericalMLS, default_test_function,
                       fibonacci_grid)

from conftest import random_sphere


@pytest.fixture(scope="module")
def training_grid():
    return fibonacci_grid(320)


class TestSklearnProtocol:
    def test_get_set_params_round_trip(self):
        model = SphericalMLS(ansatz="even_harm", degree=2, fill_multiple=4.0)
        params = model.get_params()
        assert params["ansatz"] == "even_harm"
        assert params["degree"] == 2
        other = SphericalMLS().set_params(**params)
        assert other.get_params() == params

    def test_clone(self, training_grid):
        model = SphericalMLS(degree=2).fit(
            training_grid.points, training_grid.points[:, 2])
        fresh = clone(model)
        assert fresh.get_params() == model.get_params()
        with pytest.raises(NotFittedError):
            fresh.predict(training_grid.points[:3])

    def test_predict_before_fit(self):
        with pytest.raises(NotFittedError):
            SphericalMLS().predict(np.array([[0.0, 0.0, 1.0]]))


class TestFitValidation:
    def test_non_unit_rows_rejected(self):
        X = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 1.0]])
        with pytest.raises(ValueError, match="norm"):
            SphericalMLS().fit(X, np.zeros(2))

    def test_length_mismatch_rejected(self, training_grid):
        with pytest.raises(ValueError, match="shape"):
            SphericalMLS().fit(training_grid.points,
                               np.zeros(training_grid.n - 1))

    def test_fitted_attributes(self, training_grid):
        model = SphericalMLS(fill_samples=2_000).fit(
            training_grid.points, training_grid.points[:, 0])
        assert model.nodes_.n == training_grid.n
        assert model.fill_distance_ > 0
        assert model.delta_ == pytest.approx(3.5 * model.fill_distance_)

    def test_fixed_delta_overrides_fill_multiple(self, training_grid):
        model = SphericalMLS(delta=0.5).fit(
            training_grid.points, training_grid.points[:, 0])
        assert model.delta_ == 0.5
        assert model.fill_distance_ is None


class TestPrediction:
    @pytest.mark.parametrize("kind", ["even_harm", "even_mon_cent"])
    def test_reproduces_linear_span_members(self, training_grid, rng, kind):
        # degree-1 coordinate functions lie in both parity spans
        y = training_grid.points @ np.array([0.3, -1.2, 0.7])
        model = SphericalMLS(ansatz=kind, degree=1,
                             fill_samples=2_000).fit(training_grid.points, y)
        queries = random_sphere(rng, 25)
        expected = queries @ np.array([0.3, -1.2, 0.7])
        assert np.abs(model.predict(queries) - expected).max() <= 1e-8

    def test_tangent_reproduces_constants(self, training_grid, rng):
        # the tangent span contains constants but no global linear
        # function (the pulled-back height is not a polynomial)
        y = np.full(training_grid.n, 2.5)
        model = SphericalMLS(ansatz="tangent", degree=1,
                             fill_samples=2_000).fit(training_grid.points, y)
        queries = random_sphere(rng, 25)
        assert np.abs(model.predict(queries) - 2.5).max() <= 1e-8

    def test_smooth_field_score(self, training_grid, rng):
        f = default_test_function()
        model = SphericalMLS(fill_samples=2_000).fit(
            training_grid.points, f.evaluate(training_grid.points))
        queries = random_sphere(rng, 200)
        assert model.score(queries, f.evaluate(queries)) > 0.999

    def test_parallel_prediction_identical(self, training_grid, rng):
        f = default_test_function()
        X, y = training_grid.points, f.evaluate(training_grid.points)
        queries = random_sphere(rng, 30)
        seq = SphericalMLS(fill_samples=2_000, n_jobs=1).fit(X, y)
        par = SphericalMLS(fill_samples=2_000, n_jobs=2).fit(X, y)
        assert np.array_equal(seq.predict(queries), par.predict(queries))

    def test_diagnostics_fields(self, training_grid, rng):
        f = default_test_function()
        model = SphericalMLS(fill_samples=2_000).fit(
            training_grid.points, f.evaluate(training_grid.points))
        diag = model.predict_diagnostics(random_sphere(rng, 10))
        assert diag.values.shape == (10,)
        assert np.all(diag.gram_condition >= 1.0)
        assert np.all(diag.lebesgue >= 1.0 - 1e-10)
        assert np.all(diag.n_active >= AnsatzSpec("even_mon_cent", 3).basis_size)
        assert diag.n_failed == 0

    def test_skip_policy_yields_nan(self, training_grid, rng):
        model = SphericalMLS(ansatz="tangent", delta=2.2,
                             on_error="skip").fit(
            training_grid.points, training_grid.points[:, 0])
        values = model.predict(random_sphere(rng, 4))
        assert np.all(np.isnan(values))

    def test_unknown_weight_rejected_at_fit(self, training_grid):
        model = SphericalMLS(weight="gauss")
        with pytest.raises(ValueError, match="unknown weight"):
            model.fit(training_grid.points, training_grid.points[:, 0])

    def test_harmonics_rejected_off_s2_at_fit(self):
        X = np.eye(4)
        model = SphericalMLS(ansatz="even_harm", degree=1)
        with pytest.raises(ValueError, match="dim = 3"):
            model.fit(X, np.zeros(4))

    def test_hat_power_profile(self, training_grid, rng):
        y = training_grid.points[:, 2]
        model = SphericalMLS(weight="hat_power", hat_exponent=3.0,
                             degree=1, fill_samples=2_000)
        model.fit(training_grid.points, y)
        queries = random_sphere(rng, 10)
        assert np.abs(model.predict(queries) - queries[:, 2]).max() <= 1e-8
