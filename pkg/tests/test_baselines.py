import numpy as np
import pytest

from src.exceptions import DimensionMismatchError
from src.exceptions import InvalidConfigError
from src.exceptions import MethodNotFound
from src.exceptions import SingularSystemError
from src.graphs.features import FeatureSeries
from src.methods.base import TABLE_METHODS
from src.methods.base import MethodFactory
from src.model.baselines import BaselineResult
from src.model.baselines import ridge_fit
from src.model.baselines import shrinkage_only
from src.model.objective import Hyperparameters
from src.model.optimizer import OptimizerConfig
from tests.conftest import random_training

QUICK = OptimizerConfig(max_iters=20)


class TestRidge:
    def test_matches_per_node_normal_equations(self, small_training):
        data, kappa = small_training, 0.8
        W = ridge_fit(data.Phi, data.X, kappa)
        for i in range(data.n):
            inputs = data.Phi.frames[:-1, i, :]
            targets = data.X.frames[1:, i, :]
            expected = np.linalg.solve(
                inputs.T @ inputs + kappa / 2 * np.eye(data.d), inputs.T @ targets
            )
            np.testing.assert_allclose(W[i], expected, rtol=1e-10, atol=1e-12)

    def test_recovers_realizable_predictor(self, rng):
        data = random_training(seed=9, n=4, T=30, k_eig=1)
        W_true = rng.standard_normal((data.n, data.d, data.q))
        targets = np.einsum("tnd,ndq->tnq", data.Phi.frames[:-1], W_true)
        X = FeatureSeries(np.concatenate([data.X.frames[:1], targets]))
        W = ridge_fit(data.Phi, X, 0.0)
        np.testing.assert_allclose(W, W_true, rtol=1e-8, atol=1e-8)

    def test_unregularized_underdetermined_system_is_singular(self):
        data = random_training(seed=1, n=4, T=3, k_eig=1)
        with pytest.raises(SingularSystemError):
            ridge_fit(data.Phi, data.X, 0.0)

    def test_anchor_adds_the_last_descriptor_row(self, small_training):
        data = small_training
        anchor = np.ones((data.n, data.q))
        W = ridge_fit(data.Phi, data.X, 1.0, anchor=anchor)
        inputs = np.concatenate([data.Phi.frames[:-1, 0, :], data.Phi.frames[-1:, 0, :]])
        targets = np.concatenate([data.X.frames[1:, 0, :], anchor[:1]])
        expected = np.linalg.solve(inputs.T @ inputs + 0.5 * np.eye(data.d), inputs.T @ targets)
        np.testing.assert_allclose(W[0], expected, rtol=1e-10, atol=1e-12)


class TestShrinkageOnly:
    def test_zero_mu_returns_last_snapshot(self, small_training):
        np.testing.assert_array_equal(shrinkage_only(small_training.A_T, 0.0), small_training.A_T)

    def test_shrinkage_reduces_rank(self, small_training):
        A = small_training.A_T
        mu = np.linalg.svd(A, compute_uv=False)[1]
        assert np.linalg.matrix_rank(shrinkage_only(A, mu), tol=1e-9) == 1


class TestMethodFactory:
    def test_every_table_method_is_registered(self):
        assert set(TABLE_METHODS) <= set(MethodFactory.names())

    def test_unknown_method(self):
        with pytest.raises(MethodNotFound):
            MethodFactory.get("oracle")

    @pytest.mark.parametrize("name", TABLE_METHODS)
    def test_predictions_have_holdout_shapes(self, name, small_training):
        result = MethodFactory.get(name)(small_training, Hyperparameters(), QUICK)
        assert result.method == name
        if result.predicted_features is not None:
            assert result.predicted_features.shape == (small_training.n, small_training.q)
        if result.predicted_graph is not None:
            assert result.predicted_graph.shape == (small_training.n, small_training.n)

    def test_single_task_baselines_address_one_metric(self, small_training):
        ridge = MethodFactory.get("ridge")(small_training, Hyperparameters(), QUICK)
        shrinkage = MethodFactory.get("shrinkage")(small_training, Hyperparameters(), QUICK)
        assert ridge.predicted_graph is None
        assert shrinkage.predicted_features is None

    def test_variants_switch_off_their_term(self, small_training):
        h = Hyperparameters(kappa=1.0, tau=0.5, nu=1.0, lam=0.5)
        rank_free = MethodFactory.get("rank_free")(small_training, h, QUICK)
        b = rank_free.trace.accepted[-1].breakdown
        without_nuclear = b.j1_fit + 0.5 * b.j1_ridge + b.j3_coupling + 0.5 * b.j2_prox
        assert b.total == pytest.approx(without_nuclear + 0.5 * b.j4_laplacian)

        lambda_free = MethodFactory.get("lambda_free")(small_training, h, QUICK)
        b = lambda_free.trace.accepted[-1].breakdown
        without_coupling = b.j1_fit + 0.5 * b.j1_ridge + b.j3_coupling + 0.5 * b.j2_prox
        assert b.total == pytest.approx(without_coupling + 0.5 * b.j2_nuclear)

    def test_shrinkage_needs_nu(self, small_training):
        with pytest.raises(InvalidConfigError):
            MethodFactory.get("shrinkage")(small_training, Hyperparameters(nu=0.0), QUICK)

    def test_result_without_any_prediction_is_rejected(self):
        with pytest.raises(DimensionMismatchError, match="ridge"):
            BaselineResult(method="ridge")
