import math

import numpy as np
import pytest
from _oracles import fd_gradient
from sklearn.base import clone

from foodcast import mlp
from foodcast.exceptions import TrainingError
from foodcast.mlp import MlpModel, MlpRegressor, MlpTrainConfig


def ones_model(activation="tanh"):
    return MlpModel([np.ones((1, 1)), np.ones((1, 1))], [np.zeros(1), np.zeros(1)], activation)


def test_zero_model_outputs_zero(rng):
    model = MlpModel([np.zeros((5, 10)), np.zeros((10, 1))], [np.zeros(10), np.zeros(1)])
    for x in rng.normal(0, 5, (5, 5)):
        assert mlp.forward(model, x) == 0.0


def test_unit_weights():
    assert mlp.forward(ones_model(), [0.0]) == 0.0
    assert mlp.forward(ones_model(), [1.0]) == pytest.approx(0.7615942, abs=1e-7)
    assert mlp.forward(ones_model(), [1.0]) == math.tanh(1.0)


def test_sigmoid_hidden_layer():
    assert mlp.forward(ones_model("sigmoid"), [0.0]) == pytest.approx(0.5, abs=1e-15)
    assert mlp.forward(ones_model("sigmoid"), [2.0]) == pytest.approx(1 / (1 + math.exp(-2.0)), rel=1e-14)


def test_shape_errors():
    with pytest.raises(ValueError):
        mlp.forward(ones_model(), [1.0, 2.0])
    with pytest.raises(ValueError):
        MlpModel([np.ones((2, 3)), np.ones((2, 1))], [np.zeros(3), np.zeros(1)])
    with pytest.raises(ValueError):
        MlpModel([np.ones((1, 1)), np.ones((1, 1))], [np.zeros(1), np.zeros(1)], "relu")


def test_zero_residual_zero_gradient(rng):
    model = MlpModel.random(3, 4, seed=1)
    X = rng.uniform(0, 1, (8, 3))
    assert np.all(mlp.gradient(model, X, mlp.predict_batch(model, X)) == 0.0)


@pytest.mark.parametrize("activation", ["tanh", "sigmoid"])
def test_gradient_matches_finite_differences(rng, activation):
    for seed in range(5):
        model = MlpModel.random(5, 10, seed=seed, activation=activation)
        X = rng.uniform(0, 1, (20, 5))
        Y = rng.normal(0, 1, 20)
        theta = model.parameter_vector()

        def sse(t):
            r = mlp.predict_batch(model.with_parameter_vector(t), X) - Y
            return float(r @ r)

        fd = fd_gradient(sse, theta)
        np.testing.assert_allclose(mlp.gradient(model, X, Y), fd, rtol=1e-5, atol=1e-7 * np.abs(fd).max())


def test_output_bias_gradient_doubles_with_residual(rng):
    model = MlpModel.random(2, 3, seed=4)
    X = rng.uniform(0, 1, (6, 2))
    out = mlp.predict_batch(model, X)
    g1 = mlp.gradient(model, X, out - 0.5)
    g2 = mlp.gradient(model, X, out - 1.0)
    assert g2[-1] == pytest.approx(2 * g1[-1], rel=1e-12)


def test_parameter_vector_round_trip():
    model = MlpModel.random(3, 4, seed=2)
    again = model.with_parameter_vector(model.parameter_vector())
    for a, b in zip(model.weights + model.biases, again.weights + again.biases):
        assert np.array_equal(a, b)


def test_predict_batch_patterns(rng):
    model = MlpModel.random(5, 10, seed=0)
    X = rng.uniform(0, 1, (50, 5))
    assert mlp.predict_batch(model, X[:1])[0] == mlp.forward(model, X[0])
    dup = mlp.predict_batch(model, np.vstack([X[0]] * 3))
    assert dup[0] == dup[1] == dup[2]
    np.testing.assert_array_equal(mlp.predict_batch(model, X), [mlp.forward(model, x) for x in X])


def test_zero_target_converges_single_neuron():
    # wider layers have near-collinear tanh features; plain descent then stalls well above 1e-6
    X = np.linspace(0, 1, 11)[:, None]
    _, hist = mlp.train(MlpTrainConfig(hidden_neurons=1, epochs=2000, seed=0), X, np.zeros(11))
    assert min(hist) < 1e-6


def test_zero_target_loss_decreases():
    X = np.linspace(0, 1, 11)[:, None]
    _, hist = mlp.train(MlpTrainConfig(hidden_neurons=10, epochs=2000), X, np.zeros(11))
    assert np.all(np.diff(hist[5:]) <= 0)
    assert hist[-1] < 1e-2 * hist[0]


def test_history_finite_and_best_returned(rng):
    X = rng.uniform(0, 1, (20, 2))
    Y = np.sin(3 * X[:, 0]) + X[:, 1]
    model, hist = mlp.train(MlpTrainConfig(hidden_neurons=5, epochs=300), X, Y)
    assert len(hist) == 300 and np.all(np.isfinite(hist))
    r = mlp.predict_batch(model, X) - Y
    assert math.sqrt(np.mean(r * r)) == min(hist)


def test_init_is_uniform_in_scale():
    model = MlpModel.random(4, 50, init_scale=0.3, seed=9)
    theta = model.parameter_vector()
    assert np.all(np.abs(theta) <= 0.3)


def test_divergence_is_reported():
    X = np.linspace(0, 1, 10)[:, None]
    with pytest.raises(TrainingError, match="epoch"):
        mlp.train(MlpTrainConfig(hidden_neurons=10, epochs=500, learning_rate=50.0), X, 1e3 * X[:, 0])


@pytest.mark.parametrize("kwargs", [{"hidden_neurons": 0}, {"learning_rate": -1}, {"init_scale": 0},
                                    {"activation": "relu"}])
def test_bad_config(kwargs):
    with pytest.raises(ValueError):
        MlpTrainConfig(**kwargs)


def test_regressor_api(rng):
    X = rng.uniform(0, 1, (30, 2))
    y = X[:, 0] - X[:, 1]
    est = MlpRegressor(hidden_neurons=6, epochs=500).fit(X, y)
    assert est.score(X, y) > 0.99
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert not hasattr(twin, "model_")
