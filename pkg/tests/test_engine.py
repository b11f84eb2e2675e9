"""The fast backend must agree with the reference path to near machine precision."""

import numpy as np
import pytest

from conftest import make_model, oracle_ansatz_ops, oracle_unitary
from qflab import counters, engine
from qflab import qmodel as qm
from qflab.ansatz import random_parameters
from qflab.encoding import apply_encoding
from qflab.statevector import init_zero


@pytest.mark.parametrize("n,m", [(1, 1), (1, 3), (2, 2)])
def test_encoding_states_match_simulator(n, m):
    model = make_model(n=n, m=m, layers=1)
    rng = np.random.default_rng(n * 10 + m)
    xs = rng.uniform(0, 1, size=(5, n))
    states = engine.encoding_states(model.encoding, xs)
    for row, x in zip(states, xs):
        expected = apply_encoding(init_zero(model.num_qubits), model.encoding, x)
        assert np.allclose(row, expected.amplitudes, atol=1e-13)


def test_ansatz_matrix_matches_oracle():
    model = make_model(n=1, m=2, layers=2)
    theta = random_parameters(model.ansatz, np.random.default_rng(1))
    got = engine.ansatz_matrix(model.ansatz, theta)
    expected = oracle_unitary(oracle_ansatz_ops(model.ansatz, theta), 2)
    assert np.allclose(got, expected, atol=1e-12)


def test_evaluator_matches_reference_outputs_and_gradients():
    model = make_model(n=1, m=2, layers=3)
    rng = np.random.default_rng(2)
    theta = random_parameters(model.ansatz, rng)
    xs = rng.uniform(0, 1, size=(4, 1))
    y = -1.0
    evaluator = engine.FixedThetaEvaluator(model, theta)
    states = engine.encoding_states(model.encoding, xs)
    outs = evaluator.outputs(states)
    grads = evaluator.cost_gradient_entries(states, y)
    for i, x in enumerate(xs):
        assert outs[i] == pytest.approx(qm.model_output(model, x, theta), abs=1e-12)
        ref = qm.cost_gradient(model, qm.Sample(x, y), theta)
        assert np.allclose(grads[i], ref, atol=1e-12)


def test_attack_loss_and_gradient_match_reference():
    model = make_model(n=2, m=2, layers=2)
    rng = np.random.default_rng(3)
    theta = random_parameters(model.ansatz, rng)
    x = rng.uniform(0, 1, 2)
    y = 1.0
    target = qm.cost_gradient(model, qm.Sample(x, y), theta)
    x_prime = rng.uniform(0, 1, 2)
    evaluator = engine.FixedThetaEvaluator(model, theta)
    loss, grad = engine.attack_loss_and_gradient(evaluator, x_prime, y, target)
    ref_grads = qm.cost_gradient(model, qm.Sample(x_prime, y), theta)
    assert loss == pytest.approx(float(np.sum((ref_grads - target) ** 2)), abs=1e-12)
    for k in range(2):
        assert grad[k] == pytest.approx(
            qm.attack_loss_gradient_x(model, x_prime, target, y, theta, k), abs=1e-11
        )


def test_attack_gradient_evaluation_budget():
    model = make_model(n=1, m=3, layers=2)
    theta = random_parameters(model.ansatz, np.random.default_rng(4))
    evaluator = engine.FixedThetaEvaluator(model, theta)
    target = np.zeros(model.num_parameters)
    counters.reset()
    engine.attack_loss_and_gradient(evaluator, np.array([0.2]), 1.0, target)
    d, m, n = model.num_parameters, model.encoding.m, model.encoding.n
    assert counters.value() == (1 + 2 * n * m) * (2 * d + 1)


def test_parameter_shift_sweep_matches_reference():
    model = make_model(n=1, m=2, layers=3)
    rng = np.random.default_rng(5)
    theta = random_parameters(model.ansatz, rng)
    xs = rng.uniform(0, 1, size=(3, 1))
    ys = np.array([1.0, -1.0, 0.5])
    outs, grads = engine.parameter_shift_gradients(model, theta, xs, ys)
    for i in range(3):
        assert outs[i] == pytest.approx(qm.model_output(model, xs[i], theta), abs=1e-12)
        ref = qm.cost_gradient(model, qm.Sample(xs[i], ys[i]), theta)
        assert np.allclose(grads[i], ref, atol=1e-12)


def test_model_outputs_batch():
    model = make_model(n=1, m=1, layers=2)
    theta = random_parameters(model.ansatz, np.random.default_rng(6))
    xs = np.linspace(0, 1, 7)[:, None]
    outs = engine.model_outputs(model, theta, xs)
    for x, o in zip(xs, outs):
        assert o == pytest.approx(qm.model_output(model, x, theta), abs=1e-12)
