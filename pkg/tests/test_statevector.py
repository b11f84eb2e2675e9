import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle_unitary, oracle_z_all_expectation
from qflab import statevector as sv
from qflab.errors import ConfigurationError


def test_init_zero_basis():
    assert np.array_equal(sv.init_zero(1).amplitudes, [1, 0])
    assert np.array_equal(sv.init_zero(2).amplitudes, [1, 0, 0, 0])
    assert sv.init_zero(5).norm() == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [0, -1, 25])
def test_init_zero_guard(bad):
    with pytest.raises(ConfigurationError):
        sv.init_zero(bad)


def test_rotation_examples():
    zero = sv.init_zero(1)
    assert np.allclose(sv.apply_rotation(zero, "x", 0, 0.0).amplitudes, [1, 0])
    assert np.allclose(sv.apply_rotation(zero, "x", 0, np.pi).amplitudes,
                       [0, -1j], atol=1e-15)
    assert np.allclose(sv.apply_rotation(zero, "x", 0, np.pi / 2).amplitudes,
                       [1 / np.sqrt(2), -1j / np.sqrt(2)])


def test_rotation_errors():
    zero = sv.init_zero(2)
    with pytest.raises(IndexError):
        sv.apply_rotation(zero, "x", 2, 0.1)
    with pytest.raises(ValueError):
        sv.apply_rotation(zero, "x", 0, float("nan"))
    with pytest.raises(ConfigurationError):
        sv.apply_rotation(zero, "w", 0, 0.1)


def test_cnot_truth_table():
    zero = sv.init_zero(2)
    assert np.array_equal(sv.apply_cnot(zero, 0, 1).amplitudes, zero.amplitudes)
    one_zero = sv.apply_rotation(zero, "x", 0, np.pi)  # |10> up to phase
    flipped = sv.apply_cnot(one_zero, 0, 1)
    assert abs(flipped.amplitudes[3]) == pytest.approx(1.0)


def test_cnot_errors():
    with pytest.raises(ConfigurationError):
        sv.apply_cnot(sv.init_zero(2), 1, 1)
    with pytest.raises(IndexError):
        sv.apply_cnot(sv.init_zero(2), 0, 2)


def test_expectation_examples():
    assert sv.expectation_z_all(sv.init_zero(3)) == pytest.approx(1.0)
    flipped = sv.apply_rotation(sv.init_zero(1), "x", 0, np.pi)
    assert sv.expectation_z_all(flipped) == pytest.approx(-1.0)
    plus_i = sv.apply_rotation(sv.init_zero(1), "x", 0, np.pi / 2)
    assert sv.expectation_z_all(plus_i) == pytest.approx(0.0, abs=1e-12)


def test_entangled_pair_expectation():
    state = sv.apply_cnot(
        sv.apply_rotation(sv.init_zero(2), "x", 0, np.pi / 2), 0, 1
    )
    assert sv.expectation_z_all(state) == pytest.approx(1.0)


def _random_ops(rng, n, count):
    ops = []
    for _ in range(count):
        if n > 1 and rng.random() < 0.3:
            c, t = rng.choice(n, size=2, replace=False)
            ops.append(("cnot", int(c), int(t)))
        else:
            ops.append(("rot", rng.choice(["x", "y", "z"]), int(rng.integers(n)),
                        float(rng.uniform(-2 * np.pi, 2 * np.pi))))
    return ops


@pytest.mark.parametrize("n", [1, 2, 3])
def test_matches_dense_matrix_oracle(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        ops = _random_ops(rng, n, 12)
        state = sv.init_zero(n)
        for op in ops:
            if op[0] == "rot":
                state = sv.apply_rotation(state, op[1], op[2], op[3])
            else:
                state = sv.apply_cnot(state, op[1], op[2])
        expected = oracle_unitary(ops, n)[:, 0]
        assert np.allclose(state.amplitudes, expected, atol=1e-10)
        assert sv.expectation_z_all(state) == pytest.approx(
            oracle_z_all_expectation(expected), abs=1e-10
        )


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("xyz"), st.integers(0, 2),
                          st.floats(-10, 10)), min_size=1, max_size=20))
def test_norm_preserved_and_expectation_bounded(gates):
    state = sv.init_zero(3)
    for axis, qubit, angle in gates:
        state = sv.apply_rotation(state, axis, qubit, angle)
    assert abs(state.norm() - 1.0) < 1e-10
    assert -1.0 <= sv.expectation_z_all(state) <= 1.0


@settings(max_examples=30, deadline=None)
@given(st.sampled_from("xyz"), st.floats(-10, 10))
def test_rotation_inverse_restores_state(axis, angle):
    rng = np.random.default_rng(4)
    amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    amps /= np.linalg.norm(amps)
    state = sv.StateVector(2, amps)
    forth = sv.apply_rotation(state, axis, 1, angle)
    back = sv.apply_rotation(forth, axis, 1, -angle)
    assert np.allclose(back.amplitudes, amps, atol=1e-12)
