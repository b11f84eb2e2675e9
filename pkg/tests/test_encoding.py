import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle_rotation
from qflab import encoding as enc
from qflab import statevector as sv
from qflab.errors import ConfigurationError

TWO_PI = 2 * np.pi


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        enc.EncodingSpec(n=0, m=1)
    with pytest.raises(ConfigurationError):
        enc.EncodingSpec(n=1, m=1, gamma=-1.0)
    with pytest.raises(ConfigurationError):
        enc.EncodingSpec(n=1, m=1, prefactor_base=1)
    assert enc.EncodingSpec(n=2, m=3).num_qubits == 6


def test_apply_encoding_examples():
    spec = enc.EncodingSpec(n=1, m=1)
    zero = sv.init_zero(1)
    assert np.allclose(enc.apply_encoding(zero, spec, [0.0]).amplitudes, [1, 0])
    state = enc.apply_encoding(zero, spec, [0.25])
    assert np.allclose(state.amplitudes, [1 / np.sqrt(2), -1j / np.sqrt(2)])

    spec2 = enc.EncodingSpec(n=1, m=2)
    got = enc.apply_encoding(sv.init_zero(2), spec2, [0.25])
    expected = np.kron(oracle_rotation("x", np.pi / 2)[:, 0],
                       oracle_rotation("x", 5 * np.pi / 2)[:, 0])
    assert np.allclose(got.amplitudes, expected, atol=1e-12)


def test_apply_encoding_dimension_mismatch():
    spec = enc.EncodingSpec(n=2, m=1)
    with pytest.raises(ConfigurationError):
        enc.apply_encoding(sv.init_zero(2), spec, [0.1])


def test_out_of_range_warns():
    spec = enc.EncodingSpec(n=1, m=1)
    with pytest.warns(UserWarning, match="outside"):
        enc.apply_encoding(sv.init_zero(1), spec, [1.5])


def test_tower_eigenvalue_values():
    assert enc.tower_eigenvalue(1, [0]) == pytest.approx(0.5)
    assert enc.tower_eigenvalue(2, [0, 0]) == pytest.approx(3.0)
    assert enc.tower_eigenvalue(2, [1, 0]) == pytest.approx(2.0)


def test_max_gradient_frequency_values():
    assert [enc.max_gradient_frequency(m) for m in (1, 2, 3)] == [2, 12, 62]
    with pytest.raises(ConfigurationError):
        enc.max_gradient_frequency(13)


def test_gradient_spectrum_size_values():
    assert enc.gradient_spectrum_size(1, 1) == 2
    assert enc.gradient_spectrum_size(1, 2) == 12
    assert enc.gradient_spectrum_size(2, 1) == 12
    assert enc.gradient_frequency_count(1, 2) == 25
    assert enc.gradient_frequency_count(2, 2) == 625
    with pytest.raises(ConfigurationError):
        enc.gradient_spectrum_size(5, 5)


def test_qubits_for_degree_inverts():
    assert enc.qubits_for_degree(2) == pytest.approx(1.0)
    assert enc.qubits_for_degree(12) == pytest.approx(2.0)
    assert enc.qubits_for_degree(62) == pytest.approx(3.0)


def _eigenvalue_quadruple_frequencies(m):
    """Independent oracle: enumerate (k, l, y, z) eigenvalue index quadruples."""
    freqs = set()
    bitstrings = list(itertools.product((0, 1), repeat=m))
    for k in bitstrings:
        for l in bitstrings:
            for y in bitstrings:
                for z in bitstrings:
                    w = (enc.tower_eigenvalue(m, k) - enc.tower_eigenvalue(m, l)
                         + enc.tower_eigenvalue(m, y) - enc.tower_eigenvalue(m, z))
                    freqs.add(round(w))
    return sorted(freqs)


@pytest.mark.parametrize("m", [1, 2])
def test_frequency_set_matches_quadruple_oracle(m):
    assert enc.frequency_set_bruteforce(m) == _eigenvalue_quadruple_frequencies(m)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_frequency_set_is_dense_range(m):
    d_f = enc.max_gradient_frequency(m)
    assert enc.frequency_set_bruteforce(m) == list(range(-d_f, d_f + 1))


def test_frequency_set_guard():
    with pytest.raises(ConfigurationError):
        enc.frequency_set_bruteforce(7)


def test_overlap_identical_inputs():
    spec = enc.EncodingSpec(n=1, m=3)
    assert enc.overlap_probability(spec, 0.37, 0.37) == pytest.approx(1.0)


def test_overlap_known_values():
    # single tower rung: cos^2(gamma*delta/2); gamma*delta = pi kills it
    spec1 = enc.EncodingSpec(n=1, m=1)
    assert enc.overlap_probability(spec1, 0.5, 0.0) == pytest.approx(0.0, abs=1e-12)
    # two rungs at gamma*delta = pi/2: cos^2(pi/4) * cos^2(5*pi/4) = 1/4
    spec2 = enc.EncodingSpec(n=1, m=2)
    value = enc.overlap_probability(spec2, 0.25, 0.0)
    assert value == pytest.approx(0.25, abs=1e-12)
    assert enc.overlap_probability_simulated(spec2, 0.25, 0.0) == pytest.approx(value)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_overlap_analytic_matches_simulator(m):
    spec = enc.EncodingSpec(n=1, m=m)
    rng = np.random.default_rng(m)
    for _ in range(100):
        x, xp = rng.uniform(0.0, 1.0, size=2)
        assert enc.overlap_probability(spec, x, xp) == pytest.approx(
            enc.overlap_probability_simulated(spec, x, xp), abs=1e-9
        )


@pytest.mark.parametrize("m", [1, 2, 3])
def test_overlap_injective_on_fundamental_domain(m):
    spec = enc.EncodingSpec(n=1, m=m)
    xs = np.arange(1, 10_000) / 10_000.0  # gamma*x spans (0, 2*pi)
    probs = np.array([enc.overlap_probability(spec, x, 0.0) for x in xs])
    assert np.all(probs < 1.0)


def test_encoding_is_product_state():
    spec = enc.EncodingSpec(n=1, m=2)
    amps = enc.apply_encoding(sv.init_zero(2), spec, [0.3123]).amplitudes
    outer = np.outer(amps[:2], [1, amps[2] / amps[0]]).T.reshape(-1) \
        if abs(amps[0]) > 1e-12 else None
    # rank-1 check via the 2x2 reshape's singular values
    svals = np.linalg.svd(amps.reshape(2, 2), compute_uv=False)
    assert svals[1] == pytest.approx(0.0, abs=1e-12)
    assert outer is not None


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.floats(0, 1), st.floats(0, 1))
def test_overlap_bounded(m, x, xp):
    spec = enc.EncodingSpec(n=1, m=m)
    assert 0.0 <= enc.overlap_probability(spec, x, xp) <= 1.0
