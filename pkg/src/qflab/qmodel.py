"""Full circuit model: output, squared-error cost, and exact shift-rule gradients.

The model output is the Z-on-all-qubits expectation of
W(theta) U(gamma x) |0>.  All derivatives are exact:

- theta derivatives use the two-point shift rule, d y / d theta_j
  = (y(theta_j + pi/2) - y(theta_j - pi/2)) / 2;
- x derivatives chain over the m encoding gates that carry coordinate k,
  each gate shifted by +-pi/2 in its own angle and weighted by its
  prefactor times gamma (the tower generator has 2^m eigenvalues, so a
  single +-pi/2 shift of x itself would not be exact);
- the mixed d^2 Cost / dx_k dtheta_j combines both shifts.

Every expectation evaluated here increments the global evaluation counter,
which is how the tests pin the 2d+1 / O(d*m*n) evaluation budgets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import counters
from . import statevector as sv
from .ansatz import AnsatzSpec, apply_ansatz, check_parameters
from .encoding import EncodingSpec, apply_encoding
from .errors import ConfigurationError


@dataclass(frozen=True)
class ModelSpec:
    encoding: EncodingSpec
    ansatz: AnsatzSpec

    def __post_init__(self):
        if self.encoding.num_qubits != self.ansatz.num_qubits:
            raise ConfigurationError(
                f"encoding acts on {self.encoding.num_qubits} qubits "
                f"but ansatz on {self.ansatz.num_qubits}"
            )

    @property
    def num_qubits(self) -> int:
        return self.encoding.num_qubits

    @property
    def num_parameters(self) -> int:
        return self.ansatz.num_parameters


@dataclass(frozen=True)
class Sample:
    """One training pair: x in [0,1]^n and a real label."""

    x: np.ndarray
    y: float


def _output_with_shifts(spec: ModelSpec, x, theta: np.ndarray,
                        gate_shift=None) -> float:
    """One expectation evaluation; gate_shift=(k, r, delta) offsets one encoding gate."""
    x = np.asarray(x, dtype=float)
    enc = spec.encoding
    state = sv.init_zero(spec.num_qubits)
    if gate_shift is None:
        state = apply_encoding(state, enc, x)
    else:
        k, r, delta = gate_shift
        for j in range(enc.n):
            for rr in range(enc.m):
                angle = enc.angle(j, rr, x[j])
                if j == k and rr == r:
                    angle += delta
                state = sv.apply_rotation(state, enc.axis, enc.qubit(j, rr), angle)
    state = apply_ansatz(state, spec.ansatz, theta)
    counters.add(1)
    return sv.expectation_z_all(state)


def model_output(spec: ModelSpec, x, theta: np.ndarray) -> float:
    """Model prediction y(x, theta) in [-1, 1]."""
    return _output_with_shifts(spec, x, check_parameters(spec.ansatz, theta))


def mse_cost(spec: ModelSpec, sample: Sample, theta: np.ndarray) -> float:
    """Squared residual (y - y(x, theta))^2."""
    residual = sample.y - model_output(spec, sample.x, theta)
    return residual * residual


def _shifted_theta(theta: np.ndarray, j: int, delta: float) -> np.ndarray:
    shifted = np.array(theta, dtype=float)
    shifted[j] += delta
    return shifted


def output_gradient_theta(spec: ModelSpec, x, theta: np.ndarray, j: int) -> float:
    """d y / d theta_j via the two-point shift rule (two evaluations)."""
    theta = check_parameters(spec.ansatz, theta)
    if not 0 <= j < spec.num_parameters:
        raise IndexError(f"parameter index {j} out of range for d = {spec.num_parameters}")
    y_plus = model_output(spec, x, _shifted_theta(theta, j, np.pi / 2))
    y_minus = model_output(spec, x, _shifted_theta(theta, j, -np.pi / 2))
    return 0.5 * (y_plus - y_minus)


def cost_gradient(spec: ModelSpec, sample: Sample, theta: np.ndarray) -> np.ndarray:
    """All d entries of d Cost / d theta, using exactly 2d + 1 evaluations.

    Each entry is -(y - y(theta)) * (y(theta_j^+) - y(theta_j^-)).
    """
    theta = check_parameters(spec.ansatz, theta)
    residual = sample.y - model_output(spec, sample.x, theta)
    grad = np.empty(spec.num_parameters)
    for j in range(spec.num_parameters):
        y_plus = model_output(spec, sample.x, _shifted_theta(theta, j, np.pi / 2))
        y_minus = model_output(spec, sample.x, _shifted_theta(theta, j, -np.pi / 2))
        grad[j] = -residual * (y_plus - y_minus)
    return grad


def batch_cost_gradient(spec: ModelSpec, samples, theta: np.ndarray) -> np.ndarray:
    """Arithmetic mean of per-sample cost gradients over a batch."""
    if len(samples) == 0:
        raise ConfigurationError("batch must contain at least one sample")
    total = np.zeros(spec.num_parameters)
    for sample in samples:  # fixed order: deterministic floating-point sum
        total += cost_gradient(spec, sample, theta)
    return total / len(samples)


def output_gradient_x(spec: ModelSpec, x, theta: np.ndarray, k: int) -> float:
    """d y / d x_k by chaining the shift rule over the m gates carrying x_k."""
    theta = check_parameters(spec.ansatz, theta)
    if not 0 <= k < spec.encoding.n:
        raise IndexError(f"input index {k} out of range for n = {spec.encoding.n}")
    total = 0.0
    for r in range(spec.encoding.m):
        weight = spec.encoding.prefactor_base**r * spec.encoding.gamma
        y_plus = _output_with_shifts(spec, x, theta, gate_shift=(k, r, np.pi / 2))
        y_minus = _output_with_shifts(spec, x, theta, gate_shift=(k, r, -np.pi / 2))
        total += weight * 0.5 * (y_plus - y_minus)
    return total


def cost_gradient_x_theta(spec: ModelSpec, x, y: float, theta: np.ndarray,
                          j: int, k: int) -> float:
    """Mixed second derivative d/dx_k of d Cost/d theta_j, all via shift rules.

    With f the model output, f_j its theta_j derivative and f_x, f_jx their
    x_k derivatives: d/dx_k [-2 (y - f) f_j] = 2 f_x f_j - 2 (y - f) f_jx.
    """
    theta = check_parameters(spec.ansatz, theta)
    theta_p = _shifted_theta(theta, j, np.pi / 2)
    theta_m = _shifted_theta(theta, j, -np.pi / 2)
    f = model_output(spec, x, theta)
    f_j = 0.5 * (model_output(spec, x, theta_p) - model_output(spec, x, theta_m))
    f_x = 0.0
    f_jx = 0.0
    for r in range(spec.encoding.m):
        weight = spec.encoding.prefactor_base**r * spec.encoding.gamma
        f_x += weight * 0.5 * (
            _output_with_shifts(spec, x, theta, gate_shift=(k, r, np.pi / 2))
            - _output_with_shifts(spec, x, theta, gate_shift=(k, r, -np.pi / 2))
        )
        f_jx += weight * 0.25 * (
            _output_with_shifts(spec, x, theta_p, gate_shift=(k, r, np.pi / 2))
            - _output_with_shifts(spec, x, theta_p, gate_shift=(k, r, -np.pi / 2))
            - _output_with_shifts(spec, x, theta_m, gate_shift=(k, r, np.pi / 2))
            + _output_with_shifts(spec, x, theta_m, gate_shift=(k, r, -np.pi / 2))
        )
    return 2.0 * f_x * f_j - 2.0 * (y - f) * f_jx


def attack_loss_gradient_x(spec: ModelSpec, x_prime, target_gradients: np.ndarray,
                           y: float, theta: np.ndarray, k: int,
                           j_indices=None) -> float:
    """d/dx'_k of the attack loss sum_j (C'_j(x') - C_j)^2.

    `j_indices` restricts the sum to a subset of gradient entries (used by the
    single-gradient landscape scans); default is all d entries.
    """
    theta = check_parameters(spec.ansatz, theta)
    target_gradients = np.asarray(target_gradients, dtype=float)
    if target_gradients.shape != (spec.num_parameters,):
        raise ConfigurationError(
            f"target gradients must have shape ({spec.num_parameters},), "
            f"got {target_gradients.shape}"
        )
    if j_indices is None:
        j_indices = range(spec.num_parameters)
    residual = y - model_output(spec, x_prime, theta)
    total = 0.0
    for j in j_indices:
        y_plus = model_output(spec, x_prime, _shifted_theta(theta, j, np.pi / 2))
        y_minus = model_output(spec, x_prime, _shifted_theta(theta, j, -np.pi / 2))
        c_prime = -residual * (y_plus - y_minus)
        mixed = cost_gradient_x_theta(spec, x_prime, y, theta, j, k)
        total += 2.0 * (c_prime - target_gradients[j]) * mixed
    return total
