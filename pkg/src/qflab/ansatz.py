"""Hardware-efficient trainable ansatz: layered R_Y/R_Z rotations plus CNOT entanglers.

Parameter layout is block-major, then qubit, then rotation, fixed so that
gradient index j means the same gate in every run:

    j = block * (2 * num_qubits) + qubit * 2 + (0 for R_Y, 1 for R_Z)

Each block applies R_Y then R_Z on every qubit, followed by the entangling
layer: CNOT(q, q+1) for all q with wraparound ("ring", the default) or
without it ("chain").  Single-qubit circuits skip entangling layers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import statevector as sv
from .errors import ConfigurationError


@dataclass(frozen=True)
class AnsatzSpec:
    num_qubits: int
    layers: int
    entangler: str = "ring"

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ConfigurationError(f"num_qubits must be >= 1, got {self.num_qubits}")
        if self.layers < 1:
            raise ConfigurationError(f"layers must be >= 1, got {self.layers}")
        if self.entangler not in ("ring", "chain"):
            raise ConfigurationError(f"entangler must be 'ring' or 'chain', got {self.entangler!r}")

    @property
    def num_parameters(self) -> int:
        return 2 * self.layers * self.num_qubits

    @property
    def overparameterized(self) -> bool:
        """Sufficient condition for a benign training landscape: d >= 4^num_qubits."""
        return self.num_parameters >= 4**self.num_qubits

    def parameter_index(self, block: int, qubit: int, rot: int) -> int:
        return block * (2 * self.num_qubits) + qubit * 2 + rot

    def entangler_pairs(self) -> list:
        if self.num_qubits == 1:
            return []
        if self.entangler == "ring":
            return [(q, (q + 1) % self.num_qubits) for q in range(self.num_qubits)]
        return [(q, q + 1) for q in range(self.num_qubits - 1)]


def check_parameters(spec: AnsatzSpec, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.num_parameters,):
        raise ConfigurationError(
            f"theta must have shape ({spec.num_parameters},), got {theta.shape}"
        )
    return theta


def apply_ansatz(state: sv.StateVector, spec: AnsatzSpec, theta: np.ndarray) -> sv.StateVector:
    """Apply the full layered ansatz with parameters theta."""
    theta = check_parameters(spec, theta)
    if state.num_qubits != spec.num_qubits:
        raise ConfigurationError(
            f"state has {state.num_qubits} qubits, ansatz needs {spec.num_qubits}"
        )
    for block in range(spec.layers):
        for q in range(spec.num_qubits):
            state = sv.apply_rotation(state, "y", q, theta[spec.parameter_index(block, q, 0)])
            state = sv.apply_rotation(state, "z", q, theta[spec.parameter_index(block, q, 1)])
        for control, target in spec.entangler_pairs():
            state = sv.apply_cnot(state, control, target)
    return state


def min_layers_for_overparameterization(num_qubits: int) -> int:
    """Smallest L with 2*L*num_qubits >= 4^num_qubits."""
    if num_qubits < 1:
        raise ConfigurationError(f"num_qubits must be >= 1, got {num_qubits}")
    if num_qubits > 10:
        raise ConfigurationError(
            f"num_qubits = {num_qubits} exceeds the overparameterization guard (<= 10)"
        )
    threshold = 4**num_qubits
    return -(-threshold // (2 * num_qubits))  # ceil division


def random_parameters(spec: AnsatzSpec, rng: np.random.Generator) -> np.ndarray:
    """Independent uniform draws on [0, 2*pi), the maximal-entropy initialization."""
    return rng.uniform(0.0, 2.0 * np.pi, size=spec.num_parameters)
