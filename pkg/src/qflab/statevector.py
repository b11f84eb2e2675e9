"""Dense statevector simulation of the small gate set used by the circuit models.

Conventions, fixed once for the whole package (see README):

- qubit 0 is the most significant bit of the basis-state index, so on two
  qubits the amplitudes are ordered |00>, |01>, |10>, |11>;
- rotations follow R_sigma(phi) = exp(-i * phi * sigma / 2);
- expectations are exact (no shot sampling), complex128 throughout.

Operations are pure: they return a new StateVector and never mutate their
input, so states can be evaluated concurrently without coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

MAX_QUBITS = 24  # desk-scale guard: 2^24 amplitudes is already 256 MiB


@dataclass(frozen=True)
class StateVector:
    """A pure state on `num_qubits` qubits as 2^num_qubits complex amplitudes."""

    num_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))


def init_zero(num_qubits: int) -> StateVector:
    """The all-zeros computational basis state |0...0>."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}"
        )
    amps = np.zeros(2**num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def rotation_matrix(axis: str, angle: float) -> np.ndarray:
    """2x2 matrix of R_axis(angle) = exp(-i * angle * sigma_axis / 2)."""
    if not math.isfinite(angle):
        raise ValueError(f"rotation angle must be finite, got {angle}")
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if axis == "z":
        return np.array(
            [[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]],
            dtype=np.complex128,
        )
    raise ConfigurationError(f"axis must be one of 'x', 'y', 'z', got {axis!r}")


def _apply_single_qubit(amps: np.ndarray, u: np.ndarray, target: int, n: int) -> np.ndarray:
    # qubit 0 is the MSB, so qubit q owns the middle axis of (2^q, 2, 2^(n-q-1))
    reshaped = amps.reshape(2**target, 2, 2 ** (n - target - 1))
    return np.einsum("ab,xbz->xaz", u, reshaped).reshape(-1)


def apply_rotation(state: StateVector, axis: str, target: int, angle: float) -> StateVector:
    """Apply R_axis(angle) on the target qubit."""
    n = state.num_qubits
    if not 0 <= target < n:
        raise IndexError(f"target qubit {target} out of range for {n} qubits")
    u = rotation_matrix(axis, angle)
    return StateVector(n, _apply_single_qubit(state.amplitudes, u, target, n))


def cnot_permutation(num_qubits: int, control: int, target: int) -> np.ndarray:
    """Basis-index permutation realizing CNOT(control, target)."""
    idx = np.arange(2**num_qubits)
    control_bit = (idx >> (num_qubits - 1 - control)) & 1
    flipped = idx ^ (1 << (num_qubits - 1 - target))
    return np.where(control_bit == 1, flipped, idx)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """Flip the target bit on basis states whose control bit is 1."""
    n = state.num_qubits
    if control == target:
        raise ConfigurationError("CNOT control and target must differ")
    if not (0 <= control < n and 0 <= target < n):
        raise IndexError(f"CNOT qubits ({control}, {target}) out of range for {n} qubits")
    perm = cnot_permutation(n, control, target)
    return StateVector(n, state.amplitudes[perm])


def parity_signs(num_qubits: int) -> np.ndarray:
    """(-1)^popcount(b) for every basis index b: the diagonal of Z on all qubits."""
    idx = np.arange(2**num_qubits)
    pop = np.zeros_like(idx)
    for q in range(num_qubits):
        pop += (idx >> q) & 1
    return np.where(pop % 2 == 0, 1.0, -1.0)


def expectation_z_all(state: StateVector) -> float:
    """Exact expectation of the Z-on-every-qubit observable, in [-1, 1]."""
    probs = np.abs(state.amplitudes) ** 2
    return float(np.dot(probs, parity_signs(state.num_qubits)))
