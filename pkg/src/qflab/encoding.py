"""Tower product encoding: gate map, known spectrum quantities, and state overlap.

The map loads x in [0,1]^n onto n*m qubits, one column of m qubits per input
coordinate.  Qubit (j*m + r) receives R_X(base^r * gamma * x_j), so each
coordinate drives a geometric tower of rotation angles.  With base 5 the
frequency set of any cost-function gradient is the dense integer range
[-(5^m - 1)/2, (5^m - 1)/2].
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import statevector as sv
from .errors import ConfigurationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EncodingSpec:
    """Layout of the tower encoding: n input coordinates, m qubits per coordinate.

    `gamma` is the input scaling (default 2*pi so x in [0,1] sweeps a full
    rotation of the base gate) and `prefactor_base` the tower growth factor.
    `axis` is configurable for ablations; the spectrum statements below are
    for the default base-5 X-rotation tower.
    """

    n: int
    m: int
    gamma: float = TWO_PI
    prefactor_base: int = 5
    axis: str = "x"

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConfigurationError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        if self.gamma <= 0:
            raise ConfigurationError(f"gamma must be positive, got {self.gamma}")
        if self.prefactor_base < 2:
            raise ConfigurationError(
                f"prefactor_base must be >= 2, got {self.prefactor_base}"
            )
        if self.axis not in ("x", "y", "z"):
            raise ConfigurationError(f"axis must be 'x', 'y' or 'z', got {self.axis!r}")
        if self.num_qubits > sv.MAX_QUBITS:
            raise ConfigurationError(
                f"n*m = {self.num_qubits} exceeds the {sv.MAX_QUBITS}-qubit guard"
            )

    @property
    def num_qubits(self) -> int:
        return self.n * self.m

    def qubit(self, j: int, r: int) -> int:
        """Qubit index carrying rung r of coordinate j."""
        return j * self.m + r

    def angle(self, j: int, r: int, xj: float) -> float:
        return self.prefactor_base**r * self.gamma * xj

    def gate_angles(self, x: np.ndarray) -> np.ndarray:
        """All num_qubits gate angles for input x, in qubit order."""
        x = np.asarray(x, dtype=float)
        prefactors = self.prefactor_base ** np.arange(self.m)
        return (np.outer(x, prefactors) * self.gamma).reshape(-1)


def apply_encoding(state: sv.StateVector, spec: EncodingSpec, x) -> sv.StateVector:
    """Apply the tower encoding for input x on top of `state`.

    Values outside [0,1] are legal (attack iterates wander off the unit cube
    and wrap through gate periodicity) but trigger a warning.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise ConfigurationError(f"input must have shape ({spec.n},), got {x.shape}")
    if state.num_qubits != spec.num_qubits:
        raise ConfigurationError(
            f"state has {state.num_qubits} qubits, encoding needs {spec.num_qubits}"
        )
    if np.any(x < 0.0) or np.any(x > 1.0):
        warnings.warn("encoding input outside [0,1]; wrapping through gate periodicity")
    for j in range(spec.n):
        for r in range(spec.m):
            state = sv.apply_rotation(state, spec.axis, spec.qubit(j, r), spec.angle(j, r, x[j]))
    return state


def tower_eigenvalue(m: int, bits, base: int = 5) -> float:
    """Generator-Hamiltonian eigenvalue sum((-1)^bits[r] * base^r / 2) for r < m."""
    bits = list(bits)
    if len(bits) != m:
        raise ConfigurationError(f"bits must have length {m}, got {len(bits)}")
    return sum((-1) ** int(b) * base**r / 2.0 for r, b in enumerate(bits))


def max_gradient_frequency(m: int, base: int = 5) -> int:
    """Largest gradient Fourier frequency per coordinate: (base^m - 1)/2."""
    if m < 1:
        raise ConfigurationError(f"m must be >= 1, got {m}")
    if m > 12:
        raise ConfigurationError(f"m = {m} exceeds the overflow guard (m <= 12)")
    return (base**m - 1) // 2


def gradient_spectrum_size(n: int, m: int, base: int = 5) -> int:
    """Half the number of gradient frequencies over n coordinates: (base^(nm) - 1)/2."""
    if n < 1 or m < 1:
        raise ConfigurationError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if n * m > 24:
        raise ConfigurationError(f"n*m = {n * m} exceeds the overflow guard (n*m <= 24)")
    return (base ** (n * m) - 1) // 2


def gradient_frequency_count(n: int, m: int, base: int = 5) -> int:
    """Full size of the gradient frequency set over n coordinates: base^(nm)."""
    if n * m > 24:
        raise ConfigurationError(f"n*m = {n * m} exceeds the overflow guard (n*m <= 24)")
    return base ** (n * m)


def qubits_for_degree(d_f: int, base: int = 5) -> float:
    """Invert the degree formula: qubits per coordinate needed for max frequency d_f."""
    if d_f < 1:
        raise ConfigurationError(f"d_f must be >= 1, got {d_f}")
    return math.log(2 * d_f + 1) / math.log(base)


def frequency_set_bruteforce(m: int, base: int = 5) -> list:
    """Enumerate every attainable gradient frequency sum(c_r * base^r), c_r in {-2..2}.

    The c_r digits come from differences of two eigenvalue pairs, each rung
    contributing ((-1)^k - (-1)^l + (-1)^y - (-1)^z)/2 in {-2,-1,0,1,2}.
    """
    if m < 1 or m > 6:
        raise ConfigurationError(f"m must be in [1, 6] for enumeration, got {m}")
    powers = [base**r for r in range(m)]
    freqs = {
        sum(c * p for c, p in zip(digits, powers))
        for digits in itertools.product((-2, -1, 0, 1, 2), repeat=m)
    }
    return sorted(freqs)


def overlap_probability(spec: EncodingSpec, x: float, x_prime: float) -> float:
    """Probability of measuring all zeros on U(x')^dag U(x) |0>, for n = 1.

    For the tower of R gates this is the closed form
    prod_r cos^2(base^r * gamma * (x - x') / 2); the /2 comes from the
    R(phi) = exp(-i phi sigma/2) convention used by the simulator.
    """
    if spec.n != 1:
        raise ConfigurationError("overlap_probability is defined for n = 1")
    if spec.axis == "z":
        raise ConfigurationError("z-axis encoding never moves |0>; overlap is trivially 1")
    delta = spec.gamma * (x - x_prime)
    prob = 1.0
    for r in range(spec.m):
        prob *= math.cos(spec.prefactor_base**r * delta / 2.0) ** 2
    return prob


def overlap_probability_simulated(spec: EncodingSpec, x: float, x_prime: float) -> float:
    """|<psi(x')|psi(x)>|^2 evaluated on the statevector simulator (cross-check)."""
    if spec.n != 1:
        raise ConfigurationError("overlap_probability_simulated is defined for n = 1")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        state_a = apply_encoding(sv.init_zero(spec.num_qubits), spec, np.array([x]))
        state_b = apply_encoding(sv.init_zero(spec.num_qubits), spec, np.array([x_prime]))
    return float(np.abs(np.vdot(state_b.amplitudes, state_a.amplitudes)) ** 2)
