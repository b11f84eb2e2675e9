"""Shared test helpers, including an independent dense-matrix circuit oracle.

The oracle builds full 2^n x 2^n unitaries from its own gate definitions and
multiplies them out, sharing no code with the package's gate application.
"""

import warnings
from functools import reduce

import numpy as np
import pytest

from qflab.ansatz import AnsatzSpec
from qflab.encoding import EncodingSpec
from qflab.qmodel import ModelSpec


def oracle_rotation(axis: str, angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == "y":
        return np.array([[c, -s], [s, c]])
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


ORACLE_CNOT = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=complex)


def embed_single(u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    mats = [np.eye(2, dtype=complex)] * n
    mats[qubit] = u
    return reduce(np.kron, mats)


def embed_cnot(control: int, target: int, n: int) -> np.ndarray:
    dim = 2**n
    full = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        cbit = (b >> (n - 1 - control)) & 1
        out = b ^ (1 << (n - 1 - target)) if cbit else b
        full[out, b] = 1.0
    return full


def oracle_unitary(ops, n: int) -> np.ndarray:
    """ops: sequence of ('rot', axis, qubit, angle) / ('cnot', control, target),
    in application order (first op acts first)."""
    full = np.eye(2**n, dtype=complex)
    for op in ops:
        if op[0] == "rot":
            gate = embed_single(oracle_rotation(op[1], op[3]), op[2], n)
        else:
            gate = embed_cnot(op[1], op[2], n)
        full = gate @ full
    return full


def oracle_ansatz_ops(spec: AnsatzSpec, theta):
    ops = []
    for block in range(spec.layers):
        for q in range(spec.num_qubits):
            ops.append(("rot", "y", q, theta[spec.parameter_index(block, q, 0)]))
            ops.append(("rot", "z", q, theta[spec.parameter_index(block, q, 1)]))
        for c, t in spec.entangler_pairs():
            ops.append(("cnot", c, t))
    return ops


def oracle_z_all_expectation(amps: np.ndarray) -> float:
    n = int(np.log2(len(amps)))
    total = 0.0
    for b, a in enumerate(amps):
        total += abs(a) ** 2 * (-1) ** bin(b).count("1")
    return total


def make_model(n=1, m=2, layers=3, gamma=2 * np.pi, entangler="ring") -> ModelSpec:
    return ModelSpec(
        EncodingSpec(n=n, m=m, gamma=gamma),
        AnsatzSpec(num_qubits=n * m, layers=layers, entangler=entangler),
    )


@pytest.fixture(autouse=True)
def _quiet_out_of_range_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="encoding input outside")
        yield
