"""Shared oracles: dense matrices for Pauli algebra and gate conjugation."""

import numpy as np
import pytest

from pentagram.paulis import PauliWord

I2 = np.eye(2, dtype=complex)
PAULI_MATS = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
GATE_MATS = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "X": PAULI_MATS["X"],
    "Z": PAULI_MATS["Z"],
}
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


def word_matrix(word: PauliWord) -> np.ndarray:
    """Dense matrix of a Pauli word; qubit 0 is the leftmost kron factor."""
    mat = np.eye(1, dtype=complex)
    for q in range(word.n):
        mat = np.kron(mat, PAULI_MATS[word.letter(q)])
    return (1j**word.letter_phase) * mat


def gate_matrix(name: str, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Full 2^n unitary of one gate, same qubit ordering as word_matrix."""
    if name in GATE_MATS:
        mat = np.eye(1, dtype=complex)
        for q in range(n):
            mat = np.kron(mat, GATE_MATS[name] if q == qubits[0] else I2)
        return mat
    if name in ("CNOT", "CZ"):
        base = CNOT if name == "CNOT" else CZ
        c, t = qubits
        full = np.zeros((2**n, 2**n), dtype=complex)
        for idx in range(2**n):
            bc = (idx >> (n - 1 - c)) & 1
            bt = (idx >> (n - 1 - t)) & 1
            sub_in = (bc << 1) | bt
            for sub_out in range(4):
                amp = base[sub_out, sub_in]
                if amp == 0:
                    continue
                oc, ot = (sub_out >> 1) & 1, sub_out & 1
                jdx = idx
                jdx &= ~(1 << (n - 1 - c))
                jdx &= ~(1 << (n - 1 - t))
                jdx |= oc << (n - 1 - c)
                jdx |= ot << (n - 1 - t)
                full[jdx, idx] += amp
        return full
    raise ValueError(name)


def gates_matrix(gates, n: int) -> np.ndarray:
    """Unitary of a gate sequence (first gate applied first)."""
    mat = np.eye(2**n, dtype=complex)
    for name, qs in gates:
        mat = gate_matrix(name, qs, n) @ mat
    return mat


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
