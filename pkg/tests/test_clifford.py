"""Clifford conjugation and synthesis, replayed against matrix oracles."""

import itertools

import numpy as np
import pytest

from pentagram.clifford import (
    CliffordOp,
    SynthesisError,
    clifford_from_z_images,
    conjugate_word,
    inverse_gates,
)
from pentagram.paulis import PauliWord

from conftest import gate_matrix, gates_matrix, word_matrix

SINGLE_GATES = ["H", "S", "X", "Z"]
WORDS2 = ["".join(p) for p in itertools.product("IXZY", repeat=2)]


@pytest.mark.parametrize("gate", SINGLE_GATES)
@pytest.mark.parametrize("word", WORDS2)
def test_single_gate_conjugation_matches_matrix(gate, word):
    w = PauliWord.from_string(word)
    got = word_matrix(conjugate_word(w, (gate, (0,))))
    u = gate_matrix(gate, (0,), 2)
    want = u @ word_matrix(w) @ u.conj().T
    assert np.allclose(got, want)


@pytest.mark.parametrize("gate,qs", [("CNOT", (0, 1)), ("CNOT", (1, 0)), ("CZ", (0, 1))])
@pytest.mark.parametrize("word", WORDS2)
def test_two_qubit_conjugation_matches_matrix(gate, qs, word):
    w = PauliWord.from_string(word)
    got = word_matrix(conjugate_word(w, (gate, qs)))
    u = gate_matrix(gate, qs, 2)
    want = u @ word_matrix(w) @ u.conj().T
    assert np.allclose(got, want)


def test_inverse_gates_invert():
    gates = [("H", (0,)), ("S", (1,)), ("CNOT", (0, 1)), ("S", (0,)), ("CZ", (1, 2))]
    n = 3
    u = gates_matrix(gates, n)
    uinv = gates_matrix(inverse_gates(gates), n)
    assert np.allclose(u @ uinv, np.eye(2**n))


def test_push_and_pull_are_inverse_pictures(rng):
    op = _random_clifford(4, rng)
    for _ in range(20):
        w = _random_word(4, rng)
        assert op.pull(op.push(w)) == w
        assert op.push(op.pull(w)) == w


def _random_word(n, rng) -> PauliWord:
    return PauliWord(
        n, int(rng.integers(1 << n)), int(rng.integers(1 << n)), 0
    ).with_sign(int(1 - 2 * rng.integers(2)))


def _random_clifford(n, rng, length=25) -> CliffordOp:
    gates = []
    for _ in range(length):
        kind = 0 if n == 1 else rng.integers(3)
        if kind == 0:
            gates.append((["H", "S", "X", "Z"][rng.integers(4)], (int(rng.integers(n)),)))
        else:
            a, b = rng.choice(n, size=2, replace=False)
            gates.append((["CNOT", "CZ"][kind - 1], (int(a), int(b))))
    return CliffordOp(n, tuple(gates))


def _random_targets(n, k, rng) -> list[PauliWord]:
    """Images of the first k Z generators under a random Clifford: valid
    (commuting, independent, Hermitian) by construction."""
    op = _random_clifford(n, rng)
    return [op.pull(PauliWord.single(n, j, "Z")) for j in range(k)]


def test_identity_targets_give_identity_map():
    targets = [PauliWord.single(3, j, "Z") for j in range(3)]
    op = clifford_from_z_images(targets)
    assert op.gates == ()


def test_hadamard_case():
    op = clifford_from_z_images([PauliWord.from_string("X")])
    assert op.z_image(0) == PauliWord.from_string("X")


def test_three_qubit_mixed_targets():
    targets = [PauliWord.from_string(s) for s in ("ZII", "IXI", "IIX")]
    op = clifford_from_z_images(targets)
    for j, t in enumerate(targets):
        assert op.z_image(j) == t


@pytest.mark.parametrize("seed", range(6))
def test_synthesis_replay_small(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    k = int(rng.integers(1, n + 1))
    targets = _random_targets(n, k, rng)
    op = clifford_from_z_images(targets)
    for j, t in enumerate(targets):
        assert op.z_image(j) == t


def test_synthesis_replay_bulk():
    rng = np.random.default_rng(777)
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        k = int(rng.integers(1, n + 1))
        targets = _random_targets(n, k, rng)
        op = clifford_from_z_images(targets)
        for j, t in enumerate(targets):
            assert op.z_image(j) == t, (targets, op.gates)


def test_synthesis_matches_matrix_oracle(rng):
    for _ in range(15):
        n = 3
        targets = _random_targets(n, 3, rng)
        op = clifford_from_z_images(targets)
        u = gates_matrix(op.gates, n)
        for j, t in enumerate(targets):
            z = word_matrix(PauliWord.single(n, j, "Z"))
            assert np.allclose(u.conj().T @ z @ u, word_matrix(t))


def test_synthesis_rejects_bad_targets():
    with pytest.raises(SynthesisError):
        clifford_from_z_images(
            [PauliWord.from_string("XI"), PauliWord.from_string("ZI")]
        )  # anticommute
    with pytest.raises(SynthesisError):
        clifford_from_z_images(
            [PauliWord.from_string("ZZ"), PauliWord.from_string("ZZ")]
        )  # dependent
    with pytest.raises(SynthesisError):
        clifford_from_z_images([PauliWord.from_string("+iZI")])  # imaginary


def test_gate_json_round_trip():
    op = CliffordOp(2, (("H", (0,)), ("CNOT", (0, 1))))
    data = op.gates_json()
    assert data == [{"g": "H", "q": [0]}, {"g": "CNOT", "q": [0, 1]}]
    assert CliffordOp.from_gates_json(2, data) == op
