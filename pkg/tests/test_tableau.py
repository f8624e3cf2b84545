"""Stabilizer simulator: measurements, postselection, group queries."""

import numpy as np
import pytest

from pentagram.paulis import PauliWord
from pentagram.statevector import StateVector, prepare_phi_sv, statevector_distribution
from pentagram.tableau import StabilizerState, prepare_phi

from conftest import gates_matrix


def bell_state() -> StabilizerState:
    st = StabilizerState.zero(2)
    st.apply("H", (0,))
    st.apply("CNOT", (0, 1))
    return st


def test_zero_state_measurements_deterministic(rng):
    st = StabilizerState.zero(3)
    assert st.measure(0, rng) == 0
    assert st.measure(2, rng) == 0


def test_bell_correlation(rng):
    for _ in range(25):
        st = bell_state()
        b0 = st.measure(0, rng)
        b1 = st.measure(1, rng)
        assert b0 == b1


def test_uniform_bit_frequency():
    rng = np.random.default_rng(5)
    hits = 0
    trials = 10000
    for _ in range(trials):
        st = StabilizerState.zero(1)
        st.apply("H", (0,))
        hits += st.measure(0, rng)
    # 3 sigma around 1/2
    assert abs(hits / trials - 0.5) < 3 * 0.5 / np.sqrt(trials)


def test_postselect_weights(rng):
    st = StabilizerState.zero(1)
    assert st.postselect(0, 1) == 0.0

    st = bell_state()
    assert st.postselect(0, 1) == 0.5
    assert st.postselect(1, 0) == 0.0

    st = bell_state()
    assert st.postselect(0, 1) == 0.5
    assert st.postselect(1, 1) == 1.0


def test_expect_bell():
    st = bell_state()
    assert st.expect(PauliWord.from_string("XX")) == 1
    assert st.expect(PauliWord.from_string("ZZ")) == 1
    assert st.expect(PauliWord.from_string("-XX")) == -1
    assert st.expect(PauliWord.from_string("ZI")) == 0
    assert st.expect(PauliWord.from_string("YY")) == -1


def test_expect_identity_sign():
    st = StabilizerState.zero(2)
    assert st.expect(PauliWord.from_string("II")) == 1
    assert st.expect(PauliWord.from_string("-II")) == -1


def test_prepare_phi_stabilizers():
    for alpha in (1, -1):
        for beta in (1, -1):
            st = prepare_phi(alpha, beta)
            assert st.expect(PauliWord.from_string("XX")) == alpha
            assert st.expect(PauliWord.from_string("ZZ")) == beta
            sv = prepare_phi_sv(alpha, beta)
            assert sv.expect(PauliWord.from_string("XX")) == pytest.approx(alpha)
            assert sv.expect(PauliWord.from_string("ZZ")) == pytest.approx(beta)


def test_triple_phi_interleaved_expectation():
    # three shared pairs on (s, s+3); same word on both sides is stabilized
    st = StabilizerState.zero(6)
    for s in range(3):
        st.apply("H", (s,))
        st.apply("CNOT", (s, s + 3))
    w = PauliWord.from_string("ZXX")
    paired = w.shifted(0, 6) * w.shifted(3, 6)
    assert st.expect(paired) == 1


def _random_gates(n, rng, length=30):
    gates = []
    for _ in range(length):
        kind = 0 if n == 1 else rng.integers(3)
        if kind == 0:
            gates.append((["H", "S", "X", "Z"][rng.integers(4)], (int(rng.integers(n)),)))
        else:
            a, b = rng.choice(n, size=2, replace=False)
            gates.append((["CNOT", "CZ"][kind - 1], (int(a), int(b))))
    return gates


@pytest.mark.parametrize("seed", range(8))
def test_random_circuit_support_matches_statevector(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    gates = _random_gates(n, rng)
    st = StabilizerState.zero(n)
    st.apply_gates(gates)
    sys_ = st.support_system()
    sv = StateVector.zero(n)
    sv.apply_gates(gates)
    sv_support = sv.support()
    stab_support = set()
    for idx in range(1 << n):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        if sys_.contains(bits):
            stab_support.add(format(idx, f"0{n}b"))
    assert stab_support == sv_support
    # flat distribution over the support
    dist = statevector_distribution(sv)
    probs = set(round(p, 10) for p in dist.values())
    assert len(probs) == 1
    assert len(sv_support) == 2**sys_.free_bits


@pytest.mark.parametrize("seed", range(5))
def test_sequential_sampling_matches_statevector(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    gates = _random_gates(n, rng)
    base = StabilizerState.zero(n)
    base.apply_gates(gates)
    sv = StateVector.zero(n)
    sv.apply_gates(gates)
    dist = statevector_distribution(sv)
    shots = 20000
    counts: dict[str, int] = {}
    mrng = np.random.default_rng(seed + 999)
    for _ in range(shots):
        st = base.copy()
        bits = "".join(str(st.measure(q, mrng)) for q in range(n))
        counts[bits] = counts.get(bits, 0) + 1
    tv = 0.5 * sum(
        abs(counts.get(k, 0) / shots - dist.get(k, 0.0))
        for k in set(counts) | set(dist)
    )
    assert tv <= 0.02


@pytest.mark.parametrize("seed", range(5))
def test_batch_sampler_matches_sequential_distribution(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    gates = _random_gates(n, rng)
    st = StabilizerState.zero(n)
    st.apply_gates(gates)
    sys_ = st.support_system()
    samples = sys_.sample(5000, np.random.default_rng(seed + 1))
    # every sample is in the support, and free bits look uniform
    for row in samples[:100]:
        assert sys_.contains(row)
    sv = StateVector.zero(n)
    sv.apply_gates(gates)
    dist = statevector_distribution(sv)
    counts: dict[str, int] = {}
    for row in samples:
        key = "".join(str(int(b)) for b in row)
        counts[key] = counts.get(key, 0) + 1
    tv = 0.5 * sum(
        abs(counts.get(k, 0) / samples.shape[0] - dist.get(k, 0.0))
        for k in set(counts) | set(dist)
    )
    assert tv <= 0.03


def test_batched_layers_match_individual_gates(rng):
    n = 12
    st1 = StabilizerState.zero(n)
    st2 = StabilizerState.zero(n)
    mask = 0
    for q in (0, 3, 5, 11):
        mask |= 1 << q
        st1.apply("H", (q,))
    st2.h_layer(mask)
    assert _same_state(st1, st2)
    cmask = (1 << 0) | (1 << 1) | (1 << 7)
    for c in (0, 1, 7):
        st1.apply("CNOT", (c, c + 3))
    st2.cnot_offset_layer(cmask, 3)
    assert _same_state(st1, st2)


def _same_state(a: StabilizerState, b: StabilizerState) -> bool:
    return (
        np.array_equal(a.x, b.x)
        and np.array_equal(a.z, b.z)
        and np.array_equal(a.r, b.r)
    )


def test_wide_state_roundtrip():
    # > 64 qubits exercises multi-word packing
    n = 130
    st = StabilizerState.zero(n)
    st.apply("H", (0,))
    for q in range(1, n):
        st.apply("CNOT", (q - 1, q))
    rng = np.random.default_rng(3)
    bits = [st.measure(q, rng) for q in range(n)]
    assert len(set(bits)) == 1  # GHZ chain: all outcomes equal
    word = PauliWord(n, 0, (1 << n) - 1, 0)  # Z...Z
    st2 = StabilizerState.zero(n)
    st2.apply("H", (0,))
    for q in range(1, n):
        st2.apply("CNOT", (q - 1, q))
    assert st2.expect(word) == (1 if n % 2 == 0 else 0)


def test_gate_layers_match_matrix_on_small_circuit(rng):
    n = 3
    gates = _random_gates(n, rng, length=15)
    st = StabilizerState.zero(n)
    st.apply_gates(gates)
    u = gates_matrix(gates, n)
    amps = u[:, 0]
    sv_probs = np.abs(amps) ** 2
    sys_ = st.support_system()
    for idx in range(1 << n):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        assert sys_.contains(bits) == (sv_probs[idx] > 1e-12)
