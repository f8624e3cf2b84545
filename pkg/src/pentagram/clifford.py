"""Clifford operators as gate sequences over {H, S, CNOT, CZ, X, Z}.

A ``CliffordOp`` is defined by its gate list; conjugation images of Pauli
words are computed by replaying the gates with exact phase updates.  The
synthesis routine ``clifford_from_z_images`` builds an operator C whose
measurement picture maps computational Z operators onto prescribed Pauli
targets, i.e. Cdg Z_j C = target_j, sign included.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .paulis import PauliWord

Gate = tuple[str, tuple[int, ...]]

GATE_NAMES = ("H", "S", "CNOT", "CZ", "X", "Z")
_GATE_ARITY = {"H": 1, "S": 1, "X": 1, "Z": 1, "CNOT": 2, "CZ": 2}


class SynthesisError(ValueError):
    """Targets do not define a valid basis change."""


def _check_gate(gate: Gate, n: int) -> None:
    name, qs = gate
    if name not in _GATE_ARITY:
        raise ValueError(f"unknown gate {name!r}")
    if len(qs) != _GATE_ARITY[name]:
        raise ValueError(f"{name} takes {_GATE_ARITY[name]} qubits, got {qs}")
    if len(set(qs)) != len(qs) or any(not 0 <= q < n for q in qs):
        raise ValueError(f"bad qubits {qs} for n={n}")


def conjugate_word(word: PauliWord, gate: Gate) -> PauliWord:
    """g P gdg for a single gate, exact in the X/Z mask picture."""
    name, qs = gate
    x, z, r = word.x, word.z, word.phase
    if name == "H":
        b = 1 << qs[0]
        if x & z & b:
            r += 2  # Y -> -Y
        t = (x ^ z) & b
        x ^= t
        z ^= t
    elif name == "S":
        b = 1 << qs[0]
        if x & b:
            z ^= b
            r += 1  # X -> Y, Y -> -X
    elif name == "X":
        if z & (1 << qs[0]):
            r += 2
    elif name == "Z":
        if x & (1 << qs[0]):
            r += 2
    elif name == "CNOT":
        bc, bt = 1 << qs[0], 1 << qs[1]
        if x & bc:
            x ^= bt
        if z & bt:
            z ^= bc
    elif name == "CZ":
        ba, bb = 1 << qs[0], 1 << qs[1]
        if (x & ba) and (x & bb):
            r += 2
        if x & ba:
            z ^= bb
        if x & bb:
            z ^= ba
    else:  # pragma: no cover
        raise ValueError(name)
    return PauliWord(word.n, x, z, r)


def inverse_gates(gates: Iterable[Gate]) -> tuple[Gate, ...]:
    """Gate list realizing the inverse operator (S inverts to S then Z)."""
    out: list[Gate] = []
    for name, qs in reversed(list(gates)):
        if name == "S":
            out.append(("S", qs))
            out.append(("Z", qs))
        else:
            out.append((name, qs))
    return tuple(out)


@dataclass(frozen=True)
class CliffordOp:
    """Clifford unitary given as an ordered gate list (first gate acts first)."""

    n: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        for g in self.gates:
            _check_gate(g, self.n)

    def push(self, word: PauliWord) -> PauliWord:
        """Schroedinger picture: U P Udg."""
        for g in self.gates:
            word = conjugate_word(word, g)
        return word

    def pull(self, word: PauliWord) -> PauliWord:
        """Heisenberg picture: Udg P U.  Measuring P after U equals
        measuring pull(P) before it."""
        for g in inverse_gates(self.gates):
            word = conjugate_word(word, g)
        return word

    def z_image(self, j: int) -> PauliWord:
        return self.pull(PauliWord.single(self.n, j, "Z"))

    def x_image(self, j: int) -> PauliWord:
        return self.pull(PauliWord.single(self.n, j, "X"))

    def inverse(self) -> "CliffordOp":
        return CliffordOp(self.n, inverse_gates(self.gates))

    def then(self, other: "CliffordOp") -> "CliffordOp":
        if self.n != other.n:
            raise ValueError("size mismatch")
        return CliffordOp(self.n, self.gates + other.gates)

    def shifted(self, offset: int, n_total: int) -> "CliffordOp":
        gates = tuple((nm, tuple(q + offset for q in qs)) for nm, qs in self.gates)
        return CliffordOp(n_total, gates)

    def is_trivial(self) -> bool:
        return not self.gates

    def gates_json(self) -> list[dict]:
        return [{"g": nm, "q": list(qs)} for nm, qs in self.gates]

    @classmethod
    def from_gates_json(cls, n: int, data: Sequence[dict]) -> "CliffordOp":
        return cls(n, tuple((d["g"], tuple(d["q"])) for d in data))


def _gf2_rank(rows: list[int]) -> int:
    rank = 0
    basis: list[int] = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
            rank += 1
    return rank


def clifford_from_z_images(targets: Sequence[PauliWord], n: int | None = None) -> CliffordOp:
    """Synthesize C with Cdg Z_j C = targets[j] for j = 0..k-1.

    Targets must be Hermitian (sign +-1), pairwise commuting and
    independent over GF(2).  Remaining generators are completed
    implicitly; the emitted gates realize C exactly, signs included.
    """
    targets = list(targets)
    if not targets:
        raise SynthesisError("no targets")
    if n is None:
        n = targets[0].n
    if any(t.n != n for t in targets):
        raise SynthesisError("targets have mismatched sizes")
    if len(targets) > n:
        raise SynthesisError("more targets than qubits")
    for t in targets:
        if not t.is_hermitian:
            raise SynthesisError(f"target {t} has imaginary phase")
    for i, t in enumerate(targets):
        for u in targets[i + 1 :]:
            if not t.commutes(u):
                raise SynthesisError(f"targets {t} and {u} anticommute")
    if _gf2_rank([(t.x << n) | t.z for t in targets]) != len(targets):
        raise SynthesisError("targets are dependent over GF(2)")

    # Find W with W P_j Wdg = Z_j; then C = W satisfies Cdg Z_j C = P_j.
    cur = list(targets)
    gates: list[Gate] = []

    def emit(name: str, *qs: int) -> None:
        g = (name, qs)
        gates.append(g)
        for i, w in enumerate(cur):
            cur[i] = conjugate_word(w, g)

    for j in range(len(cur)):
        q_word = cur[j]
        if q_word.x == 0 and q_word.z == 1 << j and q_word.sign == 1:
            continue  # already Z_j
        high = ~((1 << j) - 1)
        if q_word.x & high == 0:
            # Z-only on the free qubits; turn one Z into X
            zq = (q_word.z & high).bit_length() - 1
            emit("H", zq)
            q_word = cur[j]
        pivot = (q_word.x & high & -(q_word.x & high)).bit_length() - 1
        rest = q_word.x & high & ~(1 << pivot)
        while rest:
            r = (rest & -rest).bit_length() - 1
            emit("CNOT", pivot, r)
            rest &= rest - 1
        if cur[j].z & (1 << pivot):
            emit("S", pivot)
        zrest = cur[j].z
        while zrest:
            r = (zrest & -zrest).bit_length() - 1
            emit("CZ", pivot, r)
            zrest &= zrest - 1
        emit("H", pivot)
        if pivot != j:
            emit("CNOT", pivot, j)
            emit("CNOT", j, pivot)
            emit("CNOT", pivot, j)
        if cur[j].sign == -1:
            emit("X", j)
        assert cur[j].x == 0 and cur[j].z == 1 << j and cur[j].sign == 1

    op = CliffordOp(n, tuple(gates))
    return op


@lru_cache(maxsize=None)
def _cached_basis_change(targets_key: tuple) -> CliffordOp:
    targets = [PauliWord(*t) for t in targets_key]
    return clifford_from_z_images(targets)


def basis_change(targets: Sequence[PauliWord]) -> CliffordOp:
    """Cached wrapper around ``clifford_from_z_images``."""
    key = tuple((t.n, t.x, t.z, t.phase) for t in targets)
    return _cached_basis_change(key)
