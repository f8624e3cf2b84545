"""Dense statevector backend used as a cross-check oracle (n <= 20).

Qubit q corresponds to axis q of the (2,)*n tensor, so in a flattened
outcome index the bit of qubit 0 is the most significant one; outcome
strings read left to right in qubit order, matching the string order of
``PauliWord`` letters and the packed bit layouts elsewhere.
"""

from __future__ import annotations

import math

import numpy as np

from .clifford import Gate
from .errors import DomainError
from .paulis import PauliWord

MAX_QUBITS = 20

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SINGLE_GATES = {"H": _H, "S": _S, "X": _X, "Z": _Z}


class StateVector:
    """Exact complex amplitudes over the computational basis."""

    def __init__(self, n: int, amps: np.ndarray):
        self.n = n
        self.amps = amps

    @classmethod
    def zero(cls, n: int, bits: int = 0) -> "StateVector":
        if n > MAX_QUBITS:
            raise DomainError(f"statevector capped at {MAX_QUBITS} qubits")
        amps = np.zeros(1 << n, dtype=complex)
        # bit q of `bits` is qubit q; axis 0 is the most significant index bit
        idx = 0
        for q in range(n):
            if (bits >> q) & 1:
                idx |= 1 << (n - 1 - q)
        amps[idx] = 1.0
        return cls(n, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def apply(self, name: str, qubits: tuple[int, ...]) -> None:
        if name in SINGLE_GATES:
            self._apply_single(SINGLE_GATES[name], qubits[0])
        elif name == "CNOT":
            self._apply_cnot(*qubits)
        elif name == "CZ":
            self._apply_cz(*qubits)
        else:
            raise ValueError(f"unknown gate {name!r}")

    def apply_gates(self, gates: list[Gate] | tuple[Gate, ...]) -> None:
        for name, qs in gates:
            self.apply(name, qs)

    def _apply_single(self, mat: np.ndarray, q: int) -> None:
        t = self.amps.reshape((2,) * self.n)
        t = np.moveaxis(t, q, 0)
        t = np.tensordot(mat, t, axes=(1, 0))
        self.amps = np.moveaxis(t, 0, q).reshape(-1)

    def _apply_cnot(self, c: int, t: int) -> None:
        a = self.amps.reshape((2,) * self.n)
        a = np.moveaxis(a, (c, t), (0, 1))
        a[1, 0], a[1, 1] = a[1, 1].copy(), a[1, 0].copy()
        self.amps = np.moveaxis(a, (0, 1), (c, t)).reshape(-1)

    def _apply_cz(self, c: int, t: int) -> None:
        a = self.amps.reshape((2,) * self.n)
        a = np.moveaxis(a, (c, t), (0, 1))
        a[1, 1] *= -1
        self.amps = np.moveaxis(a, (0, 1), (c, t)).reshape(-1)

    def apply_pauli(self, word: PauliWord) -> None:
        if word.n != self.n:
            raise ValueError("size mismatch")
        n = self.n
        idx = np.arange(1 << n)
        # map qubit masks (bit q = qubit q) to index masks (axis order)
        xm = zm = 0
        for q in range(n):
            if (word.x >> q) & 1:
                xm |= 1 << (n - 1 - q)
            if (word.z >> q) & 1:
                zm |= 1 << (n - 1 - q)
        signs = (-1.0) ** (np.bitwise_count(np.bitwise_and(idx, zm)) & 1)
        out = np.empty_like(self.amps)
        out[idx ^ xm] = self.amps * signs
        self.amps = out * (1j**word.phase)

    def expect(self, word: PauliWord) -> float:
        tmp = self.copy()
        tmp.apply_pauli(word)
        return float(np.real(np.vdot(self.amps, tmp.amps)))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def distribution(self, tol: float = 1e-12) -> dict[str, float]:
        """Outcome string -> probability for outcomes above tol."""
        probs = self.probabilities()
        out = {}
        for idx in np.nonzero(probs > tol)[0]:
            out[format(int(idx), f"0{self.n}b")] = float(probs[idx])
        return out

    def support(self, tol: float = 1e-12) -> set[str]:
        return set(self.distribution(tol))

    def sample(self, rng: np.random.Generator) -> str:
        probs = self.probabilities()
        probs = probs / probs.sum()
        idx = rng.choice(probs.size, p=probs)
        return format(int(idx), f"0{self.n}b")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def statevector_run(gates: list[Gate] | tuple[Gate, ...], n: int, bits: int = 0) -> StateVector:
    """Evolve |bits> through the gate list."""
    sv = StateVector.zero(n, bits)
    sv.apply_gates(gates)
    return sv


def statevector_distribution(sv: StateVector) -> dict[str, float]:
    dist = sv.distribution()
    total = sum(dist.values())
    if abs(total - 1.0) > 1e-10:
        raise RuntimeError(f"distribution sums to {total}")
    return dist


def prepare_phi_sv(alpha: int, beta: int) -> StateVector:
    """Statevector version of the corrected Bell state."""
    from .tableau import phi_prep_gates

    return statevector_run(phi_prep_gates(alpha, beta), 2)
