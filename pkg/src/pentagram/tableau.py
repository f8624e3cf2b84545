"""Stabilizer tableau simulator with measurement and postselection.

The tableau keeps n destabilizer rows followed by n stabilizer rows.
Each row is a Pauli word packed into little-endian 64-bit words (X and Z
masks separately) plus a phase exponent of i in the X/Z convention of
``paulis``; rows stay Hermitian so the exponent parity always matches the
row's Y count.  All gate updates are vectorized over the 2n rows, and
whole gate layers acting on many qubits at once (H on a qubit mask, CNOT
from a control mask onto a fixed offset) collapse to a handful of numpy
operations, which is what makes few-hundred-qubit circuits cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import CliffordOp, Gate
from .paulis import PauliWord

_U64 = np.uint64


def n_words(n: int) -> int:
    return (n + 63) >> 6


def pack_mask(mask: int, words: int) -> np.ndarray:
    return np.frombuffer(mask.to_bytes(words * 8, "little"), dtype=_U64).copy()


def unpack_mask(arr: np.ndarray) -> int:
    return int.from_bytes(arr.tobytes(), "little")


def _popcount_rows(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).sum(axis=-1)


def _shift_up(a: np.ndarray, k: int) -> np.ndarray:
    """Shift packed bit rows towards higher qubit indices by k < 64."""
    out = a << _U64(k)
    if a.shape[-1] > 1:
        out[..., 1:] |= a[..., :-1] >> _U64(64 - k)
    return out


def _shift_down(a: np.ndarray, k: int) -> np.ndarray:
    out = a >> _U64(k)
    if a.shape[-1] > 1:
        out[..., :-1] |= a[..., 1:] << _U64(64 - k)
    return out


def _ordered_product_phase(x: np.ndarray, z: np.ndarray, r: np.ndarray) -> int:
    """Phase exponent of the ordered product of the given rows (mod 4)."""
    if x.shape[0] == 1:
        return int(r[0]) & 3
    zpref = np.bitwise_xor.accumulate(z, axis=0)
    cross = int(_popcount_rows(zpref[:-1] & x[1:]).sum()) & 1
    return (int(r.sum()) + 2 * cross) & 3


class StabilizerState:
    """n-qubit stabilizer state; rows 0..n-1 destabilizers, n..2n-1 stabilizers."""

    __slots__ = ("n", "words", "x", "z", "r")

    def __init__(self, n: int, x: np.ndarray, z: np.ndarray, r: np.ndarray):
        self.n = n
        self.words = n_words(n)
        self.x = x
        self.z = z
        self.r = r

    @classmethod
    def zero(cls, n: int) -> "StabilizerState":
        """The all-zeros computational state |0...0>."""
        w = n_words(n)
        x = np.zeros((2 * n, w), dtype=_U64)
        z = np.zeros((2 * n, w), dtype=_U64)
        r = np.zeros(2 * n, dtype=np.uint8)
        rows = np.arange(n)
        x[rows, rows >> 6] = _U64(1) << (rows & 63).astype(_U64)
        z[rows + n, rows >> 6] = _U64(1) << (rows & 63).astype(_U64)
        return cls(n, x, z, r)

    def copy(self) -> "StabilizerState":
        return StabilizerState(self.n, self.x.copy(), self.z.copy(), self.r.copy())

    # -- gates ------------------------------------------------------------

    def apply(self, name: str, qubits: tuple[int, ...]) -> None:
        if name == "H":
            self._h(*qubits)
        elif name == "S":
            self._s(*qubits)
        elif name == "X":
            self._x(*qubits)
        elif name == "Z":
            self._z(*qubits)
        elif name == "CNOT":
            self._cnot(*qubits)
        elif name == "CZ":
            self._cz(*qubits)
        else:
            raise ValueError(f"unknown gate {name!r}")

    def apply_gates(self, gates: tuple[Gate, ...] | list[Gate]) -> None:
        for name, qs in gates:
            self.apply(name, qs)

    def apply_clifford(self, op: CliffordOp, offset: int = 0) -> None:
        for name, qs in op.gates:
            self.apply(name, tuple(q + offset for q in qs))

    def _h(self, q: int) -> None:
        w, s = q >> 6, q & 63
        xw, zw = self.x[:, w], self.z[:, w]
        both = (xw >> _U64(s)) & (zw >> _U64(s)) & _U64(1)
        self.r += 2 * both.astype(np.uint8)
        diff = (xw ^ zw) & (_U64(1) << _U64(s))
        xw ^= diff
        zw ^= diff
        self.r &= 3

    def _s(self, q: int) -> None:
        w, s = q >> 6, q & 63
        xb = (self.x[:, w] >> _U64(s)) & _U64(1)
        self.r += xb.astype(np.uint8)
        self.z[:, w] ^= xb << _U64(s)
        self.r &= 3

    def _x(self, q: int) -> None:
        w, s = q >> 6, q & 63
        zb = (self.z[:, w] >> _U64(s)) & _U64(1)
        self.r += 2 * zb.astype(np.uint8)
        self.r &= 3

    def _z(self, q: int) -> None:
        w, s = q >> 6, q & 63
        xb = (self.x[:, w] >> _U64(s)) & _U64(1)
        self.r += 2 * xb.astype(np.uint8)
        self.r &= 3

    def _cnot(self, c: int, t: int) -> None:
        wc, sc = c >> 6, c & 63
        wt, st = t >> 6, t & 63
        xc = (self.x[:, wc] >> _U64(sc)) & _U64(1)
        self.x[:, wt] ^= xc << _U64(st)
        zt = (self.z[:, wt] >> _U64(st)) & _U64(1)
        self.z[:, wc] ^= zt << _U64(sc)

    def _cz(self, a: int, b: int) -> None:
        wa, sa = a >> 6, a & 63
        wb, sb = b >> 6, b & 63
        xa = (self.x[:, wa] >> _U64(sa)) & _U64(1)
        xb = (self.x[:, wb] >> _U64(sb)) & _U64(1)
        self.r += 2 * (xa & xb).astype(np.uint8)
        self.z[:, wb] ^= xa << _U64(sb)
        self.z[:, wa] ^= xb << _U64(sa)
        self.r &= 3

    # -- batched layers -----------------------------------------------------

    def h_layer(self, qubit_mask: int) -> None:
        """H on every qubit selected by the mask, as one vector operation."""
        m = pack_mask(qubit_mask, self.words)
        y = self.x & self.z & m
        self.r += 2 * (_popcount_rows(y) & 1).astype(np.uint8)
        t = (self.x ^ self.z) & m
        self.x ^= t
        self.z ^= t
        self.r &= 3

    def cnot_offset_layer(self, control_mask: int, offset: int) -> None:
        """CNOT from every control qubit c in the mask onto target c+offset.

        Control and target sets must be disjoint; offset must be < 64.
        """
        if not 0 < offset < 64:
            raise ValueError("offset out of range")
        c = pack_mask(control_mask, self.words)
        if control_mask & (control_mask << offset):
            raise ValueError("control and target sets overlap")
        xc = self.x & c
        self.x ^= _shift_up(xc, offset)
        zt = self.z & _shift_up(c, offset)
        self.z ^= _shift_down(zt, offset)

    # -- measurement --------------------------------------------------------

    def _column_bits(self, q: int) -> np.ndarray:
        w, s = q >> 6, q & 63
        return (self.x[:, w] >> _U64(s)) & _U64(1)

    def _random_collapse(self, q: int, xs_all: np.ndarray, bit: int) -> None:
        n = self.n
        p = n + int(np.argmax(xs_all[n:]))
        rows = np.nonzero(xs_all)[0]
        rows = rows[rows != p]
        if rows.size:
            cross = (_popcount_rows(self.z[rows] & self.x[p]) & 1).astype(np.uint8)
            self.r[rows] = (self.r[rows] + self.r[p] + 2 * cross) & 3
            self.x[rows] ^= self.x[p]
            self.z[rows] ^= self.z[p]
        d = p - n
        self.x[d] = self.x[p]
        self.z[d] = self.z[p]
        self.r[d] = self.r[p]
        w, s = q >> 6, q & 63
        self.x[p] = 0
        self.z[p] = 0
        self.z[p, w] = _U64(1) << _U64(s)
        self.r[p] = 2 * bit

    def _deterministic_outcome(self, xs_all: np.ndarray) -> int:
        sel = np.nonzero(xs_all[: self.n])[0]
        if sel.size == 0:
            raise RuntimeError("tableau lost full rank")
        rows = sel + self.n
        phase = _ordered_product_phase(self.x[rows], self.z[rows], self.r[rows])
        if phase not in (0, 2):
            raise RuntimeError("non-Hermitian stabilizer product")
        return 1 if phase == 2 else 0

    def measure(self, q: int, rng: np.random.Generator) -> int:
        """Measure Z on qubit q, collapsing the state. Returns the bit."""
        xs_all = self._column_bits(q)
        if xs_all[self.n :].any():
            bit = int(rng.integers(2))
            self._random_collapse(q, xs_all, bit)
            return bit
        return self._deterministic_outcome(xs_all)

    def postselect(self, q: int, bit: int) -> float:
        """Force qubit q to the given bit.

        Returns the branch weight: 0.5 when the outcome was random (state
        collapsed accordingly), 1.0 when it was already determined and
        matches, 0.0 when it contradicts the state (state left unusable).
        """
        xs_all = self._column_bits(q)
        if xs_all[self.n :].any():
            self._random_collapse(q, xs_all, bit)
            return 0.5
        return 1.0 if self._deterministic_outcome(xs_all) == bit else 0.0

    def measure_all(self, rng: np.random.Generator) -> np.ndarray:
        """Measure every qubit in index order; returns a 0/1 array."""
        return np.array([self.measure(q, rng) for q in range(self.n)], dtype=np.uint8)

    # -- group queries --------------------------------------------------------

    def expect(self, word: PauliWord) -> int:
        """+1 / -1 if +-word is in the stabilizer group, else 0."""
        if word.n != self.n:
            raise ValueError("size mismatch")
        sign = word.sign  # raises for imaginary phases
        if word.is_identity():
            return sign
        px = pack_mask(word.x, self.words)
        pz = pack_mask(word.z, self.words)
        n = self.n
        anti = (
            _popcount_rows(self.x[:n] & pz[None, :])
            + _popcount_rows(self.z[:n] & px[None, :])
        ) & 1
        sel = np.nonzero(anti)[0]
        if sel.size == 0:
            return 0
        rows = sel + n
        xprod = np.bitwise_xor.reduce(self.x[rows], axis=0)
        zprod = np.bitwise_xor.reduce(self.z[rows], axis=0)
        if not (np.array_equal(xprod, px) and np.array_equal(zprod, pz)):
            return 0
        phase = _ordered_product_phase(self.x[rows], self.z[rows], self.r[rows])
        n_y = int(np.bitwise_count(xprod & zprod).sum())
        letter = (phase - n_y) & 3
        prod_sign = 1 if letter == 0 else -1
        return 1 if prod_sign == sign else -1

    def stabilizer_words(self) -> list[PauliWord]:
        out = []
        for i in range(self.n, 2 * self.n):
            out.append(
                PauliWord(
                    self.n,
                    unpack_mask(self.x[i]),
                    unpack_mask(self.z[i]),
                    int(self.r[i]),
                )
            )
        return out

    def support_system(self) -> "MeasurementSupport":
        """Parity constraints satisfied by every full Z-measurement outcome.

        Gaussian elimination over the stabilizer X block leaves the pure-Z
        subgroup; each pure-Z generator pins one parity of the outcome
        string. Outcomes in the support are exactly the strings passing
        all parities, and they are equally likely.
        """
        n, w = self.n, self.words
        X = self.x[n:].copy()
        Z = self.z[n:].copy()
        R = self.r[n:].copy()
        used = np.zeros(n, dtype=bool)
        for q in range(n):
            wq, sq = q >> 6, q & 63
            bits = ((X[:, wq] >> _U64(sq)) & _U64(1)).astype(bool)
            cand = np.nonzero(bits & ~used)[0]
            if cand.size == 0:
                continue
            p = int(cand[0])
            used[p] = True
            others = np.nonzero(bits)[0]
            others = others[others != p]
            if others.size:
                cross = (_popcount_rows(Z[others] & X[p]) & 1).astype(np.uint8)
                R[others] = (R[others] + R[p] + 2 * cross) & 3
                X[others] ^= X[p]
                Z[others] ^= Z[p]
        pure = ~used
        masks = Z[pure]
        targets = ((R[pure] & 3) == 2).astype(np.uint8)
        if np.any((R[pure] & 1) != 0):
            raise RuntimeError("pure-Z generator with imaginary phase")
        return MeasurementSupport(n, masks, targets)


@dataclass
class MeasurementSupport:
    """Affine-subspace description of a state's full-measurement support."""

    n: int
    masks: np.ndarray  # (m, words) uint64 parity masks over outcome bits
    targets: np.ndarray  # (m,) uint8 required parities

    @property
    def words(self) -> int:
        return n_words(self.n)

    @property
    def free_bits(self) -> int:
        """log2 of the support size."""
        return self.n - self.masks.shape[0]

    def contains_packed(self, bits: np.ndarray) -> bool:
        par = _popcount_rows(self.masks & bits[None, :]) & 1
        return bool(np.all(par == self.targets))

    def contains(self, bits: "np.ndarray | list[int]") -> bool:
        mask = 0
        for q, b in enumerate(bits):
            mask |= int(b) << q
        return self.contains_packed(pack_mask(mask, self.words))

    def _solved_form(self) -> tuple[np.ndarray, np.ndarray, list[int]]:
        masks = self.masks.copy()
        targets = self.targets.copy()
        pivots: list[int] = []
        for i in range(masks.shape[0]):
            row = unpack_mask(masks[i])
            if row == 0:
                raise RuntimeError("degenerate support constraint")
            piv = (row & -row).bit_length() - 1
            pivots.append(piv)
            wq, sq = piv >> 6, piv & 63
            for j in range(masks.shape[0]):
                if j != i and (int(masks[j, wq]) >> sq) & 1:
                    masks[j] ^= masks[i]
                    targets[j] ^= targets[i]
        return masks, targets, pivots

    def sample_packed(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform samples from the support, packed as (shots, words) uint64."""
        masks, targets, pivots = self._solved_form()
        w = self.words
        bits = rng.integers(0, 256, size=(shots, w * 8), dtype=np.uint8).view(_U64)
        full = pack_mask((1 << self.n) - 1, w)
        bits &= full
        for piv in pivots:
            bits[:, piv >> 6] &= ~(_U64(1) << _U64(piv & 63))
        for i, piv in enumerate(pivots):
            row = masks[i].copy()
            row[piv >> 6] &= ~(_U64(1) << _U64(piv & 63))
            par = (_popcount_rows(bits & row[None, :]) & 1).astype(_U64)
            val = par ^ _U64(targets[i])
            bits[:, piv >> 6] |= val << _U64(piv & 63)
        return bits

    def sample(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform samples as a (shots, n) 0/1 array."""
        packed = self.sample_packed(shots, rng)
        expanded = np.unpackbits(
            packed.view(np.uint8), axis=1, bitorder="little"
        )
        return expanded[:, : self.n]


def prepare_phi(alpha: int, beta: int) -> StabilizerState:
    """Two-qubit Bell state with <XX> = alpha and <ZZ> = beta."""
    st = StabilizerState.zero(2)
    for name, qs in phi_prep_gates(alpha, beta):
        st.apply(name, qs)
    return st


def phi_prep_gates(alpha: int, beta: int, q0: int = 0, q1: int = 1) -> list[Gate]:
    """Gate list preparing the corrected Bell state from |00>."""
    if alpha not in (1, -1) or beta not in (1, -1):
        raise ValueError("alpha and beta must be +-1")
    gates: list[Gate] = []
    if alpha == -1:
        gates.append(("X", (q0,)))
    if beta == -1:
        gates.append(("X", (q1,)))
    gates.append(("H", (q0,)))
    gates.append(("CNOT", (q0, q1)))
    return gates
