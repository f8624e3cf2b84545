"""Pauli words on n qubits with exact phase tracking.

A word is stored in X/Z mask form: its operator value is

    i**phase * prod_j X_j**x_j * Z_j**z_j

where bit j of the ``x`` and ``z`` masks selects the factors on qubit j.
Per qubit the (x, z) pair decodes to a letter: (0,0)=I, (1,0)=X, (0,1)=Z,
(1,1)=Y.  Because Y = i*X*Z, the human-readable sign of a word differs
from the stored phase exponent by the number of Y letters; both views are
exposed.  Masks are plain Python ints, so words scale to hundreds of
qubits and products cost a handful of big-int operations.
"""

from __future__ import annotations

from dataclasses import dataclass

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"+": 0, "": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}


@dataclass(frozen=True)
class PauliWord:
    """Immutable n-qubit Pauli operator with phase in {1, i, -1, -i}."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("mask exceeds qubit count")
        object.__setattr__(self, "phase", self.phase & 3)

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliWord":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliWord":
        """One non-identity letter at ``qubit``, identity elsewhere."""
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for n={n}")
        xb, zb = _LETTER_BITS[letter]
        phase = 1 if letter == "Y" else 0  # Y = i*X*Z
        return cls(n, xb << qubit, zb << qubit, phase)

    @classmethod
    def from_string(cls, s: str) -> "PauliWord":
        """Parse strings like "ZXX", "+ZXX", "-YI", "+iXZ".

        The first letter is qubit 0.
        """
        body = s
        sign = ""
        while body and body[0] in "+-i":
            sign += body[0]
            body = body[1:]
        if sign not in _PREFIX_PHASE:
            raise ValueError(f"bad sign prefix in {s!r}")
        x = z = 0
        n_y = 0
        for q, ch in enumerate(body):
            if ch not in _LETTER_BITS:
                raise ValueError(f"bad Pauli letter {ch!r} in {s!r}")
            xb, zb = _LETTER_BITS[ch]
            x |= xb << q
            z |= zb << q
            n_y += ch == "Y"
        return cls(len(body), x, z, _PREFIX_PHASE[sign] + n_y)

    # -- structure ------------------------------------------------------

    def letter(self, qubit: int) -> str:
        return _BITS_LETTER[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def letters(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    @property
    def letter_phase(self) -> int:
        """Phase exponent in the letter picture (word = i**k * tensor of letters)."""
        return (self.phase - self.y_count) & 3

    @property
    def is_hermitian(self) -> bool:
        return self.letter_phase in (0, 2)

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian words; raises otherwise."""
        lp = self.letter_phase
        if lp == 0:
            return 1
        if lp == 2:
            return -1
        raise ValueError(f"{self} has imaginary phase")

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    # -- algebra ----------------------------------------------------------

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        # moving the left word's Z block past the right word's X block
        # anticommutes once per overlapping qubit
        phase = self.phase + other.phase + 2 * (self.z & other.x).bit_count()
        return PauliWord(self.n, self.x ^ other.x, self.z ^ other.z, phase)

    def commutes(self, other: "PauliWord") -> bool:
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        anti = (self.x & other.z).bit_count() + (self.z & other.x).bit_count()
        return anti % 2 == 0

    def negate(self) -> "PauliWord":
        return PauliWord(self.n, self.x, self.z, self.phase + 2)

    def with_sign(self, sign: int) -> "PauliWord":
        """The same letters with the requested Hermitian sign."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return PauliWord(self.n, self.x, self.z, self.y_count + (0 if sign == 1 else 2))

    # -- embeddings -------------------------------------------------------

    def shifted(self, offset: int, n_total: int) -> "PauliWord":
        """Embed into ``n_total`` qubits with qubit 0 mapped to ``offset``."""
        if offset < 0 or offset + self.n > n_total:
            raise ValueError("shift out of range")
        return PauliWord(n_total, self.x << offset, self.z << offset, self.phase)

    def kron(self, other: "PauliWord") -> "PauliWord":
        """Tensor product with ``other`` appended on higher qubit indices."""
        return PauliWord(
            self.n + other.n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            self.phase + other.phase,
        )

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.letter_phase] + self.letters()

    def __repr__(self) -> str:
        return f"PauliWord({str(self)!r})"


def pauli_mul(p: PauliWord, q: PauliWord) -> PauliWord:
    """Exact product with phase; see ``PauliWord.__mul__``."""
    return p * q


def commutes(p: PauliWord, q: PauliWord) -> bool:
    """Symplectic-form commutation test."""
    return p.commutes(q)
