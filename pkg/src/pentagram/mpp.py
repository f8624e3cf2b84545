"""The magic pentagram problem circuit: build, run, and verify.

The circuit acts on a 3 x 2n grid of qubits, one column pair per input
block.  Each block prepares three Bell pairs between its two columns,
rotates the outer columns into the measurement bases selected by the
active edge codes, Bell-measures neighbouring column pairs to swap
entanglement down the chain, and reads everything out in the
computational basis.  Outputs are grouped as n three-bit z blocks
(odd columns) followed by n three-bit w blocks (even columns), with bit
b meaning the value (-1)**b.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import game
from .clifford import CliffordOp, Gate, basis_change
from .errors import DomainError
from .game import EDGE_CODES, IDLE_CODES, Params, code_to_edge, edge_code, edge_sign, is_idle_code
from .paulis import PauliWord
from .statevector import MAX_QUBITS, StateVector
from .tableau import MeasurementSupport, StabilizerState, phi_prep_gates

STATEVECTOR_MAX_BLOCKS = MAX_QUBITS // 6


def qubit_index(s: int, t: int) -> int:
    """Linear index of grid position (row s in 1..3, column t in 1..2n)."""
    if s not in (1, 2, 3) or t < 1:
        raise ValueError(f"bad grid position ({s}, {t})")
    return 3 * (t - 1) + (s - 1)


def _check_code(code: str) -> str:
    if len(code) != 3 or any(c not in "01" for c in code):
        raise ValueError(f"bad 3-bit code {code!r}")
    return code


@dataclass(frozen=True)
class MppInput:
    """6n-bit instance: n x-codes followed by n y-codes, three bits each."""

    n: int
    x: tuple[str, ...]
    y: tuple[str, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("block count must be at least 2")
        if len(self.x) != self.n or len(self.y) != self.n:
            raise ValueError("need n x-codes and n y-codes")
        for c in self.x + self.y:
            _check_code(c)

    @property
    def packed(self) -> str:
        return "".join(self.x) + "".join(self.y)

    @classmethod
    def from_packed(cls, s: str) -> "MppInput":
        if len(s) % 6 or not s or any(c not in "01" for c in s):
            raise ValueError("packed input must be a 6n-bit binary string")
        n = len(s) // 6
        x = tuple(s[3 * j : 3 * j + 3] for j in range(n))
        y = tuple(s[3 * n + 3 * j : 3 * n + 3 * j + 3] for j in range(n))
        return cls(n, x, y)

    def to_json(self) -> dict:
        return {"n": self.n, "x": list(self.x), "y": list(self.y)}

    @classmethod
    def from_json(cls, data: dict) -> "MppInput":
        return cls(int(data["n"]), tuple(data["x"]), tuple(data["y"]))

    def active_pair(self) -> tuple[int, int]:
        """(k, l) for instances with one active x block, one active y
        block, k < l, and every other block exactly 111; raises otherwise."""
        ks = [j + 1 for j, c in enumerate(self.x) if not is_idle_code(c)]
        ls = [j + 1 for j, c in enumerate(self.y) if not is_idle_code(c)]
        if len(ks) != 1 or len(ls) != 1:
            raise ValueError("input is not in the structured instance set")
        k, l = ks[0], ls[0]
        if any(c != "111" for j, c in enumerate(self.x) if j + 1 != k):
            raise ValueError("input is not in the structured instance set")
        if any(c != "111" for j, c in enumerate(self.y) if j + 1 != l):
            raise ValueError("input is not in the structured instance set")
        if not k < l:
            raise ValueError("active blocks must satisfy k < l")
        return k, l

    def in_instance_set(self) -> bool:
        try:
            self.active_pair()
            return True
        except ValueError:
            return False


@dataclass(frozen=True)
class MppOutput:
    """6n measured bits in block order: z_1..z_n then w_1..w_n."""

    n: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != 6 * self.n:
            raise ValueError("need 6n output bits")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0/1")

    @property
    def packed(self) -> str:
        return "".join(str(b) for b in self.bits)

    @classmethod
    def from_packed(cls, s: str) -> "MppOutput":
        if len(s) % 6 or not s or any(c not in "01" for c in s):
            raise ValueError("packed output must be a 6n-bit binary string")
        return cls(len(s) // 6, tuple(int(c) for c in s))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "z": ["".join(str(b) for b in self.z_bits(j)) for j in range(1, self.n + 1)],
            "w": ["".join(str(b) for b in self.w_bits(j)) for j in range(1, self.n + 1)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MppOutput":
        n = int(data["n"])
        bits = []
        for c in data["z"]:
            bits.extend(int(b) for b in _check_code(c))
        for c in data["w"]:
            bits.extend(int(b) for b in _check_code(c))
        return cls(n, tuple(bits))

    def z_bits(self, j: int) -> tuple[int, int, int]:
        if not 1 <= j <= self.n:
            raise ValueError(f"block {j} out of range")
        base = 3 * (j - 1)
        return self.bits[base], self.bits[base + 1], self.bits[base + 2]

    def w_bits(self, j: int) -> tuple[int, int, int]:
        if not 1 <= j <= self.n:
            raise ValueError(f"block {j} out of range")
        base = 3 * self.n + 3 * (j - 1)
        return self.bits[base], self.bits[base + 1], self.bits[base + 2]

    def z_values(self, j: int) -> tuple[int, int, int]:
        return tuple(1 - 2 * b for b in self.z_bits(j))  # type: ignore[return-value]

    def w_values(self, j: int) -> tuple[int, int, int]:
        return tuple(1 - 2 * b for b in self.w_bits(j))  # type: ignore[return-value]


def output_permutation(n: int) -> np.ndarray:
    """perm[pos] = qubit index measured into output position pos."""
    perm = np.empty(6 * n, dtype=np.int64)
    for j in range(1, n + 1):
        for i in range(3):
            perm[3 * (j - 1) + i] = qubit_index(i + 1, 2 * j - 1)
            perm[3 * n + 3 * (j - 1) + i] = qubit_index(i + 1, 2 * j)
    return perm


# -- gates ------------------------------------------------------------------


@lru_cache(maxsize=None)
def u_gate(code: str) -> CliffordOp:
    """Basis change for measuring the edge observables of ``code``.

    After the gate, measuring computational Z on wire j yields the
    outcome of the rank-j vertex observable of the edge.  Idle codes map
    to the identity.
    """
    _check_code(code)
    if is_idle_code(code):
        return CliffordOp(3, ())
    edge = code_to_edge(code)
    targets = [v.observable for v in game.pentagram().edge_vertices(edge)[:3]]
    return basis_change(targets)


@lru_cache(maxsize=None)
def v_gate(y_code: str, x_code: str) -> CliffordOp:
    """Bell-measurement basis change between neighbouring columns.

    Active when both codes are idle or when they are equal: undoes the
    two basis changes, then rotates the three row pairs (j, j+3) from
    the Bell basis to the computational one.  Otherwise the identity.
    """
    _check_code(y_code)
    _check_code(x_code)
    both_idle = is_idle_code(x_code) and is_idle_code(y_code)
    if not (both_idle or x_code == y_code):
        return CliffordOp(6, ())
    gates: list[Gate] = []
    gates.extend(u_gate(y_code).inverse().gates)
    gates.extend(u_gate(x_code).inverse().shifted(3, 6).gates)
    for s in range(3):
        gates.append(("CNOT", (s, s + 3)))
        gates.append(("H", (s,)))
    return CliffordOp(6, tuple(gates))


# -- circuit plan -------------------------------------------------------------


@dataclass(frozen=True)
class CircuitPlan:
    """Fixed-shape gate plan: Bell prep, basis changes, swaps, readout.

    The number of stages is independent of the block count, which is the
    whole point of the construction.
    """

    n: int
    bell_h: tuple[int, ...]
    bell_cnot: tuple[tuple[int, int], ...]
    u_ops: tuple[tuple[int, str], ...]
    v_ops: tuple[tuple[int, str, str], ...]

    @property
    def n_qubits(self) -> int:
        return 6 * self.n

    def depth(self) -> int:
        """Stage count: prep H, prep CNOT, U stage, V stage, measurement."""
        return 5

    def stages(self) -> list[list[Gate]]:
        prep_h: list[Gate] = [("H", (q,)) for q in self.bell_h]
        prep_cx: list[Gate] = [("CNOT", pair) for pair in self.bell_cnot]
        u_stage: list[Gate] = []
        for base, code in self.u_ops:
            u_stage.extend(
                (nm, tuple(q + base for q in qs)) for nm, qs in u_gate(code).gates
            )
        v_stage: list[Gate] = []
        for base, yc, xc in self.v_ops:
            v_stage.extend(
                (nm, tuple(q + base for q in qs)) for nm, qs in v_gate(yc, xc).gates
            )
        return [prep_h, prep_cx, u_stage, v_stage]

    def gates(self) -> list[Gate]:
        return [g for stage in self.stages() for g in stage]


def build_circuit(inp: MppInput) -> CircuitPlan:
    """Assemble the plan for one instance."""
    n = inp.n
    bell_h = []
    bell_cnot = []
    for j in range(1, n + 1):
        for s in (1, 2, 3):
            a, b = qubit_index(s, 2 * j - 1), qubit_index(s, 2 * j)
            bell_h.append(a)
            bell_cnot.append((a, b))
    u_ops = []
    for j in range(1, n + 1):
        u_ops.append((qubit_index(1, 2 * j - 1), inp.x[j - 1]))
        u_ops.append((qubit_index(1, 2 * j), inp.y[j - 1]))
    v_ops = []
    for j in range(1, n):
        v_ops.append((qubit_index(1, 2 * j), inp.y[j - 1], inp.x[j]))
    return CircuitPlan(n, tuple(bell_h), tuple(bell_cnot), tuple(u_ops), tuple(v_ops))


def _run_plan_stabilizer(plan: CircuitPlan) -> StabilizerState:
    state = StabilizerState.zero(plan.n_qubits)
    h_mask = 0
    cnot_mask = 0
    for q in plan.bell_h:
        h_mask |= 1 << q
    for c, _ in plan.bell_cnot:
        cnot_mask |= 1 << c
    state.h_layer(h_mask)
    state.cnot_offset_layer(cnot_mask, 3)
    for base, code in plan.u_ops:
        op = u_gate(code)
        if not op.is_trivial():
            state.apply_clifford(op, base)
    m_mask = 0
    for base, yc, xc in plan.v_ops:
        op_y = u_gate(yc)
        op_x = u_gate(xc)
        both_idle = is_idle_code(yc) and is_idle_code(xc)
        if not (both_idle or yc == xc):
            continue
        if not op_y.is_trivial():
            state.apply_clifford(op_y.inverse(), base)
        if not op_x.is_trivial():
            state.apply_clifford(op_x.inverse(), base + 3)
        m_mask |= 0b111 << base
    if m_mask:
        state.cnot_offset_layer(m_mask, 3)
        state.h_layer(m_mask)
    return state


def pre_measurement_state(inp: MppInput) -> StabilizerState:
    """Stabilizer state of the circuit just before readout."""
    return _run_plan_stabilizer(build_circuit(inp))


def _support_system_uncached(packed: str) -> MeasurementSupport:
    return pre_measurement_state(MppInput.from_packed(packed)).support_system()


_support_cache_fn = lru_cache(maxsize=4096)(_support_system_uncached)


def support_system(inp: MppInput) -> MeasurementSupport:
    """Cached parity description of the instance's output support."""
    return _support_cache_fn(inp.packed)


def run(
    inp: MppInput, rng: np.random.Generator, backend: str = "stabilizer"
) -> MppOutput:
    """One sample from the circuit's exact output distribution."""
    perm = output_permutation(inp.n)
    if backend == "stabilizer":
        state = pre_measurement_state(inp)
        qubit_bits = state.measure_all(rng)
    elif backend == "statevector":
        if inp.n > STATEVECTOR_MAX_BLOCKS:
            raise DomainError(
                f"statevector backend capped at {STATEVECTOR_MAX_BLOCKS} blocks"
            )
        sv = StateVector.zero(6 * inp.n)
        sv.apply_gates(build_circuit(inp).gates())
        outcome = sv.sample(rng)
        qubit_bits = np.array([int(c) for c in outcome], dtype=np.uint8)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return MppOutput(inp.n, tuple(int(b) for b in qubit_bits[perm]))


def sample_outputs(inp: MppInput, shots: int, rng: np.random.Generator) -> np.ndarray:
    """(shots, 6n) output-bit samples drawn via the support description."""
    sys_ = support_system(inp)
    qubit_bits = sys_.sample(shots, rng)
    return qubit_bits[:, output_permutation(inp.n)]


def statevector_distribution_for(inp: MppInput) -> dict[str, float]:
    """Exact output distribution (output bit order) from the dense backend."""
    if inp.n > STATEVECTOR_MAX_BLOCKS:
        raise DomainError(f"statevector backend capped at {STATEVECTOR_MAX_BLOCKS} blocks")
    sv = StateVector.zero(6 * inp.n)
    sv.apply_gates(build_circuit(inp).gates())
    perm = output_permutation(inp.n)
    out: dict[str, float] = {}
    for qubit_str, prob in sv.distribution().items():
        bits = "".join(qubit_str[q] for q in perm)
        out[bits] = out.get(bits, 0.0) + prob
    return out


# -- verification --------------------------------------------------------------


def verify_support(inp: MppInput, out: MppOutput) -> bool:
    """True iff the output string has nonzero amplitude for this input."""
    if out.n != inp.n:
        raise ValueError("size mismatch")
    perm = output_permutation(inp.n)
    qubit_bits = np.empty(6 * inp.n, dtype=np.uint8)
    qubit_bits[perm] = np.array(out.bits, dtype=np.uint8)
    return support_system(inp).contains(qubit_bits)


def postselect_support(inp: MppInput, out: MppOutput) -> bool:
    """Same check, done by bit-by-bit postselection on a fresh state."""
    if out.n != inp.n:
        raise ValueError("size mismatch")
    perm = output_permutation(inp.n)
    qubit_bits = np.empty(6 * inp.n, dtype=np.uint8)
    qubit_bits[perm] = np.array(out.bits, dtype=np.uint8)
    state = pre_measurement_state(inp)
    for q in range(6 * inp.n):
        if state.postselect(q, int(qubit_bits[q])) == 0.0:
            return False
    return True


def extract_params(out: MppOutput, k: int, l: int) -> Params:
    """Fold the Bell outcomes between the active columns into parameters."""
    if not 1 <= k < l <= out.n:
        raise ValueError("need 1 <= k < l <= n")
    params = []
    for i in range(3):
        alpha = 1
        beta = 1
        for j in range(k, l):
            alpha *= out.w_values(j)[i]
            beta *= out.z_values(j + 1)[i]
        params.extend((alpha, beta))
    return (params[0], params[1], params[2], params[3], params[4], params[5])


def verify_game_relation(inp: MppInput, out: MppOutput) -> bool:
    """Check the agreement condition between the two active blocks.

    The two quadruples are completed with the parity-determined fourth
    components, so both product conditions hold by construction.  For
    distinct active edges the check is the single intersection parity
    under the extracted parameters; for equal active edges the swapped
    pair carries the same basis on both sides, and the outcomes must
    agree vertex by vertex, each rank with its own parameter monomial.
    """
    if out.n != inp.n:
        raise ValueError("size mismatch")
    k, l = inp.active_pair()
    params = extract_params(out, k, l)
    x_edge = code_to_edge(inp.x[k - 1])
    y_edge = code_to_edge(inp.y[l - 1])
    zv = out.z_values(k)
    wv = out.w_values(l)
    z = (*zv, zv[0] * zv[1] * zv[2] * edge_sign(x_edge))
    w = (*wv, wv[0] * wv[1] * wv[2] * edge_sign(y_edge))
    assert z[0] * z[1] * z[2] * z[3] == edge_sign(x_edge)
    assert w[0] * w[1] * w[2] * w[3] == edge_sign(y_edge)
    if x_edge == y_edge:
        verts = game.pentagram().edge_vertices(x_edge)
        return all(
            z[i] * w[i] == game.vertex_target(verts[i], params) for i in range(4)
        )
    rx = game.order(x_edge, y_edge) - 1
    ry = game.order(y_edge, x_edge) - 1
    return z[rx] * w[ry] == game.pair_target(x_edge, y_edge, params)


# -- sampling the instance set ---------------------------------------------------


def sample_instance_at(n: int, k: int, l: int, rng: np.random.Generator) -> MppInput:
    """Uniform instance with active blocks exactly (k, l)."""
    if n < 2:
        raise ValueError("need n >= 2")
    if not 1 <= k < l <= n:
        raise ValueError("need 1 <= k < l <= n")
    x = ["111"] * n
    y = ["111"] * n
    x[k - 1] = EDGE_CODES[int(rng.integers(5))]
    y[l - 1] = EDGE_CODES[int(rng.integers(5))]
    return MppInput(n, tuple(x), tuple(y))


def sample_instance(n: int, rng: np.random.Generator) -> MppInput:
    """Uniform over the structured instance set."""
    if n < 2:
        raise ValueError("need n >= 2")
    k, l = sorted(int(v) + 1 for v in rng.choice(n, size=2, replace=False))
    return sample_instance_at(n, k, l, rng)


# -- single game round ------------------------------------------------------------


def quantum_round(
    x: int,
    y: int,
    params: Params,
    rng: np.random.Generator,
) -> tuple[tuple[int, int, int, int], tuple[int, int, int, int]]:
    """Play one round of the (generalized) game with the shared-state strategy.

    Three corrected Bell pairs are shared on qubit pairs (s, s+3); each
    side rotates into its edge basis and measures.  The fourth answers
    are the parity-determined completions, so the referee accepts every
    time.
    """
    if x == y:
        raise game.InvalidPair("edges must be distinct")
    state = _round_state(x, y, params).copy()
    bits = [state.measure(q, rng) for q in range(6)]
    zv = tuple(1 - 2 * b for b in bits[:3])
    wv = tuple(1 - 2 * b for b in bits[3:])
    z = (*zv, zv[0] * zv[1] * zv[2] * edge_sign(x))
    w = (*wv, wv[0] * wv[1] * wv[2] * edge_sign(y))
    return z, w


@lru_cache(maxsize=None)
def _round_state_cached(x: int, y: int, params: Params) -> StabilizerState:
    state = StabilizerState.zero(6)
    for s in range(3):
        alpha, beta = params[2 * s], params[2 * s + 1]
        for name, qs in phi_prep_gates(alpha, beta, s, s + 3):
            state.apply(name, qs)
    state.apply_clifford(u_gate(edge_code(x)), 0)
    state.apply_clifford(u_gate(edge_code(y)), 3)
    return state


def _round_state(x: int, y: int, params) -> StabilizerState:
    return _round_state_cached(x, y, game._check_params(params))


def certify_round(x: int, y: int, params: Params) -> bool:
    """Deterministic stabilizer certificate that every round wins.

    On the shared state, the intersection observable measured on both
    sides multiplies to the intersection target, and each side's four
    edge observables multiply to the required edge sign times identity.
    """
    if x == y:
        raise game.InvalidPair("edges must be distinct")
    params = game._check_params(params)
    shared = StabilizerState.zero(6)
    for s in range(3):
        alpha, beta = params[2 * s], params[2 * s + 1]
        for name, qs in phi_prep_gates(alpha, beta, s, s + 3):
            shared.apply(name, qs)
    vertex = game.intersection(x, y).observable
    paired = vertex.shifted(0, 6) * vertex.shifted(3, 6)
    if shared.expect(paired) != game.pair_target(x, y, params):
        return False
    for edge, offset in ((x, 0), (y, 3)):
        prod = PauliWord.identity(6)
        for v in game.pentagram().edge_vertices(edge):
            prod = prod * v.observable.shifted(offset, 6)
        if not prod.is_identity() or shared.expect(prod) != edge_sign(edge):
            return False
    return True
