"""Bounded fan-in classical circuits and their lightcone structure.

Circuits are layered DAGs of lookup-table gates with unlimited fan-out.
The lightcone of an input bit is computed syntactically as forward
reachability, a superset of the exact flip-correlation relation, which
keeps the disjointness event conservative.  The module also carries the
depth lower-bound formulas and a Monte Carlo harness that scores
adversary circuits against the problem's output support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import mpp
from .errors import DomainError
from .game import EDGE_CODES, Strategy

CLASSICAL_CAP = Fraction(19, 20)
SQUARE_CAP = Fraction(8, 9)
WILSON_Z99 = 2.5758293035489004

_EXHAUSTIVE_INPUT_CAP = 24


@dataclass(frozen=True)
class ClassicalCircuit:
    """Lookup-table circuit with data inputs, optional random wires.

    Wire references: 0..n_inputs+n_random-1 are inputs (data first),
    larger values refer to gates by topological index.  Gate truth
    tables are packed integers; bit k gives the output when the gate
    inputs spell k with the first input as the least significant bit.
    """

    n_inputs: int
    fanins: tuple[tuple[int, ...], ...]
    tables: tuple[int, ...]
    outputs: tuple[int, ...]
    n_random: int = 0

    def __post_init__(self):
        if self.n_inputs < 1 or self.n_random < 0:
            raise ValueError("bad wire counts")
        base = self.total_inputs
        if len(self.tables) != len(self.fanins):
            raise ValueError("one table per gate required")
        for g, fin in enumerate(self.fanins):
            if not fin:
                raise ValueError(f"gate {g} has fan-in 0")
            if any(w < 0 or w >= base + g for w in fin):
                raise ValueError(f"gate {g} reads an unavailable wire")
            if not 0 <= self.tables[g] < (1 << (1 << len(fin))):
                raise ValueError(f"gate {g} table out of range")
        for o in self.outputs:
            if not 0 <= o < base + len(self.fanins):
                raise ValueError(f"bad output wire {o}")

    @property
    def total_inputs(self) -> int:
        return self.n_inputs + self.n_random

    @property
    def n_gates(self) -> int:
        return len(self.fanins)

    @property
    def max_fanin(self) -> int:
        return max((len(f) for f in self.fanins), default=1)

    def gate_layers(self) -> tuple[int, ...]:
        """Layer of each gate: 1 + deepest gate feeding it (inputs are free)."""
        base = self.total_inputs
        layers = []
        for fin in self.fanins:
            deepest = -1
            for w in fin:
                if w >= base:
                    deepest = max(deepest, layers[w - base])
            layers.append(deepest + 1)
        return tuple(layers)

    @property
    def depth(self) -> int:
        layers = self.gate_layers()
        return 1 + max(layers) if layers else 0

    # -- evaluation -----------------------------------------------------

    def eval(self, bits: np.ndarray) -> np.ndarray:
        """Evaluate on (samples, total_inputs) 0/1 rows; returns outputs."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim == 1:
            bits = bits[None, :]
        if bits.shape[1] != self.total_inputs:
            raise ValueError("input width mismatch")
        base = self.total_inputs
        wires = np.empty((bits.shape[0], base + self.n_gates), dtype=np.uint8)
        wires[:, :base] = bits
        for g, fin in enumerate(self.fanins):
            idx = np.zeros(bits.shape[0], dtype=np.int64)
            for pos, w in enumerate(fin):
                idx |= wires[:, w].astype(np.int64) << pos
            table = np.array(
                [(self.tables[g] >> k) & 1 for k in range(1 << len(fin))],
                dtype=np.uint8,
            )
            wires[:, base + g] = table[idx]
        return wires[:, list(self.outputs)]

    def eval_with_random(self, data_bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        data_bits = np.asarray(data_bits, dtype=np.uint8)
        if data_bits.ndim == 1:
            data_bits = data_bits[None, :]
        if data_bits.shape[1] != self.n_inputs:
            raise ValueError("data width mismatch")
        if self.n_random:
            rand = rng.integers(0, 2, size=(data_bits.shape[0], self.n_random), dtype=np.uint8)
            data_bits = np.concatenate([data_bits, rand], axis=1)
        return self.eval(data_bits)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        def ref(w: int) -> str:
            return f"i{w}" if w < self.total_inputs else f"g{w - self.total_inputs}"

        gates = []
        for g, fin in enumerate(self.fanins):
            table = [(self.tables[g] >> k) & 1 for k in range(1 << len(fin))]
            gates.append({"id": f"g{g}", "in": [ref(w) for w in fin], "table": table})
        return {
            "inputs": self.n_inputs,
            "random": self.n_random,
            "gates": gates,
            "outputs": [ref(o) for o in self.outputs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ClassicalCircuit":
        n_inputs = int(data["inputs"])
        n_random = int(data.get("random", 0))
        base = n_inputs + n_random
        ids = {g["id"]: i for i, g in enumerate(data.get("gates", []))}

        def deref(ref: str) -> int:
            if ref.startswith("i"):
                return int(ref[1:])
            if ref.startswith("g"):
                return base + ids[ref]
            raise ValueError(f"bad wire reference {ref!r}")

        fanins = []
        tables = []
        for g in data.get("gates", []):
            fin = tuple(deref(r) for r in g["in"])
            table_bits = g["table"]
            if len(table_bits) != 1 << len(fin):
                raise ValueError(f"gate {g['id']} table length mismatch")
            fanins.append(fin)
            tables.append(sum(b << k for k, b in enumerate(table_bits)))
        outputs = tuple(deref(r) for r in data["outputs"])
        return cls(n_inputs, tuple(fanins), tuple(tables), outputs, n_random)


# -- lightcones -----------------------------------------------------------------


def _reach_sets(c: ClassicalCircuit) -> list[set[int]]:
    """For every wire, the set of input bits that can reach it."""
    base = c.total_inputs
    sets: list[set[int]] = [{i} for i in range(base)]
    for fin in c.fanins:
        acc: set[int] = set()
        for w in fin:
            acc |= sets[w]
        sets.append(acc)
    return sets


@lru_cache(maxsize=64)
def _output_sources(c: ClassicalCircuit) -> tuple[frozenset[int], ...]:
    sets = _reach_sets(c)
    return tuple(frozenset(sets[o]) for o in c.outputs)


def lightcone(c: ClassicalCircuit, input_bit: int) -> frozenset[int]:
    """Output positions reachable from the input bit (syntactic lightcone)."""
    if not 0 <= input_bit < c.total_inputs:
        raise ValueError(f"input bit {input_bit} out of range")
    srcs = _output_sources(c)
    return frozenset(j for j, s in enumerate(srcs) if input_bit in s)


def block_lightcone(c: ClassicalCircuit, bits: tuple[int, ...]) -> frozenset[int]:
    out: frozenset[int] = frozenset()
    for b in bits:
        out |= lightcone(c, b)
    return out


def _blocks(c: ClassicalCircuit) -> int:
    if c.n_inputs % 6 or len(c.outputs) != c.n_inputs:
        raise ValueError("circuit does not have the 6n-bit problem layout")
    return c.n_inputs // 6


def x_block_bits(n: int, k: int) -> tuple[int, int, int]:
    if not 1 <= k <= n:
        raise ValueError("block index out of range")
    return (3 * (k - 1), 3 * (k - 1) + 1, 3 * (k - 1) + 2)


def y_block_bits(n: int, l: int) -> tuple[int, int, int]:
    if not 1 <= l <= n:
        raise ValueError("block index out of range")
    base = 3 * n + 3 * (l - 1)
    return (base, base + 1, base + 2)


def disjoint_event(c: ClassicalCircuit, k: int, l: int) -> bool:
    """True iff the (k, l) lightcones decouple the two active blocks.

    Requires: the x_k and y_l lightcones share no output bit, no w_l bit
    lies in the x_k lightcone, and no z_k bit lies in the y_l lightcone.
    """
    n = _blocks(c)
    if not 1 <= k < l <= n:
        raise ValueError("need 1 <= k < l <= n")
    lx = block_lightcone(c, x_block_bits(n, k))
    ly = block_lightcone(c, y_block_bits(n, l))
    if lx & ly:
        return False
    w_positions = set(range(3 * n + 3 * (l - 1), 3 * n + 3 * l))
    z_positions = set(range(3 * (k - 1), 3 * k))
    return not (lx & w_positions) and not (ly & z_positions)


def prob_disjoint(c: ClassicalCircuit) -> Fraction:
    """Exact probability of the disjointness event over uniform (k, l).

    Uniform sampling of structured instances induces uniform (k, l), and
    the event depends only on the pair, so counting pairs is exact.
    """
    n = _blocks(c)
    srcs = _output_sources(c)
    bad: set[tuple[int, int]] = set()
    # x-block and y-block sources per output position; random wires have
    # ids >= 6n and never count toward the block layout
    x_of = [sorted({b // 3 + 1 for b in s if b < 3 * n}) for s in srcs]
    y_of = [sorted({(b - 3 * n) // 3 + 1 for b in s if 3 * n <= b < 6 * n}) for s in srcs]
    for pos in range(6 * n):
        xs, ys = x_of[pos], y_of[pos]
        for k in xs:
            for l in ys:
                if k < l:
                    bad.add((k, l))  # overlapping lightcones
            if pos >= 3 * n:
                l = (pos - 3 * n) // 3 + 1
                if k < l:
                    bad.add((k, l))  # w_l inside x_k lightcone
        if pos < 3 * n:
            k = pos // 3 + 1
            for l in ys:
                if k < l:
                    bad.add((k, l))  # z_k inside y_l lightcone
    pairs = n * (n - 1) // 2
    return Fraction(pairs - len(bad), pairs)


# -- exact correlation oracle ------------------------------------------------------


@lru_cache(maxsize=32)
def _full_output_table(c: ClassicalCircuit) -> np.ndarray:
    """Outputs on every input assignment; rows indexed by the input word."""
    total = c.total_inputs
    if total > _EXHAUSTIVE_INPUT_CAP:
        raise DomainError(f"exhaustive check capped at {_EXHAUSTIVE_INPUT_CAP} inputs")
    count = 1 << total
    assigns = np.arange(count, dtype=np.int64)
    bits = np.empty((count, total), dtype=np.uint8)
    for i in range(total):
        bits[:, i] = (assigns >> i) & 1
    return c.eval(bits)


def correlated_exact(c: ClassicalCircuit, input_bit: int, output_bit: int) -> bool:
    """True iff some assignment flips the output when the input bit flips."""
    if not 0 <= input_bit < c.total_inputs:
        raise ValueError("input bit out of range")
    if not 0 <= output_bit < len(c.outputs):
        raise ValueError("output bit out of range")
    table = _full_output_table(c)
    flipped = np.arange(table.shape[0]) ^ (1 << input_bit)
    return bool(np.any(table[:, output_bit] != table[flipped, output_bit]))


def exact_lightcone(c: ClassicalCircuit, input_bit: int) -> frozenset[int]:
    """Semantic lightcone from the exhaustive flip test (small circuits)."""
    table = _full_output_table(c)
    flipped = np.arange(table.shape[0]) ^ (1 << input_bit)
    diff = np.any(table != table[flipped], axis=0)
    return frozenset(int(j) for j in np.nonzero(diff)[0])


# -- depth bound formulas -----------------------------------------------------------


def depth_bound_pentagram(n: int, fanin: int, p: float) -> float:
    """Lower bound on circuit depth from pentagram-problem success p > 19/20."""
    if n < 2 or fanin < 2:
        raise DomainError("need n >= 2 and fan-in bound >= 2")
    if not p > float(CLASSICAL_CAP):
        raise DomainError(f"bound undefined for p <= {CLASSICAL_CAP}")
    return 0.5 * math.log(n / 216 * (p - float(CLASSICAL_CAP)), fanin)


def depth_bound_square(n: int, fanin: int, p: float) -> float:
    """Analogous bound for the square-game problem, valid for p > 8/9."""
    if n < 2 or fanin < 2:
        raise DomainError("need n >= 2 and fan-in bound >= 2")
    if not p > float(SQUARE_CAP):
        raise DomainError(f"bound undefined for p <= {SQUARE_CAP}")
    return 0.5 * math.log(n / 80 * (p - float(SQUARE_CAP)), fanin)


# -- circuit generators -----------------------------------------------------------


def identity_circuit(n: int) -> ClassicalCircuit:
    """Depth-0 layout: every output wired straight to its input bit."""
    return ClassicalCircuit(6 * n, (), (), tuple(range(6 * n)))


def random_nc0_circuit(
    n: int,
    fanin_bound: int,
    depth: int,
    rng: np.random.Generator,
    n_random: int = 0,
    width: int | None = None,
) -> ClassicalCircuit:
    """Random layered circuit with exact depth and fan-in at most B.

    Each layer-d gate reads at least one gate from layer d-1 (so the
    inferred depth is exactly ``depth``); remaining wires come from any
    earlier layer or the inputs.  The final layer has one gate per
    output bit.
    """
    if fanin_bound < 2 or depth < 1:
        raise DomainError("need fan-in bound >= 2 and depth >= 1")
    n_out = 6 * n
    width = n_out if width is None else width
    base = n_out + n_random
    fanins: list[tuple[int, ...]] = []
    tables: list[int] = []
    prev_layer: list[int] = []  # wire ids of previous layer's gates
    for d in range(depth):
        n_gates = n_out if d == depth - 1 else width
        cur: list[int] = []
        pool_earlier = base + len(fanins)  # inputs and all earlier gates
        for _ in range(n_gates):
            f = int(rng.integers(1, fanin_bound + 1)) if d == 0 else fanin_bound
            if d == 0:
                wires = [int(w) for w in rng.integers(0, base, size=f)]
            else:
                anchor = prev_layer[int(rng.integers(len(prev_layer)))]
                wires = [anchor] + [
                    int(w) for w in rng.integers(0, pool_earlier, size=f - 1)
                ]
            wires = list(dict.fromkeys(wires))  # drop duplicate reads
            gid = base + len(fanins)
            fanins.append(tuple(wires))
            tables.append(int(rng.integers(0, 1 << (1 << len(wires)))))
            cur.append(gid)
        prev_layer = cur
    outputs = tuple(prev_layer)
    return ClassicalCircuit(n_out, tuple(fanins), tuple(tables), outputs, n_random)


@lru_cache(maxsize=1)
def optimal_lookup_pair() -> tuple[Strategy, Strategy, Fraction]:
    """Best deterministic block-local answers for structured instances.

    Scores a pair of per-edge three-bit answer tables against the output
    support with all other blocks constant: distinct active edges need
    the single intersection parity, equal active edges need agreement at
    every rank.  Exhausts all 8**5 first-player tables with best
    responses per second-player edge.  The optimum works out to 23/25,
    strictly below the distinct-pair game bound.
    """
    import itertools as _it

    from . import game as _g

    triples = list(_it.product((1, -1), repeat=3))
    win: dict[tuple[int, int], np.ndarray] = {}
    for x in range(5):
        for y in range(5):
            tab = np.zeros((8, 8), dtype=np.uint8)
            for i, zt in enumerate(triples):
                z = (*zt, zt[0] * zt[1] * zt[2] * _g.edge_sign(x))
                for j, wt in enumerate(triples):
                    w = (*wt, wt[0] * wt[1] * wt[2] * _g.edge_sign(y))
                    if x == y:
                        ok = all(z[r] == w[r] for r in range(3))
                    else:
                        rx, ry = _g.order(x, y) - 1, _g.order(y, x) - 1
                        ok = z[rx] * w[ry] == _g.pair_target(x, y, _g.ALL_ONES)
                    tab[i, j] = ok
            win[(x, y)] = tab
    size = 8**5
    idx = np.arange(size, dtype=np.int64)
    digits = [(idx >> (3 * e)) & 7 for e in range(5)]
    total = np.zeros(size, dtype=np.int64)
    best_w = []
    for y in range(5):
        cnt = np.zeros((size, 8), dtype=np.uint8)
        for x in range(5):
            cnt += win[(x, y)][digits[x]]
        total += cnt.max(axis=1)
        best_w.append(cnt)
    a_best = int(total.argmax())

    def complete(t: tuple[int, int, int], edge: int) -> tuple[int, int, int, int]:
        return (*t, t[0] * t[1] * t[2] * _g.edge_sign(edge))

    alice = Strategy(
        tuple(
            complete(triples[(a_best >> (3 * e)) & 7], e) for e in range(5)
        ),
        "A",
    )
    bob = Strategy(
        tuple(
            complete(triples[int(best_w[y][a_best].argmax())], y) for y in range(5)
        ),
        "B",
    )
    return alice, bob, Fraction(int(total[a_best]), 25)


def _code_tables(strategy: Strategy, rank: int) -> int:
    """Truth table over a 3-bit code for one answer bit of a strategy."""
    table = 0
    for code_val in range(8):
        code = format(code_val, "03b")
        if code in EDGE_CODES:
            edge = EDGE_CODES.index(code)
            value = strategy.answer(edge)[rank]
            bit = (1 - value) // 2
        else:
            bit = 0
        # gate index convention: first input = LSB; code chars are MSB-first
        idx = int(code[::-1], 2)
        table |= bit << idx
    return table


def strategy_circuit(
    n: int,
    pair: tuple[Strategy, Strategy],
    alt_pair: tuple[Strategy, Strategy] | None = None,
) -> ClassicalCircuit:
    """Depth-1 adversary answering each block from its own input block.

    Every z-block bit is a lookup of the corresponding x-code, w-blocks
    likewise from y-codes.  With ``alt_pair`` a shared random wire picks
    between the two strategy pairs round by round.
    """
    n_out = 6 * n
    n_random = 1 if alt_pair is not None else 0
    base = n_out + n_random
    fanins: list[tuple[int, ...]] = []
    tables: list[int] = []

    def add_gate(block_bits: tuple[int, int, int], strat: Strategy, alt: Strategy | None, rank: int) -> None:
        t0 = _code_tables(strat, rank)
        if alt is None:
            fanins.append(block_bits)
            tables.append(t0)
            return
        t1 = _code_tables(alt, rank)
        # random wire is the high input bit: low half t0, high half t1
        fanins.append(block_bits + (n_out,))
        tables.append(t0 | (t1 << 8))

    for k in range(1, n + 1):
        bits = x_block_bits(n, k)
        for rank in range(3):
            add_gate(bits, pair[0], alt_pair[0] if alt_pair else None, rank)
    for l in range(1, n + 1):
        bits = y_block_bits(n, l)
        for rank in range(3):
            add_gate(bits, pair[1], alt_pair[1] if alt_pair else None, rank)
    outputs = tuple(base + g for g in range(len(fanins)))
    return ClassicalCircuit(n_out, tuple(fanins), tuple(tables), outputs, n_random)


# -- adversary evaluation -----------------------------------------------------------


def wilson_interval(wins: int, trials: int, z: float = WILSON_Z99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    phat = wins / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class AdversaryReport:
    """Monte Carlo scorecard of a classical circuit on structured inputs."""

    n: int
    fanin_bound: int
    depth: int
    samples: int
    wins: int
    event_samples: int
    event_wins: int
    event_probability_exact: Fraction
    ci_z: float = WILSON_Z99

    @property
    def success_rate(self) -> float:
        return self.wins / self.samples if self.samples else 0.0

    @property
    def success_given_event(self) -> float:
        return self.event_wins / self.event_samples if self.event_samples else 0.0

    @property
    def event_rate(self) -> float:
        return self.event_samples / self.samples if self.samples else 0.0

    @property
    def success_ci(self) -> tuple[float, float]:
        return wilson_interval(self.wins, self.samples, self.ci_z)

    @property
    def success_given_event_ci(self) -> tuple[float, float]:
        return wilson_interval(self.event_wins, self.event_samples, self.ci_z)

    @property
    def given_event_halfwidth(self) -> float:
        lo, hi = self.success_given_event_ci
        return (hi - lo) / 2

    def to_json(self) -> dict:
        lo, hi = self.success_ci
        elo, ehi = self.success_given_event_ci
        return {
            "n": self.n,
            "fanin_bound": self.fanin_bound,
            "depth": self.depth,
            "samples": self.samples,
            "wins": self.wins,
            "success_rate": self.success_rate,
            "success_ci99": [lo, hi],
            "event_probability_exact": str(self.event_probability_exact),
            "event_samples": self.event_samples,
            "event_wins": self.event_wins,
            "success_given_event": self.success_given_event,
            "success_given_event_ci99": [elo, ehi],
        }


def eval_adversary(
    c: ClassicalCircuit,
    samples: int,
    rng: np.random.Generator,
) -> AdversaryReport:
    """Score a circuit on uniform structured instances.

    Each output is checked for membership in the quantum circuit's
    support; rates are reported overall and conditioned on the lightcone
    disjointness event of the sampled (k, l).
    """
    n = _blocks(c)
    if n < 2:
        raise ValueError("need at least two blocks")
    ks = np.empty(samples, dtype=np.int64)
    ls = np.empty(samples, dtype=np.int64)
    for i in range(samples):
        a, b = rng.choice(n, size=2, replace=False)
        ks[i], ls[i] = (a, b) if a < b else (b, a)
    codes = rng.integers(0, 5, size=(samples, 2))
    data = np.ones((samples, 6 * n), dtype=np.uint8)
    rows = np.arange(samples)
    for bit in range(3):
        xcol = 3 * ks + bit
        ycol = 3 * n + 3 * ls + bit
        data[rows, xcol] = [int(EDGE_CODES[c0][bit]) for c0 in codes[:, 0]]
        data[rows, ycol] = [int(EDGE_CODES[c1][bit]) for c1 in codes[:, 1]]
    outputs = c.eval_with_random(data, rng)

    event_cache: dict[tuple[int, int], bool] = {}
    wins = 0
    event_samples = 0
    event_wins = 0
    for i in range(samples):
        k, l = int(ks[i]) + 1, int(ls[i]) + 1
        inp = mpp.MppInput.from_packed("".join(str(b) for b in data[i]))
        out = mpp.MppOutput(n, tuple(int(b) for b in outputs[i]))
        win = mpp.verify_support(inp, out)
        wins += win
        if (k, l) not in event_cache:
            event_cache[(k, l)] = disjoint_event(c, k, l)
        if event_cache[(k, l)]:
            event_samples += 1
            event_wins += win
    return AdversaryReport(
        n=n,
        fanin_bound=c.max_fanin,
        depth=c.depth,
        samples=samples,
        wins=wins,
        event_samples=event_samples,
        event_wins=event_wins,
        event_probability_exact=prob_disjoint(c),
    )
