"""The magic pentagram game: hypergraph, referee, and strategy search.

Ten vertices carry three-qubit observables; five hyperedges of four
vertices each pairwise intersect in exactly one vertex.  A player's
answer for an edge is a +-1 assignment to its four vertices, listed in
the rank order the edge assigns to its four partner edges.  The referee
checks the per-edge product parity and the agreement condition at the
shared vertex, generalized by six +-1 parameters entering through the
intersection observable's letters.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError
from .paulis import PauliWord

N_EDGES = 5
EDGE_CODES = ("000", "001", "010", "011", "100")
IDLE_CODES = ("101", "110", "111")

Params = tuple[int, int, int, int, int, int]
ALL_ONES: Params = (1, 1, 1, 1, 1, 1)

Assignment = tuple[int, int, int, int]

_VERTEX_OBSERVABLES = (
    "XII", "IXI", "IIX", "ZII", "IZI", "IIZ", "ZXX", "XZX", "XXZ", "ZZZ",
)
_EDGE_MEMBERS = {
    0: ("ZII", "IXI", "IIX", "ZXX"),
    1: ("XII", "IZI", "IIX", "XZX"),
    2: ("XII", "IXI", "IIZ", "XXZ"),
    3: ("ZII", "IZI", "IIZ", "ZZZ"),
    4: ("ZXX", "XZX", "XXZ", "ZZZ"),
}


class InvalidPair(DomainError):
    """The two edges must be distinct."""


def edge_code(edge: int) -> str:
    _check_edge(edge)
    return EDGE_CODES[edge]


def code_to_edge(code: str) -> int:
    if code in IDLE_CODES:
        raise ValueError(f"{code} is an idle code, not an edge")
    try:
        return EDGE_CODES.index(code)
    except ValueError:
        raise ValueError(f"bad edge code {code!r}") from None


def is_idle_code(code: str) -> bool:
    if code not in EDGE_CODES and code not in IDLE_CODES:
        raise ValueError(f"bad code {code!r}")
    return code in IDLE_CODES


def edge_sign(edge: int) -> int:
    """Required product of a player's four answers on the edge."""
    _check_edge(edge)
    return -1 if edge == 4 else 1


def _check_edge(edge: int) -> None:
    if edge not in range(N_EDGES):
        raise ValueError(f"edge must be in 0..4, got {edge}")


def order(s: int, t: int) -> int:
    """Rank in 1..4 that edge s gives to its vertex shared with edge t."""
    _check_edge(s)
    _check_edge(t)
    if s == t:
        raise InvalidPair("edges must be distinct")
    return sorted(set(range(N_EDGES)) - {s}).index(t) + 1


@dataclass(frozen=True)
class Vertex:
    vid: int
    observable: PauliWord
    edges: frozenset[int]


@dataclass(frozen=True)
class Pentagram:
    """Canonical hypergraph; edges list vertex ids in rank order."""

    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[int, int, int, int], ...]

    def edge_vertices(self, s: int) -> tuple[Vertex, ...]:
        _check_edge(s)
        return tuple(self.vertices[v] for v in self.edges[s])

    def intersection(self, x: int, y: int) -> Vertex:
        _check_edge(x)
        _check_edge(y)
        if x == y:
            raise InvalidPair("edges must be distinct")
        return self.vertices[self.edges[x][order(x, y) - 1]]

    def other_edge(self, vertex: Vertex, edge: int) -> int:
        (other,) = vertex.edges - {edge}
        return other


def _validate(p: Pentagram) -> None:
    for v in p.vertices:
        if len(v.edges) != 2:
            raise AssertionError(f"vertex {v.vid} lies on {len(v.edges)} edges")
        if v.observable.x & v.observable.z:
            raise AssertionError(f"vertex {v.vid} observable has a Y factor")
        if v.observable.sign != 1:
            raise AssertionError(f"vertex {v.vid} observable has sign -1")
    for x, y in itertools.combinations(range(N_EDGES), 2):
        shared = set(p.edges[x]) & set(p.edges[y])
        if len(shared) != 1:
            raise AssertionError(f"edges {x},{y} share {len(shared)} vertices")
    sign_product = 1
    for s in range(N_EDGES):
        words = [v.observable for v in p.edge_vertices(s)]
        for a, b in itertools.combinations(words, 2):
            if not a.commutes(b):
                raise AssertionError(f"edge {s} observables do not commute")
        prod = words[0]
        for wrd in words[1:]:
            prod = prod * wrd
        if not prod.is_identity() or prod.sign != edge_sign(s):
            raise AssertionError(f"edge {s} product is {prod}, want {edge_sign(s)}*I")
        sign_product *= edge_sign(s)
    if sign_product != -1:
        raise AssertionError("edge sign product must be -1")
    # the edge0/edge4 intersection pins the parameter convention: Z on
    # qubit 1, X on qubits 2 and 3
    v04 = p.intersection(0, 4)
    if v04.observable.letters() != "ZXX":
        raise AssertionError("edge0/edge4 intersection must be ZXX")


def build_pentagram() -> Pentagram:
    """The canonical pentagram; structural invariants are checked."""
    vid = {obs: i for i, obs in enumerate(_VERTEX_OBSERVABLES)}
    edges_of: dict[str, set[int]] = {obs: set() for obs in _VERTEX_OBSERVABLES}
    for e, members in _EDGE_MEMBERS.items():
        for obs in members:
            edges_of[obs].add(e)
    vertices = tuple(
        Vertex(i, PauliWord.from_string(obs), frozenset(edges_of[obs]))
        for i, obs in enumerate(_VERTEX_OBSERVABLES)
    )
    ranked = []
    for s in range(N_EDGES):
        members = set(_EDGE_MEMBERS[s])
        row = []
        for t in sorted(set(range(N_EDGES)) - {s}):
            (shared,) = members & set(_EDGE_MEMBERS[t])
            row.append(vid[shared])
        ranked.append(tuple(row))
    p = Pentagram(vertices, tuple(ranked))
    _validate(p)
    return p


_PENTAGRAM: Pentagram | None = None


def pentagram() -> Pentagram:
    global _PENTAGRAM
    if _PENTAGRAM is None:
        _PENTAGRAM = build_pentagram()
    return _PENTAGRAM


def intersection(x: int, y: int) -> Vertex:
    """The unique vertex shared by two distinct edges."""
    return pentagram().intersection(x, y)


def _check_params(params: Sequence[int]) -> Params:
    t = tuple(params)
    if len(t) != 6 or any(v not in (1, -1) for v in t):
        raise ValueError("params must be six values in {+1,-1}")
    return t  # type: ignore[return-value]


def vertex_target(vertex: Vertex, params: Sequence[int]) -> int:
    """Parameter monomial of a vertex observable.

    X letters pull in the alpha parameters, Z letters the betas:
    params = (a1, b1, a2, b2, a3, b3).
    """
    params = _check_params(params)
    out = 1
    for j in range(3):
        letter = vertex.observable.letter(j)
        if letter == "X":
            out *= params[2 * j]
        elif letter == "Z":
            out *= params[2 * j + 1]
    return out


def pair_target(x: int, y: int, params: Sequence[int]) -> int:
    """Required product of the two intersection answers."""
    return vertex_target(intersection(x, y), params)


def _check_assignment(a: Sequence[int]) -> Assignment:
    t = tuple(a)
    if len(t) != 4 or any(v not in (1, -1) for v in t):
        raise ValueError("assignment must be four values in {+1,-1}")
    return t  # type: ignore[return-value]


def referee(
    x: int,
    y: int,
    z: Sequence[int],
    w: Sequence[int],
    params: Sequence[int] = ALL_ONES,
) -> bool:
    """True iff both parity conditions and the agreement condition hold."""
    _check_edge(x)
    _check_edge(y)
    if x == y:
        raise InvalidPair("edges must be distinct")
    z = _check_assignment(z)
    w = _check_assignment(w)
    if z[0] * z[1] * z[2] * z[3] != edge_sign(x):
        return False
    if w[0] * w[1] * w[2] * w[3] != edge_sign(y):
        return False
    return z[order(x, y) - 1] * w[order(y, x) - 1] == pair_target(x, y, params)


def violated_edges(labeling: Mapping[int, int]) -> set[int]:
    """Edges whose vertex-value product misses the required sign.

    The labeling must cover all ten vertices; the result always has odd
    cardinality, so no labeling satisfies every edge.
    """
    p = pentagram()
    missing = [v.vid for v in p.vertices if v.vid not in labeling]
    if missing:
        raise ValueError(f"labeling misses vertices {missing}")
    bad = set()
    for s in range(N_EDGES):
        prod = 1
        for vid in p.edges[s]:
            val = labeling[vid]
            if val not in (1, -1):
                raise ValueError(f"labeling value {val} at vertex {vid}")
            prod *= val
        if prod != edge_sign(s):
            bad.add(s)
    return bad


# -- strategies ----------------------------------------------------------


@dataclass(frozen=True)
class Strategy:
    """Per-edge answer table for one player, in rank order."""

    assignments: tuple[Assignment, ...]
    player: str = "A"

    def __post_init__(self):
        if len(self.assignments) != N_EDGES:
            raise ValueError("strategy must cover all five edges")
        for a in self.assignments:
            _check_assignment(a)

    def answer(self, edge: int) -> Assignment:
        _check_edge(edge)
        return self.assignments[edge]

    def to_json(self) -> dict:
        return {
            "player": self.player,
            "edges": {str(e): list(self.assignments[e]) for e in range(N_EDGES)},
        }

    @classmethod
    def from_json(cls, data: dict) -> "Strategy":
        try:
            player = data.get("player", "A")
            edges = data["edges"]
            assignments = tuple(
                _check_assignment(edges[str(e)]) for e in range(N_EDGES)
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed strategy object: {exc}") from exc
        return cls(assignments, player)

    @classmethod
    def constant(cls, value: int = 1, player: str = "A") -> "Strategy":
        return cls(((value,) * 4,) * N_EDGES, player)

    @classmethod
    def random(cls, rng: np.random.Generator, player: str = "A") -> "Strategy":
        vals = 1 - 2 * rng.integers(0, 2, size=(N_EDGES, 4))
        return cls(tuple(tuple(int(v) for v in row) for row in vals), player)


def strategy_pair_to_json(a: Strategy, b: Strategy) -> str:
    return json.dumps([a.to_json(), b.to_json()], indent=2)


def strategy_pair_from_json(text: str) -> tuple[Strategy, Strategy]:
    data = json.loads(text)
    if isinstance(data, dict):
        s = Strategy.from_json(data)
        return s, s
    if not isinstance(data, list) or len(data) != 2:
        raise ValueError("expected one strategy object or a list of two")
    return Strategy.from_json(data[0]), Strategy.from_json(data[1])


def win_probability(
    a: Strategy, b: Strategy, params: Sequence[int] = ALL_ONES
) -> Fraction:
    """Exact win probability over the 20 ordered edge pairs."""
    params = _check_params(params)
    wins = sum(
        referee(x, y, a.answer(x), b.answer(y), params)
        for x in range(N_EDGES)
        for y in range(N_EDGES)
        if x != y
    )
    return Fraction(wins, 20)


# -- exhaustive search -----------------------------------------------------

_ASSIGN_BY_INDEX = tuple(itertools.product((1, -1), repeat=4))


def _win_tables(params: Params) -> dict[tuple[int, int], np.ndarray]:
    """16x16 win tables per ordered edge pair, indexed by assignment id."""
    tabs = {}
    for x in range(N_EDGES):
        for y in range(N_EDGES):
            if x == y:
                continue
            t = np.zeros((16, 16), dtype=np.uint8)
            for i, z in enumerate(_ASSIGN_BY_INDEX):
                if z[0] * z[1] * z[2] * z[3] != edge_sign(x):
                    continue
                rx, ry = order(x, y) - 1, order(y, x) - 1
                target = pair_target(x, y, params)
                for j, w in enumerate(_ASSIGN_BY_INDEX):
                    if w[0] * w[1] * w[2] * w[3] != edge_sign(y):
                        continue
                    t[i, j] = z[rx] * w[ry] == target
            tabs[(x, y)] = t
    return tabs


def brute_force_optimum(
    params: Sequence[int] = ALL_ONES,
) -> tuple[Fraction, tuple[Strategy, Strategy]]:
    """Exact maximum win probability over all deterministic strategy pairs.

    Enumerates all 16**5 first-player tables; the second player's best
    response decomposes edge by edge, since each of their edges meets a
    fixed set of four first-player edges.  Probabilistic strategies are
    convex mixtures of deterministic ones, so the maximum also bounds
    them.
    """
    params = _check_params(params)
    tabs = _win_tables(params)
    size = 16**N_EDGES
    idx = np.arange(size, dtype=np.int64)
    digits = [(idx >> (4 * e)) & 15 for e in range(N_EDGES)]
    total = np.zeros(size, dtype=np.int64)
    best_w = []
    for y in range(N_EDGES):
        counts = np.zeros((size, 16), dtype=np.uint8)
        for x in range(N_EDGES):
            if x != y:
                counts += tabs[(x, y)][digits[x]]
        total += counts.max(axis=1)
        best_w.append(counts)
    a_best = int(total.argmax())
    max_wins = int(total[a_best])
    alice = Strategy(
        tuple(_ASSIGN_BY_INDEX[(a_best >> (4 * e)) & 15] for e in range(N_EDGES)),
        "A",
    )
    bob = Strategy(
        tuple(
            _ASSIGN_BY_INDEX[int(best_w[y][a_best].argmax())] for y in range(N_EDGES)
        ),
        "B",
    )
    return Fraction(max_wins, 20), (alice, bob)


# -- constructive strategies -----------------------------------------------


def _solve_gf2(rows: list[tuple[int, int]]) -> int:
    """Solve a GF(2) system given as (coefficient mask, rhs bit) rows."""
    pivots: list[tuple[int, int, int]] = []
    for mask, rhs in rows:
        for pmask, pbit, prhs in pivots:
            if (mask >> pbit) & 1:
                mask ^= pmask
                rhs ^= prhs
        if mask == 0:
            if rhs:
                raise ValueError("inconsistent system")
            continue
        pbit = mask.bit_length() - 1
        for i, (pm, pb, pr) in enumerate(pivots):
            if (pm >> pbit) & 1:
                pivots[i] = (pm ^ mask, pb, pr ^ rhs)
        pivots.append((mask, pbit, rhs))
    # free variables are zero, so each pivot carries just its rhs
    solution = 0
    for _, pbit, prhs in pivots:
        if prhs:
            solution |= 1 << pbit
    return solution


def mirror_strategy_pair(params: Sequence[int] = ALL_ONES) -> tuple[Strategy, Strategy]:
    """A deterministic pair winning every round.

    The first player's table satisfies the row parities and, jointly, the
    cross parities induced by reading each vertex from its other edge.
    The second player answers each vertex with the first player's value
    from the vertex's other edge, times the intersection target, so the
    agreement condition holds identically and all parities check out.
    """
    params = _check_params(params)
    p = pentagram()
    var_id = {}
    for x in range(N_EDGES):
        for vid in p.edges[x]:
            var_id[(x, vid)] = len(var_id)
    rows: list[tuple[int, int]] = []
    for x in range(N_EDGES):
        mask = 0
        for vid in p.edges[x]:
            mask |= 1 << var_id[(x, vid)]
        rows.append((mask, 1 if edge_sign(x) == -1 else 0))
    for y in range(N_EDGES):
        mask = 0
        rhs_sign = edge_sign(y)
        for vid in p.edges[y]:
            other = p.other_edge(p.vertices[vid], y)
            mask |= 1 << var_id[(other, vid)]
            rhs_sign *= pair_target(other, y, params)
        rows.append((mask, 1 if rhs_sign == -1 else 0))
    bits = _solve_gf2(rows)
    value = {
        key: -1 if (bits >> i) & 1 else 1 for key, i in var_id.items()
    }
    alice = Strategy(
        tuple(
            tuple(value[(x, vid)] for vid in p.edges[x]) for x in range(N_EDGES)
        ),
        "A",
    )
    bob_rows = []
    for y in range(N_EDGES):
        row = []
        for vid in p.edges[y]:
            other = p.other_edge(p.vertices[vid], y)
            row.append(value[(other, vid)] * pair_target(other, y, params))
        bob_rows.append(tuple(row))
    bob = Strategy(tuple(bob_rows), "B")
    return alice, bob


def near_optimal_strategy_pair(
    params: Sequence[int] = ALL_ONES,
) -> tuple[Strategy, Strategy]:
    """A deterministic pair losing exactly two of the twenty rounds.

    Flipping the second player's answers at two vertices of one edge
    keeps that row's parity but breaks agreement for the two ordered
    pairs whose intersection sits at the flipped vertices.
    """
    alice, bob = mirror_strategy_pair(params)
    g = 0
    row = list(bob.answer(g))
    row[0] = -row[0]
    row[1] = -row[1]
    assignments = list(bob.assignments)
    assignments[g] = tuple(row)
    return alice, Strategy(tuple(assignments), "B")
