"""Pauli word algebra against the dense matrix oracle."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pentagram.paulis import PauliWord, commutes, pauli_mul

from conftest import word_matrix

WORDS3 = ["".join(p) for p in itertools.product("IXZY", repeat=3)]


def words_strategy(n=3):
    letters = st.text(alphabet="IXZY", min_size=n, max_size=n)
    phase = st.sampled_from(["", "+", "-", "+i", "-i"])
    return st.builds(lambda p, s: PauliWord.from_string(p + s), phase, letters)


def test_parse_and_render_round_trip():
    for s in ["+ZXX", "-YI", "+iXZ", "-iZZZ", "III"]:
        w = PauliWord.from_string(s)
        assert PauliWord.from_string(str(w)) == w


def test_single_letter_values():
    assert str(PauliWord.single(3, 1, "Y")) == "+IYI"
    assert PauliWord.single(2, 0, "X").weight == 1
    assert PauliWord.identity(4).is_identity()


def test_involution():
    z = PauliWord.from_string("ZII")
    assert (z * z).is_identity()
    assert (z * z).sign == 1


def test_single_qubit_product_phase():
    z = PauliWord.from_string("Z")
    x = PauliWord.from_string("X")
    assert str(z * x) == "+iY"
    assert str(x * z) == "-iY"


def test_edge4_product_is_minus_identity():
    words = [PauliWord.from_string(s) for s in ("ZXX", "XZX", "XXZ", "ZZZ")]
    prod = words[0]
    for w in words[1:]:
        prod = prod * w
    assert prod.is_identity()
    assert prod.sign == -1


@pytest.mark.parametrize("a", WORDS3[:16])
@pytest.mark.parametrize("b", WORDS3[::7])
def test_product_matches_matrix_oracle(a, b):
    wa, wb = PauliWord.from_string(a), PauliWord.from_string(b)
    got = word_matrix(wa * wb)
    want = word_matrix(wa) @ word_matrix(wb)
    assert np.allclose(got, want)


@pytest.mark.parametrize("a", WORDS3[::5])
@pytest.mark.parametrize("b", WORDS3[::11])
def test_commutes_matches_matrix_oracle(a, b):
    wa, wb = PauliWord.from_string(a), PauliWord.from_string(b)
    ma, mb = word_matrix(wa), word_matrix(wb)
    assert commutes(wa, wb) == np.allclose(ma @ mb, mb @ ma)


def test_commutes_examples():
    assert commutes(PauliWord.from_string("ZII"), PauliWord.from_string("IXI"))
    assert commutes(PauliWord.from_string("ZXX"), PauliWord.from_string("XZX"))
    assert not commutes(PauliWord.from_string("ZII"), PauliWord.from_string("XII"))


def test_size_mismatch_raises():
    with pytest.raises(ValueError):
        pauli_mul(PauliWord.identity(2), PauliWord.identity(3))
    with pytest.raises(ValueError):
        commutes(PauliWord.identity(2), PauliWord.identity(3))


@given(words_strategy(), words_strategy(), words_strategy())
@settings(max_examples=200, deadline=None)
def test_product_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(words_strategy())
@settings(max_examples=100, deadline=None)
def test_hermitian_square_is_positive_identity(w):
    w = w.with_sign(1)
    sq = w * w
    assert sq.is_identity()
    assert sq.sign == 1


@given(words_strategy(), words_strategy())
@settings(max_examples=200, deadline=None)
def test_products_commute_up_to_symplectic_sign(a, b):
    ab, ba = a * b, b * a
    assert (ab.x, ab.z) == (ba.x, ba.z)
    if commutes(a, b):
        assert ab.phase == ba.phase
    else:
        assert ab.phase == (ba.phase + 2) % 4


def test_shift_and_kron():
    w = PauliWord.from_string("ZX")
    assert str(w.shifted(1, 4)) == "+IZXI"
    assert str(w.kron(PauliWord.from_string("-Y"))) == "-ZXY"
