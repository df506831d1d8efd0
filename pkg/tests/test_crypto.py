import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oor.bits import Bits
from oor.crypto import (
    KeySchedule,
    SecrecyParams,
    SecrecyVerdict,
    draw_key_specs,
    key_entropy_h1,
    layer_encrypt,
    peel,
    perfect_secrecy_check,
    session_key,
    xor_combine,
)
from oor.errors import KeyScheduleError
from oor.gf2 import DegreeRange, GeneratorPolynomial, LfsrSpec

B = Bits.from_str
bits64 = st.integers(1, 2**64 - 1).map(lambda v: Bits(v, 64))


def truth_table_xor(a: str, b: str) -> str:
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


@pytest.mark.parametrize("a,b", [("0000", "0000"), ("1010", "1010"), ("1010", "0110")])
def test_xor_examples(a, b):
    assert str(xor_combine(B(a), B(b))) == truth_table_xor(a, b)


def test_xor_length_mismatch():
    with pytest.raises(ValueError):
        xor_combine(B("10"), B("101"))


def test_bits_roundtrip():
    b = B("1100101")
    assert str(b) == "1100101" and b[0] == 1 and b[2] == 0
    assert Bits.from_hex(b.to_hex(), len(b)) == b
    assert B("10") + B("011") == B("10011")


def test_layer_encrypt_examples():
    m = B("1011")
    assert layer_encrypt(m, []) == m
    assert str(layer_encrypt(B("1010"), [B("0110")])) == "1100"
    assert str(peel(B("1100"), B("0110"))) == "1010"


@given(bits64, bits64, bits64)
def test_layer_order_free(m, c1, c2):
    if len({m, c1, c2}) < 3:
        return
    assert layer_encrypt(m, [c1, c2]) == (m ^ c2) ^ c1
    assert peel(layer_encrypt(m, [c1]), c1) == m


@given(st.lists(bits64, min_size=1, max_size=8, unique=True), bits64, st.randoms())
def test_peel_any_order(keys, m, rnd):
    if m in keys:
        return
    x = layer_encrypt(m, keys)
    order = list(keys)
    rnd.shuffle(order)
    for k in order:
        x = peel(x, k)
    assert x == m


@pytest.mark.parametrize(
    "keys", [[B("0000")], [B("0110"), B("0110")], [B("01"), B("011")]]
)
def test_key_schedule_invariants(keys):
    with pytest.raises(KeyScheduleError):
        KeySchedule(tuple(keys))


def test_key_equal_to_plaintext_rejected():
    with pytest.raises(KeyScheduleError):
        layer_encrypt(B("0110"), [B("0110")])


def test_session_key_refuses_wrap():
    spec = LfsrSpec(GeneratorPolynomial.from_exponents(3, 1, 0), B("001"))
    assert len(session_key(spec, 6)) == 6
    with pytest.raises(KeyScheduleError):
        session_key(spec, 7)


def test_draw_key_specs_distinct_and_avoid():
    rng = random.Random(5)
    m = Bits.random(16, rng)
    specs, sched = draw_key_specs(10, 16, rng, DegreeRange(5, 6), avoid=m)
    assert len(specs) == len(sched) == 10
    assert len(set(sched)) == 10 and m not in sched.keys
    assert all(5 <= s.polynomial.degree <= 6 for s in specs)


def test_draw_key_specs_collisions_redrawn():
    # 2 polynomials * 7 seeds of degree 3 give only 11 distinct 4-bit keys
    _, sched = draw_key_specs(11, 4, random.Random(0), DegreeRange(3, 3))
    assert len(set(sched)) == 11
    with pytest.raises(KeyScheduleError):
        draw_key_specs(12, 4, random.Random(0), DegreeRange(3, 3))


@pytest.mark.parametrize(
    "g0,g1,want",
    [(2, 2, math.log2(3)), (3, 3, math.log2(14)), (2, 3, math.log2(3) + math.log2(14))],
)
def test_h1(g0, g1, want):
    assert key_entropy_h1(DegreeRange(g0, g1)) == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize(
    "L,want",
    [(3, SecrecyVerdict.HOLDS), (10, SecrecyVerdict.FAILS_LENGTH), (7, SecrecyVerdict.FAILS_ENTROPY)],
)
def test_secrecy_examples(L, want):
    assert perfect_secrecy_check(SecrecyParams(L, DegreeRange(3, 3))) is want
