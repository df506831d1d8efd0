"""GF(2) polynomials, primitive-polynomial selection and LFSR keystreams.

Polynomials are int masks: bit ``i`` holds the coefficient of ``x^i``, so
``x^3 + x + 1`` is ``0b1011 == 0xB``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

from .bits import Bits
from .errors import CapacityError, InvalidSeedError
from .numtheory import euler_totient, factorize

G_CAP = 62
G_ENUM_CAP = 20


@dataclass(frozen=True, order=True)
class GeneratorPolynomial:
    mask: int

    def __post_init__(self) -> None:
        if self.mask < 3 or not self.mask & 1:
            raise ValueError(f"need degree >= 1 and constant term 1, got {self.mask:#x}")
        if self.degree > G_CAP:
            raise CapacityError(f"degree {self.degree} exceeds cap {G_CAP}")

    @property
    def degree(self) -> int:
        return self.mask.bit_length() - 1

    @classmethod
    def from_hex(cls, text: str) -> GeneratorPolynomial:
        return cls(int(text, 16))

    @classmethod
    def from_exponents(cls, *exponents: int) -> GeneratorPolynomial:
        mask = 0
        for e in exponents:
            mask ^= 1 << e
        return cls(mask)

    def to_hex(self) -> str:
        return f"0x{self.mask:X}"

    def coefficients(self) -> Bits:
        """Coefficient string, constant term first."""
        return Bits(self.mask, self.degree + 1)

    def __str__(self) -> str:
        terms = []
        for e in range(self.degree, -1, -1):
            if self.mask >> e & 1:
                terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
        return "+".join(terms)


@dataclass(frozen=True)
class LfsrSpec:
    polynomial: GeneratorPolynomial
    seed: Bits

    def __post_init__(self) -> None:
        if len(self.seed) != self.polynomial.degree:
            raise ValueError("seed length must equal polynomial degree")
        if self.seed.is_zero():
            raise InvalidSeedError("all-zero seed locks the register")


@dataclass(frozen=True)
class DegreeRange:
    g_min: int
    g_max: int

    def __post_init__(self) -> None:
        if not 1 <= self.g_min <= self.g_max <= G_CAP:
            raise ValueError(f"invalid degree range {self.g_min}..{self.g_max}")

    def __iter__(self):
        return iter(range(self.g_min, self.g_max + 1))

    def guards(self, message_length: int) -> bool:
        return 2**self.g_min - 1 > message_length


def _mulmod(a: int, b: int, mod: int, deg: int) -> int:
    r = 0
    top = 1 << deg
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= mod
    return r


def _powmod(base: int, e: int, mod: int, deg: int) -> int:
    result = 1
    while e:
        if e & 1:
            result = _mulmod(result, base, mod, deg)
        base = _mulmod(base, base, mod, deg)
        e >>= 1
    return result


def _polymod(a: int, mod: int) -> int:
    dm = mod.bit_length()
    while a.bit_length() >= dm:
        a ^= mod << (a.bit_length() - dm)
    return a


def _polygcd(a: int, b: int) -> int:
    while b:
        a, b = b, _polymod(a, b)
    return a


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2) polynomial masks."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _x_to_2k(k: int, mod: int, deg: int) -> int:
    # x^(2^k) mod p by repeated squaring
    r = _polymod(0b10, mod)
    for _ in range(k):
        r = _mulmod(r, r, mod, deg)
    return r


def is_irreducible(p: GeneratorPolynomial) -> bool:
    """Rabin's irreducibility test."""
    g, mod = p.degree, p.mask
    x = _polymod(0b10, mod)
    if _x_to_2k(g, mod, g) != x:
        return False
    for q in factorize(g):
        if _polygcd(mod, _x_to_2k(g // q, mod, g) ^ x) != 1:
            return False
    return True


def _order_is_maximal(p: GeneratorPolynomial) -> bool:
    g, mod = p.degree, p.mask
    n = (1 << g) - 1
    x = _polymod(0b10, mod)
    if _powmod(x, n, mod, g) != 1:
        return False
    return all(_powmod(x, n // q, mod, g) != 1 for q in factorize(n))


def is_primitive(p: GeneratorPolynomial) -> bool:
    # order test first: it rejects most candidates cheaply
    return _order_is_maximal(p) and is_irreducible(p)


def _check_degree(g: int, cap: int = G_CAP) -> None:
    if g < 1:
        raise ValueError("degree must be >= 1")
    if g > cap:
        raise CapacityError(f"degree {g} exceeds cap {cap}")


def count_primitive(g: int) -> int:
    _check_degree(g)
    return euler_totient(2**g - 1) // g


@lru_cache(maxsize=None)
def _primitive_masks(g: int) -> tuple[int, ...]:
    lo = (1 << g) | 1
    return tuple(
        m for m in range(lo, 1 << (g + 1), 2) if is_primitive(GeneratorPolynomial(m))
    )


def enumerate_primitive(g: int) -> list[GeneratorPolynomial]:
    """All primitive polynomials of degree ``g`` by exhaustive scan, ascending mask order."""
    _check_degree(g, G_ENUM_CAP)
    return [GeneratorPolynomial(m) for m in _primitive_masks(g)]


def random_primitive(g: int, rng: random.Random) -> GeneratorPolynomial:
    """Uniform draw from the primitive polynomials of degree ``g``."""
    _check_degree(g)
    if g <= G_ENUM_CAP:
        masks = _primitive_masks(g)
        return GeneratorPolynomial(masks[rng.randrange(len(masks))])
    while True:
        cand = GeneratorPolynomial((1 << g) | 1 | rng.getrandbits(g - 1) << 1)
        if is_primitive(cand):
            return cand


def random_seed(g: int, rng: random.Random) -> Bits:
    """Uniform nonzero register state of ``g`` bits."""
    return Bits(rng.randrange(1, 1 << g), g)


def keystream(spec: LfsrSpec, length: int) -> Bits:
    """First ``length`` output bits of a Fibonacci LFSR.

    Stage ``i`` starts at seed bit ``i``. Each step emits stage 0, shifts the
    register toward stage 0 and writes the parity of the tapped stages (the
    polynomial's coefficients below ``x^g``) into stage ``g-1``. The output
    therefore obeys ``a[n+g] = sum(c_i * a[n+i])``.
    """
    if length < 0:
        raise ValueError("negative length")
    if spec.seed.is_zero():
        raise InvalidSeedError("all-zero seed")
    g = spec.polynomial.degree
    taps = spec.polynomial.mask & ((1 << g) - 1)
    state = spec.seed.value
    out = 0
    high = g - 1
    for i in range(length):
        out |= (state & 1) << i
        state = (state >> 1) | ((state & taps).bit_count() & 1) << high
    return Bits(out, length)


def min_degree(message_length: int) -> int:
    """Smallest ``g`` with ``2**g - 1 > message_length``."""
    if message_length < 0:
        raise ValueError("negative message length")
    return (message_length + 1).bit_length()


def log2_key_space(g: int) -> float:
    """log2 of (#primitive polynomials * #nonzero seeds) at degree ``g``."""
    return math.log2(count_primitive(g)) + math.log2(2**g - 1)
