"""Fixed-length bit strings backed by Python ints.

Bit ``i`` of :attr:`Bits.value` is position ``i`` of the string, so
``Bits.from_str("100")`` has value 1. Hex serialization keeps the same
order and carries the length separately so that lengths not divisible by
four round-trip.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class Bits:
    value: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("negative bit length")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value does not fit in {self.length} bits")

    @classmethod
    def from_str(cls, text: str) -> Bits:
        value = 0
        for i, ch in enumerate(text):
            if ch == "1":
                value |= 1 << i
            elif ch != "0":
                raise ValueError(f"not a bit character: {ch!r}")
        return cls(value, len(text))

    @classmethod
    def from_iter(cls, bits: Iterable[int]) -> Bits:
        value = n = 0
        for n, b in enumerate(bits, start=1):
            if b:
                value |= 1 << (n - 1)
        return cls(value, n)

    @classmethod
    def from_hex(cls, text: str, length: int) -> Bits:
        return cls(int(text, 16) if text else 0, length)

    @classmethod
    def random(cls, length: int, rng: random.Random) -> Bits:
        return cls(rng.getrandbits(length) if length else 0, length)

    def to_hex(self) -> str:
        return format(self.value, "x")

    def __str__(self) -> str:
        return "".join("1" if self.value >> i & 1 else "0" for i in range(self.length))

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not -self.length <= i < self.length:
            raise IndexError(i)
        return self.value >> (i % self.length) & 1

    def __iter__(self):
        v = self.value
        for _ in range(self.length):
            yield v & 1
            v >>= 1

    def weight(self) -> int:
        return self.value.bit_count()

    def is_zero(self) -> bool:
        return self.value == 0

    def __add__(self, other: Bits) -> Bits:
        """Concatenation."""
        return Bits(self.value | other.value << self.length, self.length + other.length)

    def __xor__(self, other: Bits) -> Bits:
        if other.length != self.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return Bits(self.value ^ other.value, self.length)
