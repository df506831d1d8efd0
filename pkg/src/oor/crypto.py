"""Layered XOR encryption and the key-space secrecy gate."""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from typing import Sequence

from .bits import Bits
from .errors import KeyScheduleError
from .gf2 import (
    DegreeRange,
    LfsrSpec,
    count_primitive,
    keystream,
    min_degree,
    random_primitive,
    random_seed,
)

Payload = Bits
MAX_REDRAWS = 10_000


def xor_combine(a: Bits, b: Bits) -> Bits:
    return a ^ b


def peel(m: Payload, key: Bits) -> Payload:
    """Strip one key layer. Self-inverse: ``peel(peel(m, k), k) == m``."""
    return m ^ key


@dataclass(frozen=True)
class KeySchedule:
    """Session keys for the anonymization nodes followed by the destination key."""

    keys: tuple[Bits, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "keys", tuple(self.keys))
        if not self.keys:
            return
        length = len(self.keys[0])
        if any(len(k) != length for k in self.keys):
            raise KeyScheduleError("keys differ in length")
        if any(k.is_zero() for k in self.keys):
            raise KeyScheduleError("all-zero key")
        if len(set(self.keys)) != len(self.keys):
            raise KeyScheduleError("keys are not pairwise distinct")

    def __len__(self) -> int:
        return len(self.keys)

    def __iter__(self):
        return iter(self.keys)

    def check_against(self, m_prime: Payload) -> None:
        if any(len(k) != len(m_prime) for k in self.keys):
            raise KeyScheduleError("key length differs from payload length")
        if m_prime in self.keys:
            raise KeyScheduleError("a key equals the plaintext")


def layer_encrypt(m_prime: Payload, schedule: KeySchedule | Sequence[Bits]) -> Payload:
    if not isinstance(schedule, KeySchedule):
        schedule = KeySchedule(tuple(schedule))
    schedule.check_against(m_prime)
    out = m_prime
    for key in schedule:
        out = out ^ key
    return out


def session_key(spec: LfsrSpec, length: int) -> Bits:
    """Keystream truncated to ``length`` bits; refuses to wrap the LFSR period."""
    if 2**spec.polynomial.degree - 1 <= length and length > 0:
        raise KeyScheduleError(
            f"degree {spec.polynomial.degree} too small for {length}-bit payload"
        )
    key = keystream(spec, length)
    if length and key.is_zero():
        raise KeyScheduleError("LFSR produced an all-zero key")
    return key


def draw_key_specs(
    n_keys: int,
    length: int,
    rng: random.Random,
    degrees: DegreeRange | None = None,
    avoid: Payload | None = None,
) -> tuple[list[LfsrSpec], KeySchedule]:
    """Fresh random LFSR parameters for ``n_keys`` nodes.

    Degrees are drawn uniformly from ``degrees`` (default: the single minimal
    degree for ``length``). A key that collides with an earlier key or with
    ``avoid`` is redrawn; after ``MAX_REDRAWS`` consecutive collisions the
    key space is treated as exhausted.
    """
    if degrees is None:
        g = min_degree(length)
        degrees = DegreeRange(g, g)
    if not degrees.guards(length):
        raise KeyScheduleError(f"g_min={degrees.g_min} cannot cover {length} bits")
    specs: list[LfsrSpec] = []
    keys: list[Bits] = []
    taken = {avoid} if avoid is not None else set()
    misses = 0
    while len(keys) < n_keys:
        g = rng.randint(degrees.g_min, degrees.g_max)
        spec = LfsrSpec(random_primitive(g, rng), random_seed(g, rng))
        key = session_key(spec, length)
        if key in taken:
            misses += 1
            if misses >= MAX_REDRAWS:
                raise KeyScheduleError(f"cannot draw {n_keys} distinct {length}-bit keys")
            continue
        misses = 0
        taken.add(key)
        specs.append(spec)
        keys.append(key)
    return specs, KeySchedule(tuple(keys))


def key_entropy_h1(degrees: DegreeRange) -> float:
    """Sum over the degree range of log2(#primitive polynomials * #nonzero seeds)."""
    terms = []
    for g in degrees:
        c = count_primitive(g)
        if c:
            terms.append(math.log2(c) + math.log2(2**g - 1))
    if not terms:
        raise ValueError("empty key space")
    return math.fsum(terms)


class SecrecyVerdict(enum.Enum):
    HOLDS = "holds"
    FAILS_ENTROPY = "fails_entropy"
    FAILS_LENGTH = "fails_length"


@dataclass(frozen=True)
class SecrecyParams:
    message_length: int
    degrees: DegreeRange


def perfect_secrecy_check(params: SecrecyParams) -> SecrecyVerdict:
    """Key entropy must reach the message length, and the shortest LFSR
    period must cover it. The length failure is reported first."""
    L = params.message_length
    if L > 2**params.degrees.g_min - 1:
        return SecrecyVerdict.FAILS_LENGTH
    if key_entropy_h1(params.degrees) < L:
        return SecrecyVerdict.FAILS_ENTROPY
    return SecrecyVerdict.HOLDS
