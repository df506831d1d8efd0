"""Entropy of layered ciphertext and the attacker's equivocation.

A plaintext of ``L`` bits under ``k`` distinct nonzero keys, all distinct
from one another, admits ``k! * C(2**L - 2, k) * 2**L`` combinations. The
attacker does not know how many layers were applied and must try every
count from 1 to ``eta_max + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import ScenarioTooSmallError

L_EXACT = 24

Method = Literal["auto", "exact", "approx"]


def _check(L: int, k: int) -> None:
    if L < 1 or k < 1:
        raise ScenarioTooSmallError(f"need L >= 1 and at least one key (L={L}, keys={k})")
    # 2**L - 2 >= k, without building 2**L for huge L
    if L < k.bit_length() + 1 and 2**L - 2 < k:
        raise ScenarioTooSmallError(f"2^{L}-2 < {k}: too few distinct keys")


def _log2_combos_exact(L: int, k: int) -> float:
    return math.log2(math.factorial(k) * math.comb(2**L - 2, k) << L)


def _log2_combos_approx(L: int, k: int) -> float:
    # k! * C(n, k) is the falling factorial n (n-1) ... (n-k+1) with n = 2**L - 2
    terms = [L + math.log1p(-math.ldexp(i + 2, -L)) / math.log(2) for i in range(k)]
    return math.fsum(terms) + L


def log2_combinations(L: int, k: int, method: Method = "auto") -> float:
    """log2 of the number of (plaintext, ordered distinct keys) combinations."""
    _check(L, k)
    if method == "exact" or (method == "auto" and L <= L_EXACT):
        return _log2_combos_exact(L, k)
    return _log2_combos_approx(L, k)


def encrypted_entropy(L: int, eta: int, method: Method = "auto") -> float:
    """Entropy in bits of a payload encrypted by ``eta`` anonymization keys plus
    the destination key."""
    if eta < 0:
        raise ValueError("eta must be >= 0")
    return log2_combinations(L, eta + 1, method)


def attacker_equivocation(L: int, eta_max: int, method: Method = "auto") -> float:
    if eta_max < 0:
        raise ValueError("eta_max must be >= 0")
    _check(L, eta_max + 1)
    return math.fsum(
        log2_combinations(L, eta_max + 1 - i, method) for i in range(eta_max + 1)
    )


@dataclass(frozen=True)
class SecrecyScenario:
    message_length: int
    eta: int
    eta_max: int

    def __post_init__(self) -> None:
        if not 0 <= self.eta <= self.eta_max:
            raise ValueError(f"need 0 <= eta <= eta_max, got {self.eta}, {self.eta_max}")
        _check(self.message_length, self.eta_max + 1)


@dataclass(frozen=True)
class EquivocationReport:
    scenario: SecrecyScenario
    h_plain: float
    h_encrypted: float
    h_attacker: float

    @property
    def normalized_by_he(self) -> float:
        return self.h_attacker / self.h_encrypted

    @property
    def normalized_by_h(self) -> float:
        return self.h_attacker / self.h_plain

    @property
    def lemma1_holds(self) -> bool:
        return self.h_attacker >= self.h_plain


def secrecy_report(s: SecrecyScenario, method: Method = "auto") -> EquivocationReport:
    L = s.message_length
    return EquivocationReport(
        scenario=s,
        h_plain=float(L),
        h_encrypted=encrypted_entropy(L, s.eta, method),
        h_attacker=attacker_equivocation(L, s.eta_max, method),
    )


def mean_equivocation(p_wiretap: float, L: int, eta_max: int) -> float:
    """Attacker equivocation in units of the plaintext entropy, weighted by the
    probability that the attacker holds the ciphertext at all."""
    return p_wiretap * attacker_equivocation(L, eta_max) / L
