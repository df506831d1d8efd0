"""Closed-form path availability: combination probabilities, the number of
available paths, blocking and per-path selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .errors import DegenerateModelError
from .topology import PathEnsemble

MAX_COMBINATIONS = 10**7


def unrank_combination(n: int, k: int, alpha: int) -> tuple[int, ...]:
    """The ``alpha``-th (1-based) ``k``-subset of ``range(n)`` in lexicographic order."""
    total = math.comb(n, k)
    if not 1 <= alpha <= total:
        raise IndexError(f"alpha={alpha} outside 1..{total}")
    r = alpha - 1
    out = []
    start = 0
    for slots in range(k, 0, -1):
        for x in range(start, n):
            block = math.comb(n - x - 1, slots - 1)
            if r < block:
                out.append(x)
                start = x + 1
                break
            r -= block
    return tuple(out)


def _probs(ensemble: PathEnsemble | Sequence[float]) -> tuple[float, ...]:
    if isinstance(ensemble, PathEnsemble):
        return ensemble.availabilities
    return tuple(ensemble)


def _combo_product(p: Sequence[float], members: set[int], among: Sequence[int]) -> float:
    prod = 1.0
    for i in among:
        prod *= p[i] if i in members else 1.0 - p[i]
    return prod


def prob_combo(
    ensemble: PathEnsemble | Sequence[float],
    gamma: int,
    alpha: int,
    among: Sequence[int] | None = None,
) -> float:
    """Probability that exactly the paths of combination ``alpha`` are up and
    the rest of ``among`` (default: every path) are down.

    Combination ``alpha`` indexes the ``gamma``-subsets of ``among`` in
    lexicographic order of positions, starting at 1.
    """
    p = _probs(ensemble)
    pool = tuple(range(len(p))) if among is None else tuple(among)
    if not 0 <= gamma <= len(pool):
        raise IndexError(f"gamma={gamma} outside 0..{len(pool)}")
    members = {pool[i] for i in unrank_combination(len(pool), gamma, alpha)}
    return _combo_product(p, members, pool)


def prob_exactly(ensemble: PathEnsemble | Sequence[float], j: int) -> float:
    p = _probs(ensemble)
    n = len(p)
    if not 0 <= j <= n:
        raise ValueError(f"j={j} outside 0..{n}")
    if math.comb(n, j) > MAX_COMBINATIONS:
        raise ValueError(f"C({n},{j}) combinations exceed the evaluation ceiling")
    pool = range(n)
    return math.fsum(_combo_product(p, set(c), pool) for c in combinations(pool, j))


def blocking_probability(ensemble: PathEnsemble | Sequence[float]) -> float:
    p = _probs(ensemble)
    if not p:
        return 1.0
    return prob_exactly(p, 0)


def selection_probability(ensemble: PathEnsemble | Sequence[float], alpha: int) -> float:
    """Probability that single path ``alpha`` is available and used."""
    p = _probs(ensemble)
    one = prob_exactly(p, 1)
    if one == 0.0:
        raise DegenerateModelError("no probability mass on exactly one available path")
    return prob_combo(p, 1, alpha) * (1.0 - blocking_probability(p)) / one


def selection_vector(ensemble: PathEnsemble | Sequence[float]) -> list[float]:
    p = _probs(ensemble)
    return [selection_probability(p, a) for a in range(1, len(p) + 1)]


@dataclass(frozen=True)
class AvailabilityReport:
    """``selection`` is None when the selection law is undefined, which
    happens when no outcome has exactly one path up."""

    distribution: tuple[float, ...]
    blocking: float
    selection: tuple[float, ...] | None

    @property
    def selection_mass(self) -> float:
        return math.nan if self.selection is None else math.fsum(self.selection)


def availability_report(ensemble: PathEnsemble | Sequence[float]) -> AvailabilityReport:
    p = _probs(ensemble)
    dist = tuple(prob_exactly(p, j) for j in range(len(p) + 1))
    try:
        sel: tuple[float, ...] | None = tuple(selection_vector(p))
    except DegenerateModelError:
        sel = None
    return AvailabilityReport(dist, blocking_probability(p), sel)
