"""Monte Carlo cross-check of blocking and wiretap probabilities.

Trials are drawn in fixed-size chunks. Chunk ``i`` uses the ``i``-th child of
``SeedSequence(seed)``, so the statistics depend only on the master seed and
the trial count, whether the chunks run serially or in parallel.
"""

from __future__ import annotations

import math
from concurrent.futures import Executor
from dataclasses import dataclass, field

import numpy as np

from .availability import blocking_probability, prob_combo
from .threat import ThreatConfig, ThreatMode, fixed_set_wiretap_prob, wiretapped_transmission_prob
from .topology import PathEnsemble

CHUNK = 20_000
Z95 = 1.959963984540054


def wald_half_width(k: int, n: int) -> float:
    if n == 0:
        return math.nan
    p = k / n
    return Z95 * math.sqrt(p * (1.0 - p) / n)


def wilson_interval(k: int, n: int) -> tuple[float, float]:
    """95% Wilson score interval; unlike the Wald interval it does not collapse at 0 or n."""
    if n == 0:
        return (0.0, 1.0)
    p = k / n
    z2 = Z95 * Z95
    denom = 1.0 + z2 / n
    centre = (p + z2 / (2 * n)) / denom
    half = Z95 * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return (lo, hi)


@dataclass(frozen=True)
class Proportion:
    hits: int
    n: int

    @property
    def estimate(self) -> float:
        return self.hits / self.n if self.n else math.nan

    @property
    def ci95_half_width(self) -> float:
        return wald_half_width(self.hits, self.n)

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.hits, self.n)

    def covers(self, value: float) -> bool:
        lo, hi = self.wilson
        return lo <= value <= hi


@dataclass(frozen=True)
class TrialStats:
    trials: int
    blocked: int
    wiretapped: int
    path_counts: tuple[int, ...] = field(default=(), repr=False)

    @property
    def served(self) -> int:
        return self.trials - self.blocked

    @property
    def estimate(self) -> float:
        """Wiretapped share of the trials that were not blocked."""
        return self.wiretap_conditional.estimate

    @property
    def ci95_half_width(self) -> float:
        return self.wiretap_conditional.ci95_half_width

    @property
    def blocking(self) -> Proportion:
        return Proportion(self.blocked, self.trials)

    @property
    def wiretap_conditional(self) -> Proportion:
        return Proportion(self.wiretapped, self.served)

    @property
    def wiretap_unconditional(self) -> Proportion:
        return Proportion(self.wiretapped, self.trials)


@dataclass(frozen=True)
class MonteCarloConfig:
    ensemble: PathEnsemble
    threat: ThreatConfig
    trials: int
    seed: int = 0
    eta_max: int = 0
    selection: str = "closed_form"

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.selection not in ("closed_form", "uniform"):
            raise ValueError(f"unknown selection rule {self.selection!r}")


def _chunk(cfg: MonteCarloConfig, seed_seq: np.random.SeedSequence, n: int) -> dict:
    rng = np.random.default_rng(seed_seq)
    ens = cfg.ensemble
    p = np.asarray(ens.availabilities)
    n_paths = len(p)
    up = rng.random((n, n_paths)) < p
    blocked = ~up.any(axis=1)

    if cfg.selection == "closed_form":
        w = np.array([prob_combo(p, 1, a) for a in range(1, n_paths + 1)])
        cdf = np.cumsum(w / w.sum())
        cdf[-1] = 1.0
        choice = np.searchsorted(cdf, rng.random(n), side="right")
    else:
        # uniform among available: smallest random key among the up paths
        keys = np.where(up, rng.random((n, n_paths)), 2.0)
        choice = keys.argmin(axis=1)
    choice = np.minimum(choice, n_paths - 1)

    links = sorted({l for path in ens for l in path.links})
    index = {l: i for i, l in enumerate(links)}
    uses = np.zeros((n_paths, len(links)), dtype=bool)
    for i, path in enumerate(ens):
        uses[i, [index[l] for l in path.links]] = True

    if cfg.threat.mode is ThreatMode.PROBABILISTIC:
        attacked = rng.random((n, len(links))) < cfg.threat.phi
        hit = (attacked & uses[choice]).any(axis=1)
    else:
        tapped_paths = np.array([bool(cfg.threat.links.intersection(path.links)) for path in ens])
        hit = tapped_paths[choice]

    served = ~blocked
    return {
        "blocked": int(blocked.sum()),
        "wiretapped": int((hit & served).sum()),
        "paths": np.bincount(choice[served], minlength=n_paths),
        "trace": (blocked, choice, hit & served),
    }


def run_monte_carlo(
    cfg: MonteCarloConfig, executor: Executor | None = None, keep_trace: bool = False
):
    """Simulate ``cfg.trials`` requests. Returns :class:`TrialStats`, or
    ``(stats, trace)`` when ``keep_trace`` is set, where ``trace`` holds
    per-trial ``(blocked, path_index, wiretapped)`` arrays."""
    sizes = [CHUNK] * (cfg.trials // CHUNK)
    if cfg.trials % CHUNK:
        sizes.append(cfg.trials % CHUNK)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    if executor is None:
        parts = [_chunk(cfg, s, n) for s, n in zip(seeds, sizes)]
    else:
        parts = list(executor.map(_chunk, [cfg] * len(sizes), seeds, sizes))
    stats = TrialStats(
        trials=cfg.trials,
        blocked=sum(c["blocked"] for c in parts),
        wiretapped=sum(c["wiretapped"] for c in parts),
        path_counts=tuple(int(x) for x in sum(c["paths"] for c in parts)),
    )
    if not keep_trace:
        return stats
    trace = tuple(np.concatenate([c["trace"][k] for c in parts]) for k in range(3))
    return stats, trace


@dataclass(frozen=True)
class Comparison:
    quantity: str
    closed_form: float
    observed: Proportion

    @property
    def in_ci(self) -> bool:
        return self.observed.covers(self.closed_form)


def closed_form_wiretap(ensemble: PathEnsemble, threat: ThreatConfig) -> float:
    if threat.mode is ThreatMode.PROBABILISTIC:
        return wiretapped_transmission_prob(ensemble, threat.phi)
    return fixed_set_wiretap_prob(ensemble, threat.links)


def compare(cfg: MonteCarloConfig, stats: TrialStats) -> list[Comparison]:
    """Pair each estimate with its closed form. Only meaningful for the
    closed-form selection rule."""
    pb = blocking_probability(cfg.ensemble)
    pw = closed_form_wiretap(cfg.ensemble, cfg.threat)
    out = [
        Comparison("blocking", pb, stats.blocking),
        Comparison("wiretap", pw, stats.wiretap_unconditional),
    ]
    if pb < 1.0:
        out.append(Comparison("wiretap_given_served", pw / (1.0 - pb), stats.wiretap_conditional))
    return out
