"""Passive fiber-tap adversary: probability that the transmission path is observed."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .availability import selection_vector
from .topology import Link, PathEnsemble, Topology, WavelengthPath


def parse_link(text: str) -> Link:
    try:
        a, b = text.strip().split("-")
        return (int(a), int(b))
    except ValueError:
        raise ValueError(f"bad link {text!r}, expected FROM-TO") from None


def format_link(link: Link) -> str:
    return f"{link[0]}-{link[1]}"


class ThreatMode(enum.Enum):
    PROBABILISTIC = "probabilistic"
    FIXED_SET = "fixed_set"


@dataclass(frozen=True)
class ThreatConfig:
    mode: ThreatMode
    phi: float = 0.0
    links: frozenset[Link] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "links", frozenset(self.links))
        if self.mode is ThreatMode.PROBABILISTIC and not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi={self.phi} outside [0, 1]")

    @classmethod
    def probabilistic(cls, phi: float) -> ThreatConfig:
        return cls(ThreatMode.PROBABILISTIC, phi=phi)

    @classmethod
    def fixed(cls, links: Iterable[Link]) -> ThreatConfig:
        return cls(ThreatMode.FIXED_SET, links=frozenset(links))

    @property
    def w(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class ThreatReport:
    mode: ThreatMode
    per_path: tuple[float, ...]
    aggregate: float


def wiretap_path_prob(path: WavelengthPath | int, phi: float) -> float:
    """At least one of the path's ``hops + 1`` fibers is tapped, each
    independently with probability ``phi``. An int is read as the hop count."""
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"phi={phi} outside [0, 1]")
    hops = path if isinstance(path, int) else path.hops
    return 1.0 - (1.0 - phi) ** (hops + 1)


def wiretapped_transmission_prob(ensemble: PathEnsemble, phi: float) -> float:
    sel = selection_vector(ensemble)
    return math.fsum(wiretap_path_prob(p, phi) * s for p, s in zip(ensemble, sel))


def _check_links(links: Iterable[Link], topology: Topology | None) -> frozenset[Link]:
    links = frozenset(links)
    if topology is not None:
        unknown = sorted(l for l in links if not topology.has_link(l))
        if unknown:
            raise ValueError(f"unknown link(s): {', '.join(map(format_link, unknown))}")
    return links


def fixed_set_wiretap_prob(
    ensemble: PathEnsemble, links: Iterable[Link], topology: Topology | None = None
) -> float:
    """Selection mass of the paths that cross at least one tapped fiber."""
    tapped = _check_links(links, topology)
    if not tapped:
        return 0.0
    sel = selection_vector(ensemble)
    return math.fsum(s for p, s in zip(ensemble, sel) if tapped.intersection(p.links))


def fixed_set_sweep(
    ensemble: PathEnsemble,
    candidates: Sequence[Link],
    w: int,
    topology: Topology | None = None,
) -> float:
    """Mean tapped-path probability over every size-``w`` subset of ``candidates``."""
    candidates = sorted(_check_links(candidates, topology))
    if not 0 <= w <= len(candidates):
        raise ValueError(f"w={w} outside 0..{len(candidates)}")
    values = [fixed_set_wiretap_prob(ensemble, s) for s in combinations(candidates, w)]
    return math.fsum(values) / len(values)


def threat_report(
    ensemble: PathEnsemble, config: ThreatConfig, topology: Topology | None = None
) -> ThreatReport:
    if config.mode is ThreatMode.PROBABILISTIC:
        per_path = tuple(wiretap_path_prob(p, config.phi) for p in ensemble)
        agg = wiretapped_transmission_prob(ensemble, config.phi)
    else:
        tapped = _check_links(config.links, topology)
        per_path = tuple(1.0 if tapped.intersection(p.links) else 0.0 for p in ensemble)
        agg = fixed_set_wiretap_prob(ensemble, tapped)
    return ThreatReport(config.mode, per_path, agg)
