"""Directed WDM topology, route enumeration and wavelength-path ensembles.

Two path notions live here. :func:`enumerate_routes` lists every loop-free
directed route between two nodes. :func:`enumerate_paths` lists *wavelength
paths*: each fiber link offers ``wavelengths`` channels, a wavelength path
occupies one channel on every link it crosses, and the ensemble is the
largest set of distinct routes the network can carry at once, preferring
the fewest total hops.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import CapacityError, TopologyError

DEFAULT_PATH_LIMIT = 10**6

Link = tuple[int, int]


@dataclass(frozen=True)
class FiberLink:
    src: int
    dst: int
    wavelengths: int = 1

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise TopologyError(f"self-loop at node {self.src}")
        if self.wavelengths < 1:
            raise TopologyError(f"link {self.src}-{self.dst} has no wavelengths")

    @property
    def key(self) -> Link:
        return (self.src, self.dst)

    def __str__(self) -> str:
        return f"{self.src}-{self.dst}"


@dataclass(frozen=True)
class EnsembleSpec:
    source: int
    dest: int
    availabilities: tuple[float, ...] | None = None
    name: str = ""


@dataclass(frozen=True)
class Topology:
    node_count: int
    links: tuple[FiberLink, ...] = ()
    name: str = ""
    wavelengths_per_fiber: int | None = None
    ensembles: tuple[EnsembleSpec, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "links", tuple(self.links))
        seen = set()
        for i, link in enumerate(self.links):
            for end in (link.src, link.dst):
                if not 1 <= end <= self.node_count:
                    raise TopologyError(
                        f"links[{i}]: node {end} outside 1..{self.node_count}"
                    )
            if link.key in seen:
                raise TopologyError(f"links[{i}]: duplicate link {link}")
            seen.add(link.key)

    @property
    def capacity(self) -> dict[Link, int]:
        return {l.key: l.wavelengths for l in self.links}

    def successors(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = defaultdict(list)
        for l in self.links:
            adj[l.src].append(l.dst)
        for v in adj:
            adj[v].sort()
        return adj

    def has_link(self, link: Link) -> bool:
        return link in self.capacity

    def ensemble(self, which: str | int | None = None) -> EnsembleSpec:
        """Look up a bundled ensemble by name, ``"s-d"`` pair or index."""
        if not self.ensembles:
            raise TopologyError("topology defines no ensembles")
        if which is None:
            return self.ensembles[0]
        if isinstance(which, int):
            return self.ensembles[which]
        for e in self.ensembles:
            if which in (e.name, f"{e.source}-{e.dest}"):
                return e
        raise TopologyError(f"no ensemble named {which!r}")


@dataclass(frozen=True)
class WavelengthPath:
    nodes: tuple[int, ...]
    wavelength: int | None = None
    availability: float | None = None

    def __post_init__(self) -> None:
        if len(self.nodes) < 2:
            raise ValueError("a path needs at least one link")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"path {self.nodes} revisits a node")

    @property
    def hops(self) -> int:
        """Number of intermediate nodes; the path has ``hops + 1`` links."""
        return len(self.nodes) - 2

    @property
    def links(self) -> tuple[Link, ...]:
        return tuple(zip(self.nodes[:-1], self.nodes[1:]))

    @property
    def intermediates(self) -> tuple[int, ...]:
        return self.nodes[1:-1]

    def __str__(self) -> str:
        s = "-".join(map(str, self.nodes))
        return s if self.wavelength is None else f"{s}@{self.wavelength}"


@dataclass(frozen=True)
class PathEnsemble:
    source: int
    dest: int
    paths: tuple[WavelengthPath, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", tuple(self.paths))
        hops = [p.hops for p in self.paths]
        if hops != sorted(hops):
            raise ValueError("ensemble must be sorted by hop count")
        for p in self.paths:
            if p.nodes[0] != self.source or p.nodes[-1] != self.dest:
                raise ValueError(f"path {p} does not join {self.source} to {self.dest}")
            if p.availability is not None and not 0.0 <= p.availability <= 1.0:
                raise ValueError(f"availability {p.availability} outside [0, 1]")

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def __getitem__(self, i: int) -> WavelengthPath:
        return self.paths[i]

    @property
    def availabilities(self) -> tuple[float, ...]:
        if any(p.availability is None for p in self.paths):
            raise ValueError("availabilities have not been attached")
        return tuple(p.availability for p in self.paths)  # type: ignore[misc]


# ---------------------------------------------------------------- loading


def _field(obj: dict, key: str, where: str, kind: type | tuple[type, ...]) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise TopologyError(f"{where}: missing field {key!r}")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, kind):
        raise TopologyError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}")
    return val


def topology_from_dict(doc: dict) -> Topology:
    if not isinstance(doc, dict):
        raise TopologyError("document root must be an object")
    node_count = _field(doc, "node_count", "$", int)
    raw_links = _field(doc, "links", "$", list)
    links = []
    for i, raw in enumerate(raw_links):
        where = f"$.links[{i}]"
        links.append(
            FiberLink(
                _field(raw, "from", where, int),
                _field(raw, "to", where, int),
                raw.get("wavelengths", 1) if isinstance(raw, dict) else 1,
            )
        )
    ensembles = []
    for i, raw in enumerate(doc.get("ensembles", [])):
        where = f"$.ensembles[{i}]"
        avail = raw.get("availabilities") if isinstance(raw, dict) else None
        if avail is not None:
            if not isinstance(avail, list) or not all(
                isinstance(a, (int, float)) and not isinstance(a, bool) for a in avail
            ):
                raise TopologyError(f"{where}.availabilities: expected list of numbers")
            bad = [a for a in avail if not 0.0 <= a <= 1.0]
            if bad:
                raise TopologyError(f"{where}.availabilities: {bad[0]} outside [0, 1]")
            avail = tuple(float(a) for a in avail)
        src = _field(raw, "source", where, int)
        dst = _field(raw, "dest", where, int)
        for end in (src, dst):
            if not 1 <= end <= node_count:
                raise TopologyError(f"{where}: node {end} outside 1..{node_count}")
        ensembles.append(EnsembleSpec(src, dst, avail, str(raw.get("name", ""))))
    wpf = doc.get("wavelengths_per_fiber")
    return Topology(
        node_count=node_count,
        links=tuple(links),
        name=str(doc.get("name", "")),
        wavelengths_per_fiber=wpf,
        ensembles=tuple(ensembles),
    )


def load_topology(document: str | bytes) -> Topology:
    """Parse and validate a JSON topology document."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return topology_from_dict(doc)


def load_topology_file(path: str | Path) -> Topology:
    text = Path(path).read_text()
    try:
        return load_topology(text)
    except TopologyError as exc:
        raise TopologyError(f"{path}: {exc}") from exc


def topology_to_dict(t: Topology) -> dict:
    doc: dict[str, Any] = {"name": t.name, "node_count": t.node_count}
    if t.wavelengths_per_fiber is not None:
        doc["wavelengths_per_fiber"] = t.wavelengths_per_fiber
    doc["links"] = [{"from": l.src, "to": l.dst, "wavelengths": l.wavelengths} for l in t.links]
    doc["ensembles"] = [
        {
            "name": e.name,
            "source": e.source,
            "dest": e.dest,
            **({"availabilities": list(e.availabilities)} if e.availabilities else {}),
        }
        for e in t.ensembles
    ]
    return doc


# ---------------------------------------------------------------- routes


def _check_endpoints(t: Topology, s: int, d: int) -> None:
    if s == d:
        raise ValueError("source equals destination")
    for v in (s, d):
        if not 1 <= v <= t.node_count:
            raise ValueError(f"node {v} outside 1..{t.node_count}")


def _simple_routes(
    adj: dict[int, list[int]], s: int, d: int, limit: int
) -> list[tuple[int, ...]]:
    found: list[tuple[int, ...]] = []
    stack = [s]
    on_path = {s}
    iters = [iter(adj.get(s, ()))]
    while iters:
        nxt = next(iters[-1], None)
        if nxt is None:
            iters.pop()
            on_path.discard(stack.pop())
            continue
        if nxt in on_path:
            continue
        if nxt == d:
            found.append((*stack, d))
            if len(found) > limit:
                raise CapacityError(f"more than {limit} routes")
            continue
        stack.append(nxt)
        on_path.add(nxt)
        iters.append(iter(adj.get(nxt, ())))
    found.sort(key=lambda r: (len(r), r))
    return found


def enumerate_routes(
    t: Topology, s: int, d: int, limit: int = DEFAULT_PATH_LIMIT
) -> PathEnsemble:
    """Every loop-free directed route from ``s`` to ``d``, fewest hops first,
    ties in lexicographic node order."""
    _check_endpoints(t, s, d)
    routes = _simple_routes(t.successors(), s, d, limit)
    return PathEnsemble(s, d, tuple(WavelengthPath(r) for r in routes))


def _min_cost_max_flow(
    capacity: dict[Link, int], s: int, d: int
) -> dict[Link, int]:
    """Successive shortest augmenting paths, unit cost per link.

    Bellman-Ford over a canonically ordered residual edge list keeps the
    result independent of the input link order.
    """
    flow = {e: 0 for e in capacity}
    edges = sorted(capacity)
    nodes = sorted({v for e in edges for v in e})
    while True:
        # residual arcs: (u, v, cost, forward link, sign)
        arcs = []
        for (u, v) in edges:
            if flow[(u, v)] < capacity[(u, v)]:
                arcs.append((u, v, 1, (u, v), 1))
            if flow[(u, v)] > 0:
                arcs.append((v, u, -1, (u, v), -1))
        arcs.sort(key=lambda a: (a[0], a[1], a[4]))
        dist = {v: None for v in nodes}
        dist[s] = 0
        pred: dict[int, tuple] = {}
        for _ in range(len(nodes)):
            changed = False
            for arc in arcs:
                u, v, c = arc[0], arc[1], arc[2]
                if dist[u] is not None and (dist[v] is None or dist[u] + c < dist[v]):
                    dist[v] = dist[u] + c
                    pred[v] = arc
                    changed = True
            if not changed:
                break
        if dist.get(d) is None:
            return flow
        chain = []
        v = d
        while v != s:
            arc = pred[v]
            chain.append(arc)
            v = arc[0]
        push = min(
            capacity[a[3]] - flow[a[3]] if a[4] > 0 else flow[a[3]] for a in chain
        )
        for a in chain:
            flow[a[3]] += push * a[4]


def _assign_wavelengths(
    routes: Sequence[tuple[int, ...]], n_wavelengths: int
) -> list[int]:
    used: dict[Link, set[int]] = defaultdict(set)
    out = []
    for r in routes:
        links = list(zip(r[:-1], r[1:]))
        busy = set().union(*(used[l] for l in links))
        free = next((w for w in range(n_wavelengths) if w not in busy), None)
        if free is None:
            raise CapacityError(f"no common free wavelength for route {r}")
        for l in links:
            used[l].add(free)
        out.append(free)
    return out


def _max_distinct_routes(
    routes: Sequence[tuple[int, ...]], capacity: dict[Link, int], target: int
) -> list[tuple[int, ...]] | None:
    """Cheapest set of ``target`` distinct routes that fits the capacities.

    Depth-first branch and bound over routes in (hops, node sequence) order,
    trying inclusion before exclusion, so the first optimum found is the
    lexicographically first among equal-cost sets.
    """
    n = len(routes)
    links = [list(zip(r[:-1], r[1:])) for r in routes]
    cost = [len(l) for l in links]
    prefix = [0]
    for c in cost:
        prefix.append(prefix[-1] + c)
    residual = dict(capacity)
    best: list = [None, None]
    chosen: list[int] = []

    def dfs(i: int, left: int, spent: int) -> None:
        if left == 0:
            if best[0] is None or spent < best[0]:
                best[0], best[1] = spent, list(chosen)
            return
        if n - i < left:
            return
        # routes are sorted by length, so the next `left` are the cheapest remaining
        if best[0] is not None and spent + prefix[i + left] - prefix[i] >= best[0]:
            return
        if all(residual[l] > 0 for l in links[i]):
            for l in links[i]:
                residual[l] -= 1
            chosen.append(i)
            dfs(i + 1, left - 1, spent + cost[i])
            chosen.pop()
            for l in links[i]:
                residual[l] += 1
        dfs(i + 1, left, spent)

    dfs(0, target, 0)
    return None if best[1] is None else [routes[i] for i in best[1]]


def enumerate_paths(
    t: Topology, s: int, d: int, limit: int = DEFAULT_PATH_LIMIT
) -> PathEnsemble:
    """Wavelength paths from ``s`` to ``d`` with availabilities unset.

    The ensemble is the largest set of *distinct* loop-free routes that can be
    lit at the same time, each occupying one channel on every fiber it
    crosses. Among sets of that size the one with the fewest total hops wins,
    ties going to the lexicographically first in (hops, node sequence)
    order. Each path then takes the lowest wavelength id still free on all of
    its fibers.
    """
    _check_endpoints(t, s, d)
    cap = t.capacity
    routes = _simple_routes(t.successors(), s, d, limit)
    flow = _min_cost_max_flow(cap, s, d)
    # the flow value bounds how many paths can be lit at once
    target = min(len(routes), sum(f for (u, _), f in flow.items() if u == s))
    chosen: list[tuple[int, ...]] | None = None
    while target > 0:
        chosen = _max_distinct_routes(routes, cap, target)
        if chosen is not None:
            break
        target -= 1
    chosen = chosen or []
    n_lambda = t.wavelengths_per_fiber or max(cap.values(), default=1)
    lambdas = _assign_wavelengths(chosen, n_lambda)
    return PathEnsemble(
        s, d, tuple(WavelengthPath(r, w) for r, w in zip(chosen, lambdas))
    )


def attach_availabilities(ensemble: PathEnsemble, p: Iterable[float]) -> PathEnsemble:
    """Assign availabilities positionally to the sorted ensemble."""
    p = [float(x) for x in p]
    if len(p) != len(ensemble):
        raise ValueError(f"{len(p)} availabilities for {len(ensemble)} paths")
    for x in p:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"availability {x} outside [0, 1]")
    return replace(
        ensemble,
        paths=tuple(replace(path, availability=x) for path, x in zip(ensemble, p)),
    )


def build_ensemble(t: Topology, which: str | int | None = None) -> PathEnsemble:
    spec = t.ensemble(which)
    ens = enumerate_paths(t, spec.source, spec.dest)
    if spec.availabilities is not None:
        ens = attach_availabilities(ens, spec.availabilities)
    return ens
