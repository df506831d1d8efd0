"""Circuit setup and data-plane forwarding for optical onion routing.

Public-key sealing is modeled, not implemented: a :class:`SealedBox` can be
opened only by presenting the private handle paired with the public handle
it was sealed to. Swap in another :class:`SealingScheme` to use real
cryptography.
"""

from __future__ import annotations

import random
import secrets
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Protocol, Sequence

from .availability import prob_combo
from .bits import Bits
from .crypto import KeySchedule, Payload, draw_key_specs, layer_encrypt, peel, session_key
from .errors import AccessDenied, Blocked, DegenerateModelError, MisconfiguredCircuit
from .gf2 import G_ENUM_CAP, DegreeRange, LfsrSpec, min_degree
from .topology import Link, PathEnsemble, WavelengthPath

# ------------------------------------------------------------ sealed boxes


@dataclass(frozen=True)
class KeyPair:
    public: str
    private: str = field(repr=False)


@dataclass(frozen=True)
class SealedBox:
    recipient: str
    _content: Any = field(repr=False)
    _lock: str = field(default="", repr=False, compare=False)


class SealingScheme(Protocol):
    def seal(self, public: str, content: Any) -> SealedBox: ...

    def open(self, box: SealedBox, private: str) -> Any: ...


class AccessControlSealing:
    """Sealed boxes as access-control tokens over a registry of key pairs."""

    def __init__(self) -> None:
        self._pairs: dict[str, str] = {}

    def register(self, pair: KeyPair) -> None:
        self._pairs[pair.public] = pair.private

    def seal(self, public: str, content: Any) -> SealedBox:
        if public not in self._pairs:
            raise KeyError(f"unknown public handle {public}")
        # the box remembers the private handle it was sealed for, so a key
        # pair registered elsewhere under the same public name cannot open it
        return SealedBox(public, content, self._pairs[public])

    def open(self, box: SealedBox, private: str) -> Any:
        if not box._lock or not secrets.compare_digest(box._lock, private):
            raise AccessDenied(f"handle does not open a box sealed to {box.recipient}")
        return box._content


class NodeRegistry:
    """One key pair per node. Public handles are readable by anyone; the
    private handle is handed out only to the node object that owns it."""

    def __init__(self, nodes: Sequence[int], scheme: AccessControlSealing | None = None):
        self.scheme = scheme or AccessControlSealing()
        self._pairs: dict[int, KeyPair] = {}
        for v in nodes:
            pair = KeyPair(f"K+{v}", secrets.token_hex(8))
            self._pairs[v] = pair
            self.scheme.register(pair)

    def __contains__(self, node: int) -> bool:
        return node in self._pairs

    def public(self, node: int) -> str:
        try:
            return self._pairs[node].public
        except KeyError:
            raise KeyError(f"node {node} has no key pair") from None

    def issue_node(self, node: int, role: str = "node") -> OpticalNode:
        if node not in self._pairs:
            raise KeyError(f"node {node} has no key pair")
        return OpticalNode(node, role, self._pairs[node].private, self.scheme)


# ------------------------------------------------------------ control plane


@dataclass(frozen=True)
class NodeConfig:
    node: int
    in_port: int
    segment: tuple[int, ...]  # this node through the next keyed node
    wavelength: int
    lfsr: LfsrSpec
    message_bits: int


@dataclass(frozen=True)
class ControlOnion:
    box: SealedBox


@dataclass(frozen=True)
class CircuitPlan:
    path: WavelengthPath
    anonymizers: tuple[int, ...]
    eta_max: int
    key_specs: tuple[LfsrSpec, ...]
    message_bits: int

    def __post_init__(self) -> None:
        inter = self.path.intermediates
        if any(a not in inter for a in self.anonymizers):
            raise ValueError("anonymization nodes must be intermediate nodes of the path")
        if list(self.anonymizers) != sorted(self.anonymizers, key=inter.index):
            raise ValueError("anonymization nodes must be listed in path order")
        if self.eta > min(self.eta_max, self.path.hops):
            raise ValueError("too many anonymization nodes")
        if len(self.key_specs) != self.eta + 1:
            raise ValueError("need one key per anonymization node plus the destination")

    @property
    def eta(self) -> int:
        return len(self.anonymizers)

    @property
    def keyed_nodes(self) -> tuple[int, ...]:
        return (*self.anonymizers, self.path.nodes[-1])

    @property
    def wavelength(self) -> int:
        return self.path.wavelength or 0

    @cached_property
    def schedule(self) -> KeySchedule:
        return KeySchedule(tuple(session_key(s, self.message_bits) for s in self.key_specs))


def _select_path(
    ensemble: PathEnsemble, rng: random.Random, selection: str
) -> WavelengthPath:
    p = ensemble.availabilities
    up = [i for i, x in enumerate(p) if rng.random() < x]
    if not up:
        raise Blocked("no path available")
    if selection == "uniform":
        return ensemble[up[rng.randrange(len(up))]]
    if selection != "closed_form":
        raise ValueError(f"unknown selection rule {selection!r}")
    weights = [prob_combo(p, 1, a) for a in range(1, len(p) + 1)]
    if not any(weights):
        raise DegenerateModelError("no probability mass on exactly one available path")
    return rng.choices(ensemble.paths, weights=weights)[0]


def default_degrees(message_bits: int) -> DegreeRange:
    g = min_degree(message_bits)
    return DegreeRange(g, max(g, min(g + 2, G_ENUM_CAP)))


def plan_circuit(
    ensemble: PathEnsemble,
    eta_max: int,
    rng: random.Random,
    message_bits: int = 128,
    *,
    degrees: DegreeRange | None = None,
    selection: str = "closed_form",
    avoid: Payload | None = None,
) -> CircuitPlan:
    """Draw a path, the anonymization nodes on it, and their LFSR parameters.

    Path availability is sampled first; if nothing is up the trial is
    :class:`Blocked`. With ``selection="closed_form"`` the path is then drawn
    with probability proportional to the chance that it is the only path up,
    which reproduces the closed-form per-path selection law. ``"uniform"``
    picks uniformly among the paths sampled as up.

    The number of anonymization nodes is uniform on ``0..min(eta_max, hops)``
    and the nodes themselves a uniform subset of the intermediate nodes.
    """
    path = _select_path(ensemble, rng, selection)
    eta = rng.randint(0, min(eta_max, path.hops))
    chosen = set(rng.sample(path.intermediates, eta))
    anonymizers = tuple(v for v in path.intermediates if v in chosen)
    specs, _ = draw_key_specs(
        eta + 1, message_bits, rng, degrees or default_degrees(message_bits), avoid
    )
    return CircuitPlan(path, anonymizers, eta_max, tuple(specs), message_bits)


def setup_circuit(plan: CircuitPlan, registry: NodeRegistry) -> ControlOnion:
    """Wrap one sealed configuration per keyed node, innermost for the destination."""
    nodes = plan.path.nodes
    keyed = plan.keyed_nodes
    configs = []
    for i, (v, spec) in enumerate(zip(keyed, plan.key_specs)):
        pos = nodes.index(v)
        end = nodes.index(keyed[i + 1]) if i + 1 < len(keyed) else pos
        configs.append(
            NodeConfig(
                node=v,
                in_port=nodes[pos - 1],
                segment=nodes[pos : end + 1],
                wavelength=plan.wavelength,
                lfsr=spec,
                message_bits=plan.message_bits,
            )
        )
    onion: ControlOnion | None = None
    for cfg in reversed(configs):
        onion = ControlOnion(registry.scheme.seal(registry.public(cfg.node), (cfg, onion)))
    assert onion is not None
    return onion


# ------------------------------------------------------------ data plane


class OpticalNode:
    """An optical node holding its own private handle and a key table indexed
    by (input port, wavelength), the lookup a lambda reader performs."""

    def __init__(self, node: int, role: str, private: str, scheme: SealingScheme):
        self.node = node
        self.role = role
        self._private = private
        self._scheme = scheme
        self.keys: dict[tuple[int, int], Bits] = {}

    def open_layer(self, onion: ControlOnion) -> tuple[NodeConfig, ControlOnion | None]:
        cfg, residual = self._scheme.open(onion.box, self._private)
        if cfg.node != self.node:
            raise MisconfiguredCircuit(f"layer for node {cfg.node} reached node {self.node}")
        return cfg, residual

    def configure(self, onion: ControlOnion) -> ControlOnion | None:
        cfg, residual = self.open_layer(onion)
        self.keys[(cfg.in_port, cfg.wavelength)] = session_key(cfg.lfsr, cfg.message_bits)
        return residual

    def process(self, payload: Payload, in_port: int, wavelength: int) -> Payload:
        try:
            key = self.keys[(in_port, wavelength)]
        except KeyError:
            raise MisconfiguredCircuit(
                f"node {self.node}: no key for port {in_port} on wavelength {wavelength}"
            ) from None
        return peel(payload, key)


def distribute(plan: CircuitPlan, onion: ControlOnion, registry: NodeRegistry) -> dict[int, OpticalNode]:
    """Pass the onion along the keyed nodes; each opens and installs its layer."""
    nodes: dict[int, OpticalNode] = {}
    residual: ControlOnion | None = onion
    last = plan.keyed_nodes[-1]
    for v in plan.keyed_nodes:
        if residual is None:
            raise MisconfiguredCircuit(f"onion exhausted before node {v}")
        node = registry.issue_node(v, "destination" if v == last else "anonymization")
        residual = node.configure(residual)
        nodes[v] = node
    if residual is not None:
        raise MisconfiguredCircuit("onion has layers left after the destination")
    return nodes


@dataclass(frozen=True)
class TraceRecord:
    link: Link
    wavelength: int
    payload: Payload


@dataclass
class Circuit:
    plan: CircuitPlan
    registry: NodeRegistry
    nodes: dict[int, OpticalNode]

    @classmethod
    def establish(cls, plan: CircuitPlan, registry: NodeRegistry | None = None) -> Circuit:
        registry = registry or NodeRegistry(plan.path.nodes)
        onion = setup_circuit(plan, registry)
        return cls(plan, registry, distribute(plan, onion, registry))


def transmit(
    plan: CircuitPlan,
    m_prime: Payload,
    circuit: Circuit | None = None,
    wavelength: int | None = None,
) -> tuple[Payload, tuple[TraceRecord, ...]]:
    """Send ``m_prime`` from the source and return what the destination
    recovers together with the payload seen on every link.

    ``wavelength`` overrides the injected wavelength; anything other than the
    planned one is refused by the first keyed node.
    """
    if len(m_prime) != plan.message_bits:
        raise ValueError(f"payload is {len(m_prime)} bits, circuit expects {plan.message_bits}")
    circuit = circuit or Circuit.establish(plan)
    lam = plan.wavelength if wavelength is None else wavelength
    payload = layer_encrypt(m_prime, plan.schedule)
    trace = []
    for u, v in plan.path.links:
        trace.append(TraceRecord((u, v), lam, payload))
        if v in circuit.nodes:
            payload = circuit.nodes[v].process(payload, u, lam)
    return payload, tuple(trace)
