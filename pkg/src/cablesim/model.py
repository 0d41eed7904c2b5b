"""Overlay-network snapshot model.

Holds the peer-to-peer node census, the inter-AS routing graph, and the relay
table that the cascade consumes. Everything here is immutable after
construction; transformations return new values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from datetime import datetime

from .graph import GraphError, validate_country

logger = logging.getLogger(__name__)

CLEARNET = "clearnet"
TOR = "tor"
OTHER = "other"
NETWORKS = (CLEARNET, TOR, OTHER)

SCOPE_CLEARNET_ONLY = "clearnet_only"
SCOPE_FULL = "full"
SCOPE_MODES = (SCOPE_CLEARNET_ONLY, SCOPE_FULL)


class ModelError(ValueError):
    """Raised for malformed snapshot-level inputs."""


@dataclass(frozen=True)
class P2PNode:
    """One observed node. ``country`` and ``asn`` may be unknown."""

    node_id: str
    network: str
    country: str | None = None
    asn: int | None = None

    def __post_init__(self):
        if self.network not in NETWORKS:
            raise ModelError(f"node {self.node_id!r}: unknown network {self.network!r}")
        if self.country is not None:
            validate_country(self.country, f"node {self.node_id!r}")
        if self.asn is not None and (not isinstance(self.asn, int) or self.asn < 0):
            raise ModelError(f"node {self.node_id!r}: bad asn {self.asn!r}")


@dataclass(frozen=True)
class NodeSnapshot:
    timestamp: datetime
    nodes: tuple[P2PNode, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for node in self.nodes:
            if node.node_id in seen:
                raise ModelError(f"duplicate node id {node.node_id!r} in snapshot")
            seen.add(node.node_id)

    def label(self) -> str:
        return self.timestamp.date().isoformat()


@dataclass(frozen=True)
class AsnGraph:
    """Undirected inter-AS connectivity, relationship kinds collapsed away."""

    vertices: frozenset[int]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for a, b in self.edges:
            if a == b:
                raise ModelError(f"asn graph self loop at {a}")
            if a > b:
                raise ModelError(f"asn edge ({a}, {b}) not normalized")
            if a not in self.vertices or b not in self.vertices:
                raise ModelError(f"asn edge ({a}, {b}) references unknown vertex")

    def neighbors(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for a, b in sorted(self.edges):
            adj[a].append(b)
            adj[b].append(a)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}


def make_asn_graph(edges) -> AsnGraph:
    """Build an AsnGraph from an iterable of (asn, asn) pairs, deduplicating."""
    vertices: set[int] = set()
    normalized: set[tuple[int, int]] = set()
    for a, b in edges:
        a, b = int(a), int(b)
        if a == b:
            logger.warning("ignoring asn self loop at %d", a)
            continue
        normalized.add((min(a, b), max(a, b)))
        vertices.update((a, b))
    return AsnGraph(frozenset(vertices), frozenset(normalized))


@dataclass(frozen=True)
class TorRelay:
    fingerprint: str
    country: str
    asn: int
    consensus_weight: float

    def __post_init__(self):
        validate_country(self.country, f"relay {self.fingerprint!r}")
        if self.consensus_weight < 0:
            raise ModelError(
                f"relay {self.fingerprint!r}: negative consensus weight"
            )


@dataclass(frozen=True)
class RelayTable:
    relays: tuple[TorRelay, ...]
    total_cw: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_cw", float(sum(r.consensus_weight for r in self.relays)))


@dataclass(frozen=True)
class CascadeScope:
    """Nodes a cascade run accounts for, plus per-country hosting counts.

    ``hosting`` covers only nodes that carry a country; nodes without one can
    still be in scope (they are exempt from the geographic stages).
    """

    nodes: tuple[P2PNode, ...]
    hosting: dict[str, int] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.nodes)


def _hosting(nodes) -> dict[str, int]:
    counts: dict[str, int] = {}
    for node in nodes:
        if node.country is not None:
            counts[node.country] = counts.get(node.country, 0) + 1
    return counts


def cascade_scope(snapshot: NodeSnapshot, mode: str) -> CascadeScope:
    """Select the nodes a cascade simulates.

    ``clearnet_only`` keeps clearnet nodes with both a country and an ASN.
    ``full`` additionally keeps tor nodes that carry a country (normally one
    attached by a placement scenario). Excluded rows are counted, not fatal.
    """
    if mode not in SCOPE_MODES:
        raise ModelError(f"unknown scope mode {mode!r}")
    selected: list[P2PNode] = []
    dropped = 0
    for node in snapshot.nodes:
        if node.network == CLEARNET:
            if node.country is not None and node.asn is not None:
                selected.append(node)
            else:
                dropped += 1
        elif node.network == TOR and mode == SCOPE_FULL:
            if node.country is not None:
                selected.append(node)
            else:
                dropped += 1
    if dropped:
        logger.info("scope %s: excluded %d node(s) lacking country or asn", mode, dropped)
    selected.sort(key=lambda n: n.node_id)
    return CascadeScope(tuple(selected), _hosting(selected))


def relay_backed_scope(snapshot: NodeSnapshot) -> CascadeScope:
    """Scope for relay-layer runs: valid clearnet nodes plus every tor node.

    Tor nodes keep whatever placement they carry; the unplaced ones take part
    only through the relay survival check, not the geographic stages.
    """
    selected = [
        n for n in snapshot.nodes
        if (n.network == CLEARNET and n.country is not None and n.asn is not None)
        or n.network == TOR
    ]
    selected.sort(key=lambda n: n.node_id)
    return CascadeScope(tuple(selected), _hosting(selected))


def apply_assignment(snapshot: NodeSnapshot, assignment) -> NodeSnapshot:
    """Return a snapshot with tor nodes re-homed per a placement assignment.

    ``assignment`` maps node_id to (country, asn). Nodes absent from the map
    are left untouched.
    """
    nodes = []
    for node in snapshot.nodes:
        placed = assignment.get(node.node_id)
        if placed is not None:
            country, asn = placed
            nodes.append(replace(node, country=country, asn=asn))
        else:
            nodes.append(node)
    return NodeSnapshot(snapshot.timestamp, tuple(nodes))


def composition_stats(snapshot: NodeSnapshot) -> dict:
    """Census of the snapshot by network, with exact (unrounded) shares."""
    total = len(snapshot.nodes)
    by_net = {net: 0 for net in NETWORKS}
    for node in snapshot.nodes:
        by_net[node.network] += 1
    stats = {
        "total": total,
        "clearnet": by_net[CLEARNET],
        "tor": by_net[TOR],
        "other": by_net[OTHER],
        "clearnet_share": (by_net[CLEARNET] / total) if total else 0.0,
        "tor_share": (by_net[TOR] / total) if total else 0.0,
    }
    return stats


def observed_asns(snapshot: NodeSnapshot, country: str) -> tuple[int, ...]:
    """ASNs seen on clearnet nodes in a country, sorted."""
    validate_country(country, "observed_asns")
    found = {
        n.asn for n in snapshot.nodes
        if n.network == CLEARNET and n.country == country and n.asn is not None
    }
    return tuple(sorted(found))


__all__ = [
    "AsnGraph", "CascadeScope", "GraphError", "ModelError", "NodeSnapshot",
    "P2PNode", "RelayTable", "TorRelay", "CLEARNET", "TOR", "OTHER",
    "NETWORKS", "SCOPE_CLEARNET_ONLY", "SCOPE_FULL", "SCOPE_MODES",
    "apply_assignment", "cascade_scope", "composition_stats", "make_asn_graph",
    "observed_asns", "relay_backed_scope",
]
