"""Failure cascade across the physical, routing, and relay layers.

A single cascade run takes a set of removed submarine edges and propagates
the damage: countries that fall out of the main physical component lose
their nodes, the inter-AS graph is re-evaluated on whatever survived, and
(optionally) the tor relay layer is checked against a consensus-weight
threshold. One pass through the stages is the default; the feedback mode
that lets routing losses shrink the main-component choice is behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import GraphError, PhysicalGraph, components, main_component
from .model import (
    TOR,
    AsnGraph,
    CascadeScope,
    ModelError,
    RelayTable,
)
from .tor import relay_survival

THREE_LAYER = "three_layer"
FOUR_LAYER = "four_layer"
LAYER_MODES = (THREE_LAYER, FOUR_LAYER)


@dataclass(frozen=True)
class CascadeConfig:
    """Knobs for one cascade evaluation.

    ``node_failure_fraction`` is the probability that a node in a
    disconnected country actually fails; 1.0 is the strict model. The
    relaxed variant needs a trial RNG. ``cw_failure_threshold`` only matters
    in four-layer mode.
    """

    node_failure_fraction: float = 1.0
    layers: str = THREE_LAYER
    cw_failure_threshold: float = 0.5
    scope_mode: str = "clearnet_only"
    iterate_to_fixpoint: bool = False

    def __post_init__(self):
        if not 0.0 < self.node_failure_fraction <= 1.0:
            raise ModelError(
                f"node_failure_fraction must be in (0, 1], got {self.node_failure_fraction}"
            )
        if self.layers not in LAYER_MODES:
            raise ModelError(f"unknown layer mode {self.layers!r}")
        if not 0.0 < self.cw_failure_threshold < 1.0:
            raise ModelError(
                f"cw_failure_threshold must be in (0, 1), got {self.cw_failure_threshold}"
            )
        if self.scope_mode not in ("clearnet_only", "full"):
            raise ModelError(f"unknown scope mode {self.scope_mode!r}")


@dataclass(frozen=True)
class CascadeOutcome:
    surviving_countries: frozenset[str]
    disconnected_countries: frozenset[str]
    surviving_nodes: frozenset[str]
    disconnected_nodes: frozenset[str]
    tor_layer_failed: bool
    surviving_cw_fraction: float
    disconnection_fraction: float
    failed_asns: frozenset[int] = field(default=frozenset())


def _asn_stage(asn_graph: AsnGraph, active_counts: dict[int, float],
               removed_asns: frozenset[int]) -> tuple[set[int], frozenset[int]]:
    """Largest surviving routing component.

    Returns the winning ASN set and the set of failed ASNs (removed ones plus
    active ASNs that ended up outside the winner). ASNs absent from the graph
    count as isolated vertices.
    """
    active = sorted(a for a in active_counts if a not in removed_asns)
    if not active:
        return set(), frozenset(removed_asns)
    neighbors = asn_graph.neighbors()
    active_set = set(active)
    seen: set[int] = set()
    best_comp: set[int] = set()
    best_key: tuple[float, int] | None = None
    for start in active:
        if start in seen:
            continue
        comp = {start}
        seen.add(start)
        stack = [start]
        while stack:
            v = stack.pop()
            for w in neighbors.get(v, ()):
                if w in active_set and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        key = (sum(active_counts[a] for a in comp), -min(comp))
        if best_key is None or key > best_key:
            best_comp, best_key = comp, key
    failed = frozenset(removed_asns) | (active_set - best_comp)
    return best_comp, failed


def run_cascade(graph: PhysicalGraph, asn_graph: AsnGraph, scope: CascadeScope,
                removed_edges, config: CascadeConfig,
                relays: RelayTable | None = None,
                trial_rng: np.random.Generator | None = None,
                removed_asns=frozenset(),
                node_draws: dict[str, float] | None = None) -> CascadeOutcome:
    """Run one cascade for a concrete removal set.

    Stages: split the physical graph, fail nodes outside the main component
    (all of them, or each with probability ``node_failure_fraction``), fail
    nodes whose ASN is removed or falls outside the largest surviving routing
    component, and in four-layer mode fail every in-scope tor node when the
    surviving relay consensus weight drops below the threshold. Nodes without
    a country skip the geographic stage; nodes without an ASN skip the
    routing stage.

    ``node_draws`` lets a caller reuse one set of failure thresholds across
    several removal sets; without it the relaxed variant draws fresh ones
    from ``trial_rng``.
    """
    removed_asns = frozenset(int(a) for a in removed_asns)
    if config.layers == FOUR_LAYER:
        if relays is None or relays.total_cw <= 0:
            raise ModelError("four-layer mode needs a relay table with positive weight")
    if (config.node_failure_fraction < 1.0 and trial_rng is None
            and node_draws is None):
        raise ModelError("relaxed node failure needs a trial RNG or explicit draws")

    known = set(graph.countries)
    for node in scope.nodes:
        if node.country is not None and node.country not in known:
            raise GraphError(
                f"scope node {node.node_id!r} sits in {node.country}, "
                "which is not in the physical graph"
            )

    partition = components(graph, removed_edges)

    # Failure thresholds are drawn once, over all in-scope nodes in id order,
    # so the set of draws does not depend on which countries disconnected.
    draws = None
    if config.node_failure_fraction < 1.0 and node_draws is None:
        draws = trial_rng.random(len(scope.nodes))

    alive = list(scope.nodes)
    tor_layer_failed = False
    surviving_cw = 1.0
    failed_asns: frozenset[int] = frozenset(removed_asns)
    surviving_countries: frozenset[str] = frozenset(graph.countries)
    disconnected_countries: frozenset[str] = frozenset()

    max_rounds = len(graph.countries) + 1 if config.iterate_to_fixpoint else 1
    fail_prob = config.node_failure_fraction
    draw_of: dict[str, float] = {}
    if node_draws is not None:
        draw_of = node_draws
    elif draws is not None:
        draw_of = {node.node_id: draws[i] for i, node in enumerate(scope.nodes)}

    for _round in range(max_rounds):
        hosting: dict[str, int] = {}
        for node in alive:
            if node.country is not None:
                hosting[node.country] = hosting.get(node.country, 0) + 1
        main_idx = main_component(partition, hosting)
        main_members = set(partition.members[main_idx])
        surviving_countries = frozenset(main_members)
        disconnected_countries = frozenset(known - main_members)

        def survives_geo(node) -> bool:
            if node.country is None or node.country in main_members:
                return True
            if fail_prob >= 1.0:
                return False
            return draw_of[node.node_id] >= fail_prob

        after_geo = [n for n in alive if survives_geo(n)]

        active_counts: dict[int, float] = {}
        for node in after_geo:
            if node.asn is not None:
                active_counts[node.asn] = active_counts.get(node.asn, 0.0) + 1.0
        winner, failed_asns = _asn_stage(asn_graph, active_counts, removed_asns)
        after_routing = [
            n for n in after_geo
            if n.asn is None or (n.asn in winner and n.asn not in removed_asns)
        ]

        if config.layers == FOUR_LAYER and not tor_layer_failed:
            surviving_cw, _online = relay_survival(
                relays, disconnected_countries, failed_asns
            )
            if surviving_cw < config.cw_failure_threshold:
                tor_layer_failed = True
        if tor_layer_failed:
            after_routing = [n for n in after_routing if n.network != TOR]

        if len(after_routing) == len(alive):
            alive = after_routing
            break
        alive = after_routing

    alive_ids = frozenset(n.node_id for n in alive)
    all_ids = frozenset(n.node_id for n in scope.nodes)
    disconnected_nodes = all_ids - alive_ids
    fraction = (len(disconnected_nodes) / len(all_ids)) if all_ids else 0.0
    return CascadeOutcome(
        surviving_countries=surviving_countries,
        disconnected_countries=disconnected_countries,
        surviving_nodes=alive_ids,
        disconnected_nodes=disconnected_nodes,
        tor_layer_failed=tor_layer_failed,
        surviving_cw_fraction=surviving_cw if config.layers == FOUR_LAYER else 1.0,
        disconnection_fraction=fraction,
        failed_asns=failed_asns,
    )


__all__ = ["CascadeConfig", "CascadeOutcome", "FOUR_LAYER", "LAYER_MODES",
           "THREE_LAYER", "run_cascade"]
