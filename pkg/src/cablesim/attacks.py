"""Removal strategies: how an adversary (or chance) picks targets.

Cable strategies produce an ordering over submarine edges and are applied as
prefixes; the capacity strategy orders ASNs by hosted node count and is
applied by cumulative node share.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .graph import GraphError, PhysicalGraph, edge_betweenness, submarine_degree
from .model import CascadeScope, ModelError

RANDOM = "random"
DEGREE = "degree"
BETWEENNESS = "betweenness"
ASN_CAPACITY = "asn_capacity"
STRATEGIES = (RANDOM, DEGREE, BETWEENNESS, ASN_CAPACITY)


@dataclass(frozen=True)
class RemovalPlan:
    strategy: str
    ordered_targets: tuple
    cumulative_metric: tuple[float, ...]

    @property
    def targets_are_asns(self) -> bool:
        return self.strategy == ASN_CAPACITY


def removal_plan(strategy: str, graph: PhysicalGraph,
                 scope: CascadeScope | None = None, seed=None,
                 betweenness_submarine_only: bool = False) -> RemovalPlan:
    """Build the full removal ordering for a strategy.

    ``seed`` (int or numpy Generator) is only consulted by the random
    strategy. ``scope`` is only consulted by asn_capacity. Targeted orderings
    are computed once on the intact graph and never re-ranked mid-attack.
    """
    if strategy not in STRATEGIES:
        raise ModelError(f"unknown strategy {strategy!r}")

    if strategy == ASN_CAPACITY:
        if scope is None or not scope.nodes:
            raise ModelError("asn_capacity needs a non-empty scope")
        counts: dict[int, int] = {}
        for node in scope.nodes:
            if node.asn is not None:
                counts[node.asn] = counts.get(node.asn, 0) + 1
        if not counts:
            raise ModelError("asn_capacity: no in-scope node carries an ASN")
        ordered = sorted(counts, key=lambda a: (-counts[a], a))
        total = sum(counts.values())
        running = 0
        cumulative = []
        for asn in ordered:
            running += counts[asn]
            cumulative.append(running / total)
        return RemovalPlan(strategy, tuple(ordered), tuple(cumulative))

    submarine = list(graph.submarine_edge_ids)
    if not submarine:
        raise GraphError("no submarine edges to target")

    if strategy == RANDOM:
        if seed is None:
            raise ModelError("random strategy needs a seed")
        rng = np.random.default_rng(seed)
        order = [submarine[i] for i in rng.permutation(len(submarine))]
    elif strategy == DEGREE:
        deg = submarine_degree(graph)
        def degree_score(eid):
            a, b = graph.edges[eid].endpoints
            return deg[a] + deg[b]
        order = sorted(submarine, key=lambda e: (-degree_score(e), e))
    else:
        scores = edge_betweenness(graph, submarine_only=betweenness_submarine_only)
        order = sorted(submarine, key=lambda e: (-scores[e], e))

    count = len(order)
    cumulative = tuple((k + 1) / count for k in range(count))
    return RemovalPlan(strategy, tuple(order), cumulative)


def prefix_size(plan: RemovalPlan, p: float) -> int:
    """How many targets a removal fraction ``p`` takes off the table."""
    if not 0.0 <= p <= 1.0:
        raise ModelError(f"removal fraction must be in [0, 1], got {p}")
    if plan.targets_are_asns:
        if p == 0.0:
            return 0
        idx = bisect_left(plan.cumulative_metric, p)
        return min(idx + 1, len(plan.ordered_targets))
    # ceil(p * E), nudged so float noise cannot overshoot an exact integer
    return math.ceil(p * len(plan.ordered_targets) - 1e-12)


def apply_plan(plan: RemovalPlan, p: float) -> frozenset:
    """Concrete removal set for fraction ``p``: edge ids, or ASNs for
    asn_capacity (the shortest prefix whose cumulative node share covers p)."""
    return frozenset(plan.ordered_targets[:prefix_size(plan, p)])


__all__ = ["ASN_CAPACITY", "BETWEENNESS", "DEGREE", "RANDOM", "STRATEGIES",
           "RemovalPlan", "apply_plan", "prefix_size", "removal_plan"]
