"""Tor relay layer and tor-node placement scenarios.

The node census never reveals where tor participants sit, so curve estimates
either bound the truth with placement scenarios (optimistic to adversarial)
or skip placement entirely and tie tor survival to the relay infrastructure.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import PhysicalGraph, GraphError, submarine_degree, validate_country
from .model import (
    CLEARNET,
    TOR,
    ModelError,
    NodeSnapshot,
    RelayTable,
    observed_asns,
)

logger = logging.getLogger(__name__)

CLEARNET_ONLY = "clearnet_only"
PROPORTIONAL = "proportional"
UNIFORM = "uniform"
CLUSTERED = "clustered"
WORST_CASE = "worst_case"
SCENARIO_KINDS = (CLEARNET_ONLY, PROPORTIONAL, UNIFORM, CLUSTERED, WORST_CASE)

# Scenarios whose placement involves random draws and is re-sampled per trial.
STOCHASTIC_KINDS = (PROPORTIONAL, UNIFORM, CLUSTERED, WORST_CASE)

DEFAULT_CLUSTER_WEIGHTS = {"DE": 0.30, "US": 0.15, "FR": 0.10, "NL": 0.08}

# Synthetic ASNs for countries with no observed one sit in the private range.
_SYNTHETIC_ASN_BASE = 4_200_000_000


def synthetic_asn(country: str) -> int:
    """Deterministic private-range ASN standing in for an unobserved network."""
    a, b = country
    return _SYNTHETIC_ASN_BASE + (ord(a) - 65) * 26 + (ord(b) - 65)


@dataclass(frozen=True)
class TorScenario:
    kind: str
    cluster_weights: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_CLUSTER_WEIGHTS))

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ModelError(f"unknown scenario kind {self.kind!r}")
        total = 0.0
        for country, weight in self.cluster_weights.items():
            validate_country(country, "cluster weights")
            if weight < 0:
                raise ModelError(f"negative cluster weight for {country}")
            total += weight
        if total > 1.0 + 1e-9:
            raise ModelError(f"cluster weights sum to {total:.4f} > 1")

    @property
    def stochastic(self) -> bool:
        return self.kind in STOCHASTIC_KINDS


@dataclass(frozen=True)
class ScenarioAssignment:
    """Placement of tor nodes: node_id -> (country, asn)."""

    scenario_kind: str
    placements: dict[str, tuple[str, int]]
    synthetic_asn_countries: tuple[str, ...] = ()


def worst_case_country(graph: PhysicalGraph) -> str:
    """Least cable-connected country: minimum submarine degree of at least 1,
    ties broken lexicographically."""
    degrees = submarine_degree(graph)
    candidates = sorted(c for c, d in degrees.items() if d >= 1)
    if not candidates:
        raise GraphError("no country has a submarine edge")
    return min(candidates, key=lambda c: (degrees[c], c))


def _clearnet_country_counts(snapshot: NodeSnapshot) -> dict[str, int]:
    counts: dict[str, int] = {}
    for node in snapshot.nodes:
        if node.network == CLEARNET and node.country is not None:
            counts[node.country] = counts.get(node.country, 0) + 1
    return counts


def _country_weights(scenario: TorScenario, snapshot: NodeSnapshot,
                     graph: PhysicalGraph) -> tuple[list[str], list[float]]:
    counts = _clearnet_country_counts(snapshot)
    hosts = sorted(counts)
    if scenario.kind == PROPORTIONAL:
        if not hosts:
            raise ModelError("proportional scenario needs clearnet nodes with countries")
        total = sum(counts[c] for c in hosts)
        return hosts, [counts[c] / total for c in hosts]
    if scenario.kind == UNIFORM:
        if not hosts:
            raise ModelError("uniform scenario needs clearnet nodes with countries")
        return hosts, [1.0 / len(hosts)] * len(hosts)
    if scenario.kind == CLUSTERED:
        for country in scenario.cluster_weights:
            if country not in graph.countries:
                raise ModelError(f"clustered scenario country {country} not in graph")
        named = sorted(scenario.cluster_weights)
        named_mass = sum(scenario.cluster_weights[c] for c in named)
        remainder = max(0.0, 1.0 - named_mass)
        rest = [c for c in hosts if c not in scenario.cluster_weights]
        countries = list(named)
        weights = [scenario.cluster_weights[c] for c in named]
        if rest and remainder > 0:
            countries.extend(rest)
            weights.extend([remainder / len(rest)] * len(rest))
        elif remainder > 0:
            # Nowhere to spread the remainder; scale the named weights up.
            weights = [w / named_mass for w in weights]
        return countries, weights
    if scenario.kind == WORST_CASE:
        return [worst_case_country(graph)], [1.0]
    raise ModelError(f"scenario {scenario.kind!r} does not place nodes")


def draw_placements(rng: np.random.Generator, tor_ids, countries, weights,
                    asn_pools) -> tuple[dict[str, tuple[str, int]], set[str]]:
    """One placement draw: country per node, then an ASN from that country's pool.

    Draw order is fixed (one choice vector, then per-node pool picks for pools
    larger than one), so any two callers handing in the same generator state
    and the same inputs get the same placements. ``asn_pools`` is aligned with
    ``countries``; an empty pool falls back to the synthetic per-country ASN.
    """
    probs = np.asarray(weights, dtype=float)
    probs = probs / probs.sum()
    picks = rng.choice(len(countries), size=len(tor_ids), p=probs)
    placements: dict[str, tuple[str, int]] = {}
    synthetic_used: set[str] = set()
    for node_id, pick in zip(tor_ids, picks):
        pick = int(pick)
        country = countries[pick]
        pool = asn_pools[pick]
        if len(pool):
            asn = int(pool[int(rng.integers(len(pool)))]) if len(pool) > 1 else int(pool[0])
        else:
            asn = synthetic_asn(country)
            synthetic_used.add(country)
        placements[node_id] = (country, asn)
    return placements, synthetic_used


def assign_tor_scenario(scenario: TorScenario, snapshot: NodeSnapshot,
                        graph: PhysicalGraph, rng) -> ScenarioAssignment:
    """Place every tor node in a country (and on an ASN) per the scenario.

    ``rng`` is an int seed or a numpy Generator. Countries are drawn from the
    scenario's distribution; the ASN is drawn uniformly from ASNs observed on
    clearnet nodes in the chosen country, falling back to a flagged synthetic
    per-country ASN when none was observed.
    """
    if scenario.kind == CLEARNET_ONLY:
        return ScenarioAssignment(scenario.kind, {})
    rng = np.random.default_rng(rng)
    tor_ids = sorted(n.node_id for n in snapshot.nodes if n.network == TOR)
    if not tor_ids:
        return ScenarioAssignment(scenario.kind, {})
    countries, weights = _country_weights(scenario, snapshot, graph)
    pools = [observed_asns(snapshot, c) for c in countries]
    placements, synthetic_used = draw_placements(rng, tor_ids, countries,
                                                 weights, pools)
    if synthetic_used:
        logger.warning("scenario %s: no observed ASN in %s; using synthetic isolated ASNs",
                       scenario.kind, ", ".join(sorted(synthetic_used)))
    return ScenarioAssignment(scenario.kind, placements, tuple(sorted(synthetic_used)))


def apportion_tor_scenario(scenario: TorScenario, snapshot: NodeSnapshot,
                           graph: PhysicalGraph) -> ScenarioAssignment:
    """Variance-free alternative to sampling: largest-remainder apportionment.

    Tor nodes, sorted by id, fill countries in sorted order according to the
    scenario weights. No randomness; the ASN is the smallest observed one.
    """
    if scenario.kind == CLEARNET_ONLY:
        return ScenarioAssignment(scenario.kind, {})
    tor_ids = sorted(n.node_id for n in snapshot.nodes if n.network == TOR)
    if not tor_ids:
        return ScenarioAssignment(scenario.kind, {})
    countries, weights = _country_weights(scenario, snapshot, graph)
    total_weight = sum(weights)
    quotas = [len(tor_ids) * w / total_weight for w in weights]
    counts = [math.floor(q) for q in quotas]
    leftover = len(tor_ids) - sum(counts)
    by_remainder = sorted(range(len(countries)),
                          key=lambda i: (-(quotas[i] - counts[i]), countries[i]))
    for i in by_remainder[:leftover]:
        counts[i] += 1

    placements: dict[str, tuple[str, int]] = {}
    synthetic_used: set[str] = set()
    cursor = 0
    for country, count in zip(countries, counts):
        pool = observed_asns(snapshot, country)
        if pool:
            asn = int(pool[0])
        else:
            asn = synthetic_asn(country)
            synthetic_used.add(country)
        for node_id in tor_ids[cursor:cursor + count]:
            placements[node_id] = (country, asn)
        cursor += count
    return ScenarioAssignment(scenario.kind, placements, tuple(sorted(synthetic_used)))


def relay_survival(relays: RelayTable, disconnected_countries,
                   failed_asns) -> tuple[float, frozenset[str]]:
    """Surviving consensus-weight fraction and the fingerprints still online.

    A relay is offline when its country lost connectivity or its ASN failed.
    """
    if relays.total_cw <= 0:
        raise ModelError("relay table has zero total consensus weight")
    disconnected = frozenset(disconnected_countries)
    failed = frozenset(failed_asns)
    surviving_cw = 0.0
    online: list[str] = []
    for relay in relays.relays:
        if relay.country in disconnected or relay.asn in failed:
            continue
        surviving_cw += relay.consensus_weight
        online.append(relay.fingerprint)
    return surviving_cw / relays.total_cw, frozenset(online)


__all__ = [
    "CLEARNET_ONLY", "PROPORTIONAL", "UNIFORM", "CLUSTERED", "WORST_CASE",
    "SCENARIO_KINDS", "STOCHASTIC_KINDS", "DEFAULT_CLUSTER_WEIGHTS",
    "ScenarioAssignment", "TorScenario", "apportion_tor_scenario",
    "assign_tor_scenario", "draw_placements", "relay_survival",
    "synthetic_asn", "worst_case_country",
]
