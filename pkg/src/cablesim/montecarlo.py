"""Seeded Monte Carlo estimation of disconnection curves and thresholds.

Each trial draws one removal ordering and reuses its prefixes across the
whole removal grid, which keeps per-trial curves comparable across grid
points and lets the sweep share component work between neighbouring
fractions. Trial seeds derive from the master seed and the trial index
alone, so results do not depend on worker count or scheduling; aggregation
runs in trial order with numpy's pairwise summation.

The grid sweep here is an optimised re-statement of cascade.run_cascade on
per-(country, ASN) counts; tests pin the two paths to identical fractions.
The feedback mode (iterate_to_fixpoint) has no count-space shortcut and runs
through run_cascade directly, one call per grid point.
"""

from __future__ import annotations

import logging
import math
from bisect import bisect_left
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .attacks import ASN_CAPACITY, RANDOM, STRATEGIES, RemovalPlan, apply_plan, removal_plan
from .cascade import CascadeConfig, FOUR_LAYER, THREE_LAYER, run_cascade
from .graph import GraphError, PhysicalGraph
from .model import (
    CLEARNET,
    SCOPE_CLEARNET_ONLY,
    SCOPE_FULL,
    TOR,
    AsnGraph,
    CascadeScope,
    ModelError,
    NodeSnapshot,
    RelayTable,
    apply_assignment,
    cascade_scope,
    composition_stats,
    observed_asns,
    relay_backed_scope,
)
from .tor import CLEARNET_ONLY, SCENARIO_KINDS, TorScenario, draw_placements, synthetic_asn
from . import tor as tor_scenarios

logger = logging.getLogger(__name__)

DEFAULT_SENSITIVITY_THRESHOLDS = (0.05, 0.10, 0.15, 0.20)
DEFAULT_CW_THRESHOLDS = (0.3, 0.5, 0.7)

SAMPLED = "sample"
APPORTIONED = "apportion"

# Node code in the flattened scope tables: >= 0 is a (country, asn) pair
# index, -1 - c is country c with no ASN, _EXEMPT skips the geographic stage.
_EXEMPT = -(10 ** 6)


def default_grid(step: float = 0.02) -> tuple[float, ...]:
    """Removal fractions 0..1 inclusive at the given step."""
    if not 0 < step <= 1:
        raise ModelError(f"grid step must be in (0, 1], got {step}")
    count = round(1.0 / step)
    if abs(count * step - 1.0) > 1e-9:
        raise ModelError(f"grid step {step} does not divide 1.0")
    return tuple(round(i * step, 10) for i in range(count + 1))


@dataclass(frozen=True)
class CurveConfig:
    """Full recipe for one curve estimate. ``master_seed`` is mandatory."""

    master_seed: int
    trials: int = 1000
    p_grid: tuple[float, ...] = default_grid()
    disconnection_threshold: float = 0.10
    strategy: str = RANDOM
    cascade: CascadeConfig = CascadeConfig()
    scenario: TorScenario | None = None
    scenario_method: str = SAMPLED
    betweenness_submarine_only: bool = False
    jobs: int = 1

    def __post_init__(self):
        if not isinstance(self.master_seed, int):
            raise ModelError("master_seed must be an integer")
        if self.trials < 1:
            raise ModelError("trials must be positive")
        if self.strategy not in STRATEGIES:
            raise ModelError(f"unknown strategy {self.strategy!r}")
        if self.scenario_method not in (SAMPLED, APPORTIONED):
            raise ModelError(f"unknown scenario method {self.scenario_method!r}")
        if not 0.0 < self.disconnection_threshold < 1.0:
            raise ModelError("disconnection threshold must be in (0, 1)")
        grid = tuple(self.p_grid)
        if not grid:
            raise ModelError("empty removal grid")
        last = -1.0
        for p in grid:
            if not 0.0 <= p <= 1.0 or p <= last:
                raise ModelError("removal grid must be strictly increasing within [0, 1]")
            last = p
        if self.jobs < 1:
            raise ModelError("jobs must be positive")
        if (self.scenario is not None and self.scenario.kind != CLEARNET_ONLY
                and self.cascade.scope_mode != SCOPE_FULL):
            raise ModelError("placement scenarios need scope_mode='full'")


def trial_generator(master_seed: int, trial: int) -> np.random.Generator:
    """The RNG for one trial, derived only from (master_seed, trial)."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(trial,))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class PercolationCurve:
    ps: tuple[float, ...]
    means: tuple[float, ...]
    stds: tuple[float, ...]
    stderrs: tuple[float, ...]
    medians: tuple[float, ...]
    trials: int
    config: CurveConfig = field(repr=False)
    trial_fractions: np.ndarray | None = field(repr=False, compare=False, default=None)

    def to_csv(self) -> str:
        lines = ["p,mean,std,stderr"]
        for p, mean, std, err in zip(self.ps, self.means, self.stds, self.stderrs):
            lines.append(f"{p:.6f},{mean:.6f},{std:.6f},{err:.6f}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PcEstimate:
    p_c: float | None
    threshold: float
    statistic: str = "mean"

    @property
    def reached(self) -> bool:
        return self.p_c is not None

    def render(self) -> str:
        return "not_reached" if self.p_c is None else f"{self.p_c:.6f}"


def estimate_pc(curve: PercolationCurve, threshold: float | None = None,
                statistic: str = "mean") -> PcEstimate:
    """Smallest grid fraction whose statistic exceeds the threshold.

    "Not reached" is a legitimate answer (p_c None), not an error.
    """
    if threshold is None:
        threshold = curve.config.disconnection_threshold
    if statistic == "mean":
        values = curve.means
    elif statistic == "median":
        values = curve.medians
    else:
        raise ModelError(f"unknown p_c statistic {statistic!r}")
    for p, value in zip(curve.ps, values):
        if value > threshold:
            return PcEstimate(p, threshold, statistic)
    return PcEstimate(None, threshold, statistic)


def threshold_sensitivity(curve: PercolationCurve,
                          thresholds=DEFAULT_SENSITIVITY_THRESHOLDS,
                          statistic: str = "mean") -> tuple[tuple[float, PcEstimate], ...]:
    """p_c at several disconnection thresholds, from one shared curve."""
    return tuple((t, estimate_pc(curve, t, statistic)) for t in sorted(thresholds))


# ---------------------------------------------------------------------------
# Precomputed state for the trial kernel.
# ---------------------------------------------------------------------------

class _CurveState:
    """Flattened, picklable inputs shared by every trial of one curve."""

    def __init__(self):
        self.country_ids: list[str] = []
        self.land_pairs: list[tuple[int, int]] = []
        self.sub_pairs: list[tuple[int, int]] = []
        self.static_plan: RemovalPlan | None = None
        self.edge_order: np.ndarray | None = None
        self.asn_order: np.ndarray | None = None
        self.asn_cumulative: list[float] = []
        self.asn_ids: np.ndarray = np.empty(0, dtype=np.int64)
        self.adjacency = None
        self.pair_country: np.ndarray = np.empty(0, dtype=np.int64)
        self.pair_asn: np.ndarray = np.empty(0, dtype=np.int64)
        self.pair_clear: np.ndarray = np.empty(0, dtype=np.int64)
        self.pair_tor: np.ndarray = np.empty(0, dtype=np.int64)
        self.geo_only_country: np.ndarray = np.empty(0, dtype=np.int64)
        self.geo_only_tor: np.ndarray = np.empty(0, dtype=np.int64)
        self.exempt_tor: int = 0
        self.node_ids: list[str] = []
        self.node_code: np.ndarray = np.empty(0, dtype=np.int64)
        self.node_tor: np.ndarray = np.empty(0, dtype=bool)
        self.country_weight: np.ndarray = np.empty(0, dtype=np.int64)
        self.scenario_tor_ids: list[str] = []
        self.scenario_countries: list[str] = []
        self.scenario_weights: np.ndarray = np.empty(0)
        self.scenario_pools: list[np.ndarray] = []
        self.static_placements: dict[str, tuple[str, int]] | None = None
        self.relay_country: np.ndarray = np.empty(0, dtype=np.int64)
        self.relay_asn: np.ndarray = np.empty(0, dtype=np.int64)
        self.relay_cw: np.ndarray = np.empty(0)
        self.relay_total_cw: float = 0.0


def _build_state(config: CurveConfig, graph: PhysicalGraph, asn_graph: AsnGraph,
                 snapshot: NodeSnapshot, relays: RelayTable | None) -> _CurveState:
    state = _CurveState()
    cascade_cfg = config.cascade
    four_layer = cascade_cfg.layers == FOUR_LAYER
    if four_layer and (relays is None or relays.total_cw <= 0):
        raise ModelError("four-layer curves need a relay table with positive weight")

    state.country_ids = list(graph.countries)
    cindex = {c: i for i, c in enumerate(state.country_ids)}
    for eid in graph.land_edge_ids:
        a, b = graph.edges[eid].endpoints
        state.land_pairs.append((cindex[a], cindex[b]))
    sub_ids = list(graph.submarine_edge_ids)
    for eid in sub_ids:
        a, b = graph.edges[eid].endpoints
        state.sub_pairs.append((cindex[a], cindex[b]))

    scenario = config.scenario
    scenario_active = scenario is not None and scenario.kind != CLEARNET_ONLY
    include_file_tor = (not scenario_active
                        and (cascade_cfg.scope_mode == SCOPE_FULL or four_layer))

    clear_nodes = []
    tor_geo_nodes = []
    exempt_ids: list[str] = []
    for node in snapshot.nodes:
        if node.network == CLEARNET:
            if node.country is not None and node.asn is not None:
                clear_nodes.append(node)
        elif node.network == TOR and not scenario_active:
            if node.country is not None and include_file_tor:
                tor_geo_nodes.append(node)
            elif four_layer:
                exempt_ids.append(node.node_id)

    for node in clear_nodes + tor_geo_nodes:
        if node.country not in cindex:
            raise GraphError(
                f"node {node.node_id!r} sits in {node.country}, "
                "which is not in the physical graph"
            )

    # ASN universe: routing-graph vertices, every ASN seen on a node or a
    # relay, plus the synthetic per-country fallbacks a scenario might mint.
    universe: set[int] = set(asn_graph.vertices)
    universe.update(n.asn for n in clear_nodes)
    universe.update(n.asn for n in tor_geo_nodes if n.asn is not None)
    if relays is not None:
        universe.update(r.asn for r in relays.relays)
    if scenario_active:
        universe.update(synthetic_asn(c) for c in state.country_ids)
    state.asn_ids = np.asarray(sorted(universe), dtype=np.int64)
    aindex = {int(a): i for i, a in enumerate(state.asn_ids)}
    rows, cols = [], []
    for a, b in sorted(asn_graph.edges):
        ia, ib = aindex[a], aindex[b]
        rows.extend((ia, ib))
        cols.extend((ib, ia))
    n_asn = len(state.asn_ids)
    state.adjacency = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n_asn, n_asn)
    )

    pair_index: dict[tuple[int, int], int] = {}
    clear_counts: dict[int, int] = {}
    tor_counts: dict[int, int] = {}
    entries: list[tuple[str, int, bool]] = []

    def pair_id(ci: int, ai: int) -> int:
        key = (ci, ai)
        pid = pair_index.get(key)
        if pid is None:
            pid = pair_index[key] = len(pair_index)
        return pid

    for node in clear_nodes:
        pid = pair_id(cindex[node.country], aindex[node.asn])
        clear_counts[pid] = clear_counts.get(pid, 0) + 1
        entries.append((node.node_id, pid, False))

    geo_only: dict[int, int] = {}
    for node in tor_geo_nodes:
        ci = cindex[node.country]
        if node.asn is not None:
            pid = pair_id(ci, aindex[node.asn])
            tor_counts[pid] = tor_counts.get(pid, 0) + 1
            entries.append((node.node_id, pid, True))
        else:
            geo_only[ci] = geo_only.get(ci, 0) + 1
            entries.append((node.node_id, -1 - ci, True))
    for node_id in exempt_ids:
        entries.append((node_id, _EXEMPT, True))
    state.exempt_tor = len(exempt_ids)

    n_pairs = len(pair_index)
    state.pair_country = np.zeros(n_pairs, dtype=np.int64)
    state.pair_asn = np.zeros(n_pairs, dtype=np.int64)
    state.pair_clear = np.zeros(n_pairs, dtype=np.int64)
    state.pair_tor = np.zeros(n_pairs, dtype=np.int64)
    for (ci, ai), pid in pair_index.items():
        state.pair_country[pid] = ci
        state.pair_asn[pid] = ai
        state.pair_clear[pid] = clear_counts.get(pid, 0)
        state.pair_tor[pid] = tor_counts.get(pid, 0)
    state.geo_only_country = np.asarray(sorted(geo_only), dtype=np.int64)
    state.geo_only_tor = np.asarray(
        [geo_only[c] for c in sorted(geo_only)], dtype=np.int64
    )

    entries.sort(key=lambda item: item[0])
    state.node_ids = [nid for nid, _, _ in entries]
    state.node_code = np.asarray([code for _, code, _ in entries], dtype=np.int64)
    state.node_tor = np.asarray([tor for _, _, tor in entries], dtype=bool)

    weight = np.zeros(len(state.country_ids), dtype=np.int64)
    if n_pairs:
        np.add.at(weight, state.pair_country, state.pair_clear + state.pair_tor)
    if len(state.geo_only_country):
        np.add.at(weight, state.geo_only_country, state.geo_only_tor)
    state.country_weight = weight

    if scenario_active:
        state.scenario_tor_ids = sorted(
            n.node_id for n in snapshot.nodes if n.network == TOR
        )
        countries, weights = tor_scenarios._country_weights(scenario, snapshot, graph)
        state.scenario_countries = countries
        state.scenario_weights = np.asarray(weights, dtype=float)
        state.scenario_pools = [
            np.asarray(observed_asns(snapshot, c), dtype=np.int64) for c in countries
        ]
        if config.scenario_method == APPORTIONED:
            state.static_placements = tor_scenarios.apportion_tor_scenario(
                scenario, snapshot, graph
            ).placements

    if config.strategy == ASN_CAPACITY:
        base_nodes = tuple(sorted(clear_nodes + tor_geo_nodes,
                                  key=lambda n: n.node_id))
        hosting: dict[str, int] = {}
        for n in base_nodes:
            if n.country is not None:
                hosting[n.country] = hosting.get(n.country, 0) + 1
        plan = removal_plan(ASN_CAPACITY, graph, CascadeScope(base_nodes, hosting))
        state.static_plan = plan
        state.asn_order = np.asarray(
            [aindex[a] for a in plan.ordered_targets], dtype=np.int64
        )
        state.asn_cumulative = list(plan.cumulative_metric)
    elif config.strategy != RANDOM:
        plan = removal_plan(
            config.strategy, graph,
            betweenness_submarine_only=config.betweenness_submarine_only,
        )
        state.static_plan = plan
        order_index = {eid: i for i, eid in enumerate(sub_ids)}
        state.edge_order = np.asarray(
            [order_index[eid] for eid in plan.ordered_targets], dtype=np.int64
        )

    if relays is not None:
        rc, ra, rcw = [], [], []
        for relay in relays.relays:
            # a relay in a country outside the model is untouched by geography
            rc.append(cindex.get(relay.country, -1))
            ra.append(aindex.get(relay.asn, -1))
            rcw.append(relay.consensus_weight)
        state.relay_country = np.asarray(rc, dtype=np.int64)
        state.relay_asn = np.asarray(ra, dtype=np.int64)
        state.relay_cw = np.asarray(rcw, dtype=float)
        state.relay_total_cw = relays.total_cw
    return state


def _prefix_sizes(state: _CurveState, config: CurveConfig) -> list[int]:
    grid = config.p_grid
    if config.strategy == ASN_CAPACITY:
        cum = state.asn_cumulative
        sizes = []
        for p in grid:
            if p == 0.0:
                sizes.append(0)
            else:
                sizes.append(min(bisect_left(cum, p) + 1, len(cum)))
        return sizes
    count = len(state.sub_pairs)
    return [math.ceil(p * count - 1e-12) for p in grid]


# ---------------------------------------------------------------------------
# Fast trial kernel.
# ---------------------------------------------------------------------------

def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


class _PairView:
    """Pair tables for one trial, possibly extended by placed tor nodes."""

    def __init__(self, state: _CurveState, pair_country, pair_asn,
                 pair_clear, pair_tor):
        self.asn_ids = state.asn_ids
        self.adjacency = state.adjacency
        self.relay_country = state.relay_country
        self.relay_asn = state.relay_asn
        self.relay_cw = state.relay_cw
        self.relay_total_cw = state.relay_total_cw
        self.geo_only_country = state.geo_only_country
        self.pair_country = pair_country
        self.pair_asn = pair_asn
        self.pair_clear = pair_clear
        self.pair_tor = pair_tor


def _stage4_fraction(view: _PairView, config: CurveConfig, surv: np.ndarray,
                     live_clear: np.ndarray, live_tor: np.ndarray,
                     geo_only_live: np.ndarray, exempt_live: float,
                     removed_mask: np.ndarray | None, total: int) -> float:
    """Routing stage plus (in four-layer mode) the relay check, on counts."""
    n_asn = len(view.asn_ids)
    counts = np.bincount(view.pair_asn, weights=live_clear + live_tor,
                         minlength=n_asn)
    nonzero = counts > 0
    eligible = nonzero if removed_mask is None else (nonzero & ~removed_mask)
    surviving_clear = 0.0
    surviving_tor = 0.0
    winner_mask = np.zeros(n_asn, dtype=bool)
    if eligible.any():
        idx = np.flatnonzero(eligible)
        sub = view.adjacency[idx][:, idx]
        _count, labels = connected_components(sub, directed=False)
        comp_weight = np.bincount(labels, weights=counts[idx])
        best = comp_weight.max()
        candidates = np.flatnonzero(comp_weight == best)
        if len(candidates) == 1:
            winner = int(candidates[0])
        else:
            # idx ascends by ASN, so a label's first row is its smallest member
            first_row = {}
            for row, label in enumerate(labels):
                if label not in first_row:
                    first_row[label] = row
            winner = min((int(c) for c in candidates), key=lambda c: first_row[c])
        winner_mask[idx[labels == winner]] = True
        pair_ok = winner_mask[view.pair_asn]
        surviving_clear = float(np.sum(live_clear, where=pair_ok))
        surviving_tor = float(np.sum(live_tor, where=pair_ok))

    geo_only_total = float(geo_only_live.sum()) if len(geo_only_live) else 0.0

    tor_failed = False
    if config.cascade.layers == FOUR_LAYER:
        failed_mask = nonzero & ~winner_mask
        if removed_mask is not None:
            failed_mask = failed_mask | removed_mask
        ok_country = np.where(view.relay_country >= 0,
                              surv[view.relay_country], True)
        failed_asn = np.where(view.relay_asn >= 0,
                              failed_mask[view.relay_asn], False)
        online = ok_country & ~failed_asn
        cw_fraction = float(np.sum(view.relay_cw, where=online)) / view.relay_total_cw
        tor_failed = cw_fraction < config.cascade.cw_failure_threshold

    if tor_failed:
        surviving = surviving_clear
    else:
        surviving = surviving_clear + surviving_tor + geo_only_total + exempt_live
    # (total - surviving) / total rather than 1 - surviving/total: both terms
    # are integer-valued, so this divides exactly like the reference path
    return (total - surviving) / total if total else 0.0


def _evaluate_point(view: _PairView, config: CurveConfig, surv: np.ndarray,
                    removed_mask, fail_clear, fail_tor, fail_geo,
                    geo_only_tor: np.ndarray, exempt: float, total: int) -> float:
    pair_surv = surv[view.pair_country]
    geo_surv = (surv[view.geo_only_country] if len(geo_only_tor)
                else np.empty(0, dtype=bool))
    if fail_clear is None:
        live_clear = np.where(pair_surv, view.pair_clear, 0.0)
        live_tor = np.where(pair_surv, view.pair_tor, 0.0)
        geo_live = np.where(geo_surv, geo_only_tor, 0.0)
    else:
        live_clear = np.where(pair_surv, view.pair_clear,
                              view.pair_clear - fail_clear)
        live_tor = np.where(pair_surv, view.pair_tor, view.pair_tor - fail_tor)
        geo_live = np.where(geo_surv, geo_only_tor, geo_only_tor - fail_geo)
    return _stage4_fraction(view, config, surv, live_clear, live_tor,
                            geo_live, exempt, removed_mask, total)


def _full_graph_survivors(state: _CurveState, country_weight) -> np.ndarray:
    """Main-component mask of the intact physical graph."""
    n = len(state.country_ids)
    parent = list(range(n))
    for a, b in state.land_pairs + state.sub_pairs:
        ra, rb = _find(parent, a), _find(parent, b)
        if ra != rb:
            parent[rb] = ra
    roots = np.asarray([_find(parent, i) for i in range(n)])
    best_root = -1
    best_key = None
    for root in sorted({int(r) for r in roots}):
        members = np.flatnonzero(roots == root)
        key = (int(country_weight[members].sum()), len(members), -int(members.min()))
        if best_key is None or key > best_key:
            best_key, best_root = key, root
    return roots == best_root


def _trial_row(state: _CurveState, config: CurveConfig, trial: int,
               prefix_sizes: list[int], memo: dict) -> np.ndarray:
    """Disconnection fractions for every grid point of one trial.

    Per-trial draws happen in a fixed order: removal permutation (random
    strategy only), tor placements (sampled scenarios only), then one node
    failure threshold per in-scope node (relaxed variant only), all from the
    single stream of trial_generator(master_seed, trial).
    """
    rng = trial_generator(config.master_seed, trial)
    n_countries = len(state.country_ids)
    fail_fraction = config.cascade.node_failure_fraction

    if config.strategy == RANDOM:
        order = rng.permutation(len(state.sub_pairs))
    else:
        order = state.edge_order

    pair_country = state.pair_country
    pair_asn = state.pair_asn
    pair_clear = state.pair_clear.astype(float)
    pair_tor = state.pair_tor.astype(float)
    geo_only_tor = state.geo_only_tor.astype(float)
    country_weight = state.country_weight
    node_ids = state.node_ids
    node_code = state.node_code
    node_tor = state.node_tor

    scenario = config.scenario
    if (scenario is not None and scenario.kind != CLEARNET_ONLY
            and state.scenario_tor_ids):
        if state.static_placements is not None:
            placements = state.static_placements
        else:
            placements, _synthetic = draw_placements(
                rng, state.scenario_tor_ids, state.scenario_countries,
                state.scenario_weights, state.scenario_pools,
            )
        cindex = {c: i for i, c in enumerate(state.country_ids)}
        aindex = {int(a): i for i, a in enumerate(state.asn_ids)}
        extra: dict[tuple[int, int], int] = {}
        placed_entries = []
        for node_id, (country, asn) in placements.items():
            key = (cindex[country], aindex[asn])
            extra[key] = extra.get(key, 0) + 1
            placed_entries.append((node_id, key))
        base = len(pair_country)
        extra_keys = sorted(extra)
        key_pid = {key: base + i for i, key in enumerate(extra_keys)}
        pair_country = np.concatenate([
            pair_country, np.asarray([k[0] for k in extra_keys], dtype=np.int64)
        ])
        pair_asn = np.concatenate([
            pair_asn, np.asarray([k[1] for k in extra_keys], dtype=np.int64)
        ])
        pair_clear = np.concatenate([pair_clear, np.zeros(len(extra_keys))])
        pair_tor = np.concatenate([
            pair_tor, np.asarray([extra[k] for k in extra_keys], dtype=float)
        ])
        country_weight = country_weight.copy()
        np.add.at(country_weight,
                  np.asarray([k[0] for k in extra_keys], dtype=np.int64),
                  np.asarray([extra[k] for k in extra_keys], dtype=np.int64))
        if fail_fraction < 1.0:
            merged = [(nid, int(code), bool(tor)) for nid, code, tor
                      in zip(node_ids, node_code, node_tor)]
            merged.extend((nid, key_pid[key], True) for nid, key in placed_entries)
            merged.sort(key=lambda item: item[0])
            node_ids = [nid for nid, _, _ in merged]
            node_code = np.asarray([code for _, code, _ in merged], dtype=np.int64)
            node_tor = np.asarray([tor for _, _, tor in merged], dtype=bool)

    view = _PairView(state, pair_country, pair_asn, pair_clear, pair_tor)
    n_pairs = len(pair_country)

    fail_clear = fail_tor = fail_geo = None
    if fail_fraction < 1.0:
        draws = rng.random(len(node_ids))
        failed = draws < fail_fraction
        paired = failed & (node_code >= 0)
        fail_clear = np.bincount(node_code[paired & ~node_tor],
                                 minlength=n_pairs).astype(float)
        fail_tor = np.bincount(node_code[paired & node_tor],
                               minlength=n_pairs).astype(float)
        geo_sel = failed & (node_code < 0) & (node_code != _EXEMPT)
        if len(state.geo_only_country):
            positions = np.searchsorted(state.geo_only_country,
                                        -1 - node_code[geo_sel])
            fail_geo = np.bincount(
                positions, minlength=len(state.geo_only_country)
            ).astype(float)
        else:
            fail_geo = np.empty(0)

    total = int(pair_clear.sum() + pair_tor.sum() + geo_only_tor.sum()) \
        + state.exempt_tor
    grid_size = len(config.p_grid)
    fractions = np.zeros(grid_size)
    if total == 0:
        return fractions
    exempt = float(state.exempt_tor)

    if config.strategy == ASN_CAPACITY:
        surv = _full_graph_survivors(state, country_weight)
        for gi in range(grid_size):
            m = prefix_sizes[gi]
            value = memo.get(m)
            if value is None:
                removed_mask = np.zeros(len(state.asn_ids), dtype=bool)
                removed_mask[state.asn_order[:m]] = True
                value = _evaluate_point(view, config, surv, removed_mask,
                                        fail_clear, fail_tor, fail_geo,
                                        geo_only_tor, exempt, total)
                memo[m] = value
            fractions[gi] = value
        return fractions

    # Incremental union-find over the removal grid, largest removal first:
    # stepping to a smaller fraction only restores edges, and the running
    # main-component choice stays valid because a merge can only improve a
    # component's (hosted nodes, country count, smallest member) key.
    parent = list(range(n_countries))
    weight = [int(w) for w in country_weight]
    size = [1] * n_countries
    minc = list(range(n_countries))
    best_root = 0
    best_key = (-1, -1, 0)

    def union(a: int, b: int):
        nonlocal best_root, best_key
        ra, rb = _find(parent, a), _find(parent, b)
        if ra == rb:
            return
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        weight[ra] += weight[rb]
        size[ra] += size[rb]
        if minc[rb] < minc[ra]:
            minc[ra] = minc[rb]
        key = (weight[ra], size[ra], -minc[ra])
        if key > best_key:
            best_key, best_root = key, ra

    for a, b in state.land_pairs:
        union(a, b)
    grid_desc = sorted(range(grid_size), key=lambda gi: -prefix_sizes[gi])
    sub_pairs = state.sub_pairs
    prev_k = prefix_sizes[grid_desc[0]]
    for ei in order[prev_k:]:
        a, b = sub_pairs[ei]
        union(a, b)
    # the union hook only sees merges, so seed the best key with a full scan
    for i in range(n_countries):
        if parent[i] == i:
            key = (weight[i], size[i], -minc[i])
            if key > best_key:
                best_key, best_root = key, i

    surv = np.zeros(n_countries, dtype=bool)
    for gi in grid_desc:
        k = prefix_sizes[gi]
        for ei in order[k:prev_k]:
            a, b = sub_pairs[ei]
            union(a, b)
        prev_k = k
        root = best_root
        for i in range(n_countries):
            surv[i] = _find(parent, i) == root
        key = surv.tobytes()
        value = memo.get(key)
        if value is None:
            value = _evaluate_point(view, config, surv, None,
                                    fail_clear, fail_tor, fail_geo,
                                    geo_only_tor, exempt, total)
            memo[key] = value
        fractions[gi] = value
    return fractions


# ---------------------------------------------------------------------------
# Reference path: one run_cascade call per grid point. Slow, but it carries
# the full semantics (including iterate_to_fixpoint) and doubles as the
# ground truth the fast kernel is tested against.
# ---------------------------------------------------------------------------

def _slow_trial_row(state: _CurveState, config: CurveConfig,
                    graph: PhysicalGraph, asn_graph: AsnGraph,
                    snapshot: NodeSnapshot, relays: RelayTable | None,
                    trial: int) -> np.ndarray:
    rng = trial_generator(config.master_seed, trial)

    if config.strategy == RANDOM:
        sub_ids = graph.submarine_edge_ids
        perm = rng.permutation(len(sub_ids))
        count = len(sub_ids)
        plan = RemovalPlan(
            RANDOM,
            tuple(sub_ids[int(i)] for i in perm),
            tuple((k + 1) / count for k in range(count)),
        )
    else:
        plan = state.static_plan

    scenario = config.scenario
    snap = snapshot
    if (scenario is not None and scenario.kind != CLEARNET_ONLY
            and state.scenario_tor_ids):
        if state.static_placements is not None:
            placements = state.static_placements
        else:
            placements, _synthetic = draw_placements(
                rng, state.scenario_tor_ids, state.scenario_countries,
                state.scenario_weights, state.scenario_pools,
            )
        snap = apply_assignment(snapshot, placements)

    if config.cascade.layers == FOUR_LAYER:
        scope = relay_backed_scope(snap)
    else:
        scope = cascade_scope(snap, config.cascade.scope_mode)

    node_draws = None
    if config.cascade.node_failure_fraction < 1.0:
        vec = rng.random(len(scope.nodes))
        node_draws = {node.node_id: float(vec[i])
                      for i, node in enumerate(scope.nodes)}

    fractions = np.zeros(len(config.p_grid))
    for gi, p in enumerate(config.p_grid):
        removed = apply_plan(plan, p)
        if plan.targets_are_asns:
            outcome = run_cascade(graph, asn_graph, scope, frozenset(),
                                  config.cascade, relays=relays,
                                  removed_asns=removed, node_draws=node_draws)
        else:
            outcome = run_cascade(graph, asn_graph, scope, removed,
                                  config.cascade, relays=relays,
                                  node_draws=node_draws)
        fractions[gi] = outcome.disconnection_fraction
    return fractions


def _per_trial_state(config: CurveConfig) -> bool:
    return (
        (config.scenario is not None
         and config.scenario.kind != CLEARNET_ONLY
         and config.scenario_method == SAMPLED)
        or config.cascade.node_failure_fraction < 1.0
    )


def _run_chunk(state: _CurveState, config: CurveConfig, start: int, stop: int,
               prefix_sizes: list[int]) -> np.ndarray:
    shared_memo: dict = {}
    fresh_memo = _per_trial_state(config)
    rows = np.zeros((stop - start, len(config.p_grid)))
    for t in range(start, stop):
        memo = {} if fresh_memo else shared_memo
        rows[t - start] = _trial_row(state, config, t, prefix_sizes, memo)
    return rows


def percolation_curve(config: CurveConfig, graph: PhysicalGraph,
                      asn_graph: AsnGraph, snapshot: NodeSnapshot,
                      relays: RelayTable | None = None) -> PercolationCurve:
    """Estimate the disconnection curve over the removal grid.

    Deterministic for a given config: trial t always consumes the stream
    derived from (master_seed, t), and aggregation runs in trial order
    whatever the ``jobs`` setting.
    """
    state = _build_state(config, graph, asn_graph, snapshot, relays)
    prefix = _prefix_sizes(state, config)

    deterministic_trials = (
        config.strategy != RANDOM
        and config.cascade.node_failure_fraction >= 1.0
        and (config.scenario is None
             or config.scenario.kind == CLEARNET_ONLY
             or config.scenario_method == APPORTIONED)
    )
    fixpoint = config.cascade.iterate_to_fixpoint

    if fixpoint:
        def run_span(start: int, stop: int) -> np.ndarray:
            return np.vstack([
                _slow_trial_row(state, config, graph, asn_graph, snapshot,
                                relays, t)
                for t in range(start, stop)
            ])
    else:
        def run_span(start: int, stop: int) -> np.ndarray:
            return _run_chunk(state, config, start, stop, prefix)

    if deterministic_trials:
        matrix = np.tile(run_span(0, 1)[0], (config.trials, 1))
    elif fixpoint or config.jobs <= 1 or config.trials < 2 * config.jobs:
        matrix = run_span(0, config.trials)
    else:
        bounds = np.linspace(0, config.trials, config.jobs + 1).astype(int)
        spans = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if a < b]
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [pool.submit(_run_chunk, state, config, a, b, prefix)
                       for a, b in spans]
            matrix = np.vstack([f.result() for f in futures])

    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0, ddof=0)
    stderrs = stds / math.sqrt(config.trials)
    medians = np.median(matrix, axis=0)
    return PercolationCurve(
        ps=tuple(config.p_grid),
        means=tuple(float(v) for v in means),
        stds=tuple(float(v) for v in stds),
        stderrs=tuple(float(v) for v in stderrs),
        medians=tuple(float(v) for v in medians),
        trials=config.trials,
        config=config,
        trial_fractions=matrix,
    )


# ---------------------------------------------------------------------------
# Report drivers.
# ---------------------------------------------------------------------------

def pc_evolution(labeled_snapshots, graph: PhysicalGraph, asn_graph: AsnGraph,
                 config: CurveConfig, relays: RelayTable | None = None) -> list[dict]:
    """One p_c row per snapshot; a failing row is reported, not fatal."""
    rows = []
    for label, snapshot in labeled_snapshots:
        row = {"label": label, "nodes": None, "countries": None,
               "asns": None, "p_c": None, "error": None}
        try:
            scope = cascade_scope(snapshot, config.cascade.scope_mode)
            row["nodes"] = scope.size
            row["countries"] = len({n.country for n in scope.nodes
                                    if n.country is not None})
            row["asns"] = len({n.asn for n in scope.nodes if n.asn is not None})
            curve = percolation_curve(config, graph, asn_graph, snapshot, relays)
            row["p_c"] = estimate_pc(curve).p_c
        except Exception as exc:  # keep scanning the remaining snapshots
            row["error"] = str(exc)
            logger.warning("snapshot %s failed: %s", label, exc)
        rows.append(row)
    return rows


def tor_bounds_report(snapshot: NodeSnapshot, graph: PhysicalGraph,
                      asn_graph: AsnGraph, config: CurveConfig) -> list[dict]:
    """p_c under every placement scenario, all sharing one master seed."""
    rows = []
    for kind in SCENARIO_KINDS:
        if kind == CLEARNET_ONLY:
            run_config = replace(
                config, scenario=None,
                cascade=replace(config.cascade, scope_mode=SCOPE_CLEARNET_ONLY),
            )
        else:
            run_config = replace(
                config, scenario=TorScenario(kind),
                cascade=replace(config.cascade, scope_mode=SCOPE_FULL),
            )
        curve = percolation_curve(run_config, graph, asn_graph, snapshot)
        rows.append({"scenario": kind, "p_c": estimate_pc(curve).p_c,
                     "curve": curve})
    return rows


def four_layer_comparison(snapshot: NodeSnapshot, graph: PhysicalGraph,
                          asn_graph: AsnGraph, relays: RelayTable,
                          config: CurveConfig) -> dict:
    """Clearnet-only threshold versus the relay-backed model, same seed."""
    three_config = replace(
        config, scenario=None,
        cascade=replace(config.cascade, layers=THREE_LAYER,
                        scope_mode=SCOPE_CLEARNET_ONLY),
    )
    four_config = replace(
        config, scenario=None,
        cascade=replace(config.cascade, layers=FOUR_LAYER,
                        scope_mode=SCOPE_CLEARNET_ONLY),
    )
    three_curve = percolation_curve(three_config, graph, asn_graph, snapshot)
    four_curve = percolation_curve(four_config, graph, asn_graph, snapshot, relays)
    three = estimate_pc(three_curve)
    four = estimate_pc(four_curve)
    delta = (four.p_c - three.p_c) if (three.reached and four.reached) else None
    return {
        "three_layer_pc": three.p_c,
        "four_layer_pc": four.p_c,
        "tor_share": composition_stats(snapshot)["tor_share"],
        "delta": delta,
        "three_curve": three_curve,
        "four_curve": four_curve,
    }


def cw_threshold_sweep(snapshot: NodeSnapshot, graph: PhysicalGraph,
                       asn_graph: AsnGraph, relays: RelayTable,
                       config: CurveConfig,
                       thresholds=DEFAULT_CW_THRESHOLDS) -> list[dict]:
    """Four-layer p_c across relay failure thresholds, same master seed."""
    rows = []
    for threshold in thresholds:
        run_config = replace(
            config,
            cascade=replace(config.cascade, layers=FOUR_LAYER,
                            cw_failure_threshold=threshold),
        )
        curve = percolation_curve(run_config, graph, asn_graph, snapshot, relays)
        rows.append({"cw_threshold": threshold, "p_c": estimate_pc(curve).p_c})
    return rows


__all__ = [
    "APPORTIONED", "CurveConfig", "DEFAULT_CW_THRESHOLDS",
    "DEFAULT_SENSITIVITY_THRESHOLDS", "PcEstimate", "PercolationCurve",
    "SAMPLED", "cw_threshold_sweep", "default_grid", "estimate_pc",
    "four_layer_comparison", "pc_evolution", "percolation_curve",
    "threshold_sensitivity", "tor_bounds_report", "trial_generator",
]
