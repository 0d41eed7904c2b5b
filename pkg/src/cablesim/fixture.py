"""Deterministic synthetic world: graph, routing, census, relays, history.

The generated topology is shaped so the library's behaviour is analysable:

* Core countries form two land blocks joined only by a bounded set of
  cross-block cables, so targeted attacks split them early while random
  removal does so only near full knockout.
* One land block hosts more than half of the clearnet census. The main
  component therefore always contains it, which keeps per-trial survivor
  sets nested as the removal prefix grows (disconnection fractions are then
  monotone along each trial).
* The periphery is thin (one clearnet node per country), so its gradual
  detachment never crosses the default disconnection threshold by itself.
* The routing layer is a handful of high-capacity networks present in every
  core country plus a clique of regional networks, so the induced surviving
  routing graph is connected whatever survives, and the top five networks
  carry well over half of the census.
* Relay placement is a policy switch: ``core`` concentrates consensus
  weight inside the dominant land block (relay capacity then never
  collapses), ``leaf`` spreads it over single-cable countries (capacity
  then decays with removal).

Everything is a pure function of the spec; the RNG seed only feeds census
jitter, outage dates and cable picks, and the price walk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from itertools import combinations

import numpy as np

from .graph import PhysicalGraph, build_physical_graph
from .ingest import CableEvent, PricePoint
from .validation import DEFAULT_WINDOW_DAYS
from .model import (
    CLEARNET,
    OTHER,
    TOR,
    AsnGraph,
    ModelError,
    NodeSnapshot,
    P2PNode,
    RelayTable,
    TorRelay,
    make_asn_graph,
)

CORE_POOL = ("DE", "US", "FR", "NL", "GB", "JP", "SG", "BR", "ZA", "AU",
             "CA", "IN", "KR", "IT", "ES", "SE", "NO", "EG", "AE", "HK")

CLUSTER_SIZES = (9, 8, 7, 6, 5, 4, 3)

RELAY_CORE = "core"
RELAY_LEAF = "leaf"
RELAY_POLICIES = (RELAY_CORE, RELAY_LEAF)

BUNDLE_FILES = {
    "cables": "cables.csv",
    "borders": "borders.csv",
    "asn": "asn_links.txt",
    "snapshots": "snapshots.csv",
    "relays": "relays.json",
    "events": "events.csv",
    "prices": "prices.csv",
}


@dataclass(frozen=True)
class FixtureSpec:
    """Knobs for the synthetic world; defaults give the full-size profile."""

    seed: int = 7
    countries: int = 225
    core_size: int = 20
    block_a_size: int = 12
    cross_block_cables: int = 12
    leaf_count: int = 35
    dual_homed_count: int = 60
    land_cluster_count: int = 5
    land_cluster_size: int = 4
    submarine_quota: int = 354
    land_quota: int = 325
    clearnet_nodes: int = 8200
    block_a_share: float = 0.52
    tor_nodes: int = 12455
    other_nodes: int = 103
    low_tor_nodes: int = 128
    hyperscalers: int = 5
    regionals: int = 100
    hyper_node_share: float = 0.70
    relay_policy: str = RELAY_CORE
    relay_count: int = 60
    snapshot_months: int = 8
    dense_census_count: int = 10
    event_count: int = 48

    def __post_init__(self):
        if self.core_size > len(CORE_POOL):
            raise ModelError(f"core_size is capped at {len(CORE_POOL)}")
        if not 2 <= self.block_a_size < self.core_size:
            raise ModelError("block_a_size must split the core in two")
        if self.relay_policy not in RELAY_POLICIES:
            raise ModelError(f"unknown relay policy {self.relay_policy!r}")
        periphery = self.countries - self.core_size
        consumed = (self.land_cluster_count * self.land_cluster_size
                    + self.leaf_count + self.dual_homed_count)
        if periphery < consumed + 3:
            raise ModelError("not enough periphery countries for the layout")
        if self.snapshot_months < 3:
            raise ModelError("need at least three census months")
        if self.dense_census_count < 0:
            raise ModelError("dense_census_count cannot be negative")
        if not 0.5 < self.block_a_share < 1.0:
            raise ModelError("block_a_share must keep the block dominant")

    @classmethod
    def mini(cls, seed: int = 7, relay_policy: str = RELAY_CORE) -> "FixtureSpec":
        """Small profile for quick tests; same shape, scaled counts."""
        return cls(
            seed=seed,
            countries=26,
            core_size=8,
            block_a_size=5,
            cross_block_cables=4,
            leaf_count=4,
            dual_homed_count=3,
            land_cluster_count=1,
            land_cluster_size=3,
            submarine_quota=34,
            land_quota=26,
            clearnet_nodes=400,
            block_a_share=0.55,
            tor_nodes=600,
            other_nodes=6,
            low_tor_nodes=12,
            hyperscalers=3,
            regionals=12,
            hyper_node_share=0.70,
            relay_policy=relay_policy,
            relay_count=12,
            snapshot_months=4,
            dense_census_count=5,
            event_count=10,
        )


@dataclass(frozen=True)
class FixtureBundle:
    spec: FixtureSpec
    graph: PhysicalGraph
    asn_graph: AsnGraph
    snapshots: tuple[NodeSnapshot, ...]
    relays: RelayTable
    events: tuple[CableEvent, ...]
    prices: tuple[PricePoint, ...]
    cable_records: tuple[tuple[str, str, str], ...] = field(repr=False)
    border_pairs: tuple[tuple[str, str], ...] = field(repr=False)

    @property
    def main_snapshot(self) -> NodeSnapshot:
        return self.snapshots[-1]

    @property
    def low_tor_snapshot(self) -> NodeSnapshot:
        return self.snapshots[-2]


def _largest_remainder(total: int, weights) -> list[int]:
    """Integer allocation of ``total`` proportional to ``weights``."""
    scale = sum(weights)
    quotas = [total * w / scale for w in weights]
    counts = [math.floor(q) for q in quotas]
    leftover = total - sum(counts)
    order = sorted(range(len(weights)), key=lambda i: -(quotas[i] - counts[i]))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def _periphery_codes(spec: FixtureSpec) -> list[str]:
    taken = set(CORE_POOL[:spec.core_size])
    codes = []
    for a in range(26):
        for b in range(26):
            code = chr(65 + a) + chr(65 + b)
            if code in taken:
                continue
            codes.append(code)
            if len(codes) == spec.countries - spec.core_size:
                return codes
    raise ModelError("country count exceeds the two-letter code space")


def _chunk_clusters(count: int) -> list[int]:
    """Split ``count`` countries into cluster sizes, none smaller than 3."""
    sizes = []
    i = 0
    remaining = count
    while remaining:
        s = min(CLUSTER_SIZES[i % len(CLUSTER_SIZES)], remaining)
        if remaining - s in (1, 2):
            s = remaining
        sizes.append(s)
        remaining -= s
        i += 1
    return sizes


class _Layout:
    """Country roles and edge lists, all derived arithmetically."""

    def __init__(self, spec: FixtureSpec):
        self.spec = spec
        core = list(CORE_POOL[:spec.core_size])
        self.core = core
        self.block_a = core[:spec.block_a_size]
        self.block_b = core[spec.block_a_size:]

        periphery = _periphery_codes(spec)
        cursor = 0

        def take(n: int) -> list[str]:
            nonlocal cursor
            part = periphery[cursor:cursor + n]
            cursor += n
            return part

        land_members = take(spec.land_cluster_count * spec.land_cluster_size)
        self.land_clusters = [
            land_members[i * spec.land_cluster_size:(i + 1) * spec.land_cluster_size]
            for i in range(spec.land_cluster_count)
        ]
        self.leaves = take(spec.leaf_count)
        self.duals = take(spec.dual_homed_count)
        rest = periphery[cursor:]
        sizes = _chunk_clusters(len(rest))
        self.cable_clusters = []
        at = 0
        for s in sizes:
            self.cable_clusters.append(rest[at:at + s])
            at += s

        self.submarine_pairs = self._submarine_pairs()
        self.land_pairs = self._land_pairs()

    def _submarine_pairs(self) -> list[tuple[str, str]]:
        spec = self.spec
        pairs: list[tuple[str, str]] = []
        seen: set[tuple[str, str]] = set()

        def add(a: str, b: str) -> bool:
            pair = (min(a, b), max(a, b))
            if a == b or pair in seen:
                return False
            seen.add(pair)
            pairs.append(pair)
            return True

        # cross-block cables: the only physical tie between the two blocks
        added = 0
        offset = 0
        while added < spec.cross_block_cables:
            progressed = False
            for i in range(len(self.block_a)):
                if added >= spec.cross_block_cables:
                    break
                b = self.block_b[(i + offset) % len(self.block_b)]
                if add(self.block_a[i], b):
                    added += 1
                    progressed = True
            offset += 1
            if not progressed and offset > len(self.block_b) + 2:
                raise ModelError("cannot place the requested cross-block cables")

        # double-tracked in-block routes (parallel to land, raise core degree)
        for a, b in combinations(self.block_a, 2):
            add(a, b)
        for a, b in combinations(self.block_b, 2):
            add(a, b)

        # multi-anchored periphery stays within one block: a country with
        # cables into both blocks would quietly bridge them and defeat the
        # cross-block cut
        def anchors(block: list[str], k: int, want: int) -> list[str]:
            step = max(1, len(block) // 3)
            picked = []
            at = k % len(block)
            while len(picked) < want:
                country = block[at % len(block)]
                if country not in picked:
                    picked.append(country)
                at += step if step > 1 else 1
            return picked

        for k, leaf in enumerate(self.leaves):
            add(leaf, self.core[k % len(self.core)])
        for k, dual in enumerate(self.duals):
            home = self.block_a if k % 3 else self.block_b
            for country in anchors(home, k, 2):
                add(dual, country)

        for idx, members in enumerate(self.cable_clusters):
            home = self.block_a if idx % 3 else self.block_b
            for country in anchors(home, 3 * idx, 1 + idx % 3):
                add(members[0], country)

        # pad to the quota with extra trunks from deeper cluster members
        k = 0
        guard = 0
        n_clusters = len(self.cable_clusters)
        while len(pairs) < spec.submarine_quota:
            idx = k % n_clusters
            members = self.cable_clusters[idx]
            member = members[1 + (k // n_clusters) % (len(members) - 1)]
            home = self.block_a if idx % 3 else self.block_b
            add(member, home[(7 * k + 3) % len(home)])
            k += 1
            guard += 1
            if guard > 100000:
                raise ModelError("submarine quota unreachable with this layout")
        if len(pairs) != spec.submarine_quota:
            raise ModelError(
                f"submarine layout produced {len(pairs)} edges, "
                f"quota is {spec.submarine_quota}"
            )
        return pairs

    def _land_pairs(self) -> list[tuple[str, str]]:
        spec = self.spec
        pairs: list[tuple[str, str]] = []
        seen: set[tuple[str, str]] = set()

        def add(a: str, b: str) -> bool:
            pair = (min(a, b), max(a, b))
            if a == b or pair in seen:
                return False
            seen.add(pair)
            pairs.append(pair)
            return True

        for a, b in combinations(self.block_a, 2):
            add(a, b)
        for a, b in combinations(self.block_b, 2):
            add(a, b)
        for i, members in enumerate(self.land_clusters):
            for a, b in combinations(members, 2):
                add(a, b)
            add(members[0], self.block_a[i % len(self.block_a)])
        # cable clusters cohere over land; their core link stays submarine
        for members in self.cable_clusters:
            for a, b in zip(members, members[1:]):
                add(a, b)

        if len(pairs) > spec.land_quota:
            raise ModelError(
                f"land layout needs {len(pairs)} edges, quota is {spec.land_quota}"
            )
        # pad with further in-cluster pairs (topologically inert)
        for members in self.cable_clusters:
            for a, b in combinations(members, 2):
                if len(pairs) == spec.land_quota:
                    break
                add(a, b)
            if len(pairs) == spec.land_quota:
                break
        if len(pairs) != spec.land_quota:
            raise ModelError(
                f"land layout produced {len(pairs)} edges, "
                f"quota is {spec.land_quota}"
            )
        return pairs


def _cable_records(layout: _Layout) -> list[tuple[str, str, str]]:
    """One cable per submarine pair; every tenth cable spans two pairs."""
    records = []
    pairs = layout.submarine_pairs
    for i, (a, b) in enumerate(pairs):
        cable_id = f"cbl{i:04d}"
        records.append((cable_id, a, b))
        if i % 10 == 9 and i + 1 < len(pairs):
            nxt = pairs[i + 1]
            records.append((cable_id, nxt[0], nxt[1]))
    return records


def _asn_layer(spec: FixtureSpec) -> tuple[list[int], list[int], AsnGraph]:
    hypers = [100 * (i + 1) for i in range(spec.hyperscalers)]
    regionals = [1000 + i for i in range(spec.regionals)]
    edges = []
    for a, b in combinations(hypers, 2):
        edges.append((a, b))
    for a, b in combinations(regionals, 2):
        edges.append((a, b))
    for i, r in enumerate(regionals):
        edges.append((r, hypers[i % len(hypers)]))
        edges.append((r, hypers[(i + 2) % len(hypers)]))
    return hypers, regionals, make_asn_graph(edges)


def _clearnet_nodes(spec: FixtureSpec, layout: _Layout,
                    hypers: list[int], regionals: list[int]) -> list[P2PNode]:
    periphery = (
        [c for cluster in layout.land_clusters for c in cluster]
        + layout.leaves + layout.duals
        + [c for cluster in layout.cable_clusters for c in cluster]
    )
    a_total = round(spec.block_a_share * spec.clearnet_nodes)
    b_total = spec.clearnet_nodes - a_total - len(periphery)
    if b_total <= 0:
        raise ModelError("clearnet_nodes too small for one node per country")

    a_weights = [len(layout.block_a) - i + 3 for i in range(len(layout.block_a))]
    a_counts = _largest_remainder(a_total, a_weights)
    b_counts = _largest_remainder(b_total, [1] * len(layout.block_b))

    per_country: list[tuple[str, int]] = []
    per_country.extend(zip(layout.block_a, a_counts))
    per_country.extend(zip(layout.block_b, b_counts))
    per_country.extend((c, 1) for c in periphery)

    country_index = {c: i for i, c in enumerate(sorted(
        layout.core + periphery))}
    nodes = []
    serial = 0
    for country, count in per_country:
        ci = country_index[country]
        if country in layout.core:
            hyper_count = round(spec.hyper_node_share * count)
            locals_ = [regionals[(3 * ci + j) % len(regionals)] for j in range(3)]
            for j in range(count):
                if j < hyper_count:
                    asn = hypers[(ci + j) % len(hypers)]
                else:
                    asn = locals_[j % 3]
                nodes.append(P2PNode(f"n{serial:06d}", CLEARNET, country, asn))
                serial += 1
        else:
            asn = regionals[ci % len(regionals)]
            nodes.append(P2PNode(f"n{serial:06d}", CLEARNET, country, asn))
            serial += 1
    return nodes


def _census_series(spec: FixtureSpec, layout: _Layout, clear: list[P2PNode],
                   rng: np.random.Generator) -> list[NodeSnapshot]:
    months = spec.snapshot_months
    start = datetime(2025, 1, 1)

    by_country: dict[str, list[P2PNode]] = {}
    for node in clear:
        by_country.setdefault(node.country, []).append(node)

    tor_all = [P2PNode(f"t{j:06d}", TOR) for j in range(spec.tor_nodes)]
    others = []
    core_cycle = layout.core
    for j in range(spec.other_nodes):
        country = core_cycle[j % len(core_cycle)] if j % 2 == 0 else None
        others.append(P2PNode(f"x{j:06d}", OTHER, country))

    snapshots = []
    for m in range(months):
        when = datetime(start.year + (start.month - 1 + m) // 12,
                        (start.month - 1 + m) % 12 + 1, 1)
        if m == months - 1:
            kept = list(clear)
            tor = tor_all
        elif m == months - 2:
            kept = list(clear)
            tor = tor_all[:spec.low_tor_nodes]
        else:
            g = 0.25 + 0.65 * (m + 1) / (months - 1)
            kept = []
            for country in sorted(by_country):
                pool = by_country[country]
                kept.extend(pool[:max(1, math.ceil(g * len(pool)))])
            drop = int(rng.integers(0, 30))
            if drop and len(kept) > drop:
                out = set(int(i) for i in
                          rng.choice(len(kept), size=drop, replace=False))
                kept = [n for i, n in enumerate(kept) if i not in out]
            tor = tor_all[:max(1, math.ceil(g * spec.tor_nodes))]
        snapshots.append(NodeSnapshot(when, tuple(kept + tor + others)))
    dense = _dense_census(spec, snapshots[-3].timestamp, snapshots[-2].timestamp,
                          clear, tor_all, others, rng)
    return snapshots[:-2] + dense + snapshots[-2:]


def _dense_census(spec: FixtureSpec, lo: datetime, hi: datetime,
                  clear: list[P2PNode], tor_all: list[P2PNode],
                  others: list[P2PNode],
                  rng: np.random.Generator) -> list[NodeSnapshot]:
    """Census points every few days between the last growth month and the
    low-participation census, so outage dates can land inside short match
    windows. Clearnet counts wobble by a fraction of a percent with one
    deeper dip in the middle; relay-network participation ramps down toward
    the low point instead of cliff-dropping.
    """
    count = spec.dense_census_count
    if count <= 0:
        return []
    span = (hi - lo).days
    big = count // 2
    g_last = 0.25 + 0.65 * (spec.snapshot_months - 2) / (spec.snapshot_months - 1)
    tor_start = max(1, math.ceil(g_last * spec.tor_nodes))

    by_country: dict[str, list[P2PNode]] = {}
    for node in clear:
        by_country.setdefault(node.country, []).append(node)

    out = []
    offset = 0
    for k in range(count):
        offset = max(offset + 1, round((k + 1) * span / (count + 1)))
        if offset >= span:
            raise ModelError("too many dense census points for one month")
        # participation keeps climbing from the last monthly level toward
        # the full roster, with a small outage-scale dip on every census
        # and one deeper one in the middle
        g = g_last + (1.0 - g_last) * (k + 1) / (count + 1)
        base = []
        for country in sorted(by_country):
            pool = by_country[country]
            base.extend(pool[:max(1, math.ceil(g * len(pool)))])
        share = 0.08 if k == big else 0.003 + 0.022 * float(rng.random())
        drop = max(1, int(share * len(base)))
        gone = set(int(i) for i in
                   rng.choice(len(base), size=drop, replace=False))
        kept = [n for i, n in enumerate(base) if i not in gone]
        t = tor_start + (spec.low_tor_nodes - tor_start) * (k + 1) // (count + 1)
        out.append(NodeSnapshot(lo + timedelta(days=offset),
                                tuple(kept + tor_all[:max(1, t)] + others)))
    return out


def _relays(spec: FixtureSpec, layout: _Layout,
            hypers: list[int], regionals: list[int]) -> RelayTable:
    relays = []
    if spec.relay_policy == RELAY_CORE:
        anchors = [c for c in ("DE", "FR", "NL") if c in layout.block_a]
        if not anchors:
            anchors = layout.block_a[:3]
        heavy = int(spec.relay_count * 0.8)
        rest = spec.relay_count - heavy
        for i in range(heavy):
            relays.append(TorRelay(
                f"RELAY{i:03d}", anchors[i % len(anchors)],
                hypers[i % len(hypers)], 50000.0,
            ))
        spread = layout.block_b + layout.leaves
        for i in range(rest):
            country = spread[i % len(spread)]
            asn = hypers[i % len(hypers)]
            relays.append(TorRelay(f"RELAY{heavy + i:03d}", country, asn, 25000.0))
    else:
        targets = layout.leaves[:spec.relay_count]
        if not targets:
            raise ModelError("leaf relay policy needs leaf countries")
        country_index = {c: i for i, c in enumerate(sorted(
            layout.core
            + [c for cl in layout.land_clusters for c in cl]
            + layout.leaves + layout.duals
            + [c for cl in layout.cable_clusters for c in cl]))}
        for i in range(spec.relay_count):
            country = targets[i % len(targets)]
            asn = regionals[country_index[country] % len(regionals)]
            relays.append(TorRelay(f"RELAY{i:03d}", country, asn, 100000.0))
    return RelayTable(tuple(relays))


def _events(spec: FixtureSpec, cable_countries: dict[str, tuple[str, ...]],
            snapshots, rng: np.random.Generator) -> list[CableEvent]:
    """Outage log. Most faults land between two census points taken a few
    days apart, so a seven-day window brackets them; a handful fall in the
    middle of a month-long census gap and stay unmatchable.
    """
    cable_ids = sorted(cable_countries)
    dates = [s.timestamp.date() for s in snapshots]
    gaps = [(dates[i], (dates[i + 1] - dates[i]).days)
            for i in range(len(dates) - 1)]
    tight = [(d, g) for d, g in gaps if g <= DEFAULT_WINDOW_DAYS]
    wide = [(d, g) for d, g in gaps if g > 2 * DEFAULT_WINDOW_DAYS]
    stray = max(2, spec.event_count // 12) if tight and wide else 0

    events = []
    for k in range(spec.event_count):
        if k < stray:
            lo, gap = wide[k % len(wide)]
            when = lo + timedelta(days=gap // 2 + int(rng.integers(-2, 3)))
        elif tight:
            lo, gap = tight[(k - stray) % len(tight)]
            when = lo + timedelta(days=int(rng.integers(0, gap)))
        else:
            span = max((dates[-1] - dates[0]).days, 1)
            offset = round(k * span / max(spec.event_count - 1, 1))
            jitter = int(rng.integers(-5, 6))
            when = dates[0] + timedelta(days=min(max(offset + jitter, 0), span))
        picks = rng.choice(len(cable_ids), size=1 + k % 3, replace=False)
        cables = tuple(sorted(cable_ids[int(i)] for i in picks))
        touched = sorted({c for cid in cables for c in cable_countries[cid]})
        events.append(CableEvent(f"ev{k:03d}", when, cables, tuple(touched)))
    return sorted(events, key=lambda e: (e.date, e.event_id))


# The quote history runs on its own stream, pinned apart from the census
# draws, so the series stays independent of the outage process by build.
_PRICE_STREAM = 7


def _prices(spec: FixtureSpec, snapshots) -> list[PricePoint]:
    first = snapshots[0].timestamp.date() - timedelta(days=30)
    last = snapshots[-1].timestamp.date() + timedelta(days=30)
    days = (last - first).days + 1
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(spec.seed, spawn_key=(_PRICE_STREAM,))))
    steps = rng.standard_normal(days) * 0.02
    level = 30000.0 * np.exp(np.cumsum(steps))
    return [PricePoint(first + timedelta(days=i), round(float(level[i]), 2))
            for i in range(days)]


def generate_fixture(spec: FixtureSpec | None = None) -> FixtureBundle:
    """Build the whole synthetic bundle for a spec (default: full profile)."""
    spec = spec or FixtureSpec()
    layout = _Layout(spec)
    cable_records = _cable_records(layout)
    graph = build_physical_graph(cable_records, layout.land_pairs)

    hypers, regionals, asn_graph = _asn_layer(spec)
    clear = _clearnet_nodes(spec, layout, hypers, regionals)

    rng = np.random.default_rng(spec.seed)
    snapshots = _census_series(spec, layout, clear, rng)
    relays = _relays(spec, layout, hypers, regionals)
    cable_countries: dict[str, tuple[str, ...]] = {}
    for cable_id, a, b in cable_records:
        cable_countries[cable_id] = tuple(sorted({a, b}))
    events = _events(spec, cable_countries, snapshots, rng)
    prices = _prices(spec, snapshots)

    return FixtureBundle(
        spec=spec,
        graph=graph,
        asn_graph=asn_graph,
        snapshots=tuple(snapshots),
        relays=relays,
        events=tuple(events),
        prices=tuple(prices),
        cable_records=tuple(cable_records),
        border_pairs=tuple(layout.land_pairs),
    )


def write_bundle(bundle: FixtureBundle, out_dir) -> dict[str, str]:
    """Write every bundle table under ``out_dir``; returns name -> path."""
    from pathlib import Path
    from . import ingest

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    payload = {
        "cables": ingest.render_cables(bundle.cable_records),
        "borders": ingest.render_borders(bundle.border_pairs),
        "asn": ingest.render_asn_relationships(bundle.asn_graph),
        "snapshots": ingest.render_snapshots(bundle.snapshots),
        "relays": ingest.render_relays(bundle.relays),
        "events": ingest.render_events(bundle.events),
        "prices": ingest.render_prices(bundle.prices),
    }
    for key, text in payload.items():
        path = out / BUNDLE_FILES[key]
        path.write_text(text)
        paths[key] = str(path)
    return paths


__all__ = [
    "BUNDLE_FILES", "CLUSTER_SIZES", "CORE_POOL", "FixtureBundle",
    "FixtureSpec", "RELAY_CORE", "RELAY_LEAF", "RELAY_POLICIES",
    "generate_fixture", "write_bundle",
]
