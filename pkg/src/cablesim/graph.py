"""Country-level physical connectivity graph.

Vertices are countries (ISO-3166 style two letter codes). Edges come in two
kinds: submarine edges, which aggregate one or more physical cables between a
country pair and which a failure scenario may remove, and land border edges,
which are never removable. Two countries can be joined by both kinds at once,
so the structure is a multigraph and the shortest-path machinery below counts
parallel edges as distinct paths.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

SUBMARINE = "submarine"
LAND = "land"

_COUNTRY_RE = re.compile(r"^[A-Z]{2}$")


class GraphError(ValueError):
    """Raised for malformed graph inputs or illegal operations."""


def validate_country(code: object, context: str = "") -> str:
    """Return ``code`` if it is a two letter upper-case country id, else raise."""
    if not isinstance(code, str) or not _COUNTRY_RE.match(code):
        where = f" in {context}" if context else ""
        raise GraphError(f"malformed country code {code!r}{where}")
    return code


def edge_id(kind: str, a: str, b: str) -> str:
    lo, hi = sorted((a, b))
    prefix = "sub" if kind == SUBMARINE else "land"
    return f"{prefix}:{lo}-{hi}"


@dataclass(frozen=True)
class PhysicalEdge:
    """One collapsed edge between a country pair.

    ``cable_ids`` holds the physical cables that were merged into a submarine
    edge; it is empty for land borders.
    """

    id: str
    endpoints: tuple[str, str]
    kind: str
    cable_ids: tuple[str, ...] = ()

    @property
    def removable(self) -> bool:
        return self.kind == SUBMARINE


@dataclass(frozen=True)
class PhysicalGraph:
    countries: tuple[str, ...]
    edges: dict[str, PhysicalEdge]
    adjacency: dict[str, tuple[tuple[str, str], ...]] = field(repr=False)

    @property
    def submarine_edge_ids(self) -> tuple[str, ...]:
        return tuple(e for e in sorted(self.edges) if self.edges[e].kind == SUBMARINE)

    @property
    def land_edge_ids(self) -> tuple[str, ...]:
        return tuple(e for e in sorted(self.edges) if self.edges[e].kind == LAND)

    def cable_index(self) -> dict[str, tuple[str, ...]]:
        """Map each cable id to the submarine edge ids it contributes to."""
        index: dict[str, list[str]] = {}
        for eid in self.submarine_edge_ids:
            for cid in self.edges[eid].cable_ids:
                index.setdefault(cid, []).append(eid)
        return {cid: tuple(sorted(eids)) for cid, eids in index.items()}

    def edges_for_cables(self, cable_ids) -> tuple[frozenset[str], tuple[str, ...]]:
        """Resolve cable ids to edge ids; unknown cables are reported, not fatal."""
        index = self.cable_index()
        hits: set[str] = set()
        unknown: list[str] = []
        for cid in cable_ids:
            if cid in index:
                hits.update(index[cid])
            else:
                unknown.append(cid)
        if unknown:
            logger.warning("%d cable id(s) not present in the graph: %s",
                           len(unknown), ", ".join(sorted(unknown)[:5]))
        return frozenset(hits), tuple(unknown)


def build_physical_graph(cable_records, border_pairs) -> PhysicalGraph:
    """Assemble the multigraph from raw cable and border records.

    ``cable_records`` is an iterable of ``(cable_id, country_a, country_b)``;
    multiple cables between the same pair collapse into a single submarine
    edge carrying the sorted, de-duplicated cable id list. ``border_pairs``
    is an iterable of ``(country_a, country_b)``; duplicates collapse.
    """
    countries: set[str] = set()
    submarine: dict[tuple[str, str], set[str]] = {}
    for cable_id, a, b in cable_records:
        a = validate_country(a, f"cable {cable_id!r}")
        b = validate_country(b, f"cable {cable_id!r}")
        if a == b:
            raise GraphError(f"cable {cable_id!r} joins {a} to itself")
        pair = (min(a, b), max(a, b))
        submarine.setdefault(pair, set()).add(str(cable_id))
        countries.update(pair)

    land: set[tuple[str, str]] = set()
    for a, b in border_pairs:
        a = validate_country(a, "border record")
        b = validate_country(b, "border record")
        if a == b:
            raise GraphError(f"border joins {a} to itself")
        land.add((min(a, b), max(a, b)))
        countries.update((a, b))

    if not countries:
        raise GraphError("empty graph: no countries in input")

    edges: dict[str, PhysicalEdge] = {}
    for pair in sorted(submarine):
        eid = edge_id(SUBMARINE, *pair)
        edges[eid] = PhysicalEdge(eid, pair, SUBMARINE, tuple(sorted(submarine[pair])))
    for pair in sorted(land):
        eid = edge_id(LAND, *pair)
        edges[eid] = PhysicalEdge(eid, pair, LAND)

    adjacency: dict[str, list[tuple[str, str]]] = {c: [] for c in sorted(countries)}
    for eid in sorted(edges):
        a, b = edges[eid].endpoints
        adjacency[a].append((b, eid))
        adjacency[b].append((a, eid))
    adj = {c: tuple(sorted(nbrs)) for c, nbrs in adjacency.items()}
    return PhysicalGraph(tuple(sorted(countries)), edges, adj)


@dataclass(frozen=True)
class ComponentPartition:
    """Connected components with deterministic numbering.

    Components are ordered by their lexicographically smallest member, and
    each ``members`` tuple is itself sorted.
    """

    members: tuple[tuple[str, ...], ...]
    component_of: dict[str, int] = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.members)


def components(graph: PhysicalGraph, removed=frozenset()) -> ComponentPartition:
    """Connected components of the graph after removing submarine edges.

    ``removed`` must contain only submarine edge ids; asking to remove a land
    border or an unknown edge is an error rather than a silent no-op.
    """
    removed = frozenset(removed)
    for eid in removed:
        edge = graph.edges.get(eid)
        if edge is None:
            raise GraphError(f"cannot remove unknown edge {eid!r}")
        if not edge.removable:
            raise GraphError(f"cannot remove non-removable edge {eid!r}")

    seen: set[str] = set()
    comps: list[tuple[str, ...]] = []
    for start in graph.countries:
        if start in seen:
            continue
        queue = deque([start])
        seen.add(start)
        comp = [start]
        while queue:
            u = queue.popleft()
            for v, eid in graph.adjacency[u]:
                if eid in removed or v in seen:
                    continue
                seen.add(v)
                comp.append(v)
                queue.append(v)
        comps.append(tuple(sorted(comp)))
    comps.sort(key=lambda members: members[0])
    component_of = {c: i for i, members in enumerate(comps) for c in members}
    return ComponentPartition(tuple(comps), component_of)


def main_component(partition: ComponentPartition, hosting) -> int:
    """Pick the component that anchors the surviving internet.

    Largest total hosted node count wins; ties fall back to country count and
    then to the lexicographically smallest member. ``hosting`` maps country to
    a non-negative node count and defaults to zero for absent countries.
    """
    best = None
    best_key = None
    for idx, members in enumerate(partition.members):
        nodes = sum(hosting.get(c, 0) for c in members)
        key = (nodes, len(members), _ReverseStr(members[0]))
        if best_key is None or key > best_key:
            best, best_key = idx, key
    if best is None:
        raise GraphError("cannot pick a main component of an empty partition")
    return best


class _ReverseStr:
    """Wrapper that inverts string comparison, so max() prefers smaller ids."""

    __slots__ = ("value",)

    def __init__(self, value: str):
        self.value = value

    def __lt__(self, other: "_ReverseStr") -> bool:
        return self.value > other.value

    def __gt__(self, other: "_ReverseStr") -> bool:
        return self.value < other.value

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _ReverseStr) and self.value == other.value


def submarine_degree(graph: PhysicalGraph) -> dict[str, int]:
    """Count of incident submarine edges per country (collapsed pairs, not cables)."""
    degree = {c: 0 for c in graph.countries}
    for eid in graph.submarine_edge_ids:
        a, b = graph.edges[eid].endpoints
        degree[a] += 1
        degree[b] += 1
    return degree


def edge_betweenness(graph: PhysicalGraph, submarine_only: bool = False) -> dict[str, float]:
    """Shortest-path edge betweenness, normalized by ordered vertex pairs.

    All edges have unit weight and each ordered pair (s, t) contributes one
    unit, split equally among all shortest s-t paths. Parallel edges between
    the same pair count as distinct paths. Scores are divided by n*(n-1);
    pairs in different components contribute nothing. With ``submarine_only``
    the computation runs on the submarine subgraph alone, otherwise land
    borders participate and absorb flow.
    """
    nodes = list(graph.countries)
    n = len(nodes)
    eids = [
        eid for eid in sorted(graph.edges)
        if not submarine_only or graph.edges[eid].kind == SUBMARINE
    ]
    scores = {eid: 0.0 for eid in eids}
    if n < 2:
        return scores

    # Indexed adjacency with one entry per parallel edge, in sorted order so
    # float accumulation order is reproducible.
    index = {c: i for i, c in enumerate(nodes)}
    eindex = {eid: k for k, eid in enumerate(eids)}
    adj: list[list[tuple[int, int]]] = [[] for _ in nodes]
    for eid in eids:
        a, b = graph.edges[eid].endpoints
        ai, bi, k = index[a], index[b], eindex[eid]
        adj[ai].append((bi, k))
        adj[bi].append((ai, k))

    raw = [0.0] * len(eids)
    for s in range(n):
        dist = [-1] * n
        sigma = [0.0] * n
        dist[s] = 0
        sigma[s] = 1.0
        order: list[int] = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w, _k in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        delta = [0.0] * n
        for w in reversed(order):
            if sigma[w] == 0.0:
                continue
            coeff = (1.0 + delta[w]) / sigma[w]
            for v, k in adj[w]:
                if dist[v] >= 0 and dist[v] + 1 == dist[w]:
                    c = sigma[v] * coeff
                    raw[k] += c
                    delta[v] += c

    norm = float(n * (n - 1))
    for eid, k in eindex.items():
        scores[eid] = raw[k] / norm
    return scores
