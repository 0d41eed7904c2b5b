"""Delimited text formats for every input and output table.

Each format has a ``parse_*`` and a ``render_*`` half, and the pair is
expected to round-trip. Parsers are tolerant where a row can be kept (a node
without a country stays, flagged in the log) and loud where it cannot:
structural problems raise ParseError naming the line.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from datetime import date, datetime

from .graph import GraphError, PhysicalGraph, validate_country
from .model import (
    NETWORKS,
    OTHER,
    AsnGraph,
    NodeSnapshot,
    P2PNode,
    RelayTable,
    TorRelay,
    make_asn_graph,
)

logger = logging.getLogger(__name__)


class ParseError(ValueError):
    """A malformed input file; the message names the offending line."""


def _rows(text: str, expected_header: list[str], kind: str):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{kind}: empty file") from None
    if [h.strip() for h in header] != expected_header:
        raise ParseError(
            f"{kind}: expected header {','.join(expected_header)!r}, "
            f"got {','.join(header)!r}"
        )
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(expected_header):
            raise ParseError(
                f"{kind} line {lineno}: expected {len(expected_header)} "
                f"fields, got {len(row)}"
            )
        yield lineno, [field.strip() for field in row]


# ---------------------------------------------------------------------------
# Physical layer: cable landing pairs and land borders.
# ---------------------------------------------------------------------------

CABLE_HEADER = ["cable_id", "country_a", "country_b"]
BORDER_HEADER = ["country_a", "country_b"]


def parse_cables(text: str) -> list[tuple[str, str, str]]:
    """Rows of (cable_id, country_a, country_b); one row per landing pair."""
    records = []
    for lineno, (cable_id, a, b) in _rows(text, CABLE_HEADER, "cables"):
        if not cable_id:
            raise ParseError(f"cables line {lineno}: empty cable id")
        try:
            a = validate_country(a, "cables")
            b = validate_country(b, "cables")
        except GraphError as exc:
            raise ParseError(f"cables line {lineno}: {exc}") from None
        records.append((cable_id, a, b))
    return records


def render_cables(records) -> str:
    out = [",".join(CABLE_HEADER)]
    for cable_id, a, b in records:
        out.append(f"{cable_id},{a},{b}")
    return "\n".join(out) + "\n"


def parse_borders(text: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, (a, b) in _rows(text, BORDER_HEADER, "borders"):
        try:
            pairs.append((validate_country(a, "borders"),
                          validate_country(b, "borders")))
        except GraphError as exc:
            raise ParseError(f"borders line {lineno}: {exc}") from None
    return pairs


def render_borders(pairs) -> str:
    out = [",".join(BORDER_HEADER)]
    for a, b in pairs:
        out.append(f"{a},{b}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Routing layer: pipe-separated AS relationship dumps.
# ---------------------------------------------------------------------------

def parse_asn_relationships(text: str) -> AsnGraph:
    """``asn_a|asn_b|rel`` lines, ``#`` comments; rel must be -1 or 0.

    Relationship direction is irrelevant here, so both kinds collapse into
    one undirected edge. Self loops are dropped with a warning.
    """
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("|")
        if len(fields) != 3:
            raise ParseError(
                f"asn relationships line {lineno}: expected 3 fields, "
                f"got {len(fields)}"
            )
        try:
            a, b, rel = int(fields[0]), int(fields[1]), int(fields[2])
        except ValueError:
            raise ParseError(
                f"asn relationships line {lineno}: non-integer field in {line!r}"
            ) from None
        if rel not in (-1, 0):
            raise ParseError(
                f"asn relationships line {lineno}: relationship must be -1 "
                f"or 0, got {rel}"
            )
        if a == b:
            logger.warning("asn relationships line %d: dropping self loop at %d",
                           lineno, a)
            continue
        edges.append((a, b))
    if not edges:
        logger.warning("asn relationships: no edges found; graph is empty")
    return make_asn_graph(edges)


def render_asn_relationships(asn_graph: AsnGraph) -> str:
    """Undirected edges as ``a|b|0`` lines (relationship kinds are not kept)."""
    lines = [f"{a}|{b}|0" for a, b in sorted(asn_graph.edges)]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Node census snapshots.
# ---------------------------------------------------------------------------

SNAPSHOT_HEADER = ["timestamp", "node_id", "network", "asn", "country"]


def parse_snapshots(text: str) -> list[NodeSnapshot]:
    """Census rows grouped by timestamp, returned in time order.

    A row missing country or asn is kept (those fields become unknown); a
    malformed timestamp or asn, or a node id repeated within one timestamp,
    is an error. An unrecognised network label is kept as ``other`` with a
    warning so a typo cannot silently shrink the census.
    """
    groups: dict[datetime, list[P2PNode]] = {}
    seen: dict[datetime, set[str]] = {}
    incomplete = 0
    for lineno, (ts_raw, node_id, network, asn_raw, country) in _rows(
            text, SNAPSHOT_HEADER, "snapshots"):
        try:
            # a trailing Z marks UTC; everything here is UTC anyway
            ts = datetime.fromisoformat(ts_raw.removesuffix("Z"))
        except ValueError:
            raise ParseError(
                f"snapshots line {lineno}: bad timestamp {ts_raw!r}"
            ) from None
        if not node_id:
            raise ParseError(f"snapshots line {lineno}: empty node id")
        network = network.lower()
        if network not in NETWORKS:
            logger.warning("snapshots line %d: unknown network %r kept as %r",
                           lineno, network, OTHER)
            network = OTHER
        country_val = None
        if country:
            try:
                country_val = validate_country(country, "snapshots")
            except GraphError as exc:
                raise ParseError(f"snapshots line {lineno}: {exc}") from None
        asn_val = None
        if asn_raw:
            try:
                asn_val = int(asn_raw)
            except ValueError:
                raise ParseError(
                    f"snapshots line {lineno}: bad asn {asn_raw!r}"
                ) from None
        if country_val is None or asn_val is None:
            incomplete += 1
        ids = seen.setdefault(ts, set())
        if node_id in ids:
            raise ParseError(
                f"snapshots line {lineno}: duplicate node id {node_id!r} "
                f"within {ts.isoformat()}"
            )
        ids.add(node_id)
        groups.setdefault(ts, []).append(
            P2PNode(node_id, network, country_val, asn_val)
        )
    if incomplete:
        logger.info("snapshots: %d row(s) missing country or asn were kept",
                    incomplete)
    return [NodeSnapshot(ts, tuple(groups[ts])) for ts in sorted(groups)]


def render_snapshots(snapshots) -> str:
    out = [",".join(SNAPSHOT_HEADER)]
    for snapshot in snapshots:
        ts = snapshot.timestamp.isoformat()
        for node in snapshot.nodes:
            country = node.country or ""
            asn = "" if node.asn is None else str(node.asn)
            out.append(f"{ts},{node.node_id},{node.network},{asn},{country}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Relay table (JSON).
# ---------------------------------------------------------------------------

def parse_relays(text: str) -> RelayTable:
    """JSON list of {fingerprint, country, asn, consensus_weight}."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"relays: invalid JSON ({exc})") from None
    if not isinstance(data, list):
        raise ParseError("relays: expected a JSON list")
    relays = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise ParseError(f"relays entry {i}: expected an object")
        try:
            relays.append(TorRelay(
                fingerprint=str(entry["fingerprint"]),
                country=entry["country"],
                asn=int(entry["asn"]),
                consensus_weight=float(entry["consensus_weight"]),
            ))
        except KeyError as exc:
            raise ParseError(f"relays entry {i}: missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ParseError(f"relays entry {i}: {exc}") from None
    return RelayTable(tuple(relays))


def render_relays(relays: RelayTable) -> str:
    data = [
        {
            "fingerprint": r.fingerprint,
            "country": r.country,
            "asn": r.asn,
            "consensus_weight": r.consensus_weight,
        }
        for r in relays.relays
    ]
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Outage events and price history.
# ---------------------------------------------------------------------------

EVENT_HEADER = ["event_id", "date", "cable_ids", "countries"]
PRICE_HEADER = ["date", "close"]


@dataclass(frozen=True)
class CableEvent:
    """A real-world outage: which cables went down, when, and where."""

    event_id: str
    date: date
    cable_ids: tuple[str, ...]
    countries: tuple[str, ...] = ()


@dataclass(frozen=True)
class PricePoint:
    date: date
    close: float


def parse_events(text: str) -> list[CableEvent]:
    events = []
    ids: set[str] = set()
    for lineno, (event_id, date_raw, cables_raw, countries_raw) in _rows(
            text, EVENT_HEADER, "events"):
        if not event_id:
            raise ParseError(f"events line {lineno}: empty event id")
        if event_id in ids:
            raise ParseError(f"events line {lineno}: duplicate event id {event_id!r}")
        ids.add(event_id)
        try:
            when = date.fromisoformat(date_raw)
        except ValueError:
            raise ParseError(f"events line {lineno}: bad date {date_raw!r}") from None
        cable_ids = tuple(c.strip() for c in cables_raw.split(";") if c.strip())
        if not cable_ids:
            raise ParseError(f"events line {lineno}: no cable ids")
        countries = []
        for code in countries_raw.split(";"):
            code = code.strip()
            if not code:
                continue
            try:
                countries.append(validate_country(code))
            except GraphError:
                raise ParseError(
                    f"events line {lineno}: bad country {code!r}") from None
        events.append(CableEvent(event_id, when, cable_ids, tuple(countries)))
    return sorted(events, key=lambda e: (e.date, e.event_id))


def render_events(events) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EVENT_HEADER)
    for event in events:
        writer.writerow([event.event_id, event.date.isoformat(),
                         ";".join(event.cable_ids), ";".join(event.countries)])
    return buf.getvalue()


def parse_prices(text: str) -> list[PricePoint]:
    points = []
    seen: set[date] = set()
    for lineno, (date_raw, price_raw) in _rows(text, PRICE_HEADER, "prices"):
        try:
            when = date.fromisoformat(date_raw)
        except ValueError:
            raise ParseError(f"prices line {lineno}: bad date {date_raw!r}") from None
        if when in seen:
            raise ParseError(f"prices line {lineno}: duplicate date {date_raw}")
        seen.add(when)
        try:
            price = float(price_raw)
        except ValueError:
            raise ParseError(f"prices line {lineno}: bad price {price_raw!r}") from None
        points.append(PricePoint(when, price))
    return sorted(points, key=lambda p: p.date)


def render_prices(points) -> str:
    out = [",".join(PRICE_HEADER)]
    for point in points:
        out.append(f"{point.date.isoformat()},{point.close:.2f}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Curve table round-trip (the writer lives on PercolationCurve).
# ---------------------------------------------------------------------------

CURVE_HEADER = ["p", "mean", "std", "stderr"]


def parse_curve(text: str) -> list[dict[str, float]]:
    rows = []
    for lineno, fields in _rows(text, CURVE_HEADER, "curve"):
        try:
            rows.append({name: float(value)
                         for name, value in zip(CURVE_HEADER, fields)})
        except ValueError:
            raise ParseError(f"curve line {lineno}: non-numeric field") from None
    return rows


def drop_unknown_countries(snapshot: NodeSnapshot,
                           graph: PhysicalGraph) -> NodeSnapshot:
    """Strip nodes homed in countries the graph does not know, loudly.

    The cascade itself refuses such nodes; command-line runs prefer to keep
    going with the rows that make sense.
    """
    known = set(graph.countries)
    kept = []
    dropped: dict[str, int] = {}
    for node in snapshot.nodes:
        if node.country is not None and node.country not in known:
            dropped[node.country] = dropped.get(node.country, 0) + 1
        else:
            kept.append(node)
    if dropped:
        detail = ", ".join(f"{c}:{n}" for c, n in sorted(dropped.items()))
        logger.warning("dropped %d node(s) in countries outside the graph (%s)",
                       sum(dropped.values()), detail)
    return NodeSnapshot(snapshot.timestamp, tuple(kept))


__all__ = [
    "CableEvent", "ParseError", "PricePoint", "drop_unknown_countries",
    "parse_asn_relationships", "parse_borders", "parse_cables", "parse_curve",
    "parse_events", "parse_prices", "parse_relays", "parse_snapshots",
    "render_asn_relationships", "render_borders", "render_cables",
    "render_events", "render_prices", "render_relays", "render_snapshots",
]
