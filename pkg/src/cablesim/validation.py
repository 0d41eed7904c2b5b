"""Checks of simulated expectations against recorded history.

Pairs cable outage events with node-census snapshots taken around them,
measures how much of the clearnet census actually moved, and correlates
event impact with market moves. Also a concentration index over hosting
countries. All statistics are plain dataclass reports so callers can
render them however they like.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np
from scipy import stats as _stats

from .ingest import CableEvent, PricePoint
from .model import CLEARNET, TOR, ModelError, NodeSnapshot

DEFAULT_WINDOW_DAYS = 7
SMALL_IMPACT = 0.05


def in_scope_clearnet(snapshot: NodeSnapshot, countries=None) -> int:
    """Clearnet nodes that carry both a country and a routing network.

    With ``countries`` given, only nodes homed in one of those countries
    count, which is how the per-region impact of an event is measured.
    """
    wanted = set(countries) if countries is not None else None
    return sum(1 for n in snapshot.nodes
               if n.network == CLEARNET and n.country and n.asn is not None
               and (wanted is None or n.country in wanted))


@dataclass(frozen=True)
class EventMatch:
    event: CableEvent
    before: NodeSnapshot
    after: NodeSnapshot


@dataclass(frozen=True)
class MatchReport:
    matches: tuple[EventMatch, ...]
    unmatched: tuple[CableEvent, ...]
    window_days: int


def match_events(events, snapshots, window_days: int = DEFAULT_WINDOW_DAYS) -> MatchReport:
    """Pair each event with the nearest census on both sides of its date.

    ``before`` is the latest snapshot on or before the event date, ``after``
    the earliest one on or after it; both must fall within ``window_days``
    (inclusive) or the event is reported unmatched. A census taken on the
    event day itself serves as both sides.
    """
    if window_days < 0:
        raise ModelError("window_days must be non-negative")
    ordered = sorted(snapshots, key=lambda s: s.timestamp)
    matches = []
    unmatched = []
    for event in sorted(events, key=lambda e: (e.date, e.event_id)):
        before = None
        after = None
        for snap in ordered:
            day = snap.timestamp.date()
            if day <= event.date:
                before = snap
            if day >= event.date:
                after = snap
                break
        ok = (
            before is not None and after is not None
            and (event.date - before.timestamp.date()).days <= window_days
            and (after.timestamp.date() - event.date).days <= window_days
        )
        if ok:
            matches.append(EventMatch(event, before, after))
        else:
            unmatched.append(event)
    return MatchReport(tuple(matches), tuple(unmatched), window_days)


@dataclass(frozen=True)
class EventImpact:
    event_id: str
    date: date
    before_count: int
    after_count: int
    impact: float
    regional_impact: float | None = None


@dataclass(frozen=True)
class ImpactReport:
    impacts: tuple[EventImpact, ...]
    small_share: float
    mean_impact: float
    median_impact: float
    min_impact: float
    max_impact: float
    threshold: float

    @property
    def n(self) -> int:
        return len(self.impacts)

    def to_csv(self) -> str:
        lines = ["event_id,date,before_count,after_count,"
                 "global_impact,regional_impact"]
        for row in self.impacts:
            regional = "" if row.regional_impact is None else f"{row.regional_impact:.6f}"
            lines.append(f"{row.event_id},{row.date.isoformat()},"
                         f"{row.before_count},{row.after_count},"
                         f"{row.impact:.6f},{regional}")
        return "\n".join(lines) + "\n"


def impact_stats(report: MatchReport, threshold: float = SMALL_IMPACT) -> ImpactReport:
    """Relative census change across each matched event.

    The headline numbers (small share, mean, median, extremes) use the
    global impact. The impact over just the event's listed countries rides
    along per event when it is defined, but stays out of every summary:
    regional counts are small enough that crawler noise dominates them.
    """
    impacts = []
    for match in report.matches:
        before = in_scope_clearnet(match.before)
        after = in_scope_clearnet(match.after)
        if before == 0:
            continue
        regional = None
        if match.event.countries:
            r_before = in_scope_clearnet(match.before, match.event.countries)
            r_after = in_scope_clearnet(match.after, match.event.countries)
            if r_before > 0:
                regional = (r_after - r_before) / r_before
        impacts.append(EventImpact(
            match.event.event_id, match.event.date,
            before, after, (after - before) / before, regional,
        ))
    if not impacts:
        raise ModelError("no matched event has a usable before count")
    values = np.array([i.impact for i in impacts])
    small = float(np.mean(np.abs(values) < threshold))
    return ImpactReport(tuple(impacts), small, float(values.mean()),
                        float(np.median(values)), float(values.min()),
                        float(values.max()), threshold)


@dataclass(frozen=True)
class FisherInterval:
    """Confidence interval for a correlation via the z transform."""

    z: float
    half_width: float
    low: float
    high: float
    confidence: float


def fisher_interval(r: float, n: int, confidence: float = 0.95) -> FisherInterval:
    if n < 4:
        raise ModelError("Fisher interval needs at least four pairs")
    if not -1.0 < r < 1.0:
        raise ModelError("correlation must be strictly inside (-1, 1)")
    z = math.atanh(r)
    crit = float(_stats.norm.ppf(0.5 + confidence / 2))
    half = crit / math.sqrt(n - 3)
    return FisherInterval(z, half, math.tanh(z - half), math.tanh(z + half),
                          confidence)


@dataclass(frozen=True)
class CorrelationReport:
    n: int
    r: float
    t_stat: float
    p_value: float
    interval: FisherInterval

    @property
    def significant(self) -> bool:
        return self.p_value < 0.05


def pearson_report(x, y, confidence: float = 0.95) -> CorrelationReport:
    """Pearson correlation with a two-sided t test and a z-transform CI."""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ModelError("correlation needs two equal-length vectors")
    n = xs.size
    if n < 4:
        raise ModelError("correlation needs at least four pairs")
    if np.isclose(xs.std(), 0.0) or np.isclose(ys.std(), 0.0):
        raise ModelError("correlation is undefined for a constant series")
    r = float(np.corrcoef(xs, ys)[0, 1])
    r = max(min(r, 1.0), -1.0)
    if 1.0 - abs(r) < 1e-14:
        # perfectly collinear input; corrcoef lands a few ulps shy of 1
        r = math.copysign(1.0, r)
        t_stat = math.inf if r > 0 else -math.inf
        p_value = 0.0
        crit = float(_stats.norm.ppf(0.5 + confidence / 2))
        interval = FisherInterval(math.copysign(math.inf, r),
                                  crit / math.sqrt(n - 3), r, r, confidence)
    else:
        t_stat = r * math.sqrt((n - 2) / (1.0 - r * r))
        p_value = float(2 * _stats.t.sf(abs(t_stat), df=n - 2))
        interval = fisher_interval(r, n, confidence)
    return CorrelationReport(n, r, t_stat, p_value, interval)


def _price_lookup(prices) -> dict[date, float]:
    table = {}
    for point in prices:
        if point.date in table:
            raise ModelError(f"duplicate price for {point.date}")
        table[point.date] = point.close
    return table


def price_move(prices, day: date, horizon_days: int = 1) -> float | None:
    """Relative price change from an event day to ``horizon_days`` later.

    Scans backwards (then forwards) a few days for the nearest quote on
    either side; returns None when the series has no usable pair.
    """
    table = prices if isinstance(prices, dict) else _price_lookup(prices)
    before = None
    for back in range(horizon_days + 1):
        quote = table.get(day - timedelta(days=back))
        if quote is not None:
            before = quote
            break
    after = None
    for fwd in range(horizon_days, 0, -1):
        quote = table.get(day + timedelta(days=fwd))
        if quote is not None:
            after = quote
            break
    if before is None or after is None or before == 0:
        return None
    return (after - before) / before


def price_correlation(impact_report: ImpactReport, prices,
                      horizon_days: int = 1,
                      confidence: float = 0.95) -> CorrelationReport:
    """Correlate per-event census impact with the price move around it."""
    table = _price_lookup(prices)
    xs = []
    ys = []
    for impact in impact_report.impacts:
        move = price_move(table, impact.date, horizon_days)
        if move is None:
            continue
        xs.append(impact.impact)
        ys.append(move)
    return pearson_report(xs, ys, confidence)


@dataclass(frozen=True)
class ConcentrationReport:
    hhi: float
    shares: tuple[tuple[str, float], ...]

    @property
    def buckets(self) -> int:
        return len(self.shares)

    @property
    def top5_share(self) -> float:
        return sum(share for _, share in self.shares[:5])

    def top(self, k: int = 5) -> tuple[tuple[str, float], ...]:
        return self.shares[:k]


def concentration_metrics(snapshot: NodeSnapshot,
                          include_tor: bool = True) -> ConcentrationReport:
    """Herfindahl index over hosting networks, on the usual 0..10,000 scale.

    Clearnet nodes bucket by ASN; anonymous-overlay nodes count as one extra
    bucket when ``include_tor`` is set, since their provider is not
    observable. Shares use the total of all counted nodes.
    """
    counts: dict[str, int] = {}
    tor_count = 0
    for node in snapshot.nodes:
        if node.network == CLEARNET and node.asn is not None:
            key = str(node.asn)
            counts[key] = counts.get(key, 0) + 1
        elif node.network == TOR and include_tor:
            tor_count += 1
    if include_tor and tor_count:
        counts["tor"] = tor_count
    total = sum(counts.values())
    if total == 0:
        raise ModelError("no nodes to score for concentration")
    shares = sorted(((name, c / total) for name, c in counts.items()),
                    key=lambda item: (-item[1], item[0]))
    hhi = float(sum((share * 100.0) ** 2 for _, share in shares))
    return ConcentrationReport(hhi, tuple(shares))


def edges_for_event(graph, event: CableEvent):
    """Edge ids an event's cables map to, plus any unknown cable ids."""
    return graph.edges_for_cables(event.cable_ids)


__all__ = [
    "DEFAULT_WINDOW_DAYS", "SMALL_IMPACT", "ConcentrationReport",
    "CorrelationReport", "EventImpact", "EventMatch", "FisherInterval",
    "ImpactReport", "MatchReport", "concentration_metrics", "edges_for_event",
    "fisher_interval", "impact_stats", "in_scope_clearnet", "match_events",
    "pearson_report", "price_correlation", "price_move",
]
