import filecmp
from dataclasses import replace

import pytest

from cablesim.fixture import (
    BUNDLE_FILES,
    FixtureSpec,
    RELAY_LEAF,
    generate_fixture,
    write_bundle,
)
from cablesim.graph import submarine_degree
from cablesim.model import CLEARNET, ModelError, TOR, composition_stats
from cablesim.tor import worst_case_country
from cablesim.validation import DEFAULT_WINDOW_DAYS, match_events


def clearnet_count(snapshot):
    return sum(1 for n in snapshot.nodes if n.network == CLEARNET)


def test_full_profile_hits_the_documented_counts(full_bundle):
    graph = full_bundle.graph
    assert len(graph.countries) == 225
    assert len(graph.submarine_edge_ids) == 354
    assert len(graph.land_edge_ids) == 325
    assert clearnet_count(full_bundle.main_snapshot) == 8200


def test_full_profile_concentrates_hosting(full_bundle):
    counts = {}
    for node in full_bundle.main_snapshot.nodes:
        if node.network == CLEARNET and node.asn is not None:
            counts[node.asn] = counts.get(node.asn, 0) + 1
    shares = sorted(counts.values(), reverse=True)
    top5 = sum(shares[:5]) / sum(shares)
    assert top5 >= 0.5


def test_tor_share_bookends(full_bundle):
    low = composition_stats(full_bundle.low_tor_snapshot)["tor_share"]
    main = composition_stats(full_bundle.main_snapshot)["tor_share"]
    assert low <= 0.03
    assert main >= 0.5


def test_worst_case_country_hangs_on_one_cable(full_bundle):
    worst = worst_case_country(full_bundle.graph)
    assert submarine_degree(full_bundle.graph)[worst] == 1


def test_census_participation_grows_until_the_low_point(full_bundle):
    counts = [clearnet_count(s) for s in full_bundle.snapshots]
    assert counts[-1] == counts[-2] == 8200
    # wobbles are small; the level climbs over any three-census stretch
    for a, b in zip(counts, counts[2:]):
        assert b > a * 0.95


def test_dense_block_makes_short_windows_matchable(full_bundle):
    dates = [s.timestamp.date() for s in full_bundle.snapshots]
    gaps = [(b - a).days for a, b in zip(dates, dates[1:])]
    tight = [g for g in gaps if g <= DEFAULT_WINDOW_DAYS]
    assert len(tight) >= full_bundle.spec.dense_census_count
    assert max(gaps) > 2 * DEFAULT_WINDOW_DAYS


def test_some_events_match_and_some_stray(full_bundle):
    report = match_events(full_bundle.events, full_bundle.snapshots)
    assert len(report.matches) >= full_bundle.spec.event_count // 2
    assert len(report.unmatched) >= 2


def test_events_reference_real_cables(full_bundle):
    known = {cable_id for cable_id, _a, _b in full_bundle.cable_records}
    endpoint = {}
    for cable_id, a, b in full_bundle.cable_records:
        endpoint[cable_id] = {a, b}
    for event in full_bundle.events:
        for cable_id in event.cable_ids:
            assert cable_id in known
        touched = set()
        for cable_id in event.cable_ids:
            touched |= endpoint[cable_id]
        assert set(event.countries) == touched


def test_prices_cover_every_census_day(full_bundle):
    quoted = {p.date for p in full_bundle.prices}
    for snap in full_bundle.snapshots:
        assert snap.timestamp.date() in quoted


def test_relay_weight_sits_in_three_core_countries(full_bundle):
    relays = full_bundle.relays
    by_country = {}
    for relay in relays.relays:
        by_country[relay.country] = (by_country.get(relay.country, 0.0)
                                     + relay.consensus_weight)
    top3 = sorted(by_country.values(), reverse=True)[:3]
    assert sum(top3) / relays.total_cw >= 0.6
    assert {"DE", "FR", "NL"} <= set(by_country)


def test_leaf_relay_policy_targets_single_cable_countries():
    bundle = generate_fixture(FixtureSpec.mini(relay_policy=RELAY_LEAF))
    degrees = submarine_degree(bundle.graph)
    for relay in bundle.relays.relays:
        assert degrees[relay.country] == 1


def test_mini_profile_counts(mini_bundle):
    graph = mini_bundle.graph
    assert len(graph.countries) == 26
    assert len(graph.submarine_edge_ids) == 34
    assert len(graph.land_edge_ids) == 26
    assert clearnet_count(mini_bundle.main_snapshot) == 400
    tor = sum(1 for n in mini_bundle.main_snapshot.nodes
              if n.network == TOR)
    assert tor == 600


def test_same_seed_writes_identical_bytes(tmp_path):
    spec = FixtureSpec.mini(seed=123)
    for name in ("a", "b"):
        write_bundle(generate_fixture(spec), tmp_path / name)
    for filename in BUNDLE_FILES.values():
        assert filecmp.cmp(tmp_path / "a" / filename,
                           tmp_path / "b" / filename, shallow=False), filename


def test_different_seed_changes_the_census(tmp_path):
    a = generate_fixture(FixtureSpec.mini(seed=1))
    b = generate_fixture(FixtureSpec.mini(seed=2))
    assert a.snapshots[0].nodes != b.snapshots[0].nodes
    assert a.cable_records == b.cable_records


@pytest.mark.parametrize("kwargs", [
    dict(core_size=30),
    dict(block_a_size=1),
    dict(block_a_size=25),
    dict(countries=40),
    dict(snapshot_months=2),
    dict(dense_census_count=-1),
    dict(block_a_share=0.4),
    dict(relay_policy="everywhere"),
])
def test_infeasible_specs_error(kwargs):
    with pytest.raises(ModelError):
        FixtureSpec(**kwargs)


def test_too_many_dense_points_for_the_gap():
    spec = replace(FixtureSpec.mini(), dense_census_count=40)
    with pytest.raises(ModelError):
        generate_fixture(spec)
