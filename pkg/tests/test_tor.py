from datetime import datetime

import numpy as np
import pytest

from cablesim.graph import GraphError, build_physical_graph
from cablesim.model import (
    CLEARNET,
    TOR,
    ModelError,
    NodeSnapshot,
    P2PNode,
    RelayTable,
    TorRelay,
)
from cablesim.tor import (
    CLEARNET_ONLY,
    CLUSTERED,
    PROPORTIONAL,
    UNIFORM,
    WORST_CASE,
    TorScenario,
    apportion_tor_scenario,
    assign_tor_scenario,
    relay_survival,
    synthetic_asn,
    worst_case_country,
)

# TO hangs off a single cable; DE and US are heavily meshed.
LOPSIDED = build_physical_graph(
    [("c1", "DE", "US"), ("c2", "DE", "FR"), ("c3", "DE", "NL"),
     ("c4", "US", "FR"), ("c5", "US", "NL"), ("c6", "FR", "NL"),
     ("c7", "TO", "US")], [])


def snapshot(clearnet_counts, tor_count, base_asn=100):
    nodes = []
    asn = base_asn
    for country in sorted(clearnet_counts):
        for i in range(clearnet_counts[country]):
            nodes.append(P2PNode(f"c_{country}{i}", CLEARNET, country, asn))
        asn += 1
    nodes.extend(P2PNode(f"t{i:03d}", TOR) for i in range(tor_count))
    return NodeSnapshot(datetime(2025, 3, 1), tuple(nodes))


def placement_counts(assignment):
    counts = {}
    for country, _asn in assignment.placements.values():
        counts[country] = counts.get(country, 0) + 1
    return counts


def test_worst_case_country_picks_the_thinnest_link():
    assert worst_case_country(LOPSIDED) == "TO"


def test_worst_case_tie_breaks_lexicographically():
    graph = build_physical_graph([("c1", "AA", "AB"), ("c2", "AB", "AC")], [])
    # AA and AC both sit on one cable
    assert worst_case_country(graph) == "AA"


def test_worst_case_needs_a_submarine_edge():
    with pytest.raises(GraphError):
        worst_case_country(build_physical_graph([], [("AA", "AB")]))


def test_worst_case_scenario_stacks_everything_there():
    snap = snapshot({"DE": 30, "US": 20}, 50)
    assignment = assign_tor_scenario(TorScenario(WORST_CASE), snap,
                                     LOPSIDED, rng=4)
    assert placement_counts(assignment) == {"TO": 50}


def test_clearnet_only_places_nothing():
    snap = snapshot({"DE": 5}, 10)
    assert assign_tor_scenario(TorScenario(CLEARNET_ONLY), snap,
                               LOPSIDED, rng=4).placements == {}


def test_no_tor_nodes_no_placements():
    snap = snapshot({"DE": 5}, 0)
    assert assign_tor_scenario(TorScenario(UNIFORM), snap,
                               LOPSIDED, rng=4).placements == {}


def test_proportional_collapses_when_one_country_hosts_all():
    snap = snapshot({"DE": 40}, 25)
    assignment = assign_tor_scenario(TorScenario(PROPORTIONAL), snap,
                                     LOPSIDED, rng=4)
    assert placement_counts(assignment) == {"DE": 25}


def test_proportional_apportionment_is_exact():
    snap = snapshot({"DE": 75, "US": 25}, 100)
    assignment = apportion_tor_scenario(TorScenario(PROPORTIONAL), snap,
                                        LOPSIDED)
    assert placement_counts(assignment) == {"DE": 75, "US": 25}


def test_uniform_apportionment_is_exact():
    snap = snapshot({"DE": 99, "US": 1, "FR": 1, "NL": 1}, 8)
    assignment = apportion_tor_scenario(TorScenario(UNIFORM), snap, LOPSIDED)
    assert placement_counts(assignment) == {"DE": 2, "US": 2, "FR": 2,
                                            "NL": 2}


def test_clustered_spreads_the_remainder():
    snap = snapshot({"DE": 5, "US": 5, "FR": 5, "NL": 5, "TO": 5}, 100)
    assignment = apportion_tor_scenario(TorScenario(CLUSTERED), snap,
                                        LOPSIDED)
    assert placement_counts(assignment) == {
        "DE": 30, "US": 15, "FR": 10, "NL": 8, "TO": 37}


def test_clustered_rescales_without_a_remainder_target():
    snap = snapshot({"DE": 5, "US": 5, "FR": 5, "NL": 5}, 63)
    assignment = apportion_tor_scenario(TorScenario(CLUSTERED), snap,
                                        LOPSIDED)
    counts = placement_counts(assignment)
    assert sum(counts.values()) == 63
    assert set(counts) == {"DE", "US", "FR", "NL"}
    assert counts["DE"] == 30


def test_clustered_rejects_countries_missing_from_the_graph():
    snap = snapshot({"DE": 5}, 10)
    scenario = TorScenario(CLUSTERED, cluster_weights={"ZZ": 0.5})
    with pytest.raises(ModelError):
        assign_tor_scenario(scenario, snap, LOPSIDED, rng=4)


def test_scenario_validation():
    with pytest.raises(ModelError):
        TorScenario("median_case")
    with pytest.raises(ModelError):
        TorScenario(CLUSTERED, cluster_weights={"DE": -0.1})
    with pytest.raises(ModelError):
        TorScenario(CLUSTERED, cluster_weights={"DE": 0.7, "US": 0.6})
    with pytest.raises(GraphError):
        TorScenario(CLUSTERED, cluster_weights={"Germany": 0.5})


def test_synthetic_asn_is_deterministic_and_private():
    assert synthetic_asn("AA") == 4_200_000_000
    assert synthetic_asn("DE") == 4_200_000_000 + 3 * 26 + 4
    codes = ["AA", "AB", "DE", "US", "ZZ"]
    assert len({synthetic_asn(c) for c in codes}) == len(codes)


def test_placement_uses_observed_asns_or_a_synthetic_one():
    snap = snapshot({"DE": 10}, 20)
    # worst case targets TO, where nothing clearnet was ever observed
    worst = assign_tor_scenario(TorScenario(WORST_CASE), snap, LOPSIDED,
                                rng=4)
    assert worst.synthetic_asn_countries == ("TO",)
    assert all(asn == synthetic_asn("TO")
               for _c, asn in worst.placements.values())

    prop = assign_tor_scenario(TorScenario(PROPORTIONAL), snap, LOPSIDED,
                               rng=4)
    assert prop.synthetic_asn_countries == ()
    assert all(asn == 100 for _c, asn in prop.placements.values())


def test_apportionment_takes_the_smallest_observed_asn():
    nodes = (P2PNode("c1", CLEARNET, "DE", 300),
             P2PNode("c2", CLEARNET, "DE", 200),
             P2PNode("t1", TOR))
    snap = NodeSnapshot(datetime(2025, 3, 1), nodes)
    assignment = apportion_tor_scenario(TorScenario(PROPORTIONAL), snap,
                                        LOPSIDED)
    assert assignment.placements == {"t1": ("DE", 200)}


def test_sampled_placement_is_seed_stable():
    snap = snapshot({"DE": 30, "US": 10, "FR": 10}, 40)
    a = assign_tor_scenario(TorScenario(UNIFORM), snap, LOPSIDED, rng=12)
    b = assign_tor_scenario(TorScenario(UNIFORM), snap, LOPSIDED,
                            rng=np.random.default_rng(12))
    c = assign_tor_scenario(TorScenario(UNIFORM), snap, LOPSIDED, rng=13)
    assert a.placements == b.placements
    assert a.placements != c.placements


def test_sampled_shares_approach_the_weights():
    snap = snapshot({"DE": 75, "US": 25}, 2000)
    assignment = assign_tor_scenario(TorScenario(PROPORTIONAL), snap,
                                     LOPSIDED, rng=8)
    counts = placement_counts(assignment)
    assert abs(counts["DE"] / 2000 - 0.75) < 0.05


SPLIT_RELAYS = RelayTable((TorRelay("r1", "AA", 10, 60.0),
                           TorRelay("r2", "AB", 20, 40.0)))


def test_relay_survival_fractions():
    assert relay_survival(SPLIT_RELAYS, set(), set()) == (
        1.0, frozenset({"r1", "r2"}))
    frac, online = relay_survival(SPLIT_RELAYS, {"AA"}, set())
    assert frac == pytest.approx(0.4)
    assert online == frozenset({"r2"})
    assert relay_survival(SPLIT_RELAYS, {"AA", "AB"}, set())[0] == 0.0


def test_relay_survival_counts_failed_asns():
    frac, online = relay_survival(SPLIT_RELAYS, set(), {20})
    assert frac == pytest.approx(0.6)
    assert online == frozenset({"r1"})
    # country hit and ASN hit on the same relay do not double-count
    assert relay_survival(SPLIT_RELAYS, {"AB"}, {20})[0] == pytest.approx(0.6)


def test_relay_survival_is_monotone_in_the_damage():
    rng = np.random.default_rng(3)
    relays = RelayTable(tuple(
        TorRelay(f"f{i}", ["AA", "AB", "AC"][i % 3], int(rng.integers(1, 5)),
                 float(rng.random()) + 0.1)
        for i in range(12)))
    base, _ = relay_survival(relays, {"AA"}, set())
    worse, _ = relay_survival(relays, {"AA", "AC"}, set())
    worst, _ = relay_survival(relays, {"AA", "AC"}, {1, 2, 3, 4})
    assert base >= worse >= worst


def test_relay_survival_needs_weight():
    empty = RelayTable((TorRelay("r1", "AA", 10, 0.0),))
    with pytest.raises(ModelError):
        relay_survival(empty, set(), set())
