import random

import pytest

from cablesim.graph import (
    GraphError,
    build_physical_graph,
    components,
    edge_betweenness,
    main_component,
    submarine_degree,
)

from oracles import betweenness_oracle, random_topology

TRIANGLE = build_physical_graph(
    [("c1", "DE", "US"), ("c2", "FR", "US")], [("DE", "FR")])

PATH4 = build_physical_graph(
    [("c1", "AA", "AB"), ("c2", "AB", "AC"), ("c3", "AC", "AD")], [])


def test_raw_cables_collapse_per_country_pair():
    graph = build_physical_graph(
        [("c1", "DE", "US"), ("c2", "DE", "US"), ("c3", "DE", "FR")],
        [("DE", "FR")])
    assert sorted(graph.countries) == ["DE", "FR", "US"]
    subs = [graph.edges[eid] for eid in graph.submarine_edge_ids]
    assert len(subs) == 2
    by_pair = {tuple(sorted(e.endpoints)): e for e in subs}
    assert set(by_pair[("DE", "US")].cable_ids) == {"c1", "c2"}
    assert set(by_pair[("DE", "FR")].cable_ids) == {"c3"}
    assert len(graph.land_edge_ids) == 1


def test_borders_only_graph_has_no_removable_edges():
    graph = build_physical_graph([], [("DE", "FR")])
    assert sorted(graph.countries) == ["DE", "FR"]
    assert graph.submarine_edge_ids == ()
    assert len(graph.land_edge_ids) == 1


def test_duplicate_border_pairs_are_deduplicated():
    graph = build_physical_graph([], [("DE", "FR"), ("FR", "DE"), ("DE", "FR")])
    assert len(graph.land_edge_ids) == 1


@pytest.mark.parametrize("code", ["deu", "D", "d e", "DEU", "12"])
def test_malformed_country_code_is_rejected(code):
    with pytest.raises(GraphError):
        build_physical_graph([("c1", code, "US")], [])


def test_empty_input_graph_is_rejected():
    with pytest.raises(GraphError):
        build_physical_graph([], [])


def test_self_joined_country_is_rejected():
    with pytest.raises(GraphError):
        build_physical_graph([("c1", "DE", "DE")], [])
    with pytest.raises(GraphError):
        build_physical_graph([("c1", "DE", "US")], [("FR", "FR")])


def test_single_removal_keeps_triangle_connected():
    eid = next(e for e in TRIANGLE.submarine_edge_ids
               if set(TRIANGLE.edges[e].endpoints) == {"DE", "US"})
    assert components(TRIANGLE, {eid}).count == 1


def test_removing_both_cables_splits_off_us():
    part = components(TRIANGLE, set(TRIANGLE.submarine_edge_ids))
    assert part.count == 2
    assert sorted(map(sorted, part.members)) == [["DE", "FR"], ["US"]]


def test_path_splits_at_the_removed_middle_edge():
    middle = next(e for e in PATH4.submarine_edge_ids
                  if set(PATH4.edges[e].endpoints) == {"AB", "AC"})
    part = components(PATH4, {middle})
    assert sorted(map(sorted, part.members)) == [["AA", "AB"], ["AC", "AD"]]


def test_no_removal_equals_full_graph_components():
    assert components(TRIANGLE, set()).count == 1


def test_removing_land_or_unknown_edges_is_an_error():
    land = TRIANGLE.land_edge_ids[0]
    with pytest.raises(GraphError):
        components(TRIANGLE, {land})
    with pytest.raises(GraphError):
        components(TRIANGLE, {"sub:XX-YY"})


def test_fragmentation_is_monotone_under_growing_removals():
    rng = random.Random(11)
    for _ in range(25):
        _, cables, borders = random_topology(rng)
        graph = build_physical_graph(cables, borders)
        subs = list(graph.submarine_edge_ids)
        rng.shuffle(subs)
        removed = set()
        previous = components(graph, removed)
        for eid in subs:
            removed.add(eid)
            part = components(graph, removed)
            assert part.count >= previous.count
            # nothing separated ever reconnects
            for a in graph.countries:
                for b in graph.countries:
                    if previous.component_of[a] != previous.component_of[b]:
                        assert part.component_of[a] != part.component_of[b]
            previous = part


def test_main_component_prefers_hosted_nodes():
    part = components(TRIANGLE, set(TRIANGLE.submarine_edge_ids))
    idx = main_component(part, {"US": 100, "DE": 500, "FR": 400})
    assert set(part.members[idx]) == {"DE", "FR"}


def test_main_component_node_tie_breaks_lexicographically():
    graph = build_physical_graph([("c1", "AA", "AB"), ("c2", "AC", "AD")], [])
    part = components(graph, set())
    idx = main_component(part, {"AA": 50, "AB": 0, "AC": 50, "AD": 0})
    assert part.members[idx][0] == "AA"


def test_main_component_zero_hosting_falls_back_to_size():
    graph = build_physical_graph(
        [("c1", "AA", "AB"), ("c2", "AB", "AC"),
         ("c3", "BA", "BB"), ("c4", "CA", "CB")],
        [])
    part = components(graph, {graph.submarine_edge_ids[-1]})
    idx = main_component(part, {})
    assert set(part.members[idx]) == {"AA", "AB", "AC"}


def test_main_component_ignores_input_ordering():
    records = [("c1", "DE", "US"), ("c2", "FR", "US"), ("c3", "DE", "NL")]
    hosting = {"DE": 5, "US": 5, "FR": 1, "NL": 2}
    baseline = None
    for _ in range(6):
        random.Random(_).shuffle(records)
        graph = build_physical_graph(records, [])
        part = components(graph, set())
        members = set(part.members[main_component(part, hosting)])
        if baseline is None:
            baseline = members
        assert members == baseline


def test_two_edge_path_scores_four_sixths():
    graph = build_physical_graph([("c1", "AA", "AB"), ("c2", "AB", "AC")], [])
    scores = edge_betweenness(graph)
    assert scores == {
        "sub:AA-AB": pytest.approx(4 / 6, abs=1e-15),
        "sub:AB-AC": pytest.approx(4 / 6, abs=1e-15),
    }


def test_four_cycle_is_symmetric():
    graph = build_physical_graph(
        [("c1", "AA", "AB"), ("c2", "AB", "AC"),
         ("c3", "AC", "AD"), ("c4", "AD", "AA")], [])
    scores = edge_betweenness(graph)
    assert len(set(round(s, 12) for s in scores.values())) == 1


def test_parallel_edges_split_pair_flow():
    graph = build_physical_graph([("c1", "AA", "AB")], [("AA", "AB")])
    scores = edge_betweenness(graph)
    assert scores["sub:AA-AB"] == pytest.approx(0.5)
    assert scores["land:AA-AB"] == pytest.approx(0.5)


def test_submarine_only_flag_ignores_land_shortcuts():
    graph = build_physical_graph([("c1", "AA", "AB")], [("AA", "AB")])
    scores = edge_betweenness(graph, submarine_only=True)
    assert set(scores) == {"sub:AA-AB"}
    assert scores["sub:AA-AB"] == pytest.approx(1.0)


def test_betweenness_matches_enumeration_on_random_graphs():
    rng = random.Random(303)
    for _ in range(20):
        _, cables, borders = random_topology(rng)
        graph = build_physical_graph(cables, borders)
        got = edge_betweenness(graph)
        want = betweenness_oracle(
            sorted(graph.countries),
            [(eid, *graph.edges[eid].endpoints) for eid in graph.edges])
        assert got.keys() == want.keys()
        for eid in want:
            assert got[eid] == pytest.approx(want[eid], abs=1e-12)


def test_submarine_degree_counts_only_cables():
    graph = build_physical_graph(
        [("c1", "DE", "US"), ("c2", "DE", "US"), ("c3", "DE", "FR")],
        [("DE", "FR"), ("FR", "BE")])
    degrees = submarine_degree(graph)
    assert degrees["DE"] == 2
    assert degrees["US"] == 1
    assert degrees["FR"] == 1
    assert degrees["BE"] == 0
