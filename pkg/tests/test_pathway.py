import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from entropic_impacts.exceptions import ConfigError, PathNotFoundError, UnknownNodeError
from entropic_impacts.pathway import (GraphKind, PathwayConstraints, PathwayGraph, build_full_dag, default_source,
                                      edge_allowed, export_dot, graph_to_json, impact_dag, source_impact_dag,
                                      source_impact_path)

from helpers import brute_force_edges, make_record, random_records


def ids(graph):
    return set(graph.nodes)


def three_node():
    return [make_record("AEROD_v", "Tropical", 1, 10, 5.0),
            make_record("FSDSC", "Tropical", 5, 20, -5.0),
            make_record("TREFHT", "Tropical", 15, 30, -5.0)]


def test_three_node_fixture():
    a, f, t = three_node()
    g = build_full_dag([t, a, f])
    assert list(g.nodes) == [a.node_id, f.node_id, t.node_id]
    assert set(g.edges) == {(a.node_id, f.node_id), (f.node_id, t.node_id)}


def test_empty_graph():
    g = build_full_dag([make_record("AEROD_v", "Tropical", 1, 10, 0.5)])
    assert len(g) == 0 and g.edges == ()
    text = export_dot(g, ["config_hash: x"])
    assert text.splitlines()[0].startswith("//") and "digraph pathway {}" in text


def test_negative_scores_are_nodes_and_epsilon_is_strict():
    recs = [make_record("TREFHT", "Tropical", 1, 5, -3.0), make_record("TREFHT", "Tropical", 6, 9, 1.0)]
    assert len(build_full_dag(recs)) == 1


def chain_with_branch():
    a = make_record("AEROD_v", "Tropical", 1, 30, 8.0)
    b = make_record("FSDSC", "Tropical", 10, 40, -6.0)
    d = make_record("FSDSC", "Subtropical North", 12, 45, -2.0)
    c = make_record("TREFHT", "Tropical", 35, 60, -4.0)
    return a, b, c, d


def test_impact_dag_ancestor_closure():
    a, b, c, d = chain_with_branch()
    extra = make_record("TREFHT", "Polar North", 50, 70, 9.0)
    full = build_full_dag([a, b, c, d, extra])
    imp = impact_dag(full, c.node_id)
    assert ids(imp) == {a.node_id, b.node_id, c.node_id, d.node_id}
    assert imp.kind is GraphKind.IMPACT
    assert ids(impact_dag(full, a.node_id)) == {a.node_id}
    with pytest.raises(UnknownNodeError):
        impact_dag(full, "nope")


def test_diamond_prefers_high_score_branch():
    src = make_record("AEROD_v", "Tropical", 1, 30, 4.0)
    hi = make_record("FSDSC", "Tropical", 10, 40, -10.0)
    lo = make_record("FSDSC", "Subtropical North", 10, 40, 3.0)
    fin = make_record("TREFHT", "Tropical", 20, 50, -5.0)
    full = build_full_dag([src, hi, lo, fin])
    assert (lo.node_id, fin.node_id) in full.edges and (src.node_id, lo.node_id) in full.edges
    path = source_impact_path(impact_dag(full, fin.node_id), src.node_id, fin.node_id)
    assert path == [src.node_id, hi.node_id, fin.node_id]


def test_search_backtracks_from_dead_end():
    # the |score|-50 branch never reaches the source; search must fall back to the weak branch
    src = make_record("AEROD_v", "Tropical", 1, 30, 2.0)
    dead = make_record("FSDSC", "Polar North", 10, 40, -50.0)
    dead_parent = make_record("AEROD_v", "Polar North", 5, 30, 60.0)
    via = make_record("FSDSC", "Subtropical North", 10, 40, -3.0)
    fin = make_record("TREFHT", "Temperate North", 20, 50, -5.0)
    full = build_full_dag([src, dead, dead_parent, via, fin])
    imp = impact_dag(full, fin.node_id)
    assert ids(imp) == ids(full)
    assert source_impact_path(imp, src.node_id, fin.node_id) == [src.node_id, via.node_id, fin.node_id]


def test_path_errors_and_default_source():
    a, f, t = three_node()
    lone = make_record("AEROD_v", "Polar North", 100, 120, 9.0)
    full = build_full_dag([a, f, t, lone])
    with pytest.raises(PathNotFoundError):
        source_impact_path(full, lone.node_id, t.node_id)
    assert default_source(full) == a.node_id
    with pytest.raises(PathNotFoundError):
        default_source(full, region="Polar South")
    assert source_impact_path(full, a.node_id, t.node_id) == [a.node_id, f.node_id, t.node_id]
    assert source_impact_path(full, t.node_id, t.node_id) == [t.node_id]


def test_dot_export_deterministic_and_labelled():
    a, f, _ = three_node()
    g = build_full_dag([a, f])
    text = export_dot(g)
    assert text == export_dot(build_full_dag([f, a]))
    assert sum("->" in line for line in text.splitlines()) == 1
    assert 'label="AEROD_v|Tropical|2000-01-01..2000-01-10|5.000"' in text
    doc = json.loads(graph_to_json(g, "abc"))
    assert doc["config_hash"] == "abc" and doc["edges"] == [[a.node_id, f.node_id]]


def test_slack_extends_contact():
    a = make_record("AEROD_v", "Tropical", 1, 10, 5.0)
    b = make_record("FSDSC", "Tropical", 13, 20, 5.0)
    assert build_full_dag([a, b]).edges == ()
    assert len(build_full_dag([a, b], PathwayConstraints(slack_days=3)).edges) == 1


def test_cyclic_dependencies_rejected():
    with pytest.raises(ConfigError):
        PathwayConstraints(variable_deps={("A", "B"), ("B", "A")})


def test_graph_rejects_dangling_edges():
    with pytest.raises(UnknownNodeError):
        PathwayGraph(GraphKind.FULL, {}, (("a", "b"),))


@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 40), st.floats(0, 6), st.floats(0, 6))
def test_random_sets(seed, count, e1, e2):
    rng = np.random.default_rng(seed)
    recs = random_records(rng, count)
    lo, hi = sorted((e1, e2))
    full = build_full_dag(recs, PathwayConstraints(epsilon=lo))
    order = full.topological_order()
    assert len(order) == len(full)
    nodes, edges = brute_force_edges(recs, epsilon=lo)
    assert ids(full) == nodes and set(full.edges) == edges
    c = PathwayConstraints()
    assert all(edge_allowed(full.nodes[a], full.nodes[b], c) for a, b in full.edges)
    tight = build_full_dag(recs, PathwayConstraints(epsilon=hi))
    assert ids(tight) <= ids(full) and set(tight.edges) <= set(full.edges)
    if len(full):
        final = list(full.nodes)[rng.integers(len(full))]
        imp = impact_dag(full, final)
        assert ids(imp) <= ids(full) and set(imp.edges) <= set(full.edges)
        for src in imp.nodes:
            path = source_impact_path(imp, src, final)
            assert path[0] == src and path[-1] == final and len(set(path)) == len(path)
            si = source_impact_dag(imp, path)
            assert ids(si) <= ids(imp) and set(si.edges) <= set(imp.edges)
            assert set(si.edges) == set(zip(path, path[1:]))
