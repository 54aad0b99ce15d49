import numpy as np
import pytest

from ccnet.bowtie import (
    bowtie_labels,
    component_proportions,
    condense,
    filter_provider_flows,
    scc_centroids,
    strongly_connected_components,
)
from ccnet.ledger import TxGraph, UserRecord, build_graph

from conftest import graph_from_adj, graph_from_arcs, make_set, make_tx
from oracles import bowtie_by_closure, random_digraph, scc_by_closure


class TestScc:
    def test_cycle_is_one_component(self):
        g = graph_from_arcs([("a", "b"), ("b", "c"), ("c", "a")])
        parts = strongly_connected_components(g)
        assert parts.components == [["a", "b", "c"]]

    def test_path_gives_singletons(self):
        g = graph_from_arcs([("a", "b"), ("b", "c")])
        parts = strongly_connected_components(g)
        assert parts.components == [["a"], ["b"], ["c"]]
        assert parts.scc_id["a"] == 0

    def test_deterministic_indexing_by_smallest_id(self):
        g = graph_from_arcs([("x", "y"), ("y", "x"), ("a", "b"), ("b", "a"), ("b", "x")])
        parts = strongly_connected_components(g)
        assert parts.components[0] == ["a", "b"]
        assert parts.components[1] == ["x", "y"]

    def test_matches_mutual_reachability_closure(self):
        rng = np.random.default_rng(41)
        for trial in range(60):
            n = int(rng.integers(2, 13))
            adj = random_digraph(rng, n, float(rng.uniform(0.05, 0.5)))
            g = graph_from_adj(adj)
            got = strongly_connected_components(g)
            expected = scc_by_closure(adj)
            got_sets = sorted(frozenset(g.index[u] for u in c) for c in got.components
                              )
            exp_sets = sorted(frozenset(c) for c in expected)
            assert got_sets == exp_sets


class TestCondense:
    def test_cycle_plus_tail(self):
        g = graph_from_arcs([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")])
        parts = strongly_connected_components(g)
        dag = condense(g, parts)
        assert dag.n_components == 2
        assert dag.edges == {(0, 1)}
        assert dag.sizes == [3, 1]
        assert dag.internal_tx == [3, 0]

    def test_acyclic_graph_is_isomorphic(self):
        g = graph_from_arcs([("a", "b"), ("b", "c"), ("a", "c")])
        dag = condense(g, strongly_connected_components(g))
        assert dag.n_components == 3
        assert len(dag.edges) == 3

    def test_random_graphs_topo_sortable_and_edges_match(self):
        rng = np.random.default_rng(43)
        for trial in range(40):
            n = int(rng.integers(2, 16))
            adj = random_digraph(rng, n, 0.2)
            g = graph_from_adj(adj)
            parts = strongly_connected_components(g)
            dag = condense(g, parts)
            dag.topological_order()  # raises if cyclic
            comp_of = {u: parts.scc_id[u] for u in g.nodes}
            expected_edges = set()
            for (i, j) in g.edge_count:
                if comp_of[i] != comp_of[j]:
                    expected_edges.add((comp_of[i], comp_of[j]))
            assert dag.edges == expected_edges


SIX_NODE_ARCS = [("c", "d"), ("d", "c"), ("a", "c"), ("d", "b"), ("a", "e"),
                 ("a", "f"), ("f", "b")]


class TestBowtieLabels:
    def test_six_node_example(self):
        g = graph_from_arcs(SIX_NODE_ARCS)
        labels = bowtie_labels(g)
        assert labels.label == {
            "c": "GSCC", "d": "GSCC", "a": "GIN_ONLY", "b": "GOUT_ONLY",
            "e": "TENDRIL", "f": "TUBE",
        }

    def test_single_cycle_all_gscc(self):
        g = graph_from_arcs([("a", "b"), ("b", "c"), ("c", "a")])
        labels = bowtie_labels(g)
        assert set(labels.label.values()) == {"GSCC"}

    def test_equal_cycles_tie_break(self):
        g = graph_from_arcs([("a", "b"), ("b", "a"), ("x", "y"), ("y", "x")])
        labels = bowtie_labels(g)
        assert labels.label["a"] == "GSCC"
        assert labels.label["b"] == "GSCC"
        assert labels.label["x"] == "OUTSIDE_GWCC"
        assert labels.label["y"] == "OUTSIDE_GWCC"

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError):
            bowtie_labels(build_graph(make_set([])))

    def test_exhaustive_labels_match_closure_oracle(self):
        rng = np.random.default_rng(47)
        for trial in range(120):
            n = int(rng.integers(2, 13))
            adj = random_digraph(rng, n, float(rng.uniform(0.05, 0.5)))
            g = graph_from_adj(adj)
            got = bowtie_labels(g)
            expected = bowtie_by_closure(adj)
            for k, uid in enumerate(g.nodes):
                assert got.label[uid] == expected[k], (trial, adj.astype(int))


class TestProportions:
    def test_all_gscc_under_every_weighting(self):
        e = np.array([[0, 2, 0], [0, 0, 1], [3, 0, 0]])
        w = e * 100
        g = graph_from_adj(e > 0, e, w)
        labels = bowtie_labels(g)
        for weighting in ("nodes", "transactions", "volume"):
            props = component_proportions(g, labels, weighting)
            assert props.shares["gscc"] == pytest.approx(1.0)

    def test_six_node_example_node_shares(self):
        g = graph_from_arcs(SIX_NODE_ARCS)
        labels = bowtie_labels(g)
        props = component_proportions(g, labels, "nodes")
        assert props.shares == pytest.approx({
            "gscc": 2 / 6, "gin_only": 1 / 6, "gout_only": 1 / 6,
            "tendrils": 1 / 6, "tubes": 1 / 6, "other": 0.0,
        })

    def test_six_node_example_edge_buckets(self):
        ec = {arc: 1 for arc in SIX_NODE_ARCS}
        ev = {arc: 10 for arc in SIX_NODE_ARCS}
        g = TxGraph(sorted({u for arc in SIX_NODE_ARCS for u in arc}), ec, ev)
        labels = bowtie_labels(g)
        props = component_proportions(g, labels, "transactions")
        assert props.shares["gscc"] == pytest.approx(2 / 7)
        assert props.shares["gin_only"] == pytest.approx(3 / 7)
        assert props.shares["gout_only"] == pytest.approx(1 / 7)
        assert props.shares["other"] == pytest.approx(1 / 7)  # the f->b arc
        assert props.matrix["GIN_ONLY"]["TUBE"] == pytest.approx(1 / 7)

    def test_shares_sum_to_one_on_random_graphs(self):
        rng = np.random.default_rng(53)
        for trial in range(25):
            n = int(rng.integers(3, 20))
            adj = random_digraph(rng, n, 0.25)
            if not adj.any():
                continue
            e = adj * rng.integers(1, 5, (n, n))
            w = adj * rng.integers(1, 1000, (n, n))
            g = graph_from_adj(adj, e, w)
            labels = bowtie_labels(g)
            for weighting in ("nodes", "transactions", "volume"):
                props = component_proportions(g, labels, weighting)
                assert sum(props.shares.values()) == pytest.approx(1.0, abs=1e-9)
                if props.matrix is not None:
                    total = sum(v for row in props.matrix.values() for v in row.values())
                    assert total == pytest.approx(1.0, abs=1e-9)

    def test_empty_universe_raises(self):
        g = graph_from_arcs([("a", "b")])  # zero volume everywhere
        labels = bowtie_labels(g)
        with pytest.raises(ValueError, match="empty universe"):
            component_proportions(g, labels, "volume")


class TestProviderFilter:
    def test_drops_provider_flows(self):
        ts = make_set([make_tx("b1", "p1", 10, tx_id="1"), make_tx("b1", "b2", 20, tx_id="2")],
                      users={"b1": "B", "b2": "B", "p1": "P"})
        out = filter_provider_flows(ts)
        assert [t.tx_id for t in out.transactions] == ["2"]
        assert set(out.users) == {"b1", "b2"}

    def test_no_providers_is_identity(self):
        ts = make_set([make_tx("b1", "b2", 10)], users={"b1": "B", "b2": "B"})
        out = filter_provider_flows(ts)
        assert out.transactions == ts.transactions

    def test_survivors_match_predicate_filter(self):
        rng = np.random.default_rng(59)
        users = {f"u{k}": ("P" if k % 7 == 0 else "B") for k in range(20)}
        txs = [make_tx(f"u{rng.integers(20)}", f"u{rng.integers(20)}", 5, tx_id=f"t{k}")
               for k in range(100)]
        ts = make_set(txs, users=users)
        out = filter_provider_flows(ts)
        expected = [t for t in txs
                    if users[t.buyer_id] != "P" and users[t.seller_id] != "P"]
        assert out.transactions == expected

    def test_filtered_gscc_is_strongly_connected_without_provider_arcs(self):
        rng = np.random.default_rng(61)
        for trial in range(20):
            n = 10
            adj = random_digraph(rng, n, 0.3)
            types = {f"n{k:03d}": ("P" if k in (0, 3) else "B") for k in range(n)}
            g = graph_from_adj(adj)
            txs = [make_tx(i, j, 1, tx_id=f"{i}-{j}") for (i, j) in g.edge_count]
            ts = make_set(txs, users=types)
            gf = build_graph(filter_provider_flows(ts))
            if gf.n == 0:
                continue
            parts = strongly_connected_components(gf)
            gscc = max(parts.components, key=len)
            # cross-check against closure on the unfiltered graph minus P arcs
            masked = adj.copy()
            for k in (0, 3):
                masked[k, :] = False
                masked[:, k] = False
            comps = {frozenset(c) for c in scc_by_closure(masked)}
            member_ix = frozenset(int(u[1:]) for u in gscc)
            assert any(member_ix <= c for c in comps)


class TestCentroids:
    def test_mean_of_two(self):
        g = graph_from_arcs([("a", "b"), ("b", "a")])
        parts = strongly_connected_components(g)
        users = {"a": UserRecord("a", "B", coord=(0.0, 0.0)),
                 "b": UserRecord("b", "B", coord=(2.0, 2.0))}
        centroids, skipped = scc_centroids(parts, users)
        assert skipped == []
        assert centroids[0].lat == pytest.approx(1.0)
        assert centroids[0].lon == pytest.approx(1.0)

    def test_singleton(self):
        g = graph_from_arcs([("a", "b")])
        parts = strongly_connected_components(g)
        users = {"a": UserRecord("a", "B", coord=(39.5, 9.0))}
        centroids, skipped = scc_centroids(parts, users)
        assert len(centroids) == 1 and centroids[0].lat == pytest.approx(39.5)
        assert skipped == [parts.scc_id["b"]]

    def test_unlocated_member_excluded_from_mean(self):
        g = graph_from_arcs([("a", "b"), ("b", "c"), ("c", "a")])
        parts = strongly_connected_components(g)
        users = {"a": UserRecord("a", "B", coord=(0.0, 0.0)),
                 "b": UserRecord("b", "B", coord=(4.0, 2.0)),
                 "c": UserRecord("c", "B")}
        centroids, _ = scc_centroids(parts, users)
        assert centroids[0].lat == pytest.approx(2.0)
        assert centroids[0].located == 2
        assert centroids[0].size == 3
