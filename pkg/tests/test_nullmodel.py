from itertools import combinations

import numpy as np
import pytest

from ccnet.nullmodel import (
    RewireConfig,
    arc_overlap,
    asymmetry_indices,
    boxplot_summary,
    degree_preserving_rewire,
    ensemble_metric,
    ks_two_sample,
    null_condensation_report,
)
from conftest import graph_from_adj, graph_from_arcs
from oracles import asymmetry_nested, ks_d_pooled, ks_p_series, random_digraph


class TestRewire:
    def test_two_cycle_is_forced(self):
        g = graph_from_arcs([("u1", "u2"), ("u2", "u1")])
        null = degree_preserving_rewire(g, RewireConfig(seed=1), 0)
        assert arc_overlap(g, null) == 1.0

    def test_three_cycle_is_forced(self):
        # both possible swap proposals create a self-loop, so nothing moves
        g = graph_from_arcs([("a", "b"), ("b", "c"), ("c", "a")])
        null = degree_preserving_rewire(g, RewireConfig(seed=2), 0)
        assert arc_overlap(g, null) == 1.0

    def test_single_arc_warns_and_returns_input(self):
        g = graph_from_arcs([("a", "b")])
        with pytest.warns(UserWarning):
            null = degree_preserving_rewire(g, RewireConfig(seed=3), 0)
        assert arc_overlap(g, null) == 1.0

    def test_degrees_preserved_no_self_loops_no_duplicates(self):
        rng = np.random.default_rng(113)
        adj = random_digraph(rng, 100, 0.08)
        g = graph_from_adj(adj)
        cfg = RewireConfig(seed=11, runs=50)
        overlaps = []
        for run in range(cfg.runs):
            null = degree_preserving_rewire(g, cfg, run)
            assert np.array_equal(null.out_degree_binary(), g.out_degree_binary())
            assert np.array_equal(null.in_degree_binary(), g.in_degree_binary())
            src, dst = null.arcs()
            assert not (src == dst).any()
            assert len(set(zip(src.tolist(), dst.tolist()))) == src.size
            overlaps.append(arc_overlap(g, null))
        assert float(np.mean(overlaps)) < 1.0

    def test_deterministic_per_seed_and_run(self):
        rng = np.random.default_rng(127)
        g = graph_from_adj(random_digraph(rng, 40, 0.15))
        cfg = RewireConfig(seed=9)
        a = degree_preserving_rewire(g, cfg, 3)
        b = degree_preserving_rewire(g, cfg, 3)
        c = degree_preserving_rewire(g, cfg, 4)
        assert np.array_equal(a.arcs()[0], b.arcs()[0])
        assert np.array_equal(a.arcs()[1], b.arcs()[1])
        assert not (np.array_equal(a.arcs()[0], c.arcs()[0])
                    and np.array_equal(a.arcs()[1], c.arcs()[1]))


class TestAsymmetry:
    def test_hand_example(self):
        g = graph_from_arcs([("1", "2"), ("1", "3"), ("2", "3")])
        idx = asymmetry_indices(g)
        values = {u: k for k, u in enumerate(idx.nodes)}
        assert set(idx.nodes) == {"1", "2"}  # node 3 has no out-neighbors
        k1 = values["1"]
        assert idx.delta_out[k1] == pytest.approx(1.5)
        assert idx.delta_av[k1] == pytest.approx(1.5)
        assert idx.delta_max[k1] == pytest.approx(2.0)
        assert idx.delta_conf[k1] == pytest.approx(1.0)
        k2 = values["2"]
        assert idx.delta_out[k2] == pytest.approx(1.0)

    def test_regular_graph_has_zero_delta_out(self):
        # directed 4-cycle: every node has exactly one out-neighbor with out-degree 1
        g = graph_from_arcs([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
        idx = asymmetry_indices(g)
        assert np.allclose(idx.delta_out, 0.0)
        assert np.allclose(idx.delta_conf, 0.0)

    def test_matches_nested_loop_oracle(self):
        rng = np.random.default_rng(131)
        for trial in range(25):
            n = int(rng.integers(2, 30))
            adj = random_digraph(rng, n, 0.25)
            g = graph_from_adj(adj)
            got = asymmetry_indices(g)
            expected = asymmetry_nested(adj)
            assert len(got.nodes) == len(expected)
            for k, uid in enumerate(got.nodes):
                e = expected[int(uid[1:])]
                assert got.delta_out[k] == pytest.approx(e["delta_out"], abs=1e-12)
                assert got.delta_av[k] == pytest.approx(e["delta_av"], abs=1e-12)
                assert got.delta_max[k] == pytest.approx(e["delta_max"], abs=1e-12)
                assert got.delta_conf[k] == pytest.approx(e["delta_conf"], abs=1e-12)

    def test_av_bounded_by_max(self):
        rng = np.random.default_rng(137)
        g = graph_from_adj(random_digraph(rng, 40, 0.2))
        idx = asymmetry_indices(g)
        assert (idx.delta_av <= idx.delta_max + 1e-12).all()
        assert (idx.delta_av >= 0).all()
        assert (idx.delta_conf >= 0).all()


class TestKs:
    def test_identical_samples(self):
        res = ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert res.d_statistic == 0.0
        assert res.p_value == 1.0

    def test_disjoint_supports(self):
        res = ks_two_sample([0.0, 0.0, 0.0], [1.0, 1.0, 1.0])
        assert res.d_statistic == 1.0
        # exact p by enumeration is 2 / C(6,3) = 0.1; the asymptotic value is close
        assert res.p_value == pytest.approx(0.1, abs=0.01)

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            ks_two_sample([], [1.0])

    def test_symmetry(self):
        rng = np.random.default_rng(139)
        a = rng.normal(size=40)
        b = rng.normal(0.5, size=55)
        assert ks_two_sample(a, b).d_statistic == ks_two_sample(b, a).d_statistic

    def test_matches_pooled_point_and_series_oracles(self):
        rng = np.random.default_rng(149)
        for trial in range(60):
            n1 = int(rng.integers(5, 120))
            n2 = int(rng.integers(5, 120))
            a = rng.normal(size=n1)
            b = rng.normal(float(rng.uniform(-1, 1)), size=n2)
            res = ks_two_sample(a, b)
            assert res.d_statistic == pytest.approx(ks_d_pooled(a, b), abs=1e-12)
            assert res.p_value == pytest.approx(ks_p_series(res.d_statistic, n1, n2),
                                                abs=1e-6)

    def test_p_monotone_in_d(self):
        ps = [ks_p_series(d, 50, 50) for d in np.linspace(0.05, 1.0, 20)]
        assert all(a >= b for a, b in zip(ps, ps[1:]))

    def test_exact_enumeration_small_n(self):
        # exact two-sample null distribution of D for n1 = n2 = 3, distinct values:
        # every 3-subset of pooled ranks is equally likely
        a = [0.1, 0.5, 0.9]
        b = [0.2, 0.6, 1.0]
        observed = ks_two_sample(a, b).d_statistic
        pooled = sorted(a + b)
        count = 0
        total = 0
        for pick in combinations(range(6), 3):
            x = [pooled[i] for i in pick]
            y = [pooled[i] for i in range(6) if i not in pick]
            total += 1
            if ks_d_pooled(x, y) >= observed - 1e-12:
                count += 1
        exact_p = count / total
        asymp = ks_two_sample(a, b).p_value
        assert 0.0 <= asymp <= 1.0
        assert exact_p == 1.0  # D = 1/3 is the minimum possible here


class TestBoxplot:
    def test_tukey_hinges(self):
        b = boxplot_summary([1, 2, 3, 4, 5])
        assert (b.q1, b.median, b.q3) == (2.0, 3.0, 4.0)

    def test_all_equal(self):
        b = boxplot_summary([7.0] * 6)
        assert b.minimum == b.q1 == b.median == b.q3 == b.maximum == 7.0
        assert b.outliers == ()

    def test_outlier_detection(self):
        b = boxplot_summary(list(range(1, 10)) + [100])
        assert b.q1 == 3.0 and b.q3 == 8.0
        assert b.whisker_hi == 9.0
        assert b.outliers == (100.0,)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            boxplot_summary([])


class TestEnsemble:
    def test_constant_metric_mean(self):
        g = graph_from_arcs([("a", "b"), ("b", "a")])  # rewiring is forced
        cfg = RewireConfig(seed=5, runs=4)
        res = ensemble_metric(g, cfg, "reciprocity")
        assert res.means["reciprocal_pairs"] == 1.0
        assert all(run["reciprocal_pairs"] == 1 for run in res.per_run)

    def test_single_run_mean(self):
        rng = np.random.default_rng(151)
        g = graph_from_adj(random_digraph(rng, 20, 0.2))
        cfg = RewireConfig(seed=5, runs=1)
        res = ensemble_metric(g, cfg, "triads")
        assert res.means["triangles"] == res.per_run[0]["triangles"]

    def test_means_recomputable_from_runs(self):
        rng = np.random.default_rng(157)
        g = graph_from_adj(random_digraph(rng, 30, 0.15))
        cfg = RewireConfig(seed=6, runs=8)
        res = ensemble_metric(g, cfg, "bowtie")
        for key, value in res.means.items():
            assert value == pytest.approx(np.mean([r[key] for r in res.per_run]))

    def test_thread_count_does_not_change_results(self):
        rng = np.random.default_rng(163)
        g = graph_from_adj(random_digraph(rng, 30, 0.15))
        cfg = RewireConfig(seed=6, runs=6)
        a = ensemble_metric(g, cfg, "asymmetry", threads=1)
        b = ensemble_metric(g, cfg, "asymmetry", threads=4)
        assert a.per_run == b.per_run

    def test_unknown_metric(self):
        g = graph_from_arcs([("a", "b"), ("b", "a")])
        with pytest.raises(ValueError):
            ensemble_metric(g, RewireConfig(), "pagerank")


class TestNullCondensation:
    def test_forced_graph_real_equals_null(self):
        g = graph_from_arcs([("a", "b"), ("b", "a")])
        table = null_condensation_report(g, RewireConfig(seed=7, runs=3))
        for row in table.rows.values():
            assert row["real"] == pytest.approx(row["null_mean"])

    def test_gin_row_contains_gscc(self):
        rng = np.random.default_rng(167)
        g = graph_from_adj(random_digraph(rng, 25, 0.15))
        table = null_condensation_report(g, RewireConfig(seed=8, runs=5))
        assert table.rows["gin"]["real"] >= table.rows["gscc"]["real"]
        assert table.rows["gout"]["real"] >= table.rows["gscc"]["real"]
        assert table.rows["gin"]["null_mean"] >= table.rows["gscc"]["null_mean"]

    def test_null_mean_recomputable(self):
        rng = np.random.default_rng(173)
        g = graph_from_adj(random_digraph(rng, 25, 0.2))
        cfg = RewireConfig(seed=9, runs=6)
        table = null_condensation_report(g, cfg)
        from ccnet.nullmodel import _bowtie_row_shares
        shares = [_bowtie_row_shares(degree_preserving_rewire(g, cfg, k))
                  for k in range(cfg.runs)]
        for key, row in table.rows.items():
            assert row["null_mean"] == pytest.approx(np.mean([s[key] for s in shares]))


def test_rewire_config_validation():
    with pytest.raises(ValueError):
        RewireConfig(swap_multiplier=0)
    with pytest.raises(ValueError):
        RewireConfig(runs=0)
