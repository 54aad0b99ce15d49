"""Command-line entry point wiring all analysis modules.

Subcommands: ingest, metrics, bowtie, nullmodel, multilayer, geo, synth,
report. Identical inputs, seed and config produce byte-identical output
trees regardless of the thread count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bowtie as bt
from . import geocluster as geo
from . import metrics as mx
from . import multilayer as ml
from . import nullmodel as nm
from .emit import share, write_csv, write_json
from .ledger import (
    DEFAULT_BALANCE_EDGES,
    CORRELATION_AXES,
    ParseError,
    TransactionSet,
    amount_range_distribution,
    balance_by_type,
    build_graph,
    cohort_flow_report,
    degree_range_report,
    flow_stats,
    net_balance_histogram,
    parse_transactions,
    pearson_correlations,
    slice_by_period,
    type_transaction_matrix,
)
from .synthgen import RNG_ID, SynthConfig, config_metadata, generate_ledger

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_UNREADABLE = 3
EXIT_SCHEMA = 4

DEFAULT_SEED = 42


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, **details):
        super().__init__(message)
        self.code = code
        self.kind = kind
        self.details = details


def _emit_error(err: CliError) -> None:
    doc = {"error": {"kind": err.kind, "message": str(err), **err.details}}
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)


def _resolve_threads(value: int) -> int:
    if value == 0:
        env = os.environ.get("CCNET_THREADS")
        if env is not None:
            try:
                value = int(env)
            except ValueError:
                raise CliError(EXIT_USAGE, "usage", f"CCNET_THREADS is not an integer: '{env}'")
        else:
            value = 1
    return max(1, value)


def _load(args) -> TransactionSet:
    for path in (args.tx, args.users):
        if not Path(path).is_file():
            raise CliError(EXIT_UNREADABLE, "unreadable_input",
                           f"cannot read input file: {path}", path=str(path))
    try:
        with open(args.tx, "rb") as tx_f, open(args.users, "rb") as users_f:
            return parse_transactions(tx_f, users_f)
    except ParseError as exc:
        raise CliError(EXIT_SCHEMA, "schema_violation", str(exc))


def _years_in(ts: TransactionSet) -> list[int]:
    return sorted({t.date.year for t in ts.transactions})


def _select_years(args, ts: TransactionSet) -> list[int]:
    if args.year:
        try:
            return [int(y) for y in str(args.year).split(",")]
        except ValueError:
            raise CliError(EXIT_USAGE, "usage",
                           f"--year must be comma-separated integers: '{args.year}'")
    return _years_in(ts)


def _write_parse_errors(out: Path, ts: TransactionSet) -> None:
    if ts.errors:
        write_csv(out / "parse_errors.csv",
                  ("source", "line", "field", "message"),
                  [(e.source, e.line, e.field, e.message) for e in ts.errors])


# ---------------------------------------------------------------- sections

def _flows_section(out: Path, year_set: TransactionSet, include_isolated: bool) -> dict:
    g = build_graph(year_set, include_isolated=include_isolated)
    stats = flow_stats(g)
    write_csv(out / "flows.csv",
              ("user_id", "theta_in", "theta_out", "v_in_cents", "v_out_cents", "net_cents"),
              [(u, int(stats.theta_in[k]), int(stats.theta_out[k]), int(stats.v_in[k]),
                int(stats.v_out[k]), int(stats.net[k])) for k, u in enumerate(stats.nodes)])

    corr = pearson_correlations(stats) if g.n >= 2 else np.full((4, 4), np.nan)
    write_csv(out / "correlations.csv",
              ("axis",) + CORRELATION_AXES,
              [(CORRELATION_AXES[i],) + tuple(
                  "" if np.isnan(corr[i, j]) else share(corr[i, j]) for j in range(4))
               for i in range(4)])

    hist = net_balance_histogram(stats, DEFAULT_BALANCE_EDGES)
    write_csv(out / "balance_histogram.csv", ("bin", "count"),
              list(zip(hist.labels, hist.counts)))

    ranges = degree_range_report(g)
    write_csv(out / "degree_ranges.csv",
              ("predicate", "nodes", "node_share", "tx_sum", "tx_share",
               "volume_sum_cents", "volume_share", "binary_sum", "binary_share"),
              [(r.label, r.nodes, share(r.node_share), r.tx_sum, share(r.tx_share),
                r.volume_sum, share(r.volume_share), r.binary_sum, share(r.binary_share))
               for r in ranges.rows])

    tmat = type_transaction_matrix(year_set)
    write_csv(out / "type_matrix.csv",
              ("buyer_type", "seller_type", "buyers", "sellers", "tx_count", "volume_cents"),
              [(b, s, tmat.cell(b, s).buyers, tmat.cell(b, s).sellers,
                tmat.cell(b, s).tx_count, tmat.cell(b, s).volume_cents)
               for b in tmat.types for s in tmat.types])

    amounts_all = amount_range_distribution(year_set, by_type=False)
    amounts_typed = amount_range_distribution(year_set, by_type=True)
    rows = []
    for stratum, dist in [("all", amounts_all.strata.get("all"))] + sorted(amounts_typed.strata.items()):
        if dist is None:
            continue
        for label, count, sh in zip(amounts_all.labels, dist.counts, dist.shares):
            rows.append((stratum, label, count, share(sh)))
    write_csv(out / "amount_ranges.csv", ("stratum", "bucket", "count", "share"), rows)

    users_by_type: dict[str, dict] = {}
    for k, uid in enumerate(stats.nodes):
        rec = year_set.users.get(uid)
        ut = rec.utype if rec is not None and rec.utype else "U"
        row = users_by_type.setdefault(ut, {"count": 0, "v_out_cents": 0, "v_in_cents": 0})
        row["count"] += 1
        row["v_out_cents"] += int(stats.v_out[k])
        row["v_in_cents"] += int(stats.v_in[k])

    balance_types = balance_by_type(stats, year_set.users)
    return {
        "nodes": g.n,
        "transactions": g.total_transactions(),
        "volume_cents": g.total_volume_cents(),
        "binary_edges": g.arc_count,
        "dropped_self_trades": g.dropped_self_trades,
        "users_by_type": users_by_type,
        "correlations": {
            "axes": list(CORRELATION_AXES),
            "matrix": [[None if np.isnan(corr[i, j]) else share(corr[i, j])
                        for j in range(4)] for i in range(4)],
        },
        "balance_histogram": {
            "labels": list(hist.labels),
            "counts": list(hist.counts),
        },
        "balance_by_type": {
            t: {"count": row.count, "share_within_5": share(row.share_within_5),
                "share_within_50": share(row.share_within_50),
                "share_positive": share(row.share_positive)}
            for t, row in balance_types.items()
        },
        "degree_ranges": [
            {"predicate": r.label, "node_share": share(r.node_share),
             "tx_share": share(r.tx_share), "volume_share": share(r.volume_share),
             "binary_share": share(r.binary_share)}
            for r in ranges.rows
        ],
        "amount_ranges": {
            stratum: {"counts": list(dist.counts), "shares": [share(s) for s in dist.shares]}
            for stratum, dist in sorted({**amounts_typed.strata, **amounts_all.strata}.items())
        },
    }


def _metrics_section(out: Path, year_set: TransactionSet, max_len: int, cap: int) -> dict:
    g = build_graph(year_set)
    r = mx.reciprocity(g)
    write_csv(out / "reciprocity.csv", ("user_id", "r"), sorted(r.items()))

    strata = mx.reciprocity_strata(g)
    rollup = mx.rollup_strata(strata)
    write_csv(out / "strata.csv", ("rho", "n_nodes", "tx_count", "volume_cents"),
              [(label, s.nodes, s.tx_count, s.volume_cents) for label, s in rollup])

    by_type = mx.reciprocity_by_type(g, year_set.users)
    types = sorted({t for pair in by_type for t in pair})

    cap_hit = False
    try:
        census = mx.cycle_census(g, max_len=max_len, cap=cap)
    except mx.CycleCapExceeded as exc:
        census = exc.partial
        cap_hit = True
    cycles_doc = {
        "max_len": census.max_len,
        "complete": census.complete,
        "cap": cap,
        "per_length": {
            str(length): {
                "cycles": census.cycle_count[length],
                "nodes_in_cycles": census.nodes_in_cycles[length],
                "nodes_in_single_cycle": census.nodes_in_single_cycle[length],
                "max_cycles_per_node": census.max_cycles_per_node[length],
            }
            for length in range(2, census.max_len + 1)
        },
    }
    write_json(out / "cycles.json", cycles_doc)

    triads = mx.triad_census(g)
    write_csv(out / "clustering.csv",
              ("user_id", "coefficient", "triangles", "sc_triplets"),
              [(u, share(triads.clustering[k]), int(triads.triangle_count[k]),
                int(triads.sc_triplet_count[k])) for k, u in enumerate(triads.nodes)])
    n = max(g.n, 1)
    triads_doc = {
        "triangles": triads.triangles,
        "sc_triplets": triads.sc_triplets,
        "connected_triplets": triads.connected_triplets,
        "mean_clustering": share(float(triads.clustering.mean()) if g.n else 0.0),
        "share_zero_clustering": share(float((triads.clustering == 0).sum() / n)),
        "share_above_half": share(float((triads.clustering > 0.5).sum() / n)),
        "share_equal_one": share(float((triads.clustering == 1.0).sum() / n)),
    }
    write_json(out / "triads.json", triads_doc)

    return {
        "reciprocity": {
            "max_r": max(r.values(), default=0),
            "nodes_with_reciprocal": sum(1 for v in r.values() if v >= 1),
            "strata": [
                {"rho": label, "n_nodes": s.nodes, "tx_count": s.tx_count,
                 "volume_cents": s.volume_cents} for label, s in rollup
            ],
            "by_type": {f"{a}->{b}": by_type.get((a, b), 0)
                        for a in types for b in types},
        },
        "cycles": cycles_doc | {"cap_hit": cap_hit},
        "triads": triads_doc,
    }


def _proportions_doc(g, labels) -> dict:
    doc: dict = {"gwcc_size": labels.gwcc_size, "top_scc_sizes": labels.top_scc_sizes}
    for weighting in ("nodes", "transactions", "volume"):
        try:
            props = bt.component_proportions(g, labels, weighting)
        except ValueError:
            doc[weighting] = None
            continue
        entry = {"universe": props.universe,
                 "shares": {k: share(v) for k, v in props.shares.items()}}
        if props.matrix is not None:
            entry["matrix"] = {
                src: {dst: share(v) for dst, v in row.items()}
                for src, row in props.matrix.items()
            }
        doc[weighting] = entry
    return doc


def _bowtie_section(out: Path, year_set: TransactionSet) -> dict:
    g = build_graph(year_set)
    if g.n == 0:
        raise CliError(EXIT_SCHEMA, "empty_graph", "no transactions in the selected period")
    labels = bt.bowtie_labels(g)
    write_csv(out / "labels.csv", ("user_id", "label"), sorted(labels.label.items()))

    parts = bt.strongly_connected_components(g)
    sizes = sorted(parts.sizes, reverse=True)[:5]
    write_csv(out / "scc_summary.csv", ("rank", "size"),
              [(k + 1, s) for k, s in enumerate(sizes)])

    centroids, skipped = bt.scc_centroids(parts, year_set.users)
    write_csv(out / "centroids.csv",
              ("component", "size", "located_members", "lat", "lon"),
              [(c.component, c.size, c.located, round(c.lat, 6), round(c.lon, 6))
               for c in centroids])

    doc = {"including_providers": _proportions_doc(g, labels)}
    gf = build_graph(bt.filter_provider_flows(year_set))
    doc["excluding_providers"] = _proportions_doc(gf, bt.bowtie_labels(gf)) if gf.n else None
    doc["unlocated_components"] = len(skipped)
    write_json(out / "proportions.json", doc)
    return doc


def _nullmodel_section(out: Path, year_set: TransactionSet, cfg: nm.RewireConfig,
                       threads: int, filter_providers: bool) -> dict:
    g_full = build_graph(year_set)
    analysis_set = bt.filter_provider_flows(year_set) if filter_providers else year_set
    g = build_graph(analysis_set)
    if g.arc_count == 0:
        raise CliError(EXIT_SCHEMA, "empty_graph", "no arcs to rewire in the selected period")

    real_idx = nm.asymmetry_indices(g)
    real_shares = nm._bowtie_row_shares(g)

    run_rows = []
    null_values: dict[str, list[np.ndarray]] = {w: [] for w in
                                                ("delta_out", "delta_av", "delta_max", "delta_conf")}
    null_shares_runs = []
    for k in range(cfg.runs):
        null = nm.degree_preserving_rewire(g, cfg, k)
        idx = nm.asymmetry_indices(null)
        shares = nm._bowtie_row_shares(null)
        null_shares_runs.append(shares)
        for w in null_values:
            null_values[w].append(getattr(idx, w))
        run_rows.append((
            k, nm.run_seed(cfg, k), share(nm.arc_overlap(g, null)),
            share(shares["gscc"]), share(shares["gin_only"]), share(shares["gout_only"]),
            share(shares["tendrils"]), share(shares["tubes"]),
            share(float(idx.delta_out.mean()) if idx.delta_out.size else 0.0),
            share(float(idx.delta_av.mean()) if idx.delta_av.size else 0.0),
            share(float(idx.delta_max.mean()) if idx.delta_max.size else 0.0),
            share(float(idx.delta_conf.mean()) if idx.delta_conf.size else 0.0),
        ))
    write_csv(out / "runs.csv",
              ("run", "seed", "arc_overlap", "gscc_share", "gin_only_share",
               "gout_only_share", "tendrils_share", "tubes_share", "delta_out_mean",
               "delta_av_mean", "delta_max_mean", "delta_conf_mean"),
              run_rows)

    ks_results = {}
    box_rows = []
    for w in ("delta_out", "delta_av", "delta_max", "delta_conf"):
        real_arr = getattr(real_idx, w)
        pooled = np.concatenate(null_values[w]) if null_values[w] else np.empty(0)
        if real_arr.size and pooled.size:
            ks = nm.ks_two_sample(real_arr, pooled)
            ks_results[w] = {"d": ks.d_statistic, "p": ks.p_value,
                             "n1": ks.n1, "n2": ks.n2}
            for source, sample in (("real", real_arr), ("null", pooled)):
                b = nm.boxplot_summary(sample)
                box_rows.append((w, source, b.n, share(b.minimum), share(b.q1),
                                 share(b.median), share(b.q3), share(b.maximum),
                                 share(b.whisker_lo), share(b.whisker_hi), len(b.outliers)))
        else:
            ks_results[w] = None
    write_csv(out / "boxplots.csv",
              ("metric", "source", "n", "min", "q1", "median", "q3", "max",
               "whisker_lo", "whisker_hi", "n_outliers"),
              box_rows)

    null_mean = {
        key: float(np.mean([s[key] for s in null_shares_runs]))
        for key in nm.NULL_TABLE_ROWS
    }
    condensation = {
        key: {"real": share(real_shares[key]), "null_mean": share(null_mean[key])}
        for key in nm.NULL_TABLE_ROWS
    }

    null_index_means = {}
    for w in ("delta_out", "delta_av", "delta_max", "delta_conf"):
        pooled = null_values[w]
        null_index_means[w] = share(float(np.mean(np.concatenate(pooled)))) \
            if pooled and sum(a.size for a in pooled) else None
    doc = {
        "config": {"runs": cfg.runs, "swap_multiplier": cfg.swap_multiplier,
                   "seed": cfg.seed, "rng": nm.SWAP_RNG_ID,
                   "seed_derivation": "seed XOR run_index",
                   "filter_providers": filter_providers},
        "analysis_graph": {"nodes": g.n, "binary_edges": g.arc_count},
        "real_index_means": {
            w: (share(float(getattr(real_idx, w).mean()))
                if getattr(real_idx, w).size else None)
            for w in ("delta_out", "delta_av", "delta_max", "delta_conf")
        },
        "null_index_means": null_index_means,
        "ks": ks_results,
        "condensation": {"analysis": condensation},
    }

    # the real-vs-null condensation table is always reported both with and
    # without provider flows when type information allows it
    table_incl = nm.null_condensation_report(g_full, cfg, threads=threads)
    doc["condensation"]["including_providers"] = {
        "gwcc_size": table_incl.gwcc_size,
        "rows": {k: {kk: share(vv) for kk, vv in v.items()}
                 for k, v in table_incl.rows.items()},
    }
    filtered_set = bt.filter_provider_flows(year_set)
    gf = build_graph(filtered_set)
    if gf.arc_count:
        table_excl = nm.null_condensation_report(gf, cfg, threads=threads)
        doc["condensation"]["excluding_providers"] = {
            "gwcc_size": table_excl.gwcc_size,
            "rows": {k: {kk: share(vv) for kk, vv in v.items()}
                     for k, v in table_excl.rows.items()},
        }
    else:
        doc["condensation"]["excluding_providers"] = None
    write_json(out / "summary.json", doc)
    return doc


def _layer_stats_doc(s: ml.LayerStats) -> dict:
    return {
        "node_count": s.node_count,
        "intra_binary_edges": s.intra_binary_edges,
        "intra_tx_count": s.intra_tx_count,
        "intra_volume_cents": s.intra_volume_cents,
        "mean_volume_per_edge_cents": None if s.mean_volume_per_edge_cents is None
        else round(s.mean_volume_per_edge_cents, 2),
        "mean_volume_per_node_cents": None if s.mean_volume_per_node_cents is None
        else round(s.mean_volume_per_node_cents, 2),
        "avg_in_degree_full": None if s.avg_in_degree_full is None else share(s.avg_in_degree_full),
        "avg_out_degree_full": None if s.avg_out_degree_full is None else share(s.avg_out_degree_full),
        "avg_total_degree_full": None if s.avg_total_degree_full is None else share(s.avg_total_degree_full),
        "avg_in_degree_intra": None if s.avg_in_degree_intra is None else share(s.avg_in_degree_intra),
        "avg_out_degree_intra": None if s.avg_out_degree_intra is None else share(s.avg_out_degree_intra),
        "avg_total_degree_intra": None if s.avg_total_degree_intra is None else share(s.avg_total_degree_intra),
        "bowtie": None if s.bowtie is None else {k: share(v) for k, v in s.bowtie.items()},
    }


def _multilayer_section(out: Path, year_set: TransactionSet) -> dict:
    g = build_graph(year_set)
    partition = ml.partition_layers(year_set.users)
    write_csv(out / "layers.csv", ("user_id", "layer"),
              sorted((u, partition.layer[u]) for u in g.nodes if u in partition.layer))
    report = ml.layer_report(g, partition)
    doc = {
        "business": _layer_stats_doc(report.business),
        "person": _layer_stats_doc(report.person),
        "full": _layer_stats_doc(report.full),
        "inter": {
            key: {"binary_edges": f.binary_edges, "tx_count": f.tx_count,
                  "volume_cents": f.volume_cents}
            for key, f in report.inter.items()
        },
        "excluded_edges": {
            "binary_edges": report.excluded_edges.binary_edges,
            "tx_count": report.excluded_edges.tx_count,
            "volume_cents": report.excluded_edges.volume_cents,
        },
        "excluded_users": report.excluded_users,
        "degree_convention": "binary degrees (distinct counterparties)",
        "volume_convention": "mean intra-layer volume per binary edge",
    }
    write_json(out / "layer_report.json", doc)
    return doc


def _matrix_rows(m: geo.ZoneMatrix, cells: np.ndarray):
    rows = []
    for i, lab in enumerate(m.labels):
        row = [lab]
        for j in range(len(m.labels)):
            v = cells[i, j]
            row.append(round(float(v), 2) if isinstance(v, (float, np.floating)) else int(v))
        rows.append(row)
    return rows


def _geo_section(out: Path, year_set: TransactionSet) -> dict:
    doc = {}
    for prefix, builder in (("zone", geo.zone_matrix), ("sector", geo.sector_matrix)):
        count_m = builder(year_set, "count")
        volume_m = builder(year_set, "volume")
        mean_m = builder(year_set, "mean_per_pair")
        header = ("from_to",) + tuple(count_m.labels)
        write_csv(out / f"{prefix}_count.csv", header, _matrix_rows(count_m, count_m.cells))
        write_csv(out / f"{prefix}_volume.csv", header, _matrix_rows(volume_m, volume_m.cells))
        write_csv(out / f"{prefix}_mean.csv", header, _matrix_rows(mean_m, mean_m.cells))
        write_csv(out / f"{prefix}_pairs.csv", header, _matrix_rows(count_m, count_m.pair_cells))
        doc[prefix] = {
            "coverage": share(count_m.coverage),
            "resolvable_tx": count_m.resolvable_tx,
            "resolvable_volume_cents": count_m.resolvable_volume_cents,
            "labels": list(count_m.labels),
        }
    return doc


def _cohort_stats_doc(s) -> dict:
    return {
        "count": s.count,
        "theta_in_sum": s.theta_in_sum,
        "theta_out_sum": s.theta_out_sum,
        "v_in_sum_cents": s.v_in_sum,
        "v_out_sum_cents": s.v_out_sum,
        "mean_v_in_cents": round(s.mean_v_in, 2),
        "std_v_in_cents": round(s.std_v_in, 2),
        "mean_v_out_cents": round(s.mean_v_out, 2),
        "std_v_out_cents": round(s.std_v_out, 2),
        "groups": {
            name: {"count": gf.count, "theta_in": gf.theta_in, "theta_out": gf.theta_out,
                   "v_in_cents": gf.v_in, "v_out_cents": gf.v_out}
            for name, gf in s.groups.items()
        },
    }


# ------------------------------------------------------------- subcommands

def _cmd_synth(args) -> int:
    out = Path(args.out)
    cfg = SynthConfig(
        n_users=args.users,
        n_transactions=args.transactions,
        imitation_beta=args.beta,
        activity_tail=args.activity_tail,
        year=args.synth_year,
        seed=args.seed,
    )
    try:
        ts = generate_ledger(cfg)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, "usage", str(exc))
    write_csv(out / "transactions.csv",
              ("tx_id", "date", "buyer_id", "seller_id", "amount_cents"),
              [(t.tx_id, t.date.isoformat(), t.buyer_id, t.seller_id, t.amount_cents)
               for t in ts.transactions])
    write_csv(out / "users.csv",
              ("user_id", "type", "sector", "postal_code", "lat", "lon"),
              [(u.user_id, u.utype, u.sector, u.postal_code,
                f"{u.coord[0]:.6f}", f"{u.coord[1]:.6f}")
               for u in ts.users.values()])
    write_json(out / "config.json", config_metadata(cfg))
    return EXIT_OK


def _per_year(args, runner) -> int:
    ts = _load(args)
    out = Path(args.out)
    _write_parse_errors(out, ts)
    years = _select_years(args, ts)
    for year in years:
        year_set = slice_by_period(ts, year)
        ydir = out / str(year) if len(years) > 1 else out
        ydir.mkdir(parents=True, exist_ok=True)
        runner(ydir, year_set)
    return EXIT_OK


def _cmd_ingest(args) -> int:
    def run(ydir: Path, year_set: TransactionSet):
        doc = _flows_section(ydir, year_set, args.include_isolated)
        write_json(ydir / "dataset.json", doc)

    return _per_year(args, run)


def _cmd_metrics(args) -> int:
    def run(ydir: Path, year_set: TransactionSet):
        _metrics_section(ydir, year_set, args.cycles_max_len, args.cycle_cap)

    return _per_year(args, run)


def _cmd_bowtie(args) -> int:
    return _per_year(args, lambda ydir, ys: _bowtie_section(ydir, ys))


def _cmd_nullmodel(args) -> int:
    cfg = nm.RewireConfig(swap_multiplier=args.swap_mult, seed=args.seed, runs=args.runs)
    threads = _resolve_threads(args.threads)

    def run(ydir: Path, year_set: TransactionSet):
        _nullmodel_section(ydir, year_set, cfg, threads, args.filter_providers)

    return _per_year(args, run)


def _cmd_multilayer(args) -> int:
    return _per_year(args, lambda ydir, ys: _multilayer_section(ydir, ys))


def _cmd_geo(args) -> int:
    def run(ydir: Path, year_set: TransactionSet):
        doc = _geo_section(ydir, year_set)
        write_json(ydir / "geo.json", doc)

    return _per_year(args, run)


def _cmd_report(args) -> int:
    ts = _load(args)
    out = Path(args.out)
    _write_parse_errors(out, ts)
    years = _select_years(args, ts)
    threads = _resolve_threads(args.threads)
    cfg = nm.RewireConfig(swap_multiplier=args.swap_mult, seed=args.seed, runs=args.runs)
    report: dict = {
        "years": years,
        "config": {
            "seed": args.seed,
            "runs": args.runs,
            "swap_multiplier": args.swap_mult,
            "cycles_max_len": args.cycles_max_len,
            "cycle_cap": args.cycle_cap,
            "include_isolated": args.include_isolated,
            "rng": {"synth": RNG_ID, "rewire": nm.SWAP_RNG_ID},
        },
        "parse_errors": len(ts.errors),
        "per_year": {},
        "cohorts": {},
    }
    slices = {}
    for year in years:
        year_set = slice_by_period(ts, year)
        slices[year] = year_set
        ydir = out / str(year)
        ydir.mkdir(parents=True, exist_ok=True)
        if not year_set.transactions:
            report["per_year"][str(year)] = {"empty": True}
            continue
        year_doc = {
            "dataset": _flows_section(ydir, year_set, args.include_isolated),
            "metrics": _metrics_section(ydir, year_set, args.cycles_max_len, args.cycle_cap),
            "bowtie": _bowtie_section(ydir, year_set),
            "nullmodel": _nullmodel_section(ydir, year_set, cfg, threads, False),
            "multilayer": _multilayer_section(ydir, year_set),
            "geo": _geo_section(ydir, year_set),
        }
        report["per_year"][str(year)] = year_doc
    for a, b in zip(years, years[1:]):
        cohorts = cohort_flow_report(slices[a], slices[b])
        report["cohorts"][f"{a}->{b}"] = {
            "exited": _cohort_stats_doc(cohorts.exited),
            "entered": _cohort_stats_doc(cohorts.entered),
            "persistent_first": _cohort_stats_doc(cohorts.persistent_first),
            "persistent_second": _cohort_stats_doc(cohorts.persistent_second),
        }
    write_json(out / "report.json", report)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _add_io_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tx", required=True, help="transactions.csv path")
    p.add_argument("--users", required=True, help="users.csv path")
    p.add_argument("--year", default=None,
                   help="comma-separated calendar years (default: all present)")
    p.add_argument("--out", required=True, help="output directory")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=0,
                   help="parallelism degree; 0 = auto (env CCNET_THREADS, else 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccnet",
                                     description="Community-currency transaction network analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic ledger")
    p.add_argument("--out", required=True)
    p.add_argument("--users", dest="users", type=int, default=1000)
    p.add_argument("--transactions", type=int, default=20000)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--activity-tail", type=float, default=1.5)
    p.add_argument("--synth-year", type=int, default=2022)
    _add_common(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("ingest", help="parse the ledger and emit dataset statistics")
    _add_io_args(p)
    p.add_argument("--include-isolated", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("metrics", help="reciprocity, cycles, clustering, triads")
    _add_io_args(p)
    p.add_argument("--cycles-max-len", type=int, choices=(2, 3, 4, 5), default=5)
    p.add_argument("--cycle-cap", type=int, default=mx.DEFAULT_CYCLE_CAP)
    _add_common(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("bowtie", help="SCC, condensation and bow-tie structure")
    _add_io_args(p)
    _add_common(p)
    p.set_defaults(func=_cmd_bowtie)

    p = sub.add_parser("nullmodel", help="degree-preserving null-model comparison")
    _add_io_args(p)
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--swap-mult", type=int, default=10)
    p.add_argument("--filter-providers", action="store_true",
                   help="run the asymmetry/KS analysis on the provider-filtered graph")
    _add_common(p)
    p.set_defaults(func=_cmd_nullmodel)

    p = sub.add_parser("multilayer", help="business/person layer decomposition")
    _add_io_args(p)
    _add_common(p)
    p.set_defaults(func=_cmd_multilayer)

    p = sub.add_parser("geo", help="postal-zone and sector aggregation")
    _add_io_args(p)
    _add_common(p)
    p.set_defaults(func=_cmd_geo)

    p = sub.add_parser("report", help="full pipeline, one consolidated JSON per run")
    _add_io_args(p)
    p.add_argument("--include-isolated", action="store_true")
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--swap-mult", type=int, default=10)
    p.add_argument("--cycles-max-len", type=int, choices=(2, 3, 4, 5), default=5)
    p.add_argument("--cycle-cap", type=int, default=mx.DEFAULT_CYCLE_CAP)
    _add_common(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        _emit_error(err)
        return err.code
    except Exception as exc:  # keep the contract: nonzero + machine-readable error
        _emit_error(CliError(EXIT_INTERNAL, "internal", f"{type(exc).__name__}: {exc}"))
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
