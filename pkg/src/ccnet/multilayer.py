"""Business/person layer decomposition of the transaction graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .bowtie import bowtie_labels, component_proportions, strongly_connected_components
from .ledger import TxGraph, UserRecord

BUSINESS = "BUSINESS"
PERSON = "PERSON"

_LAYER_OF_TYPE = {"B": BUSINESS, "P": BUSINESS, "C": PERSON, "E": PERSON}


@dataclass
class LayerPartition:
    layer: dict[str, str]
    excluded: list[str]  # users without a known type, reported not guessed


def partition_layers(users: Mapping[str, UserRecord]) -> LayerPartition:
    """B and P users form the business layer, C and E the person layer."""
    layer: dict[str, str] = {}
    excluded: list[str] = []
    for uid in sorted(users):
        utype = users[uid].utype
        if utype in _LAYER_OF_TYPE:
            layer[uid] = _LAYER_OF_TYPE[utype]
        else:
            excluded.append(uid)
    return LayerPartition(layer, excluded)


@dataclass
class InterFlow:
    binary_edges: int
    tx_count: int
    volume_cents: int


@dataclass
class LayerStats:
    node_count: int
    intra_binary_edges: int
    intra_tx_count: int
    intra_volume_cents: int
    mean_volume_per_edge_cents: Optional[float]
    mean_volume_per_node_cents: Optional[float]
    # binary degrees (distinct counterparties), averaged over layer members;
    # the "full" variant counts edges to any layer, "intra" only within it
    avg_in_degree_full: Optional[float]
    avg_out_degree_full: Optional[float]
    avg_total_degree_full: Optional[float]
    avg_in_degree_intra: Optional[float]
    avg_out_degree_intra: Optional[float]
    avg_total_degree_intra: Optional[float]
    bowtie: Optional[dict[str, float]]  # gscc/gin_only/gout_only shares, or absent


@dataclass
class LayerReport:
    business: LayerStats
    person: LayerStats
    full: LayerStats
    inter: dict[str, InterFlow]  # "BUSINESS->PERSON" and "PERSON->BUSINESS"
    excluded_edges: InterFlow    # arcs touching a user outside both layers
    excluded_users: list[str]


def _subgraph(g: TxGraph, members: set[str]) -> TxGraph:
    ec = {k: v for k, v in g.edge_count.items() if k[0] in members and k[1] in members}
    ev = {k: g.edge_volume[k] for k in ec}
    return TxGraph(sorted(members), ec, ev)


def _bowtie_shares(sub: TxGraph) -> Optional[dict[str, float]]:
    if sub.n == 0:
        return None
    parts = strongly_connected_components(sub)
    if max(parts.sizes, default=0) < 2:
        return None  # mirrors the absent entries for layers without a core
    labels = bowtie_labels(sub)
    shares = component_proportions(sub, labels, "nodes").shares
    return {
        "gscc": shares["gscc"],
        "gin_only": shares["gin_only"],
        "gout_only": shares["gout_only"],
    }


def _layer_stats(g: TxGraph, members: set[str]) -> LayerStats:
    n = len(members)
    sub = _subgraph(g, members)
    intra_edges = sub.arc_count
    intra_tx = sub.total_transactions()
    intra_vol = sub.total_volume_cents()
    if n == 0:
        return LayerStats(0, 0, 0, 0, None, None, None, None, None, None, None, None, None)
    member_ix = np.asarray([g.index[u] for u in sorted(members)], np.int64)
    out_full = g.out_degree_binary()[member_ix]
    in_full = g.in_degree_binary()[member_ix]
    sub_ix = np.arange(sub.n)
    out_intra = sub.out_degree_binary()[sub_ix]
    in_intra = sub.in_degree_binary()[sub_ix]
    return LayerStats(
        node_count=n,
        intra_binary_edges=intra_edges,
        intra_tx_count=intra_tx,
        intra_volume_cents=intra_vol,
        mean_volume_per_edge_cents=intra_vol / intra_edges if intra_edges else None,
        mean_volume_per_node_cents=intra_vol / n,
        avg_in_degree_full=float(in_full.mean()),
        avg_out_degree_full=float(out_full.mean()),
        avg_total_degree_full=float((in_full + out_full).mean()),
        avg_in_degree_intra=float(in_intra.mean()),
        avg_out_degree_intra=float(out_intra.mean()),
        avg_total_degree_intra=float((in_intra + out_intra).mean()),
        bowtie=_bowtie_shares(sub),
    )


def layer_report(g: TxGraph, p: LayerPartition) -> LayerReport:
    """Per-layer, full-network and inter-layer metrics.

    The intra/inter/excluded edge decomposition is exact: the three strata
    partition the graph's arcs, transactions and volume.
    """
    business = {u for u in g.nodes if p.layer.get(u) == BUSINESS}
    person = {u for u in g.nodes if p.layer.get(u) == PERSON}
    inter = {
        f"{BUSINESS}->{PERSON}": InterFlow(0, 0, 0),
        f"{PERSON}->{BUSINESS}": InterFlow(0, 0, 0),
    }
    excluded = InterFlow(0, 0, 0)
    for (i, j), tx in g.edge_count.items():
        li = p.layer.get(i)
        lj = p.layer.get(j)
        vol = g.edge_volume[(i, j)]
        if li is None or lj is None:
            target = excluded
        elif li == lj:
            continue
        else:
            target = inter[f"{li}->{lj}"]
        target.binary_edges += 1
        target.tx_count += tx
        target.volume_cents += vol
    return LayerReport(
        business=_layer_stats(g, business),
        person=_layer_stats(g, person),
        full=_layer_stats(g, set(g.nodes)),
        inter=inter,
        excluded_edges=excluded,
        excluded_users=[u for u in p.excluded if u in g.index],
    )
