"""Strongly connected components, condensation and bow-tie structure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

import numpy as np

from . import _kernels
from .ledger import BinaryDigraph, DirectedGraphBase, TransactionSet, TxGraph, UserRecord

GSCC = "GSCC"
GIN_ONLY = "GIN_ONLY"
GOUT_ONLY = "GOUT_ONLY"
TENDRIL = "TENDRIL"
TUBE = "TUBE"
OUTSIDE_GWCC = "OUTSIDE_GWCC"

LABEL_ORDER = (GSCC, GIN_ONLY, GOUT_ONLY, TENDRIL, TUBE, OUTSIDE_GWCC)
_LABEL_CODE = {name: k for k, name in enumerate(LABEL_ORDER)}

BUCKETS = ("gscc", "gin_only", "gout_only", "tendrils", "tubes", "other")

Graph = Union[TxGraph, BinaryDigraph, DirectedGraphBase]


@dataclass
class SccPartition:
    """Partition of the node set into strongly connected components.

    Components are indexed deterministically: sorted by their smallest
    contained node id, members listed in id order.
    """

    scc_id: dict[str, int]
    components: list[list[str]]

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.components]


def strongly_connected_components(g: Graph) -> SccPartition:
    indptr, indices = g.out_csr
    comp, _ = _kernels.tarjan_scc(indptr, indices)
    remap: dict[int, int] = {}
    components: list[list[str]] = []
    for v in range(g.n):
        c = int(comp[v])
        if c not in remap:
            remap[c] = len(components)
            components.append([])
        components[remap[c]].append(g.nodes[v])
    scc_id = {g.nodes[v]: remap[int(comp[v])] for v in range(g.n)}
    return SccPartition(scc_id, components)


@dataclass
class CondensedDag:
    """Condensation of a digraph: one node per SCC, cross-SCC arcs only."""

    n_components: int
    edges: set[tuple[int, int]]
    sizes: list[int]
    internal_tx: list[int]
    internal_volume: list[int]

    def topological_order(self) -> list[int]:
        indeg = [0] * self.n_components
        out: dict[int, list[int]] = {}
        for a, b in self.edges:
            indeg[b] += 1
            out.setdefault(a, []).append(b)
        ready = sorted(c for c in range(self.n_components) if indeg[c] == 0)
        order = []
        while ready:
            c = ready.pop()
            order.append(c)
            for b in out.get(c, ()):
                indeg[b] -= 1
                if indeg[b] == 0:
                    ready.append(b)
        if len(order) != self.n_components:
            raise ValueError("condensation contains a cycle")
        return order


def condense(g: Graph, p: SccPartition) -> CondensedDag:
    src, dst = g.arcs()
    tx_w, vol_w = g.arc_weights()
    comp_of = np.asarray([p.scc_id[u] for u in g.nodes], dtype=np.int64)
    k = len(p.components)
    edges: set[tuple[int, int]] = set()
    internal_tx = [0] * k
    internal_volume = [0] * k
    for a in range(src.size):
        ci = int(comp_of[src[a]])
        cj = int(comp_of[dst[a]])
        if ci == cj:
            internal_tx[ci] += int(tx_w[a])
            internal_volume[ci] += int(vol_w[a])
        else:
            edges.add((ci, cj))
    return CondensedDag(k, edges, [len(c) for c in p.components], internal_tx, internal_volume)


@dataclass
class BowTieLabels:
    """Exhaustive, mutually exclusive bow-tie tag per node."""

    label: dict[str, str]
    codes: np.ndarray  # int codes aligned with the graph's node order
    gwcc_size: int
    top_scc_sizes: list[int]

    def count(self, name: str) -> int:
        return int((self.codes == _LABEL_CODE[name]).sum())


def bowtie_labels(g: Graph) -> BowTieLabels:
    """Label every node GSCC / GIN_ONLY / GOUT_ONLY / TENDRIL / TUBE / OUTSIDE_GWCC.

    The GSCC is the largest SCC, ties broken by smallest contained node id;
    the GWCC is the weak component containing it. Tubes take precedence
    over tendrils.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    out_indptr, out_indices = g.out_csr
    in_indptr, in_indices = g.in_csr
    comp, ncomp = _kernels.tarjan_scc(out_indptr, out_indices)
    sizes = np.bincount(comp, minlength=ncomp)
    max_size = int(sizes.max())
    gscc_comp = -1
    for v in range(g.n):  # nodes are in id order, so first hit = smallest id
        if sizes[comp[v]] == max_size:
            gscc_comp = int(comp[v])
            break
    in_gscc = comp == gscc_comp
    und_indptr, und_indices = g.und_csr
    wcomp, _ = _kernels.weak_components(und_indptr, und_indices)
    gwcc_id = int(wcomp[np.argmax(in_gscc)])
    in_gwcc = wcomp == gwcc_id

    upstream = _kernels.reach_mask(in_indptr, in_indices, in_gscc)
    downstream = _kernels.reach_mask(out_indptr, out_indices, in_gscc)
    gin_only = upstream & ~in_gscc
    gout_only = downstream & ~in_gscc
    fed_by_gin = _kernels.reach_mask(out_indptr, out_indices, gin_only)
    feeds_gout = _kernels.reach_mask(in_indptr, in_indices, gout_only)

    codes = np.empty(g.n, np.int8)
    codes[:] = _LABEL_CODE[TENDRIL]
    codes[fed_by_gin & feeds_gout] = _LABEL_CODE[TUBE]
    codes[gin_only] = _LABEL_CODE[GIN_ONLY]
    codes[gout_only] = _LABEL_CODE[GOUT_ONLY]
    codes[in_gscc] = _LABEL_CODE[GSCC]
    codes[~in_gwcc] = _LABEL_CODE[OUTSIDE_GWCC]

    label = {g.nodes[v]: LABEL_ORDER[codes[v]] for v in range(g.n)}
    top = sorted((int(s) for s in sizes), reverse=True)[:5]
    return BowTieLabels(label, codes, int(in_gwcc.sum()), top)


@dataclass
class ComponentProportions:
    weighting: str  # nodes | transactions | volume
    shares: dict[str, float]
    universe: int
    matrix: Optional[dict[str, dict[str, float]]]  # src label -> dst label -> share


def _edge_bucket(src_label: str, dst_label: str) -> str:
    if src_label == GSCC and dst_label == GSCC:
        return "gscc"
    if src_label == GIN_ONLY:
        return "gin_only"
    if dst_label == GOUT_ONLY and src_label in (GSCC, GOUT_ONLY):
        return "gout_only"
    return "other"


def component_proportions(g: Graph, labels: BowTieLabels, weighting: str) -> ComponentProportions:
    """Bow-tie bucket shares under node, transaction or volume weighting.

    Node weighting shares are over the GWCC; edge weightings cover every
    kept transaction and also emit the full src-label x dst-label matrix so
    any alternative collapse stays recomputable.
    """
    if weighting == "nodes":
        universe = labels.gwcc_size
        if universe == 0:
            raise ValueError("empty universe")
        shares = {
            "gscc": labels.count(GSCC) / universe,
            "gin_only": labels.count(GIN_ONLY) / universe,
            "gout_only": labels.count(GOUT_ONLY) / universe,
            "tendrils": labels.count(TENDRIL) / universe,
            "tubes": labels.count(TUBE) / universe,
            "other": 0.0,
        }
        return ComponentProportions(weighting, shares, universe, None)
    if weighting not in ("transactions", "volume"):
        raise ValueError(f"unknown weighting '{weighting}'")
    src, dst = g.arcs()
    tx_w, vol_w = g.arc_weights()
    w = tx_w if weighting == "transactions" else vol_w
    totals: dict[str, int] = {b: 0 for b in BUCKETS}
    mat = np.zeros((6, 6), np.int64)
    codes = labels.codes
    for a in range(src.size):
        cs = int(codes[src[a]])
        cd = int(codes[dst[a]])
        wa = int(w[a])
        mat[cs, cd] += wa
        totals[_edge_bucket(LABEL_ORDER[cs], LABEL_ORDER[cd])] += wa
    universe = int(w.sum())
    if universe == 0:
        raise ValueError("empty universe")
    shares = {b: totals[b] / universe for b in BUCKETS}
    matrix = {
        ls: {ld: float(mat[i, j] / universe) for j, ld in enumerate(LABEL_ORDER)}
        for i, ls in enumerate(LABEL_ORDER)
    }
    return ComponentProportions(weighting, shares, universe, matrix)


def filter_provider_flows(ts: TransactionSet) -> TransactionSet:
    """Drop every transaction with a provider (type P) endpoint."""

    def is_provider(uid: str) -> bool:
        rec = ts.users.get(uid)
        return rec is not None and rec.utype == "P"

    txs = [t for t in ts.transactions
           if not is_provider(t.buyer_id) and not is_provider(t.seller_id)]
    active = {t.buyer_id for t in txs} | {t.seller_id for t in txs}
    users = {uid: ts.users[uid] for uid in sorted(active) if uid in ts.users}
    return TransactionSet(txs, users, ts.period, [],
                          frozenset(ts.synthesized_users & active))


@dataclass
class SccCentroid:
    component: int
    size: int
    located: int
    lat: float
    lon: float


def scc_centroids(p: SccPartition, users: Mapping[str, UserRecord]
                  ) -> tuple[list[SccCentroid], list[int]]:
    """Mean coordinates per SCC over members with known coordinates.

    Components with no located member are omitted and returned separately.
    """
    centroids: list[SccCentroid] = []
    skipped: list[int] = []
    for k, members in enumerate(p.components):
        lats = []
        lons = []
        for uid in members:
            rec = users.get(uid)
            if rec is not None and rec.coord is not None:
                lats.append(rec.coord[0])
                lons.append(rec.coord[1])
        if not lats:
            skipped.append(k)
            continue
        centroids.append(SccCentroid(
            component=k,
            size=len(members),
            located=len(lats),
            lat=float(sum(lats) / len(lats)),
            lon=float(sum(lons) / len(lons)),
        ))
    return centroids, skipped
