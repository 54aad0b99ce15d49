"""Reciprocity, cycle census and triadic structure of a transaction graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .ledger import TxGraph, UserRecord

DEFAULT_CYCLE_CAP = 100_000_000
STRATA_ROLLUP_MIN = 15  # presentation rollup threshold for reciprocity strata


class CycleCapExceeded(RuntimeError):
    """Raised when the cycle cap aborts enumeration; carries the partial census."""

    def __init__(self, partial: "CycleCensus"):
        super().__init__(f"cycle cap reached after {partial.total_cycles()} cycles")
        self.partial = partial


def reciprocity(g: TxGraph) -> dict[str, int]:
    """Per node: number of partners linked in both directions."""
    src, dst = g.arcs()
    arcset = set(zip(src.tolist(), dst.tolist()))
    r = [0] * g.n
    for i, j in arcset:
        if (j, i) in arcset:
            r[i] += 1
    return {g.nodes[v]: r[v] for v in range(g.n)}


@dataclass
class StratumStats:
    nodes: int
    tx_count: int
    volume_cents: int


def reciprocity_strata(g: TxGraph) -> dict[int, StratumStats]:
    """Node-anchored transaction/volume totals per reciprocity value.

    For every node with reciprocity rho >= 1, each reciprocal partner
    contributes the transaction counts and volumes of both arc directions;
    a pair whose endpoints share the same rho therefore contributes from
    both anchors.
    """
    src, dst = g.arcs()
    tx_w, vol_w = g.arc_weights()
    arc_lookup = {(int(s), int(d)): a for a, (s, d) in enumerate(zip(src, dst))}
    r = [0] * g.n
    for (i, j) in arc_lookup:
        if (j, i) in arc_lookup:
            r[i] += 1
    tx_by_rho: dict[int, int] = {}
    vol_by_rho: dict[int, int] = {}
    n_by_rho: dict[int, int] = {}
    for v in range(g.n):
        if r[v] >= 1:
            n_by_rho[r[v]] = n_by_rho.get(r[v], 0) + 1
    for (i, j), a in arc_lookup.items():
        back = arc_lookup.get((j, i))
        if back is None:
            continue
        rho = r[i]
        tx_by_rho[rho] = tx_by_rho.get(rho, 0) + int(tx_w[a]) + int(tx_w[back])
        vol_by_rho[rho] = vol_by_rho.get(rho, 0) + int(vol_w[a]) + int(vol_w[back])
    return {
        rho: StratumStats(n_by_rho[rho], tx_by_rho.get(rho, 0), vol_by_rho.get(rho, 0))
        for rho in sorted(n_by_rho)
    }


def rollup_strata(strata: Mapping[int, StratumStats],
                  threshold: int = STRATA_ROLLUP_MIN) -> list[tuple[str, StratumStats]]:
    """Presentation rows: one per rho below the threshold, then a rollup."""
    rows: list[tuple[str, StratumStats]] = []
    acc = StratumStats(0, 0, 0)
    for rho in sorted(strata):
        s = strata[rho]
        if rho < threshold:
            rows.append((str(rho), s))
        else:
            acc = StratumStats(acc.nodes + s.nodes, acc.tx_count + s.tx_count,
                               acc.volume_cents + s.volume_cents)
    if acc.nodes:
        rows.append((f">={threshold}", acc))
    return rows


def reciprocity_by_type(g: TxGraph, users: Mapping[str, UserRecord]) -> dict[tuple[str, str], int]:
    """Reciprocal-pair counts per unordered type pair, mirrored off-diagonal."""
    src, dst = g.arcs()
    arcset = set(zip(src.tolist(), dst.tolist()))
    matrix: dict[tuple[str, str], int] = {}
    for i, j in arcset:
        if i < j and (j, i) in arcset:
            ri = users.get(g.nodes[i])
            rj = users.get(g.nodes[j])
            ti = ri.utype if ri is not None and ri.utype else "U"
            tj = rj.utype if rj is not None and rj.utype else "U"
            matrix[(ti, tj)] = matrix.get((ti, tj), 0) + 1
            if ti != tj:
                matrix[(tj, ti)] = matrix.get((tj, ti), 0) + 1
    return matrix


@dataclass
class CycleCensus:
    """Simple-cycle counts by exact length on the binary graph."""

    max_len: int
    complete: bool
    cycle_count: dict[int, int]
    nodes_in_cycles: dict[int, int]
    nodes_in_single_cycle: dict[int, int]
    max_cycles_per_node: dict[int, int]
    nodes: tuple[str, ...]
    _participation: np.ndarray  # shape (4, n), row = length - 2

    def total_cycles(self) -> int:
        return sum(self.cycle_count.values())

    def participation(self, length: int) -> dict[str, int]:
        row = self._participation[length - 2]
        return {self.nodes[v]: int(row[v]) for v in range(len(self.nodes)) if row[v] > 0}


def cycle_census(g: TxGraph, max_len: int = 5, cap: int = DEFAULT_CYCLE_CAP) -> CycleCensus:
    """Census of simple directed cycles of exact lengths 2..max_len.

    Cycles are deduplicated by canonical rotation (smallest node first).
    Raises CycleCapExceeded carrying the partial census when the cap hits.
    """
    if max_len not in (2, 3, 4, 5):
        raise ValueError("max_len must be in 2..5")
    if cap < 1:
        raise ValueError("cap must be positive")
    out_indptr, out_indices = g.out_csr
    in_indptr, in_indices = g.in_csr
    counts, part, _, complete = _kernels.cycle_census_kernel(
        out_indptr, out_indices, in_indptr, in_indices, max_len, cap)
    cycle_count = {}
    nodes_in = {}
    nodes_single = {}
    max_per_node = {}
    for length in range(2, max_len + 1):
        row = part[length - 2]
        cycle_count[length] = int(counts[length - 2])
        nodes_in[length] = int((row > 0).sum())
        nodes_single[length] = int((row == 1).sum())
        max_per_node[length] = int(row.max()) if len(row) else 0
    census = CycleCensus(max_len, bool(complete), cycle_count, nodes_in,
                         nodes_single, max_per_node, g.nodes, part)
    if not complete:
        raise CycleCapExceeded(census)
    return census


def _forward_csr(g: TxGraph) -> tuple[np.ndarray, np.ndarray]:
    """Degree-ordered orientation of the undirected projection (each edge once)."""
    uptr, uidx = g.und_csr
    deg = np.diff(uptr)
    order = np.lexsort((np.arange(g.n), deg))
    rank = np.empty(g.n, np.int64)
    rank[order] = np.arange(g.n)
    usrc = np.repeat(np.arange(g.n, dtype=np.int64), deg)
    keep = rank[usrc] < rank[uidx]
    fsrc = usrc[keep]
    fdst = uidx[keep]
    sorter = np.lexsort((fdst, fsrc))
    fsrc = fsrc[sorter]
    fdst = fdst[sorter]
    counts = np.bincount(fsrc, minlength=g.n) if fsrc.size else np.zeros(g.n, np.int64)
    indptr = np.zeros(g.n + 1, np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, fdst


@dataclass
class TriadCensus:
    nodes: tuple[str, ...]
    triangle_count: np.ndarray       # per node
    sc_triplet_count: np.ndarray     # per node
    clustering: np.ndarray           # per node, in [0, 1]
    triangles: int
    sc_triplets: int
    connected_triplets: int

    def clustering_map(self) -> dict[str, float]:
        return {self.nodes[v]: float(self.clustering[v]) for v in range(len(self.nodes))}

    def triangles_map(self) -> dict[str, int]:
        return {self.nodes[v]: int(self.triangle_count[v]) for v in range(len(self.nodes))}

    def sc_triplets_map(self) -> dict[str, int]:
        return {self.nodes[v]: int(self.sc_triplet_count[v]) for v in range(len(self.nodes))}


def triad_census(g: TxGraph) -> TriadCensus:
    """Triangles, strongly connected triplets and connected (open+closed) triplets.

    Triangles and connected triplets live on the undirected projection; a
    triplet is strongly connected when its induced directed subgraph is.
    """
    fptr, fidx = _forward_csr(g)
    optr, oidx = g.out_csr
    tri, sct = _kernels.triangle_census(fptr, fidx, optr, oidx)
    uptr, _ = g.und_csr
    deg = np.diff(uptr)
    pairs = deg * (deg - 1) // 2
    clustering = np.zeros(g.n, np.float64)
    mask = deg >= 2
    clustering[mask] = tri[mask] / pairs[mask]
    return TriadCensus(
        nodes=g.nodes,
        triangle_count=tri,
        sc_triplet_count=sct,
        clustering=clustering,
        triangles=int(tri.sum() // 3),
        sc_triplets=int(sct.sum() // 3),
        connected_triplets=int(pairs.sum()),
    )


def local_clustering(g: TxGraph) -> dict[str, float]:
    """Ego-network density on the undirected projection; 0 for degree < 2."""
    census = triad_census(g)
    return census.clustering_map()
