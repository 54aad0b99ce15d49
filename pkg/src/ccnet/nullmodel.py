"""Degree-preserving null model, neighbor-asymmetry indices and KS testing."""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import kolmogorov

from . import _kernels
from .bowtie import bowtie_labels, component_proportions
from .ledger import BinaryDigraph, TxGraph
from .metrics import reciprocity, triad_census

SWAP_RNG_ID = "splitmix64-mod"  # in-kernel generator used by the arc swapper

Graph = Union[TxGraph, BinaryDigraph]


@dataclass(frozen=True)
class RewireConfig:
    swap_multiplier: int = 10  # attempted swaps = multiplier * binary arc count
    seed: int = 42
    runs: int = 50

    def __post_init__(self):
        if self.swap_multiplier < 1:
            raise ValueError("swap_multiplier must be >= 1")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


def run_seed(cfg: RewireConfig, run_index: int) -> int:
    """Per-run seed derivation: top seed XOR run index."""
    return int(np.uint64(cfg.seed) ^ np.uint64(run_index))


def degree_preserving_rewire(g: Graph, cfg: RewireConfig, run_index: int) -> BinaryDigraph:
    """Randomize the binary graph with directed double-edge swaps.

    In/out degree sequences are preserved exactly; self-loops and duplicate
    arcs are rejected. Deterministic in (cfg.seed, run_index).
    """
    src, dst = g.arcs()
    src = src.copy()
    dst = dst.copy()
    if src.size < 2:
        warnings.warn("fewer than 2 arcs; returning the input unchanged")
        return BinaryDigraph(g.nodes, src, dst)
    attempts = cfg.swap_multiplier * int(src.size)
    _kernels.rewire_arcs(src, dst, g.n, attempts, run_seed(cfg, run_index))
    # swaps keep sources fixed and permute targets, so degrees are preserved
    # by construction; what must hold is that the result stayed simple
    assert not (src == dst).any()
    assert np.unique(src * np.int64(g.n) + dst).size == src.size
    return BinaryDigraph(g.nodes, src, dst)


def arc_overlap(a: Graph, b: Graph) -> float:
    """Fraction of a's arcs also present in b."""
    asrc, adst = a.arcs()
    bsrc, bdst = b.arcs()
    if asrc.size == 0:
        return 1.0
    sa = set(zip(asrc.tolist(), adst.tolist()))
    sb = set(zip(bsrc.tolist(), bdst.tolist()))
    return len(sa & sb) / len(sa)


@dataclass
class AsymmetryIndices:
    """Out-neighborhood size gaps for every node with at least one out-neighbor."""

    nodes: tuple[str, ...]  # eligible nodes only
    delta_out: np.ndarray
    delta_av: np.ndarray
    delta_max: np.ndarray
    delta_conf: np.ndarray

    def as_dict(self, which: str) -> dict[str, float]:
        arr = getattr(self, which)
        return {u: float(arr[k]) for k, u in enumerate(self.nodes)}


def asymmetry_indices(g: Graph) -> AsymmetryIndices:
    """Evaluate the four neighbor-degree gap indices on out-neighborhood sizes."""
    indptr, indices = g.out_csr
    outdeg = np.diff(indptr)
    eligible = outdeg >= 1
    m = indices.size
    if m == 0:
        empty = np.empty(0, np.float64)
        return AsymmetryIndices((), empty, empty, empty, empty)
    nbr_deg = outdeg[indices].astype(np.float64)
    arc_src = np.repeat(np.arange(g.n, dtype=np.int64), outdeg)
    gaps = np.abs(outdeg[arc_src].astype(np.float64) - nbr_deg)
    sum_nbr = np.bincount(arc_src, weights=nbr_deg, minlength=g.n)
    sum_gap = np.bincount(arc_src, weights=gaps, minlength=g.n)
    max_gap = np.zeros(g.n, np.float64)
    np.maximum.at(max_gap, arc_src, gaps)
    max_nbr = np.zeros(g.n, np.float64)
    np.maximum.at(max_nbr, arc_src, nbr_deg)
    min_nbr = np.full(g.n, np.inf)
    np.minimum.at(min_nbr, arc_src, nbr_deg)
    k = outdeg[eligible].astype(np.float64)
    delta_out = k - sum_nbr[eligible] / k
    delta_av = sum_gap[eligible] / k
    delta_max = max_gap[eligible]
    delta_conf = max_nbr[eligible] - min_nbr[eligible]
    nodes = tuple(g.nodes[v] for v in np.where(eligible)[0])
    return AsymmetryIndices(nodes, delta_out, delta_av, delta_max, delta_conf)


@dataclass
class KsResult:
    d_statistic: float
    p_value: float
    n1: int
    n2: int


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> KsResult:
    """Two-sample Kolmogorov-Smirnov test.

    d is the exact sup of |ECDF_a - ECDF_b|; the p-value uses the asymptotic
    Kolmogorov distribution at effective size n1*n2/(n1+n2).
    """
    x = np.sort(np.asarray(a, np.float64))
    y = np.sort(np.asarray(b, np.float64))
    n1 = x.size
    n2 = y.size
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([x, y])
    cdf1 = np.searchsorted(x, pooled, side="right") / n1
    cdf2 = np.searchsorted(y, pooled, side="right") / n2
    d = float(np.abs(cdf1 - cdf2).max())
    ne = n1 * n2 / (n1 + n2)
    p = float(kolmogorov(np.sqrt(ne) * d))
    return KsResult(d, min(max(p, 0.0), 1.0), int(n1), int(n2))


@dataclass
class BoxplotSummary:
    n: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple[float, ...]


def _median(x: np.ndarray) -> float:
    n = x.size
    mid = n // 2
    if n % 2:
        return float(x[mid])
    return float((x[mid - 1] + x[mid]) / 2.0)


def boxplot_summary(values: Sequence[float]) -> BoxplotSummary:
    """Five-number summary with Tukey hinges and 1.5*IQR whiskers.

    Hinges are medians of the lower/upper halves, with the median included
    in both halves when the sample size is odd. Whiskers are clamped to the
    most extreme data points inside the fences.
    """
    x = np.sort(np.asarray(values, np.float64))
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    med = _median(x)
    half = (n + 1) // 2  # odd n keeps the median in both halves
    q1 = _median(x[:half])
    q3 = _median(x[n - half:])
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    whisker_lo = float(inside[0])
    whisker_hi = float(inside[-1])
    outliers = tuple(float(v) for v in x[(x < lo_fence) | (x > hi_fence)])
    return BoxplotSummary(int(n), float(x[0]), q1, med, q3, float(x[-1]),
                          whisker_lo, whisker_hi, outliers)


ENSEMBLE_METRICS = ("asymmetry", "bowtie", "reciprocity", "triads")


def _metric_payload(graph: Graph, metric_id: str) -> dict:
    if metric_id == "asymmetry":
        idx = asymmetry_indices(graph)
        payload: dict = {}
        for which in ("delta_out", "delta_av", "delta_max", "delta_conf"):
            arr = getattr(idx, which)
            payload[which] = arr.tolist()
            payload[which + "_mean"] = float(arr.mean()) if arr.size else 0.0
        return payload
    if metric_id == "bowtie":
        labels = bowtie_labels(graph)
        props = component_proportions(graph, labels, "nodes")
        payload = {k: v for k, v in props.shares.items() if k != "other"}
        payload["gwcc_share"] = labels.gwcc_size / graph.n
        return payload
    if metric_id == "reciprocity":
        r = reciprocity(graph)
        total = sum(r.values())
        return {
            "reciprocal_pairs": total // 2,
            "nodes_with_reciprocal": sum(1 for v in r.values() if v >= 1),
        }
    if metric_id == "triads":
        t = triad_census(graph)
        return {
            "triangles": t.triangles,
            "sc_triplets": t.sc_triplets,
            "connected_triplets": t.connected_triplets,
        }
    raise ValueError(f"unknown metric id '{metric_id}'")


@dataclass
class EnsembleResult:
    metric_id: str
    per_run: list[dict]
    means: dict[str, float]


def _run_many(fn: Callable[[int], dict], runs: int, threads: int) -> list[dict]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(runs)))
    return [fn(k) for k in range(runs)]


def ensemble_metric(g: Graph, cfg: RewireConfig, metric_id: str,
                    threads: int = 1) -> EnsembleResult:
    """Rewire `cfg.runs` times and evaluate a metric on every null graph.

    Per-run payloads keep full distributions (for KS tests and boxplots);
    scalar entries are averaged over runs. Output is deterministic in
    (seed, runs, multiplier) regardless of the thread count.
    """
    if metric_id not in ENSEMBLE_METRICS:
        raise ValueError(f"metric_id must be one of {ENSEMBLE_METRICS}")

    def one_run(k: int) -> dict:
        null = degree_preserving_rewire(g, cfg, k)
        return _metric_payload(null, metric_id)

    per_run = _run_many(one_run, cfg.runs, threads)
    means: dict[str, float] = {}
    for key, value in per_run[0].items():
        if isinstance(value, (int, float)):
            means[key] = float(np.mean([run[key] for run in per_run]))
    return EnsembleResult(metric_id, per_run, means)


NULL_TABLE_ROWS = ("gin", "gin_only", "gout", "gout_only", "gscc", "tendrils", "tubes")


def _bowtie_row_shares(graph: Graph) -> dict[str, float]:
    labels = bowtie_labels(graph)
    props = component_proportions(graph, labels, "nodes")
    s = props.shares
    return {
        "gin": s["gscc"] + s["gin_only"],
        "gin_only": s["gin_only"],
        "gout": s["gscc"] + s["gout_only"],
        "gout_only": s["gout_only"],
        "gscc": s["gscc"],
        "tendrils": s["tendrils"],
        "tubes": s["tubes"],
    }


@dataclass
class NullCondensationTable:
    gwcc_size: int
    rows: dict[str, dict[str, float]]  # row -> {"real": share, "null_mean": share}
    runs: int


def null_condensation_report(g: Graph, cfg: RewireConfig,
                             threads: int = 1) -> NullCondensationTable:
    """Real-vs-null bow-tie node shares (GIN/GOUT rows include the GSCC)."""
    real = _bowtie_row_shares(g)
    labels = bowtie_labels(g)

    def one_run(k: int) -> dict:
        return _bowtie_row_shares(degree_preserving_rewire(g, cfg, k))

    per_run = _run_many(one_run, cfg.runs, threads)
    rows = {
        key: {
            "real": real[key],
            "null_mean": float(np.mean([run[key] for run in per_run])),
        }
        for key in NULL_TABLE_ROWS
    }
    return NullCondensationTable(labels.gwcc_size, rows, cfg.runs)
