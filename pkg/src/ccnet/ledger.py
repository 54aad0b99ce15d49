"""Transaction-ledger ingestion and dataset-level statistics.

Amounts are integer cents end to end; volume sums stay exact and are only
converted to currency units at presentation time.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import BinaryIO, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

USER_TYPES = ("B", "C", "E", "P")
UNKNOWN_TYPE = "U"

TX_COLUMNS = ("tx_id", "date", "buyer_id", "seller_id", "amount_cents")
USER_COLUMNS = ("user_id", "type", "sector", "postal_code", "lat", "lon")

# cents edges for the standard amount buckets: [0,1], (1,10], (10,100],
# (100,1k], (1k,10k], >10k in currency units
AMOUNT_BUCKET_EDGES = (100, 1_000, 10_000, 100_000, 1_000_000)
AMOUNT_BUCKET_LABELS = ("[0,1]", "(1,10]", "(10,100]", "(100,1k]", "(1k,10k]", ">10k")

# default net-balance histogram edges (cents): +/-5 and +/-50 currency units
DEFAULT_BALANCE_EDGES = (-5_000, -500, 500, 5_000)


class ParseError(ValueError):
    """Fatal structural problem with an input file (e.g. a missing column)."""


@dataclass(frozen=True)
class RowError:
    """A single malformed row, kept for the error report instead of dropped silently."""

    source: str
    line: int
    field: str
    message: str


@dataclass(frozen=True)
class Transaction:
    tx_id: str
    date: dt.date
    buyer_id: str
    seller_id: str
    amount_cents: int


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    utype: Optional[str]  # one of USER_TYPES, or None when unknown
    sector: Optional[str] = None
    postal_code: Optional[str] = None
    coord: Optional[tuple[float, float]] = None  # (lat, lon)


@dataclass
class TransactionSet:
    """An ordered batch of transactions plus the users they reference."""

    transactions: list[Transaction]
    users: dict[str, UserRecord]
    period: str = "all"
    errors: list[RowError] = field(default_factory=list)
    synthesized_users: frozenset[str] = frozenset()

    def total_volume_cents(self) -> int:
        return sum(t.amount_cents for t in self.transactions)


def _text_stream(source: Union[str, BinaryIO]):
    if isinstance(source, (str, bytes)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def _header_map(header: Sequence[str], required: Sequence[str], source: str) -> dict[str, int]:
    positions = {name: k for k, name in enumerate(header)}
    for name in required:
        if name not in positions:
            raise ParseError(f"{source}: missing required column '{name}'")
    return positions


def _parse_users(source) -> tuple[dict[str, UserRecord], list[RowError]]:
    stream, owned = _text_stream(source)
    users: dict[str, UserRecord] = {}
    errors: list[RowError] = []
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("users: empty file, header row required")
        pos = _header_map(header, USER_COLUMNS, "users")
        for line, row in enumerate(reader, start=2):
            if not row or all(not c for c in row):
                continue
            uid = row[pos["user_id"]].strip()
            if not uid:
                errors.append(RowError("users", line, "user_id", "empty user id"))
                continue
            if uid in users:
                errors.append(RowError("users", line, "user_id", f"duplicate user id '{uid}'"))
                continue
            raw_type = row[pos["type"]].strip()
            utype: Optional[str] = raw_type if raw_type in USER_TYPES else None
            if raw_type and utype is None:
                errors.append(RowError("users", line, "type", f"unknown user type '{raw_type}'"))
            sector = row[pos["sector"]].strip() or None
            postal = row[pos["postal_code"]].strip() or None
            if postal is not None and not (len(postal) == 5 and postal.isdigit()):
                errors.append(RowError("users", line, "postal_code", f"not a 5-digit code: '{postal}'"))
                postal = None
            raw_lat = row[pos["lat"]].strip()
            raw_lon = row[pos["lon"]].strip()
            coord = None
            if raw_lat or raw_lon:
                try:
                    coord = (float(raw_lat), float(raw_lon))
                except ValueError:
                    errors.append(RowError("users", line, "lat", "coordinates must be two floats"))
            users[uid] = UserRecord(uid, utype, sector, postal, coord)
    finally:
        if owned:
            stream.close()
    return users, errors


def _parse_tx_rows(source) -> tuple[list[Transaction], list[RowError]]:
    stream, owned = _text_stream(source)
    txs: list[Transaction] = []
    errors: list[RowError] = []
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("transactions: empty file, header row required")
        pos = _header_map(header, TX_COLUMNS, "transactions")
        for line, row in enumerate(reader, start=2):
            if not row or all(not c for c in row):
                continue
            tx_id = row[pos["tx_id"]].strip()
            buyer = row[pos["buyer_id"]].strip()
            seller = row[pos["seller_id"]].strip()
            if not buyer or not seller:
                errors.append(RowError("transactions", line, "buyer_id", "empty endpoint id"))
                continue
            try:
                date = dt.date.fromisoformat(row[pos["date"]].strip())
            except ValueError:
                errors.append(RowError("transactions", line, "date",
                                       f"not an ISO date: '{row[pos['date']]}'"))
                continue
            raw_amount = row[pos["amount_cents"]].strip()
            try:
                amount = int(raw_amount, 10)
            except ValueError:
                errors.append(RowError("transactions", line, "amount_cents",
                                       f"not an integer: '{raw_amount}'"))
                continue
            if amount < 0:
                errors.append(RowError("transactions", line, "amount_cents",
                                       f"negative amount: {amount}"))
                continue
            txs.append(Transaction(tx_id, date, buyer, seller, amount))
    finally:
        if owned:
            stream.close()
    return txs, errors


def parse_transactions(tx_file, user_file) -> TransactionSet:
    """Parse the two ledger CSVs into a TransactionSet.

    Malformed rows are collected on the result (`errors`), never silently
    dropped. Endpoints without a user record get a synthesized record of
    unknown type, flagged in `synthesized_users`.
    """
    users, user_errors = _parse_users(user_file)
    txs, tx_errors = _parse_tx_rows(tx_file)
    synthesized = set()
    for t in txs:
        for uid in (t.buyer_id, t.seller_id):
            if uid not in users:
                users[uid] = UserRecord(uid, None)
                synthesized.add(uid)
    return TransactionSet(txs, users, "all", user_errors + tx_errors, frozenset(synthesized))


def slice_by_period(ts: TransactionSet, year: int) -> TransactionSet:
    """Restrict to transactions dated in the given calendar year."""
    txs = [t for t in ts.transactions if t.date.year == year]
    active = {t.buyer_id for t in txs} | {t.seller_id for t in txs}
    users = {uid: ts.users[uid] for uid in sorted(active) if uid in ts.users}
    return TransactionSet(txs, users, str(year), [],
                          frozenset(ts.synthesized_users & active))


class DirectedGraphBase:
    """Shared surface for integer-indexed directed graphs keyed by user id.

    Subclasses set `nodes` and sorted arc arrays `_src`/`_dst` (sorted by
    (src, dst) index, no self-loops, no duplicates).
    """

    nodes: tuple[str, ...]
    _src: np.ndarray
    _dst: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def arc_count(self) -> int:
        return int(self._src.size)

    def arcs(self) -> tuple[np.ndarray, np.ndarray]:
        return self._src, self._dst

    @cached_property
    def index(self) -> dict[str, int]:
        return {u: k for k, u in enumerate(self.nodes)}

    @cached_property
    def out_csr(self) -> tuple[np.ndarray, np.ndarray]:
        counts = np.bincount(self._src, minlength=self.n) if self._src.size else np.zeros(self.n, np.int64)
        indptr = np.zeros(self.n + 1, np.int64)
        np.cumsum(counts, out=indptr[1:])
        return indptr, self._dst.copy()

    @cached_property
    def in_csr(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.lexsort((self._src, self._dst))
        src_sorted = self._dst[order]
        counts = np.bincount(src_sorted, minlength=self.n) if src_sorted.size else np.zeros(self.n, np.int64)
        indptr = np.zeros(self.n + 1, np.int64)
        np.cumsum(counts, out=indptr[1:])
        return indptr, self._src[order]

    @cached_property
    def und_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Undirected simple projection as a CSR (both directions stored)."""
        if self._src.size == 0:
            return np.zeros(self.n + 1, np.int64), np.empty(0, np.int64)
        a = np.concatenate([self._src, self._dst])
        b = np.concatenate([self._dst, self._src])
        keys = np.unique(a * np.int64(self.n) + b)
        src = keys // self.n
        dst = keys % self.n
        counts = np.bincount(src, minlength=self.n)
        indptr = np.zeros(self.n + 1, np.int64)
        np.cumsum(counts, out=indptr[1:])
        return indptr, dst

    def out_degree_binary(self) -> np.ndarray:
        indptr, _ = self.out_csr
        return np.diff(indptr)

    def in_degree_binary(self) -> np.ndarray:
        indptr, _ = self.in_csr
        return np.diff(indptr)


def _sorted_arcs(index: Mapping[str, int], pairs: Iterable[tuple[str, str]]):
    rows = sorted((index[i], index[j]) for i, j in pairs)
    if not rows:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    arr = np.asarray(rows, dtype=np.int64)
    return arr[:, 0].copy(), arr[:, 1].copy()


class TxGraph(DirectedGraphBase):
    """Directed transaction graph: parallel-edge counts and volumes per arc."""

    def __init__(self, nodes: Sequence[str], edge_count: Mapping[tuple[str, str], int],
                 edge_volume: Mapping[tuple[str, str], int], dropped_self_trades: int = 0):
        self.nodes = tuple(nodes)
        self.edge_count = dict(edge_count)
        self.edge_volume = dict(edge_volume)
        self.dropped_self_trades = dropped_self_trades
        idx = {u: k for k, u in enumerate(self.nodes)}
        self._src, self._dst = _sorted_arcs(idx, self.edge_count.keys())
        if self._src.size:
            self._arc_tx = np.fromiter(
                (self.edge_count[(self.nodes[i], self.nodes[j])] for i, j in zip(self._src, self._dst)),
                dtype=np.int64, count=self._src.size)
            self._arc_vol = np.fromiter(
                (self.edge_volume[(self.nodes[i], self.nodes[j])] for i, j in zip(self._src, self._dst)),
                dtype=np.int64, count=self._src.size)
        else:
            self._arc_tx = np.empty(0, np.int64)
            self._arc_vol = np.empty(0, np.int64)

    def arc_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays of (tx count, volume) aligned with arcs()."""
        return self._arc_tx, self._arc_vol

    def total_transactions(self) -> int:
        return int(self._arc_tx.sum())

    def total_volume_cents(self) -> int:
        return int(self._arc_vol.sum())

    def __eq__(self, other) -> bool:
        return (isinstance(other, TxGraph)
                and self.nodes == other.nodes
                and self.edge_count == other.edge_count
                and self.edge_volume == other.edge_volume
                and self.dropped_self_trades == other.dropped_self_trades)

    def __hash__(self):  # pragma: no cover - identity hashing is enough
        return id(self)


class BinaryDigraph(DirectedGraphBase):
    """A plain simple digraph (used for rewired null-model graphs)."""

    def __init__(self, nodes: Sequence[str], src: np.ndarray, dst: np.ndarray):
        self.nodes = tuple(nodes)
        order = np.lexsort((dst, src))
        self._src = np.asarray(src, np.int64)[order]
        self._dst = np.asarray(dst, np.int64)[order]

    def arc_weights(self) -> tuple[np.ndarray, np.ndarray]:
        ones = np.ones(self._src.size, np.int64)
        return ones, np.zeros(self._src.size, np.int64)


def build_graph(ts: TransactionSet, include_isolated: bool = False) -> TxGraph:
    """Aggregate a TransactionSet into a TxGraph.

    Self-trades (buyer == seller) are dropped and counted. By default the
    node set is the endpoints of kept transactions; `include_isolated`
    additionally pulls in zero-degree users from the user file.
    """
    edge_count: dict[tuple[str, str], int] = {}
    edge_volume: dict[tuple[str, str], int] = {}
    dropped = 0
    active: set[str] = set()
    for t in ts.transactions:
        if t.buyer_id == t.seller_id:
            dropped += 1
            continue
        key = (t.buyer_id, t.seller_id)
        edge_count[key] = edge_count.get(key, 0) + 1
        edge_volume[key] = edge_volume.get(key, 0) + t.amount_cents
        active.add(t.buyer_id)
        active.add(t.seller_id)
    nodes = set(active)
    if include_isolated:
        nodes.update(ts.users.keys())
    return TxGraph(sorted(nodes), edge_count, edge_volume, dropped)


@dataclass
class FlowStats:
    """Per-node transaction counts and volumes, aligned with `nodes`."""

    nodes: tuple[str, ...]
    theta_in: np.ndarray
    theta_out: np.ndarray
    v_in: np.ndarray
    v_out: np.ndarray

    @property
    def net(self) -> np.ndarray:
        return self.v_in - self.v_out

    @cached_property
    def index(self) -> dict[str, int]:
        return {u: k for k, u in enumerate(self.nodes)}

    def row(self, user_id: str) -> dict[str, int]:
        k = self.index[user_id]
        return {
            "theta_in": int(self.theta_in[k]),
            "theta_out": int(self.theta_out[k]),
            "v_in": int(self.v_in[k]),
            "v_out": int(self.v_out[k]),
            "net": int(self.v_in[k] - self.v_out[k]),
        }


def flow_stats(g: TxGraph) -> FlowStats:
    src, dst = g.arcs()
    tx_w, vol_w = g.arc_weights()
    theta_out = np.zeros(g.n, np.int64)
    theta_in = np.zeros(g.n, np.int64)
    v_out = np.zeros(g.n, np.int64)
    v_in = np.zeros(g.n, np.int64)
    np.add.at(theta_out, src, tx_w)
    np.add.at(theta_in, dst, tx_w)
    np.add.at(v_out, src, vol_w)
    np.add.at(v_in, dst, vol_w)
    return FlowStats(g.nodes, theta_in, theta_out, v_in, v_out)


CORRELATION_AXES = ("theta_out", "theta_in", "v_out", "v_in")


def pearson_correlations(stats: FlowStats) -> np.ndarray:
    """4x4 Pearson matrix over (theta_out, theta_in, v_out, v_in).

    Zero-variance vectors yield NaN (the undefined marker) on their whole
    row/column rather than a fabricated 0.
    """
    if len(stats.nodes) < 2:
        raise ValueError("pearson correlations need at least 2 nodes")
    m = np.vstack([stats.theta_out, stats.theta_in, stats.v_out, stats.v_in]).astype(np.float64)
    defined = m.std(axis=1) > 0.0
    out = np.full((4, 4), np.nan)
    if defined.any():
        with np.errstate(invalid="ignore", divide="ignore"):
            c = np.corrcoef(m[defined])
        c = np.clip(np.atleast_2d(c), -1.0, 1.0)
        ix = np.where(defined)[0]
        for a, ia in enumerate(ix):
            for b, ib in enumerate(ix):
                out[ia, ib] = c[a, b]
        out[ix, ix] = 1.0
    return out


@dataclass
class HistogramBins:
    edges: tuple[int, ...]
    counts: tuple[int, ...]  # underflow, one per (a,b] bin, overflow
    labels: tuple[str, ...]


def net_balance_histogram(stats: FlowStats, bin_edges: Sequence[int]) -> HistogramBins:
    """Histogram of per-node net balances over half-open (a,b] bins.

    The first bin is (-inf, edges[0]], the last (edges[-1], +inf); every
    node lands in exactly one bin.
    """
    edges = tuple(int(e) for e in bin_edges)
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("bin edges must be strictly ascending")
    net = stats.net
    idx = np.searchsorted(np.asarray(edges, np.int64), net, side="left")
    counts = np.bincount(idx, minlength=len(edges) + 1)
    labels = [f"(-inf,{edges[0]}]"]
    labels += [f"({a},{b}]" for a, b in zip(edges, edges[1:])]
    labels += [f"({edges[-1]},inf)"]
    return HistogramBins(edges, tuple(int(c) for c in counts), tuple(labels))


@dataclass
class CohortGroupFlow:
    count: int
    theta_in: int
    theta_out: int
    v_in: int
    v_out: int


@dataclass
class CohortStats:
    count: int
    groups: dict[str, CohortGroupFlow]
    theta_in_sum: int
    theta_out_sum: int
    v_in_sum: int
    v_out_sum: int
    mean_v_in: float
    std_v_in: float
    mean_v_out: float
    std_v_out: float


@dataclass
class CohortReport:
    exited: CohortStats
    entered: CohortStats
    persistent_first: CohortStats
    persistent_second: CohortStats


def _cohort_stats(members: Sequence[str], stats: FlowStats) -> CohortStats:
    ix = np.asarray([stats.index[u] for u in members], dtype=np.int64)
    ti = stats.theta_in[ix] if ix.size else np.empty(0, np.int64)
    to = stats.theta_out[ix] if ix.size else np.empty(0, np.int64)
    vi = stats.v_in[ix] if ix.size else np.empty(0, np.int64)
    vo = stats.v_out[ix] if ix.size else np.empty(0, np.int64)
    groups = {}
    for name, mask in (
        ("in_and_out", (ti > 0) & (to > 0)),
        ("in_only", (ti > 0) & (to == 0)),
        ("out_only", (ti == 0) & (to > 0)),
    ):
        groups[name] = CohortGroupFlow(
            count=int(mask.sum()),
            theta_in=int(ti[mask].sum()),
            theta_out=int(to[mask].sum()),
            v_in=int(vi[mask].sum()),
            v_out=int(vo[mask].sum()),
        )
    return CohortStats(
        count=len(members),
        groups=groups,
        theta_in_sum=int(ti.sum()),
        theta_out_sum=int(to.sum()),
        v_in_sum=int(vi.sum()),
        v_out_sum=int(vo.sum()),
        mean_v_in=float(vi.mean()) if ix.size else 0.0,
        std_v_in=float(vi.std()) if ix.size else 0.0,
        mean_v_out=float(vo.mean()) if ix.size else 0.0,
        std_v_out=float(vo.std()) if ix.size else 0.0,
    )


def cohort_flow_report(a: TransactionSet, b: TransactionSet) -> CohortReport:
    """Exit/entry/persistence between two periods with per-cohort flow sums.

    Activity means being an endpoint of a kept (non-self) transaction.
    Standard deviations are population (ddof=0) over member volumes.
    """
    ga = build_graph(a)
    gb = build_graph(b)
    sa = flow_stats(ga)
    sb = flow_stats(gb)
    active_a = set(ga.nodes)
    active_b = set(gb.nodes)
    exited = sorted(active_a - active_b)
    entered = sorted(active_b - active_a)
    persistent = sorted(active_a & active_b)
    return CohortReport(
        exited=_cohort_stats(exited, sa),
        entered=_cohort_stats(entered, sb),
        persistent_first=_cohort_stats(persistent, sa),
        persistent_second=_cohort_stats(persistent, sb),
    )


DEGREE_RANGE_PREDICATES: tuple[tuple[str, str], ...] = (
    ("in>=1_out=0", "theta_in >= 1 and theta_out == 0"),
    ("in=0_out>=1", "theta_in == 0 and theta_out >= 1"),
    ("in>=1_out>=1", "theta_in >= 1 and theta_out >= 1"),
    ("in=0_out=1", "theta_in == 0 and theta_out == 1"),
    ("in>0_out=1", "theta_in > 0 and theta_out == 1"),
    ("in=1_out=0", "theta_in == 1 and theta_out == 0"),
    ("in=1_out>0", "theta_in == 1 and theta_out > 0"),
    ("in>1_out>1", "theta_in > 1 and theta_out > 1"),
)


@dataclass
class DegreeRangeRow:
    label: str
    nodes: int
    node_share: float
    tx_sum: int
    tx_share: float
    volume_sum: int
    volume_share: float
    binary_sum: int
    binary_share: float


@dataclass
class DegreeRangeReport:
    rows: list[DegreeRangeRow]
    total_nodes: int
    total_tx: int
    total_volume: int
    total_binary: int


def _predicate_mask(label: str, ti: np.ndarray, to: np.ndarray) -> np.ndarray:
    masks = {
        "in>=1_out=0": (ti >= 1) & (to == 0),
        "in=0_out>=1": (ti == 0) & (to >= 1),
        "in>=1_out>=1": (ti >= 1) & (to >= 1),
        "in=0_out=1": (ti == 0) & (to == 1),
        "in>0_out=1": (ti > 0) & (to == 1),
        "in=1_out=0": (ti == 1) & (to == 0),
        "in=1_out>0": (ti == 1) & (to > 0),
        "in>1_out>1": (ti > 1) & (to > 1),
    }
    return masks[label]


def degree_range_report(g: TxGraph) -> DegreeRangeReport:
    """Node/transaction/volume/binary-edge shares per degree predicate.

    All sums are source-anchored: a selected node contributes its outgoing
    transactions, volume and binary out-degree.
    """
    stats = flow_stats(g)
    ti, to = stats.theta_in, stats.theta_out
    v_out = stats.v_out
    bin_out = g.out_degree_binary()
    total_nodes = g.n
    total_tx = g.total_transactions()
    total_volume = g.total_volume_cents()
    total_binary = g.arc_count
    rows = []
    for label, _ in DEGREE_RANGE_PREDICATES:
        mask = _predicate_mask(label, ti, to)
        nodes = int(mask.sum())
        tx_sum = int(to[mask].sum())
        vol_sum = int(v_out[mask].sum())
        bin_sum = int(bin_out[mask].sum())
        rows.append(DegreeRangeRow(
            label=label,
            nodes=nodes,
            node_share=nodes / total_nodes if total_nodes else 0.0,
            tx_sum=tx_sum,
            tx_share=tx_sum / total_tx if total_tx else 0.0,
            volume_sum=vol_sum,
            volume_share=vol_sum / total_volume if total_volume else 0.0,
            binary_sum=bin_sum,
            binary_share=bin_sum / total_binary if total_binary else 0.0,
        ))
    return DegreeRangeReport(rows, total_nodes, total_tx, total_volume, total_binary)


@dataclass
class TypeCell:
    buyers: int
    sellers: int
    tx_count: int
    volume_cents: int


@dataclass
class TypeMatrix:
    cells: dict[tuple[str, str], TypeCell]
    types: tuple[str, ...]  # types present, B/C/E/P order with U last

    def cell(self, buyer_type: str, seller_type: str) -> TypeCell:
        return self.cells.get((buyer_type, seller_type), TypeCell(0, 0, 0, 0))


def _user_type(users: Mapping[str, UserRecord], uid: str) -> str:
    rec = users.get(uid)
    if rec is None or rec.utype is None:
        return UNKNOWN_TYPE
    return rec.utype


def type_transaction_matrix(ts: TransactionSet) -> TypeMatrix:
    """Per (buyer type, seller type): distinct buyers/sellers, tx count, volume.

    Untyped users are reported in the 'U' stratum, never guessed into B.
    """
    buyers: dict[tuple[str, str], set[str]] = {}
    sellers: dict[tuple[str, str], set[str]] = {}
    tx_count: dict[tuple[str, str], int] = {}
    volume: dict[tuple[str, str], int] = {}
    present: set[str] = set()
    for t in ts.transactions:
        bt = _user_type(ts.users, t.buyer_id)
        st = _user_type(ts.users, t.seller_id)
        present.add(bt)
        present.add(st)
        key = (bt, st)
        buyers.setdefault(key, set()).add(t.buyer_id)
        sellers.setdefault(key, set()).add(t.seller_id)
        tx_count[key] = tx_count.get(key, 0) + 1
        volume[key] = volume.get(key, 0) + t.amount_cents
    cells = {
        key: TypeCell(len(buyers[key]), len(sellers[key]), tx_count[key], volume[key])
        for key in tx_count
    }
    order = [t for t in USER_TYPES if t in present]
    if UNKNOWN_TYPE in present:
        order.append(UNKNOWN_TYPE)
    return TypeMatrix(cells, tuple(order))


@dataclass
class BucketStats:
    counts: tuple[int, ...]
    shares: tuple[float, ...]


@dataclass
class AmountRanges:
    labels: tuple[str, ...]
    strata: dict[str, BucketStats]  # keyed by buyer type, or "all"


def _amount_bucket(amount_cents: int) -> int:
    return int(np.searchsorted(np.asarray(AMOUNT_BUCKET_EDGES), amount_cents, side="left"))


def amount_range_distribution(ts: TransactionSet, by_type: bool = False) -> AmountRanges:
    """Share of transactions per amount bucket, overall or per buyer type.

    Buckets are half-open (a,b] in currency units, with [0,1] closed at 0.
    """
    nbuckets = len(AMOUNT_BUCKET_LABELS)
    counts: dict[str, list[int]] = {}
    for t in ts.transactions:
        key = _user_type(ts.users, t.buyer_id) if by_type else "all"
        row = counts.setdefault(key, [0] * nbuckets)
        row[_amount_bucket(t.amount_cents)] += 1
    strata = {}
    for key in sorted(counts):
        row = counts[key]
        total = sum(row)
        shares = tuple(c / total for c in row) if total else tuple(0.0 for _ in row)
        strata[key] = BucketStats(tuple(row), shares)
    return AmountRanges(AMOUNT_BUCKET_LABELS, strata)


@dataclass
class BalanceTypeRow:
    count: int
    share_within_5: float
    share_within_50: float
    share_positive: float


def balance_by_type(stats: FlowStats, users: Mapping[str, UserRecord]) -> dict[str, BalanceTypeRow]:
    """Share of users per type with |net| <= 5, |net| <= 50 units, net > 0."""
    net = stats.net
    by_type: dict[str, list[int]] = {}
    for k, uid in enumerate(stats.nodes):
        by_type.setdefault(_user_type(users, uid), []).append(k)
    out = {}
    for utype in sorted(by_type):
        ix = np.asarray(by_type[utype], np.int64)
        vals = net[ix]
        n = len(ix)
        out[utype] = BalanceTypeRow(
            count=n,
            share_within_5=float((np.abs(vals) <= 500).sum() / n),
            share_within_50=float((np.abs(vals) <= 5_000).sum() / n),
            share_positive=float((vals > 0).sum() / n),
        )
    return out
