import datetime as dt
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ccnet import _kernels
from ccnet.ledger import Transaction, TransactionSet, TxGraph, UserRecord


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    # one-off jit cost, kept out of individual test timings
    _kernels.warmup()


def graph_from_adj(adj, e=None, w=None) -> TxGraph:
    """TxGraph from a boolean adjacency matrix and optional weight matrices."""
    n = adj.shape[0]
    nodes = [f"n{k:03d}" for k in range(n)]
    ec = {}
    ev = {}
    for i in range(n):
        for j in range(n):
            if i != j and adj[i, j]:
                ec[(nodes[i], nodes[j])] = int(e[i, j]) if e is not None else 1
                ev[(nodes[i], nodes[j])] = int(w[i, j]) if w is not None else 0
    return TxGraph(nodes, ec, ev)


def graph_from_arcs(arcs, nodes=None) -> TxGraph:
    """TxGraph with unit edges from an iterable of (src, dst) id pairs."""
    ids = set(nodes or [])
    for a, b in arcs:
        ids.add(a)
        ids.add(b)
    ec = {(a, b): 1 for a, b in arcs}
    ev = {(a, b): 0 for a, b in arcs}
    return TxGraph(sorted(ids), ec, ev)


def make_tx(buyer, seller, amount=100, date="2022-06-15", tx_id="t"):
    return Transaction(tx_id, dt.date.fromisoformat(date), buyer, seller, amount)


def make_set(txs, users=None, period="all") -> TransactionSet:
    umap = {}
    if users:
        for uid, utype in users.items():
            umap[uid] = UserRecord(uid, utype)
    for t in txs:
        for uid in (t.buyer_id, t.seller_id):
            umap.setdefault(uid, UserRecord(uid, "B"))
    return TransactionSet(list(txs), umap, period)
