"""Postal-zone and sector aggregation of transactions (heatmap-ready)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .ledger import TransactionSet

ZONE_LABELS = tuple(str(z) for z in range(10))
MEASURES = ("count", "volume", "mean_per_pair")


def zone_of(postal_code: Optional[str]) -> Optional[int]:
    """Zone 0..9 from the leading postal-code digit; None when unresolvable."""
    if not postal_code or not postal_code.isdigit():
        return None
    return int(postal_code[0])


@dataclass
class ZoneMatrix:
    measure: str
    labels: tuple[str, ...]
    cells: np.ndarray       # per requested measure
    pair_cells: np.ndarray  # distinct (buyer, seller) pairs per cell
    coverage: float         # resolvable transactions / all transactions
    resolvable_tx: int
    resolvable_volume_cents: int


def _aggregate(ts: TransactionSet, key_of: Callable[[str], Optional[str]],
               labels: tuple[str, ...]) -> tuple[np.ndarray, np.ndarray, np.ndarray, int, int]:
    k = len(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    count = np.zeros((k, k), np.int64)
    volume = np.zeros((k, k), np.int64)
    pairs: dict[tuple[int, int], set[tuple[str, str]]] = {}
    resolvable = 0
    resolvable_volume = 0
    for t in ts.transactions:
        kb = key_of(t.buyer_id)
        ks = key_of(t.seller_id)
        if kb is None or ks is None:
            continue
        i, j = pos[kb], pos[ks]
        count[i, j] += 1
        volume[i, j] += t.amount_cents
        pairs.setdefault((i, j), set()).add((t.buyer_id, t.seller_id))
        resolvable += 1
        resolvable_volume += t.amount_cents
    pair_cells = np.zeros((k, k), np.int64)
    for (i, j), s in pairs.items():
        pair_cells[i, j] = len(s)
    return count, volume, pair_cells, resolvable, resolvable_volume


def _matrix(ts: TransactionSet, measure: str, key_of, labels) -> ZoneMatrix:
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}")
    count, volume, pair_cells, resolvable, res_vol = _aggregate(ts, key_of, labels)
    if measure == "count":
        cells: np.ndarray = count
    elif measure == "volume":
        cells = volume
    else:
        cells = np.zeros(count.shape, np.float64)
        np.divide(volume, pair_cells, out=cells, where=pair_cells > 0)
    total = len(ts.transactions)
    return ZoneMatrix(
        measure=measure,
        labels=labels,
        cells=cells,
        pair_cells=pair_cells,
        coverage=resolvable / total if total else 0.0,
        resolvable_tx=resolvable,
        resolvable_volume_cents=res_vol,
    )


def zone_matrix(ts: TransactionSet, measure: str = "count") -> ZoneMatrix:
    """10x10 buyer-zone x seller-zone aggregation by postal-code leading digit."""

    def key(uid: str) -> Optional[str]:
        rec = ts.users.get(uid)
        z = zone_of(rec.postal_code) if rec else None
        return None if z is None else str(z)

    return _matrix(ts, measure, key, ZONE_LABELS)


def sector_matrix(ts: TransactionSet, measure: str = "count") -> ZoneMatrix:
    """Sector x sector aggregation; labels are data-driven, sorted."""
    sectors = sorted({
        rec.sector for rec in ts.users.values() if rec.sector is not None
    })
    labels = tuple(sectors)

    def key(uid: str) -> Optional[str]:
        rec = ts.users.get(uid)
        return rec.sector if rec else None

    return _matrix(ts, measure, key, labels)
