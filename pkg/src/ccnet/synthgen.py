"""Seeded synthetic ledger generator.

Stands in for the proprietary source data so every pipeline stage has test
input. Buyers are drawn proportionally to a Pareto latent activity; sellers
proportionally to activity raised to the imitation strength (beta = 0 means
uniform over the other users). The mechanics are synthetic throughout and
documented as such in the emitted metadata.
"""

from __future__ import annotations

import calendar
import datetime as dt
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .ledger import Transaction, TransactionSet, UserRecord

RNG_ID = "numpy-pcg64"  # numpy default_rng; documented so fixtures stay pinned

# user-type shares: 2022 membership counts (5461, 6604, 2581, 3) / 14649
DEFAULT_TYPE_MIX = (5461 / 14649, 6604 / 14649, 2581 / 14649, 3 / 14649)
TYPE_ORDER = ("B", "C", "E", "P")

# log-normal amount parameters per buyer type, ln(cents): businesses mostly
# tens of units, consumers below one unit, employees/providers hundreds
DEFAULT_AMOUNT_MU = {"B": 8.3, "C": 4.1, "E": 10.3, "P": 10.0}
DEFAULT_AMOUNT_SIGMA = {"B": 1.2, "C": 1.0, "E": 0.8, "P": 1.0}

DEFAULT_SECTOR_POOL = (
    "Buildings", "Cleaning", "Consulting", "Finance and Insurance", "Groceries",
    "Horeca", "Industry and Mechanics", "Insurance", "Music and Events",
    "Packaging", "Retail", "Wellness",
)
DEFAULT_ZONE_POOL = tuple(str(z) for z in range(10))

# Sardinia-ish bounding box for synthetic coordinates
_LAT_RANGE = (38.9, 41.3)
_LON_RANGE = (8.1, 9.9)


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 1_000
    n_transactions: int = 20_000
    imitation_beta: float = 1.0  # counterpart choice ~ activity**beta
    activity_tail: float = 1.5   # Pareto shape of the latent activity
    type_mix: tuple[float, float, float, float] = DEFAULT_TYPE_MIX
    amount_mu: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_AMOUNT_MU))
    amount_sigma: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_AMOUNT_SIGMA))
    year: int = 2022
    seed: int = 42
    zone_pool: tuple[str, ...] = DEFAULT_ZONE_POOL
    sector_pool: tuple[str, ...] = DEFAULT_SECTOR_POOL

    def validate(self) -> None:
        if self.n_users < 2:
            raise ValueError("n_users must be >= 2 (no valid counterpart otherwise)")
        if self.n_transactions < 1:
            raise ValueError("n_transactions must be positive")
        if self.imitation_beta < 0:
            raise ValueError("imitation_beta must be non-negative")
        if self.activity_tail <= 1.0:
            raise ValueError("activity_tail must be > 1")
        if abs(sum(self.type_mix) - 1.0) > 1e-9:
            raise ValueError("type_mix must sum to 1")
        for t in TYPE_ORDER:
            if t not in self.amount_mu or t not in self.amount_sigma:
                raise ValueError(f"amount model missing parameters for type {t}")


def _type_counts(mix: tuple[float, ...], n: int) -> list[int]:
    # largest-remainder apportionment, deterministic
    raw = [m * n for m in mix]
    counts = [int(x) for x in raw]
    remainder = n - sum(counts)
    order = sorted(range(len(mix)), key=lambda k: (-(raw[k] - counts[k]), k))
    for k in order[:remainder]:
        counts[k] += 1
    return counts


def generate_ledger(cfg: SynthConfig) -> TransactionSet:
    """Deterministic synthetic TransactionSet for the configured year."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_users
    width = max(5, len(str(n)))
    ids = [f"U{k:0{width}d}" for k in range(1, n + 1)]

    counts = _type_counts(cfg.type_mix, n)
    type_codes = np.repeat(np.arange(4), counts)
    rng.shuffle(type_codes)
    types = [TYPE_ORDER[c] for c in type_codes]

    activity = rng.pareto(cfg.activity_tail, n) + 1.0
    buy_p = activity / activity.sum()
    sell_w = activity ** cfg.imitation_beta
    sell_p = sell_w / sell_w.sum()

    t_count = cfg.n_transactions
    buyers = rng.choice(n, size=t_count, p=buy_p)
    sellers = rng.choice(n, size=t_count, p=sell_p)
    clash = sellers == buyers
    while clash.any():  # resample until the seller differs from the buyer
        sellers[clash] = rng.choice(n, size=int(clash.sum()), p=sell_p)
        clash = sellers == buyers

    year_days = 366 if calendar.isleap(cfg.year) else 365
    days = rng.integers(0, year_days, size=t_count)
    start = dt.date(cfg.year, 1, 1)

    mu = np.asarray([cfg.amount_mu[t] for t in TYPE_ORDER])
    sigma = np.asarray([cfg.amount_sigma[t] for t in TYPE_ORDER])
    z = rng.standard_normal(t_count)
    buyer_codes = type_codes[buyers]
    amounts = np.exp(mu[buyer_codes] + sigma[buyer_codes] * z)
    amounts = np.maximum(1, np.rint(amounts)).astype(np.int64)

    zones = rng.integers(0, len(cfg.zone_pool), size=n)
    postal_tail = rng.integers(0, 10_000, size=n)
    sectors = rng.integers(0, len(cfg.sector_pool), size=n)
    lats = rng.uniform(*_LAT_RANGE, size=n)
    lons = rng.uniform(*_LON_RANGE, size=n)

    users = {}
    for k, uid in enumerate(ids):
        users[uid] = UserRecord(
            user_id=uid,
            utype=types[k],
            sector=cfg.sector_pool[sectors[k]],
            postal_code=f"{cfg.zone_pool[zones[k]]}{postal_tail[k]:04d}",
            coord=(round(float(lats[k]), 6), round(float(lons[k]), 6)),
        )

    order = np.argsort(days, kind="stable")
    txs = []
    for seq, k in enumerate(order, start=1):
        txs.append(Transaction(
            tx_id=f"T{seq:08d}",
            date=start + dt.timedelta(days=int(days[k])),
            buyer_id=ids[buyers[k]],
            seller_id=ids[sellers[k]],
            amount_cents=int(amounts[k]),
        ))
    return TransactionSet(txs, users, str(cfg.year))


def config_metadata(cfg: SynthConfig) -> dict:
    """Config echo for emission next to the generated ledger."""
    return {
        "rng": RNG_ID,
        "n_users": cfg.n_users,
        "n_transactions": cfg.n_transactions,
        "imitation_beta": cfg.imitation_beta,
        "activity_tail": cfg.activity_tail,
        "type_mix": {t: cfg.type_mix[k] for k, t in enumerate(TYPE_ORDER)},
        "amount_mu": dict(cfg.amount_mu),
        "amount_sigma": dict(cfg.amount_sigma),
        "year": cfg.year,
        "seed": cfg.seed,
        "zone_pool": list(cfg.zone_pool),
        "sector_pool": list(cfg.sector_pool),
        "synthetic": True,
    }
