import numpy as np
import pytest

from ccnet.geocluster import sector_matrix, zone_matrix, zone_of
from ccnet.ledger import UserRecord

from conftest import make_set, make_tx


def located_set(txs, postal=None, sectors=None):
    ts = make_set(txs)
    for uid, rec in list(ts.users.items()):
        ts.users[uid] = UserRecord(
            uid, rec.utype,
            sector=(sectors or {}).get(uid),
            postal_code=(postal or {}).get(uid),
        )
    return ts


class TestZoneOf:
    def test_leading_digit(self):
        assert zone_of("09100") == 0
        assert zone_of("35121") == 3

    def test_unresolved(self):
        assert zone_of("") is None
        assert zone_of(None) is None
        assert zone_of("ab123") is None


class TestZoneMatrix:
    def test_count_and_volume_cells(self):
        txs = [make_tx("a", "b", 100, tx_id="1"), make_tx("a", "b", 300, tx_id="2")]
        ts = located_set(txs, postal={"a": "09100", "b": "35121"})
        count = zone_matrix(ts, "count")
        volume = zone_matrix(ts, "volume")
        assert count.cells[0, 3] == 2
        assert volume.cells[0, 3] == 400
        assert count.coverage == 1.0

    def test_mean_per_pair(self):
        txs = [make_tx("a", "b", 100, tx_id="1"), make_tx("c", "d", 300, tx_id="2")]
        ts = located_set(txs, postal={"a": "09100", "c": "09200",
                                      "b": "35121", "d": "35999"})
        mean = zone_matrix(ts, "mean_per_pair")
        assert mean.cells[0, 3] == pytest.approx(200.0)
        assert mean.pair_cells[0, 3] == 2

    def test_unresolved_excluded_and_reported(self):
        txs = [make_tx("a", "b", 100, tx_id="1"), make_tx("x", "b", 300, tx_id="2")]
        ts = located_set(txs, postal={"a": "09100", "b": "35121"})
        m = zone_matrix(ts, "count")
        assert m.coverage == pytest.approx(0.5)
        assert m.cells.sum() == 1
        assert m.resolvable_tx == 1

    def test_totals_conserved_on_random_fixture(self):
        rng = np.random.default_rng(193)
        postal = {f"u{k}": f"{rng.integers(10)}1234" for k in range(12)}
        txs = [make_tx(f"u{rng.integers(12)}", f"u{rng.integers(12)}",
                       int(rng.integers(1, 900)), tx_id=f"t{k}") for k in range(80)]
        txs = [t for t in txs if t.buyer_id != t.seller_id]
        ts = located_set(txs, postal=postal)
        count = zone_matrix(ts, "count")
        volume = zone_matrix(ts, "volume")
        assert count.cells.sum() == len(txs)
        assert volume.cells.sum() == sum(t.amount_cents for t in txs)
        assert count.coverage == 1.0

    def test_invalid_measure(self):
        with pytest.raises(ValueError):
            zone_matrix(make_set([]), "median")


class TestSectorMatrix:
    def test_single_cell(self):
        txs = [make_tx("a", "b", 600_000)]
        ts = located_set(txs, sectors={"a": "Groceries", "b": "Horeca"})
        m = sector_matrix(ts, "volume")
        i = m.labels.index("Groceries")
        j = m.labels.index("Horeca")
        assert m.cells[i, j] == 600_000

    def test_all_sectors_missing(self):
        ts = located_set([make_tx("a", "b", 100)])
        m = sector_matrix(ts, "count")
        assert m.labels == ()
        assert m.coverage == 0.0

    def test_matches_group_by(self):
        rng = np.random.default_rng(197)
        sectors = ["S1", "S2", "S3"]
        assignment = {f"u{k}": sectors[int(rng.integers(3))] for k in range(10)}
        txs = [make_tx(f"u{rng.integers(10)}", f"u{rng.integers(10)}",
                       int(rng.integers(1, 100)), tx_id=f"t{k}") for k in range(60)]
        txs = [t for t in txs if t.buyer_id != t.seller_id]
        ts = located_set(txs, sectors=assignment)
        m = sector_matrix(ts, "count")
        expected = {}
        for t in txs:
            key = (assignment[t.buyer_id], assignment[t.seller_id])
            expected[key] = expected.get(key, 0) + 1
        for (sa, sb), count in expected.items():
            assert m.cells[m.labels.index(sa), m.labels.index(sb)] == count

    def test_labels_sorted(self):
        ts = located_set([make_tx("a", "b", 1)], sectors={"a": "Zeta", "b": "Alpha"})
        assert sector_matrix(ts, "count").labels == ("Alpha", "Zeta")
