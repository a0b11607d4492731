import json

import pytest

from coachloop.store import COLLECTIONS, Store


class TestStore:
    def test_put_get_roundtrip(self, tmp_path):
        store = Store(tmp_path)
        store.put("patients", "p0001", {"name": "A"})
        assert store.get("patients", "p0001") == {"name": "A"}
        assert store.exists("patients", "p0001")
        assert store.count("patients") == 1
        store.close()

    def test_unknown_collection_rejected(self, tmp_path):
        store = Store(tmp_path)
        with pytest.raises(KeyError, match="unknown collection"):
            store.put("nope", "x", {})
        store.close()

    def test_reload_replays_log(self, tmp_path):
        store = Store(tmp_path)
        store.put("patients", "p0001", {"v": 1})
        store.put("patients", "p0001", {"v": 2})
        store.put("cases", "c0001", {"status": "PENDING"})
        state = store.state()
        store.close()

        reloaded = Store(tmp_path)
        assert reloaded.state() == state
        assert reloaded.get("patients", "p0001") == {"v": 2}
        reloaded.close()

    def test_order_preserved_across_reload(self, tmp_path):
        store = Store(tmp_path)
        for i in (3, 1, 2):
            store.put("patients", f"p{i}", {})
        store.close()
        reloaded = Store(tmp_path)
        assert reloaded.ids("patients") == ["p3", "p1", "p2"]
        reloaded.close()

    def test_log_is_append_only(self, tmp_path):
        store = Store(tmp_path)
        store.put("patients", "p0001", {"v": 1})
        store.put("patients", "p0001", {"v": 2})
        store.close()
        lines = (tmp_path / "patients.jsonl").read_text().splitlines()
        assert len(lines) == 2
        assert json.loads(lines[0])["doc"] == {"v": 1}

    def test_compact_keeps_state_shrinks_log(self, tmp_path):
        store = Store(tmp_path)
        for i in range(5):
            store.put("patients", "p0001", {"v": i})
        state = store.state()
        store.compact()
        lines = (tmp_path / "patients.jsonl").read_text().splitlines()
        assert len(lines) == 1
        # writes still work after compaction, and a reload agrees
        store.put("patients", "p0002", {"v": 9})
        store.close()
        reloaded = Store(tmp_path)
        assert reloaded.get("patients", "p0001") == state["patients"]["p0001"]
        assert reloaded.get("patients", "p0002") == {"v": 9}
        reloaded.close()

    def test_decision_log_monotone_seq(self, tmp_path):
        store = Store(tmp_path)
        seqs = [store.append_decision({"case_id": f"c{i}"}) for i in range(4)]
        assert seqs == [0, 1, 2, 3]
        store.close()
        reloaded = Store(tmp_path)
        assert [doc["seq"] for _, doc in reloaded.all("decisions")] == [0, 1, 2, 3]
        assert reloaded.append_decision({"case_id": "c4"}) == 4
        reloaded.close()

    def test_state_covers_all_collections(self, tmp_path):
        store = Store(tmp_path)
        assert set(store.state()) == set(COLLECTIONS)
        store.close()

    def test_torn_trailing_line_is_rejected_loudly(self, tmp_path):
        store = Store(tmp_path)
        store.put("patients", "p0001", {"v": 1})
        store.close()
        path = tmp_path / "patients.jsonl"
        path.write_text(path.read_text() + '{"id": "p0002", "doc": {tr')
        with pytest.raises(json.JSONDecodeError):
            Store(tmp_path)
