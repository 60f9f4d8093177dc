import json
import logging

from hecke_lab.cache import FORMAT_VERSION, DiskCache, cache_roundtrip


def test_unconfigured_cache_is_inert(monkeypatch):
    monkeypatch.delenv("HECKE_LAB_CACHE_DIR", raising=False)
    cache = DiskCache()
    assert cache.get("anything") is None
    cache.put("anything", {"x": 1})  # no-op, must not raise


def test_put_get_roundtrip(tmp_path):
    cache = DiskCache(tmp_path)
    cache.put("k", {"a": [1, 2], "b": "text"})
    doc = cache.get("k")
    assert doc["a"] == [1, 2]
    assert doc["format_version"] == FORMAT_VERSION


def test_env_var_configures_directory(tmp_path, monkeypatch):
    monkeypatch.setenv("HECKE_LAB_CACHE_DIR", str(tmp_path / "boxes"))
    cache = DiskCache()
    cache.put("k", {"v": 7})
    assert DiskCache().get("k")["v"] == 7


def test_corrupted_entry_recomputed(tmp_path, caplog):
    cache = DiskCache(tmp_path)
    cache.put("k", {"v": 1})
    (tmp_path / "k.json").write_text("{ not json !")
    with caplog.at_level(logging.WARNING, logger="hecke_lab.cache"):
        assert cache.get("k") is None
    assert any("unreadable" in r.message for r in caplog.records)


def test_version_skew_recomputed(tmp_path, caplog):
    cache = DiskCache(tmp_path)
    path = tmp_path / "k.json"
    path.write_text(json.dumps({"format_version": FORMAT_VERSION + 1, "v": 1}))
    with caplog.at_level(logging.WARNING, logger="hecke_lab.cache"):
        assert cache.get("k") is None
    assert any("format_version" in r.message for r in caplog.records)


def test_atomic_replacement(tmp_path):
    cache = DiskCache(tmp_path)
    cache.put("k", {"v": "old"})
    cache.put("k", {"v": "new"})
    # no temp litter and the newest version wins
    assert [p.name for p in tmp_path.iterdir()] == ["k.json"]
    assert cache.get("k")["v"] == "new"


def test_structure_table_roundtrip_key(tmp_path):
    assert cache_roundtrip("struct_p3_n2_conrey1", tmp_path)
    assert (tmp_path / "struct_p3_n2_conrey1.json").exists()


def test_coset_table_roundtrip_key():
    assert cache_roundtrip("cosets_p2_n2")


def test_structure_table_cache_path(tmp_path):
    from hecke_lab.characters import PChar
    from hecke_lab.hecke import structure_table

    cache = DiskCache(tmp_path)
    chi = PChar.trivial(2, 2)
    first = structure_table(2, 2, chi, cache=cache)
    # second call must come back from disk and agree exactly
    second = structure_table(2, 2, chi, cache=cache)
    assert first.labels == second.labels
    assert first.constants == second.constants
