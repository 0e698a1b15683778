import json
import benchlink

from benchlink.manifest import lineage

def manifest(stage="measures", **fields):
    fields.setdefault("config", {"filters": {"min_elo": 2500}})
    return benchlink.RunManifest(stage, **fields)


def test_hash_ignores_when_and_where(tmp_path):
    artifact = tmp_path / "dataset.csv"
    artifact.write_text("delta\n0.0\n", encoding="utf8")

    first = manifest(started_at="2024-01-01T00:00:00+00:00", host={"cpu_logical": 4})
    second = manifest(started_at="2025-06-01T12:00:00+00:00")
    second.add_artifact("dataset.csv", artifact)
    second.finish()

    assert first.hash == second.hash
    assert first.hash != manifest(config={"filters": {"min_elo": 2600}}).hash
    assert first.hash != manifest().finish(rows=10).hash

def test_input_hash_ignores_counts_and_engines():
    plain = manifest()
    counted = manifest(counts={"rows": 12}, engines={"super": {"tag": "sf"}})

    assert plain.input_hash == counted.input_hash
    assert plain.input_hash != manifest(parent="abc").input_hash

def test_write_and_load(tmp_path):
    written = manifest(counts={"rows": 3}, parent="f00d")
    path = written.write(tmp_path)

    payload = json.loads(path.read_text(encoding="utf8"))
    loaded = benchlink.RunManifest.load(tmp_path, "measures")

    assert path == tmp_path / "manifests" / "measures.json"
    assert payload["hash"] == written.hash
    assert loaded.hash == written.hash
    assert loaded.counts == {"rows": 3}
    assert not list(tmp_path.rglob("*.tmp"))

def test_current_until_artifact_changes(tmp_path):
    artifact = tmp_path / "games.jsonl"
    artifact.write_text("{}\n", encoding="utf8")
    done = manifest("ingest")
    done.add_artifact("games.jsonl", artifact)
    done.finish().write(tmp_path)

    assert manifest("ingest").is_current(tmp_path)
    assert not manifest("ingest", config={"filters": {}}).is_current(tmp_path)

    artifact.write_text("{}\n{}\n", encoding="utf8")
    assert not manifest("ingest").is_current(tmp_path)

    artifact.unlink()
    assert not manifest("ingest").is_current(tmp_path)

def test_unreadable_manifest_is_ignored(tmp_path):
    path = benchlink.RunManifest.path_for(tmp_path, "report")
    path.parent.mkdir(parents=True)
    path.write_text("{not json", encoding="utf8")

    assert benchlink.RunManifest.load(tmp_path, "report") is None
    assert not manifest("report").is_current(tmp_path)

def test_lineage_lists_finished_stages(tmp_path):
    ingest = manifest("ingest").finish()
    ingest.write(tmp_path)

    assert lineage(tmp_path, ["ingest", "evaluate", "measures"]) == {"ingest": ingest.hash}
