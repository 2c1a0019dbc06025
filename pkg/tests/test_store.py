from __future__ import annotations

import json

import pytest

from chronoseq.store import (
    ArtifactStore,
    CorruptArtifactError,
    UnknownArtifactError,
    canonical_json,
)


@pytest.fixture
def store(tmp_path):
    return ArtifactStore(tmp_path / "data")


def test_round_trip_bit_equality(store):
    payload = {"b": [1, 2, 3], "a": {"x": 0.5, "y": None}, "s": "text"}
    artifact_id = store.put("run", payload)
    loaded = store.load(artifact_id)
    assert canonical_json(loaded) == canonical_json(payload)


def test_content_addressed_ids_deterministic(store, tmp_path):
    payload = {"config": {"k": 3}, "values": [1.5, 2.25]}
    id_a = store.put("dataset", payload)
    id_b = store.put("dataset", payload)
    assert id_a == id_b
    other_store = ArtifactStore(tmp_path / "other")
    assert other_store.put("dataset", payload) == id_a


def test_different_content_different_ids(store):
    assert store.put("run", {"v": 1}) != store.put("run", {"v": 2})


def test_kind_prefixes(store):
    assert store.put("dataset", {"v": 1}).startswith("ds-")
    assert store.put("derivation", {"v": 1}).startswith("drv-")
    assert store.put("run", {"v": 1}).startswith("run-")
    assert store.put("motif_run", {"v": 1}).startswith("mrun-")


def test_unknown_id_raises(store):
    with pytest.raises(UnknownArtifactError):
        store.load("run-0000000000000000")


def test_corrupt_artifact_fails_checksum(store):
    artifact_id = store.put("run", {"v": 42})
    path = store.objects_dir / f"{artifact_id}.json"
    envelope = json.loads(path.read_text())
    envelope["payload"]["v"] = 43
    path.write_text(json.dumps(envelope))
    with pytest.raises(CorruptArtifactError):
        store.load(artifact_id)


def test_blob_round_trip(store):
    lines = [json.dumps({"i": i}) for i in range(5)]
    blob_id = store.put_blob(lines)
    assert list(store.read_blob(blob_id)) == lines
    assert store.put_blob(lines) == blob_id


def test_blob_corruption_detected(store):
    blob_id = store.put_blob(['{"i": 1}'])
    store.blob_path(blob_id).write_text('{"i": 2}\n')
    with pytest.raises(CorruptArtifactError):
        list(store.read_blob(blob_id))


def test_index_latest_and_filtering(store):
    a = store.put("derivation", {"v": 1}, meta={"dataset_id": "ds-x"})
    b = store.put("derivation", {"v": 2}, meta={"dataset_id": "ds-x"})
    c = store.put("derivation", {"v": 3}, meta={"dataset_id": "ds-y"})
    assert store.latest("derivation", dataset_id="ds-x") == b
    assert store.latest("derivation", dataset_id="ds-y") == c
    assert store.list_ids("derivation", dataset_id="ds-x") == [a, b]
    assert store.latest("run") is None
