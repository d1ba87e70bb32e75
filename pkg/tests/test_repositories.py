"""
🧪 Repository tests: binary checkpoints and CSV run files
"""
import math

import numpy as np
import pytest

from ittdns.domain.entities import Checkpoint
from ittdns.domain.errors import OutputError
from ittdns.domain.value_objects import PhysicalParams
from ittdns.infrastructure.repositories.checkpoint_repository import (
    HEADER_DTYPE,
    BinaryCheckpointRepository,
)
from ittdns.infrastructure.repositories.csv_repositories import CsvRunOutputRepository


@pytest.fixture
def repo():
    return BinaryCheckpointRepository()


@pytest.fixture
def checkpoint(random_field3):
    state = random_field3.with_components(random_field3.components, time=0.375)
    return Checkpoint(field=state, params=PhysicalParams(lam=1.0, alpha=10.0, beta=0.1, nu=0.05), step=375)


class TestCheckpoints:
    def test_header_size(self):
        assert HEADER_DTYPE.itemsize == 80

    def test_encode_decode_is_lossless(self, repo, checkpoint):
        payload = repo.encode(checkpoint)
        restored = repo.decode(payload)
        assert repo.encode(restored) == payload
        assert restored.step == 375
        assert restored.time == 0.375
        assert restored.params == checkpoint.params
        assert restored.grid.matches(checkpoint.grid)
        np.testing.assert_array_equal(restored.field.components, checkpoint.field.components)

    def test_save_and_load(self, repo, checkpoint, tmp_path):
        path = repo.save(checkpoint, tmp_path / "nested" / "state.itts")
        assert path.exists()
        assert not (tmp_path / "nested" / "state.itts.tmp").exists()
        assert repo.encode(repo.load(path)) == repo.encode(checkpoint)

    def test_bad_magic(self, repo, checkpoint):
        payload = bytearray(repo.encode(checkpoint))
        payload[:4] = b"NOPE"
        with pytest.raises(OutputError):
            repo.decode(bytes(payload))

    def test_truncated(self, repo, checkpoint):
        payload = repo.encode(checkpoint)
        with pytest.raises(OutputError):
            repo.decode(payload[:-16])
        with pytest.raises(OutputError):
            repo.decode(payload[:20])

    def test_missing_file(self, repo, tmp_path):
        with pytest.raises(OutputError):
            repo.load(tmp_path / "absent.itts")


class TestCsvRepository:
    def test_table_round_trip(self, tmp_path):
        repo = CsvRunOutputRepository()
        rows = [{"t": 0.1, "E": np.float64(1.0 / 3.0), "flag": None}, {"t": 0.2, "E": math.nan, "flag": True}]
        path = repo.write_table(tmp_path / "table.csv", rows, ["t", "E", "flag"])
        text = path.read_text()
        assert "np.float64" not in text
        assert repr(1.0 / 3.0) in text

        frame = repo.read_table(path)
        assert list(frame.columns) == ["t", "E", "flag"]
        assert frame["E"].iloc[0] == 1.0 / 3.0
        assert math.isnan(frame["E"].iloc[1])

    def test_streaming_append(self, tmp_path):
        repo = CsvRunOutputRepository()
        path = tmp_path / "series.csv"
        with repo.open_table(path, ["step", "t"]) as writer:
            writer.write({"step": 0, "t": 0.0, "ignored": 1})
        with repo.open_table(path, ["step", "t"], append=True) as writer:
            writer.write({"step": 1, "t": 0.5})
        assert path.read_text().splitlines() == ["step,t", "0,0.0", "1,0.5"]

    def test_columns_inferred_from_rows(self, tmp_path):
        repo = CsvRunOutputRepository()
        path = repo.write_table(tmp_path / "t.csv", [{"a": 1}, {"b": 2}])
        assert path.read_text().splitlines()[0] == "a,b"

    def test_manifest_and_sidecar(self, tmp_path):
        repo = CsvRunOutputRepository()
        path = repo.write_manifest(tmp_path / "run_manifest.json", {"label": "x", "values": [1, 2]})
        assert repo.read_manifest(path) == {"label": "x", "values": [1, 2]}
        sidecar = repo.write_sidecar(tmp_path / "energy.csv", ["# energy.csv", "t: time"])
        assert sidecar.name == "energy.header.txt"
        assert sidecar.read_text() == "# energy.csv\nt: time\n"

    def test_missing_inputs(self, tmp_path):
        repo = CsvRunOutputRepository()
        with pytest.raises(OutputError, match="Missing input file"):
            repo.read_table(tmp_path / "absent.csv")
        with pytest.raises(OutputError, match="Missing input file"):
            repo.read_manifest(tmp_path / "absent.json")
