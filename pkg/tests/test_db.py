import orjson
import pytest

from polarfield.core.config import RunConfig
from polarfield.core.db.models import list_runs, record_run


def test_runs_are_listed_in_order(tmp_path):
    path = tmp_path / "registry" / "runs.db"
    config = RunConfig(mesh="sphere.obj", prescription="poles.json")
    record_run(path, "compute", config, {"energy": 1.5, "indices": {"vertex:0": "1"}}, 0.25, 1.5)
    record_run(path, "compare", config, {"ratio": 0.9}, 0.5)

    runs = list_runs(path)
    assert list(runs["command"]) == ["compute", "compare"]
    assert runs["config_digest"].iloc[0] == config.digest()
    assert runs["energy"].iloc[0] == pytest.approx(1.5)
    assert orjson.loads(runs["report"].iloc[0])["indices"] == {"vertex:0": "1"}
    assert orjson.loads(runs["config"].iloc[1])["mesh"] == "sphere.obj"


def test_empty_registry(tmp_path):
    runs = list_runs(tmp_path / "runs.db")
    assert runs.empty
    assert "wall_time" in runs.columns
