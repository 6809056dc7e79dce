import argparse
from pathlib import Path

import pytest

from polarfield.core.config import THREADS_ENV, RunConfig


@pytest.mark.parametrize(
    ("name", "value"),
    [
        ("lambda_j", 0.5),
        ("lambda_s", -1.0),
        ("eps", 0.0),
        ("n", 0),
        ("samples", -1),
        ("trace_seeds", -2),
        ("trace_step", 0.0),
        ("trace_steps", 0),
    ],
)
def test_invalid_parameters(name, value):
    with pytest.raises(ValueError, match=">"):
        RunConfig(**{name: value})


def test_setters_validate():
    config = RunConfig()
    config.lambda_s = 0.0
    assert config.lambda_s == 0.0
    with pytest.raises(ValueError, match="lambda_j"):
        config.lambda_j = float("nan")


def test_defaults():
    config = RunConfig(out="results")
    assert config.lambda_j == 50.0
    assert config.lambda_s == 50.0
    assert config.eps == 1e-6
    assert config.n is None
    assert config.field == Path("results/field.json")
    assert config.mesh is None


def test_digest_follows_parameters():
    first = RunConfig(mesh="a.obj", prescription="p.json")
    second = RunConfig(mesh="a.obj", prescription="p.json")
    assert first.digest() == second.digest()
    second.lambda_s = 10.0
    assert first.digest() != second.digest()
    assert len(first.digest()) == 64


def test_threads_come_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "2")
    assert RunConfig().threads == "2"
    assert RunConfig().to_dict()["threads"] == "2"
    monkeypatch.delenv(THREADS_ENV)
    assert RunConfig().threads is None


def test_from_args():
    args = argparse.Namespace(
        mesh="sphere.obj",
        prescription="poles.json",
        out="run",
        lambda_j=20.0,
        lambda_s=0.0,
        eps=1e-4,
        n=4,
        samples=3,
        unit=True,
    )
    config = RunConfig.from_args(args)
    assert config.mesh == Path("sphere.obj")
    assert config.n == 4
    assert config.samples == 3
    assert config.unit
    assert config.trace_steps == 500
    assert config.align is None
    assert config.to_dict()["out"] == "run"
