import orjson
import pytest

from polarfield.cli import EXIT_IO, EXIT_OK, EXIT_VALIDATION, main
from polarfield.core.db.models import DATABASE_NAME, list_runs
from polarfield.core.mesh.io import write_obj
from polarfield.core.prescribe.io import write_prescription
from polarfield.core.prescribe.types import Prescription
from tests.conftest import icosphere_mesh, two_pole_prescription, vertex_singularity

NON_MANIFOLD_OBJ = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n"


@pytest.fixture()
def inputs(tmp_path):
    mesh = icosphere_mesh()
    mesh_path = tmp_path / "sphere.obj"
    prescription_path = tmp_path / "poles.json"
    write_obj(mesh_path, mesh)
    write_prescription(prescription_path, two_pole_prescription(mesh))
    return mesh_path, prescription_path


def _paths(mesh, prescription):
    return ["--mesh", mesh, "--prescription", prescription]


def _run(capsys, *argv):
    code = main([str(arg) for arg in argv])
    return code, orjson.loads(capsys.readouterr().out)


def test_validate(capsys, inputs):
    mesh_path, prescription_path = inputs
    code, document = _run(capsys, "validate", *_paths(mesh_path, prescription_path))
    assert code == EXIT_OK
    assert document["valid"]
    assert document["euler_characteristic"] == 2
    assert document["index_sum"] == "2"


def test_index_sum_mismatch(capsys, inputs, tmp_path):
    mesh_path, _ = inputs
    wrong = tmp_path / "wrong.json"
    write_prescription(wrong, Prescription(n=1, singularities=[vertex_singularity(0, 1)]))
    code, document = _run(capsys, "validate", *_paths(mesh_path, wrong))
    assert code == EXIT_VALIDATION
    assert document["error"] == "IndexSumMismatch"
    assert document["stage"] == "validate"
    assert document["euler_characteristic"] == 2


def test_non_manifold_mesh(capsys, inputs, tmp_path):
    _, prescription_path = inputs
    mesh_path = tmp_path / "bad.obj"
    mesh_path.write_text(NON_MANIFOLD_OBJ)
    code, document = _run(capsys, "validate", *_paths(mesh_path, prescription_path))
    assert code == EXIT_VALIDATION
    assert document["error"] == "NonManifold"


def test_missing_file(capsys, inputs, tmp_path):
    _, prescription_path = inputs
    missing = tmp_path / "missing.obj"
    code, document = _run(capsys, "validate", *_paths(missing, prescription_path))
    assert code == EXIT_IO
    assert document["stage"] == "read"


def test_malformed_prescription(capsys, inputs, tmp_path):
    mesh_path, _ = inputs
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    code, document = _run(capsys, "validate", *_paths(mesh_path, broken))
    assert code == EXIT_IO
    assert document["stage"] == "read"


def test_invalid_flag_value(capsys, inputs):
    mesh_path, prescription_path = inputs
    code, document = _run(
        capsys,
        "validate",
        "--mesh",
        mesh_path,
        "--prescription",
        prescription_path,
        "--lambda-j",
        "0.5",
    )
    assert code == EXIT_VALIDATION
    assert document["error"] == "InvalidConfig"


def test_compute_is_reproducible(capsys, inputs, tmp_path):
    mesh_path, prescription_path = inputs
    out = tmp_path / "out"
    argv = ["compute", "--mesh", mesh_path, "--prescription", prescription_path, "--out", out]
    code, report = _run(capsys, *argv, "--samples", 2, "--trace-seeds", 3, "--dump-operators")
    assert code == EXIT_OK
    assert set(report["indices"].values()) == {"1"}
    for name in ("field.json", "theta.json", "sigma.json", "exponents.json", "report.json"):
        assert out.joinpath(name).exists()
    for name in ("samples.csv", "streamlines.obj", "d0.txt", "d1.txt", "beveled.json"):
        assert out.joinpath(name).exists()
    first = out.joinpath("field.json").read_bytes()

    code, _ = _run(capsys, *argv)
    assert code == EXIT_OK
    assert out.joinpath("field.json").read_bytes() == first
    runs = list_runs(out / DATABASE_NAME)
    assert list(runs["command"]) == ["compute", "compute"]


def test_compare(capsys, inputs, tmp_path):
    mesh_path, prescription_path = inputs
    out = tmp_path / "out"
    code, report = _run(
        capsys,
        "compare",
        "--mesh",
        mesh_path,
        "--prescription",
        prescription_path,
        "--out",
        out,
        "--lambda-s",
        "0",
    )
    assert code == EXIT_OK
    assert report["energy_ours"] <= report["energy_baseline"] * (1.0 + 1e-9) + 1e-12
    assert out.joinpath("compare.json").exists()


def test_trace_reads_computed_field(capsys, inputs, tmp_path):
    mesh_path, prescription_path = inputs
    out = tmp_path / "out"
    base = ["--mesh", mesh_path, "--prescription", prescription_path, "--out", out]
    assert _run(capsys, "compute", *base)[0] == EXIT_OK
    code, document = _run(capsys, "trace", *base, "--trace-seeds", 4, "--trace-steps", 20)
    assert code == EXIT_OK
    assert document["streamlines"] == 4
    assert sum(document["stops"].values()) == 4
    assert out.joinpath("streamlines.obj").exists()
