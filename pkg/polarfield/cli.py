"""Command line surface: validate, compute, compare and trace."""

from __future__ import annotations

import argparse
from collections import Counter
from contextlib import contextmanager
from fractions import Fraction
import logging
import sys
import time
from typing import TYPE_CHECKING, Any

import orjson

from polarfield.core.config import RunConfig
from polarfield.core.db.models import DATABASE_NAME, record_run
from polarfield.core.exceptions import (
    FieldError,
    MeshError,
    ParseError,
    PolarFieldError,
    PrescriptionError,
    SolverError,
)
from polarfield.core.field.export import (
    beveled_to_dict,
    dump_json,
    read_field,
    sample_grid,
    write_field,
    write_json,
    write_samples,
    write_streamlines,
    write_triplets,
    write_vector,
)
from polarfield.core.field.tracing import seed_points, trace_streamlines
from polarfield.core.mesh.io import read_mesh
from polarfield.core.mesh.topology import boundary_loops
from polarfield.core.pipeline import prepare_prescription, run_comparison, run_pipeline, stage
from polarfield.core.prescribe.io import read_curves, read_prescription
from polarfield.log_utils import collect_warnings

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator, Sequence
    from pathlib import Path

    from polarfield.core.mesh.surface import SurfaceMesh
    from polarfield.core.prescribe.types import AlignmentCurve, Prescription
    from polarfield.core.solve.types import PipelineResult

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_IO = 4
TRACE_SEED = 0


@contextmanager
def reading(path: Path | None) -> Iterator[None]:
    """Tag errors raised while reading ``path`` with the read stage."""
    try:
        yield
    except PolarFieldError as error:
        error.details.setdefault("stage", "read")
        error.details.setdefault("path", str(path))
        raise


def _require(path: Path | None, flag: str) -> Path:
    if path is None:
        msg = f"{flag} is required"
        raise ValueError(msg)
    return path


def load_inputs(config: RunConfig) -> tuple[SurfaceMesh, Prescription]:
    """Read mesh and prescription named in ``config``."""
    mesh_path = _require(config.mesh, "--mesh")
    prescription_path = _require(config.prescription, "--prescription")
    with reading(mesh_path):
        mesh = read_mesh(mesh_path)
    with reading(prescription_path):
        prescription = read_prescription(prescription_path)
    return mesh, prescription


def load_curves(config: RunConfig) -> list[AlignmentCurve] | None:
    """Read alignment curves when ``--align`` is set."""
    if config.align is None:
        return None
    with reading(config.align):
        return read_curves(config.align)


def cmd_validate(config: RunConfig) -> dict[str, Any]:
    """Check mesh and prescription without solving."""
    with collect_warnings() as collector:
        mesh, prescription = load_inputs(config)
        with stage("validate", {}):
            prescription = prepare_prescription(prescription, mesh, config.n)
    return {
        "valid": True,
        "N": prescription.n,
        "vertices": mesh.n_vertices,
        "edges": mesh.n_edges,
        "faces": mesh.n_faces,
        "euler_characteristic": mesh.euler_characteristic,
        "boundary_loops": len(boundary_loops(mesh)),
        "singularities": len(prescription.singularities),
        "index_sum": str(Fraction(prescription.index_sum(), prescription.n)),
        "warnings": collector.messages,
    }


def mean_edge_length(mesh: SurfaceMesh) -> float:
    """Return mean edge length, the unit of trace steps."""
    return float(mesh.edge_lengths.mean())


def dump_operators(config: RunConfig, result: PipelineResult) -> None:
    """Write operator triplets and the beveled complex."""
    out = config.out
    write_triplets(out.joinpath("d0.txt"), result["ops"]["d0"])
    write_triplets(out.joinpath("d1.txt"), result["ops"]["d1"])
    write_triplets(out.joinpath("D.txt"), result["flaps"]["D"])
    write_triplets(out.joinpath("Q.txt"), result["q"])
    write_json(out.joinpath("beveled.json"), beveled_to_dict(result["bm"]))
    LOGGER.info("Operators written to %s", out)


def cmd_compute(config: RunConfig) -> dict[str, Any]:
    """Design a field and write it with its phases, scales and report."""
    start = time.perf_counter()
    mesh, prescription = load_inputs(config)
    curves = load_curves(config)
    result = run_pipeline(
        mesh,
        prescription,
        config.lambda_j,
        config.lambda_s,
        config.eps,
        curves=curves,
        n=config.n,
        threads=config.threads,
    )
    field = result["field"]
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    config.field.parent.mkdir(parents=True, exist_ok=True)
    write_field(config.field, field)
    write_vector(out.joinpath("theta.json"), "theta", result["theta"])
    write_vector(out.joinpath("sigma.json"), "sigma", result["sigma_solution"]["sigma"])
    write_vector(out.joinpath("exponents.json"), "exponents", result["exponents"])
    if config.samples > 0:
        write_samples(
            out.joinpath("samples.csv"),
            field,
            sample_grid(mesh, config.samples),
            unit=config.unit,
        )
    if config.trace_seeds > 0:
        lines = trace_streamlines(
            field,
            seed_points(mesh, config.trace_seeds, TRACE_SEED),
            config.trace_step * mean_edge_length(mesh),
            config.trace_steps,
        )
        write_streamlines(out.joinpath("streamlines.obj"), lines)
    if config.dump_operators:
        dump_operators(config, result)

    report = dict(result["report"])
    write_json(out.joinpath("report.json"), report)
    record_run(
        out.joinpath(DATABASE_NAME),
        "compute",
        config,
        report,
        time.perf_counter() - start,
        energy=report["energy"],
    )
    return report


def cmd_compare(config: RunConfig) -> dict[str, Any]:
    """Score the design against the trivial connections baseline."""
    start = time.perf_counter()
    mesh, prescription = load_inputs(config)
    _, comparison = run_comparison(
        mesh,
        prescription,
        config.lambda_j,
        config.lambda_s,
        config.eps,
        n=config.n,
    )
    report = dict(comparison)
    config.out.mkdir(parents=True, exist_ok=True)
    write_json(config.out.joinpath("compare.json"), report)
    record_run(
        config.out.joinpath(DATABASE_NAME),
        "compare",
        config,
        report,
        time.perf_counter() - start,
        energy=comparison["energy_ours"],
    )
    return report


def cmd_trace(config: RunConfig) -> dict[str, Any]:
    """Trace streamlines of a computed field into an OBJ file."""
    mesh_path = _require(config.mesh, "--mesh")
    with reading(mesh_path):
        mesh = read_mesh(mesh_path)
    with reading(config.field):
        field = read_field(config.field, mesh)
    seeds = seed_points(mesh, max(config.trace_seeds, 1), TRACE_SEED)
    lines = trace_streamlines(
        field,
        seeds,
        config.trace_step * mean_edge_length(mesh),
        config.trace_steps,
    )
    config.out.mkdir(parents=True, exist_ok=True)
    path = config.out.joinpath("streamlines.obj")
    write_streamlines(path, lines)
    return {
        "streamlines": len(lines),
        "points": int(sum(len(line["points"]) for line in lines)),
        "stops": dict(Counter(line["stop"] for line in lines)),
        "path": str(path),
    }


COMMANDS: dict[str, Callable[[RunConfig], dict[str, Any]]] = {
    "validate": cmd_validate,
    "compute": cmd_compute,
    "compare": cmd_compare,
    "trace": cmd_trace,
}


def build_parser() -> argparse.ArgumentParser:
    """Return parser with one subcommand per entry of ``COMMANDS``."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mesh", help="Triangle mesh, OBJ or OFF.")
    common.add_argument("--prescription", help="Prescription JSON.")
    common.add_argument("--out", default="out", help="Output directory.")
    common.add_argument("--lambda-j", type=float, default=50.0, help="Jump penalty, >= 1.")
    common.add_argument("--lambda-s", type=float, default=50.0, help="Isotropy weight, >= 0.")
    common.add_argument("--eps", type=float, default=1e-6, help="Lower bound on scales.")
    common.add_argument("--n", type=int, default=None, help="Symmetry order override.")
    common.add_argument("--samples", type=int, default=0, help="Sample subdivisions per face.")
    common.add_argument("--trace-seeds", type=int, default=0, help="Streamline seed count.")
    common.add_argument("--align", help="Alignment curves JSON.")
    common.add_argument("--unit", action="store_true", help="Export unit length samples.")
    common.add_argument(
        "--dump-operators",
        action="store_true",
        help="Write operator matrices and the beveled complex.",
    )

    parser = argparse.ArgumentParser(
        prog="polarfield",
        description="Design directional fields with prescribed singularities.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("validate", parents=[common], help="Check inputs only.")
    subparsers.add_parser("compute", parents=[common], help="Design a field.")
    subparsers.add_parser("compare", parents=[common], help="Compare with trivial connections.")
    trace = subparsers.add_parser("trace", parents=[common], help="Trace streamlines.")
    trace.add_argument("--field", help="Field export, <out>/field.json by default.")
    trace.add_argument(
        "--trace-step",
        type=float,
        default=0.2,
        help="Step as a fraction of the mean edge length.",
    )
    trace.add_argument("--trace-steps", type=int, default=500, help="Step cap per streamline.")
    return parser


def exit_code(error: BaseException) -> int:
    """Return process exit code of an error."""
    if isinstance(error, ParseError) and error.details.get("stage") == "read":
        return EXIT_IO
    if isinstance(error, MeshError | PrescriptionError):
        return EXIT_VALIDATION
    if isinstance(error, SolverError | FieldError):
        return EXIT_SOLVER
    if isinstance(error, OSError | orjson.JSONDecodeError):
        return EXIT_IO
    return EXIT_VALIDATION


def error_document(error: BaseException) -> dict[str, Any]:
    """Return JSON error document of ``error``."""
    if isinstance(error, PolarFieldError):
        details = {key: value for key, value in error.details.items() if key != "stage"}
        return {
            "error": error.error_name,
            "message": str(error),
            "stage": error.details.get("stage"),
            **details,
        }
    if isinstance(error, OSError):
        return {
            "error": "IO",
            "message": error.strerror or str(error),
            "stage": "read",
            "path": None if error.filename is None else str(error.filename),
        }
    if isinstance(error, orjson.JSONDecodeError):
        return {"error": "Parse", "message": str(error), "stage": "read"}
    return {"error": "InvalidConfig", "message": str(error), "stage": "config"}


def _write(document: dict[str, Any]) -> None:
    sys.stdout.write(dump_json(document).decode() + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.from_args(args)
        document = COMMANDS[args.command](config)
    except (PolarFieldError, OSError, ValueError) as error:
        code = exit_code(error)
        LOGGER.warning("%s failed with exit code %d: %s", args.command, code, error)
        _write(error_document(error))
        return code
    _write(document)
    return EXIT_OK

