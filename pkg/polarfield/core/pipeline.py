"""Stage orchestration of a design run and of the baseline comparison."""

from __future__ import annotations

from contextlib import contextmanager
from fractions import Fraction
import logging
import time
from typing import TYPE_CHECKING

import numpy as np

from polarfield.core.bevel.complex import build_beveled
from polarfield.core.bevel.operators import build_operators
from polarfield.core.discretize.flaps import build_D, build_L, flap_mass
from polarfield.core.discretize.singular import build_DS_MS, build_index_laplacian
from polarfield.core.discretize.types import MassMatrices
from polarfield.core.exceptions import FieldError, NonVertexSingularityError, PolarFieldError
from polarfield.core.field.energy import dirichlet_energy
from polarfield.core.field.power_linear import PowerLinearField
from polarfield.core.field.trivial_connections import trivial_connections
from polarfield.core.field.winding import singularity_loop, winding_number
from polarfield.core.prescribe.targets import assemble_targets
from polarfield.core.prescribe.types import SingularityKind
from polarfield.core.prescribe.validate import snap_placements, validate
from polarfield.core.solve.alignment import solve_alignment
from polarfield.core.solve.exponents import interpolate_indices
from polarfield.core.solve.integrate import integrate_field
from polarfield.core.solve.part_edge import compute_part_edge_theta
from polarfield.core.solve.scales import assemble_scale_constraints
from polarfield.core.solve.sigma import solve_sigma
from polarfield.core.solve.theta import cycle_constraints, solve_theta
from polarfield.core.solve.types import ComparisonReport, PipelineResult, SolverReport
from polarfield.log_utils import collect_warnings

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.mesh.surface import SurfaceMesh
    from polarfield.core.prescribe.types import AlignmentCurve, Prescription, Singularity
    from polarfield.core.solve.types import AlignmentResult, PartEdgePhases

LOGGER = logging.getLogger(__name__)


@contextmanager
def stage(name: str, timings: dict[str, float]) -> Iterator[None]:
    """Time a pipeline stage and tag escaping errors with its name."""
    start = time.perf_counter()
    try:
        yield
    except PolarFieldError as error:
        error.details.setdefault("stage", name)
        raise
    finally:
        timings[name] = time.perf_counter() - start
        LOGGER.debug("Stage %s took %.3f s", name, timings[name])


def singularity_key(singularity: Singularity) -> str:
    """Return ``kind:element`` label used in reports."""
    return f"{singularity['kind']}:{singularity['element']}"


def prepare_prescription(
    prescription: Prescription,
    mesh: SurfaceMesh,
    n: int | None = None,
) -> Prescription:
    """Apply the symmetry order override, snap placements and validate.

    Raises:
        PrescriptionError: Prescription does not fit the mesh.
        MeshError: Singularity sits on a boundary element.
    """
    prescription = prescription.copy()
    if n is not None:
        prescription.n = n
    prescription = snap_placements(prescription, mesh)
    validate(prescription, mesh)
    return prescription


def oracle_indices(
    field: PowerLinearField,
    prescription: Prescription,
    theta: npt.NDArray[np.float64] | None = None,
    bm: BeveledMesh | None = None,
) -> dict[str, str | None]:
    """Return measured index per prescribed singularity, None where unmeasurable."""
    edge_points = {
        item["element"]: item.get("t", 0.5) for item in prescription.of_kind(SingularityKind.EDGE)
    }
    indices: dict[str, str | None] = {}
    for singularity in prescription.singularities:
        key = singularity_key(singularity)
        try:
            loop = singularity_loop(field.mesh, singularity)
            indices[key] = str(winding_number(field, loop, theta, bm, edge_points))
        except FieldError as error:
            LOGGER.warning("Index of %s not measured: %s", key, error)
            indices[key] = None
    return indices


def _anchor_field(
    field: PowerLinearField,
    alignment: AlignmentResult,
    bm: BeveledMesh,
    n: int,
) -> PowerLinearField:
    """Rotate every anchored component so the field follows its first curve."""
    _, labels = bm.corner_components()
    face_labels = labels[3 * np.arange(field.mesh.n_faces)]
    for anchor in alignment["anchors"]:
        value = field.power(anchor["face"], np.asarray(anchor["bary"]))
        if value == 0:
            LOGGER.warning("Field vanishes at the anchor of component %d", anchor["component"])
            continue
        angle = n * anchor["tangent"] - float(np.angle(value))
        faces = np.flatnonzero(face_labels == anchor["component"])
        field = field.rotated(angle, faces)
    return field


def _part_edges(
    theta: npt.NDArray[np.float64],
    bm: BeveledMesh,
    prescription: Prescription,
) -> dict[int, PartEdgePhases]:
    return {
        item["element"]: compute_part_edge_theta(
            theta,
            bm,
            item["element"],
            item.get("t", 0.5),
            item["index"],
        )
        for item in prescription.of_kind(SingularityKind.EDGE)
    }


def _max(values: npt.ArrayLike) -> float:
    return float(np.abs(np.asarray(values)).max(initial=0.0))


def run_pipeline(
    mesh: SurfaceMesh,
    prescription: Prescription,
    lambda_j: float = 50.0,
    lambda_s: float = 50.0,
    eps: float = 1e-6,
    curves: Sequence[AlignmentCurve] | None = None,
    n: int | None = None,
    threads: str | None = None,
) -> PipelineResult:
    """Design a field from a prescription.

    Stages run in order: validation, beveling, discretization, the phase
    solve, optional curve alignment, exponent interpolation, part edge
    phases, scale constraints, the scale solve, integration and the index
    check. Every escaping error carries the name of its stage.

    Args:
        mesh (SurfaceMesh): Surface to design on.
        prescription (Prescription): Singularities and loop indices.
        lambda_j (float): Jump penalty.
        lambda_s (float): Isotropy weight.
        eps (float): Lower bound on scales.
        curves (Sequence[AlignmentCurve] | None): Curves the field should follow.
        n (int | None): Symmetry order override.
        threads (str | None): Thread count recorded in the report.

    Returns:
        PipelineResult: Field, intermediates and solver report.
    """
    timings: dict[str, float] = {}
    wall_start = time.perf_counter()
    with collect_warnings() as collector:
        with stage("validate", timings):
            prescription = prepare_prescription(prescription, mesh, n)
        n = prescription.n

        with stage("bevel", timings):
            bm = build_beveled(mesh)
            ops = build_operators(mesh, bm)

        with stage("discretize", timings):
            flaps = build_D(bm, mesh, lambda_j)
            m_e = flap_mass(mesh)
            laplacian, q = build_L(flaps, m_e, ops["d0"])
            targets = assemble_targets(prescription, bm)
            d_s, m_s, b_s = build_DS_MS(targets, flaps, bm)
            _, m_i = build_index_laplacian(mesh)
            mass = MassMatrices(M_E=m_e, M_S=m_s, D_S=d_s, b_S=b_s, M_I=m_i)

        with stage("theta", timings):
            constraints = cycle_constraints(ops, bm, prescription)
            theta_solution = solve_theta(q, mass, constraints, lambda_s)
            theta = theta_solution["theta"]

        alignment = None
        if curves:
            with stage("alignment", timings):
                alignment = solve_alignment(theta, curves, bm, ops["d0"], n)
                theta = alignment["theta"]

        with stage("exponents", timings):
            exponents = interpolate_indices(theta, prescription, mesh)

        with stage("part_edge", timings):
            part_edges = _part_edges(theta, bm, prescription)

        with stage("scales", timings):
            scale_constraints = assemble_scale_constraints(
                theta,
                bm,
                prescription,
                exponents,
                part_edges,
                crossings=alignment["crossings"] if alignment is not None else (),
            )

        with stage("sigma", timings):
            sigma_solution = solve_sigma(laplacian, scale_constraints, bm, eps)

        with stage("integrate", timings):
            integration = integrate_field(
                theta,
                sigma_solution["sigma"],
                bm,
                n,
                sigma_solution["pins"],
            )
            field = PowerLinearField.from_corner_values(
                mesh,
                integration["values"].reshape(-1, 3),
                theta,
                exponents,
                n,
            )
            if alignment is not None:
                field = _anchor_field(field, alignment, bm, n)

        with stage("oracle", timings):
            indices = oracle_indices(field, prescription, theta, bm)
            energy = dirichlet_energy(theta, q, mesh)

    timings["total"] = time.perf_counter() - wall_start
    report = SolverReport(
        n=n,
        lambda_j=float(lambda_j),
        lambda_s=float(lambda_s),
        eps=float(eps),
        threads=threads or "",
        residuals={
            "cycle": theta_solution["cycle_residual"],
            "homology": theta_solution["homology_residual"],
            "boundary": theta_solution["boundary_residual"],
            "kkt": theta_solution["kkt_residual"],
            "scale_constraint": sigma_solution["constraint_residual"],
            "complementarity": sigma_solution["complementarity"],
            "integration": _max(integration["residuals"]),
        },
        objectives={
            "dirichlet": theta_solution["objective_dirichlet"],
            "isotropy": theta_solution["objective_isotropy"],
            "scale": sigma_solution["objective"],
            "regularization": theta_solution["regularization"],
        },
        iterations={"sigma": sigma_solution["iterations"]},
        dropped_rows=list(constraints["dropped_rows"]),
        timings=timings,
        exponents={
            str(face): int(exponent)
            for face, exponent in enumerate(exponents)
            if int(exponent) != 1
        },
        warnings=list(collector.messages),
        energy=energy,
        indices=indices,
    )
    if alignment is not None:
        report["alignment"] = {
            "constraint_residual": alignment["constraint_residual"],
            "rows": float(alignment["n_rows"]),
            "correction": _max(alignment["alpha"]),
        }
    LOGGER.info("Pipeline finished in %.3f s, energy %.6g", timings["total"], energy)
    return PipelineResult(
        mesh=mesh,
        prescription=prescription,
        bm=bm,
        ops=ops,
        q=q,
        laplacian=laplacian,
        flaps=flaps,
        mass=mass,
        theta=theta,
        theta_solution=theta_solution,
        alignment=alignment,
        exponents=exponents,
        part_edges=part_edges,
        scale_constraints=scale_constraints,
        sigma_solution=sigma_solution,
        integration=integration,
        field=field,
        report=report,
    )


def run_comparison(
    mesh: SurfaceMesh,
    prescription: Prescription,
    lambda_j: float = 50.0,
    lambda_s: float = 50.0,
    eps: float = 1e-6,
    n: int | None = None,
) -> tuple[PipelineResult, ComparisonReport]:
    """Run the design and the trivial connections baseline on one prescription.

    Both phase forms are scored with the same Dirichlet form, and both fields
    are checked with the winding oracle.

    Raises:
        NonVertexSingularityError: Prescription has edge or face singularities.
    """
    timings: dict[str, float] = {}
    prescription = prescription.copy()
    if n is not None:
        prescription.n = n
    if not prescription.is_vertex_only:
        msg = "Comparison needs a vertex only prescription"
        raise NonVertexSingularityError(msg, stage="validate")

    result = run_pipeline(mesh, prescription, lambda_j, lambda_s, eps)
    prescription = result["prescription"]
    with collect_warnings() as collector, stage("baseline", timings):
        baseline = trivial_connections(mesh, prescription, result["bm"], result["ops"])
        n = prescription.n
        baseline_field = PowerLinearField(
            mesh,
            np.repeat(baseline["face_field"][:, None], 3, axis=1),
            np.ones(mesh.n_faces, dtype=np.int64),
            n,
        )
        baseline_indices = oracle_indices(
            baseline_field,
            prescription,
            baseline["beveled_theta"],
            result["bm"],
        )
        energy_baseline = dirichlet_energy(baseline["beveled_theta"], result["q"], mesh)

    energy_ours = result["report"]["energy"]
    ratio = energy_ours / energy_baseline if energy_baseline > 0.0 else None
    timings.update({f"design_{name}": value for name, value in result["report"]["timings"].items()})
    report = ComparisonReport(
        n=n,
        lambda_j=float(lambda_j),
        lambda_s=float(lambda_s),
        energy_ours=energy_ours,
        energy_baseline=energy_baseline,
        ratio=ratio,
        indices_ours=result["report"]["indices"],
        indices_baseline=baseline_indices,
        prescribed={
            singularity_key(item): str(Fraction(item["index"], n))
            for item in prescription.singularities
        },
        holonomy_residual=baseline["holonomy_residual"],
        dropped_rows=baseline["dropped_rows"],
        timings=timings,
        warnings=result["report"]["warnings"] + collector.messages,
    )
    LOGGER.info(
        "Energy %.6g against baseline %.6g, ratio %s",
        energy_ours,
        energy_baseline,
        "n/a" if ratio is None else f"{ratio:.4f}",
    )
    return result, report
