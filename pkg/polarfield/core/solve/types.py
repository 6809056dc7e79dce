"""Solver types."""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING, NotRequired, TypedDict

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt
    from scipy import sparse

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.bevel.types import CycleOperators
    from polarfield.core.discretize.types import FlapOperator, MassMatrices
    from polarfield.core.field.power_linear import PowerLinearField
    from polarfield.core.mesh.surface import SurfaceMesh
    from polarfield.core.prescribe.types import Prescription


class ScaleRowSource(Enum):
    """Element that produced a scale constraint row."""

    FACE = "face"
    EDGE = "edge"
    ALIGNMENT = "alignment"

    def __str__(self) -> str:
        """Return source name."""
        return self.value


class CycleConstraints(TypedDict):
    """Stacked cycle rows ``[d1 (kept rows); H; B]`` and right sides."""

    matrix: sparse.csr_matrix
    rhs: npt.NDArray[np.float64]
    kept_rows: npt.NDArray[np.int64]
    dropped_rows: list[int]
    n_face_rows: int
    n_homology_rows: int
    n_boundary_rows: int


class ThetaSolution(TypedDict):
    """Result of the phase solve."""

    theta: npt.NDArray[np.float64]
    constraints: CycleConstraints
    objective_dirichlet: float
    objective_isotropy: float
    cycle_residual: float
    homology_residual: float
    boundary_residual: float
    kkt_residual: float
    regularization: float


class PartEdgePhases(TypedDict):
    """Phases around a point on a singular edge.

    ``psi_f`` and ``psi_g`` are the phases at the singular point in each
    face, measured from corner ``k`` of face ``f``. The four part-edge values
    split the edge-face into two half-cycles of ``pi * I`` each.
    """

    edge: int
    t: float
    index: int
    psi_f: float
    psi_g: float
    feasible: tuple[float, float]
    theta_sk_f: float
    theta_is_f: float
    theta_ks_g: float
    theta_si_g: float


class ScaleConstraints(TypedDict):
    """Pairwise proportionality rows ``sigma_a * hat_b - sigma_b * hat_a = 0``."""

    matrix: sparse.csr_matrix
    sources: list[ScaleRowSource]
    elements: list[int]


class SigmaSolution(TypedDict):
    """Result of the scale solve."""

    sigma: npt.NDArray[np.float64]
    pins: npt.NDArray[np.int64]
    iterations: int
    objective: float
    constraint_residual: float
    complementarity: float


class QPResult(TypedDict):
    """Result of a bound constrained convex QP."""

    x: npt.NDArray[np.float64]
    y: npt.NDArray[np.float64]
    z: npt.NDArray[np.float64]
    iterations: int
    objective: float
    primal_residual: float
    dual_residual: float
    complementarity: float


class IntegrationResult(TypedDict):
    """Corner values of the power field and per edge residuals."""

    values: npt.NDArray[np.complex128]
    pins: npt.NDArray[np.int64]
    residuals: npt.NDArray[np.float64]


class CurveAnchor(TypedDict):
    """First waypoint of the first curve of a component and its tangent angle."""

    component: int
    face: int
    bary: list[float]
    tangent: float


class AlignmentResult(TypedDict):
    """Alignment correction ``alpha`` and the corrected phases."""

    alpha: npt.NDArray[np.float64]
    theta: npt.NDArray[np.float64]
    constraint_residual: float
    n_rows: int
    crossings: list[tuple[int, float]]
    anchors: list[CurveAnchor]


class SolverReport(TypedDict):
    """Summary written to ``report.json``."""

    n: int
    lambda_j: float
    lambda_s: float
    eps: float
    threads: str
    residuals: dict[str, float]
    objectives: dict[str, float]
    iterations: dict[str, int]
    dropped_rows: list[int]
    timings: dict[str, float]
    exponents: dict[str, int]
    warnings: list[str]
    energy: float
    indices: dict[str, str | None]
    alignment: NotRequired[dict[str, float]]


class PipelineResult(TypedDict):
    """Every intermediate of one design run."""

    mesh: SurfaceMesh
    prescription: Prescription
    bm: BeveledMesh
    ops: CycleOperators
    q: sparse.csr_matrix
    laplacian: sparse.csr_matrix
    flaps: FlapOperator
    mass: MassMatrices
    theta: npt.NDArray[np.float64]
    theta_solution: ThetaSolution
    alignment: AlignmentResult | None
    exponents: npt.NDArray[np.int64]
    part_edges: dict[int, PartEdgePhases]
    scale_constraints: ScaleConstraints
    sigma_solution: SigmaSolution
    integration: IntegrationResult
    field: PowerLinearField
    report: SolverReport


class ComparisonReport(TypedDict):
    """Energies and oracle indices of a design and its trivial connection baseline."""

    n: int
    lambda_j: float
    lambda_s: float
    energy_ours: float
    energy_baseline: float
    ratio: float | None
    indices_ours: dict[str, str | None]
    indices_baseline: dict[str, str | None]
    prescribed: dict[str, str]
    holonomy_residual: float
    dropped_rows: list[int]
    timings: dict[str, float]
    warnings: list[str]
