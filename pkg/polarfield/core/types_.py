"""Custom types for polarfield."""

from .bevel.types import BeveledEdgeKind, BeveledFaceKind, CycleOperators
from .discretize.types import FlapOperator, MassMatrices
from .field.types import (
    Classification,
    FieldClass,
    FieldSample,
    QualityReport,
    SingularLocus,
    SingularLocusKind,
    Streamline,
    TrivialConnection,
)
from .mesh.types import BoundaryLoop, EdgeLoop, FlapGeometry, LocalBasis, MeshFormat
from .prescribe.types import (
    AlignmentCurve,
    CurvePoint,
    Prescription,
    Singularity,
    SingularityKind,
)
from .solve.types import (
    AlignmentResult,
    ComparisonReport,
    IntegrationResult,
    PipelineResult,
    SigmaSolution,
    SolverReport,
    ThetaSolution,
)

__all__ = [
    "MeshFormat",
    "LocalBasis",
    "FlapGeometry",
    "EdgeLoop",
    "BoundaryLoop",
    "BeveledFaceKind",
    "BeveledEdgeKind",
    "CycleOperators",
    "SingularityKind",
    "Singularity",
    "Prescription",
    "CurvePoint",
    "AlignmentCurve",
    "FlapOperator",
    "MassMatrices",
    "ThetaSolution",
    "SigmaSolution",
    "IntegrationResult",
    "AlignmentResult",
    "SolverReport",
    "PipelineResult",
    "ComparisonReport",
    "FieldClass",
    "SingularLocusKind",
    "SingularLocus",
    "Classification",
    "FieldSample",
    "TrivialConnection",
    "Streamline",
    "QualityReport",
]
