"""Custom exceptions."""

from typing import Any


class PolarFieldError(Exception):
    """Base error for polarfield.

    Extra keyword arguments are kept in ``details`` and end up in the JSON
    error document written by the cli.
    """

    def __init__(self, msg: str = "", **details: Any) -> None:  # noqa: ANN401
        """Initialize error with optional details."""
        super().__init__(msg)
        self.details = details

    @property
    def error_name(self) -> str:
        """Returns error name as reported by the cli."""
        return type(self).__name__.removesuffix("Error")


class MeshError(PolarFieldError):
    """Error raise when a mesh is unusable."""


class PrescriptionError(PolarFieldError):
    """Error raise when a prescription is invalid for a mesh."""


class SolverError(PolarFieldError):
    """Error raise when a numerical stage fails."""


class FieldError(PolarFieldError):
    """Error raise when a field query is invalid."""


class ParseError(MeshError):
    """Error raise when a mesh or prescription file cannot be parsed."""


class NonManifoldError(MeshError):
    """Error raise when mesh is not an edge and vertex manifold."""


class InconsistentOrientationError(NonManifoldError):
    """Error raise when neighbouring faces disagree on orientation."""


class NonTriangularError(MeshError):
    """Error raise when mesh contains a polygon that is not a triangle."""


class DegenerateFaceError(MeshError):
    """Error raise when a face has (near) zero area."""


class BoundaryEdgeError(MeshError):
    """Error raise when an interior edge is required but a boundary one is given."""


class BoundaryVertexError(MeshError):
    """Error raise when an interior vertex is required but a boundary one is given."""


class PathError(MeshError):
    """Error raise when a surface path cannot be split into face pieces."""


class IndexSumMismatchError(PrescriptionError):
    """Error raise when singularity indices violate the index theorem."""


class DuplicateElementError(PrescriptionError):
    """Error raise when a mesh element carries more than one singularity."""


class OutOfRangeParameterError(PrescriptionError):
    """Error raise when a parameter is outside its valid range."""


class DegeneratePlacementError(PrescriptionError):
    """Error raise when a singularity placement collapses onto a sub element."""


class NonVertexSingularityError(PrescriptionError):
    """Error raise when an operation only supports vertex singularities."""


class InconsistentLiftError(SolverError):
    """Error raise when a primal loop cannot be lifted to the beveled mesh."""


class RankDeficientConstraintsError(SolverError):
    """Error raise when constraint rows are dependent beyond the known redundancy."""


class SolveFailureError(SolverError):
    """Error raise when a linear system cannot be solved accurately."""


class EmptyFeasibleRangeError(SolverError):
    """Error raise when no phase is admissible at an edge singularity."""


class MixedSignKernelError(SolverError):
    """Error raise when a scale kernel has entries of both signs."""


class InfeasibleError(SolverError):
    """Error raise when the scale program has no feasible point."""


class NonConvergenceError(SolverError):
    """Error raise when an iterative solver hits its iteration cap."""


class GaugeAmbiguityError(SolverError):
    """Error raise when a mesh component has no pinned corner."""


class InconsistentAlignmentError(SolverError):
    """Error raise when alignment constraints cannot be satisfied."""


class DegenerateTriangleError(FieldError):
    """Error raise when corner coordinates do not span a triangle."""


class ZeroAtFractionalPowerError(FieldError):
    """Error raise when a fractional root of a zero value is requested."""


class AtSingularityError(FieldError):
    """Error raise when a query point coincides with a field zero."""


class UnderResolvedPathError(FieldError):
    """Error raise when a path is too coarse to follow the field phase."""
