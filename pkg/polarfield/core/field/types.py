"""Field types."""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING, TypedDict

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt


class FieldClass(Enum):
    """Type of a linear field by the sign of its Jacobian determinant."""

    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"

    def __str__(self) -> str:
        """Return class name."""
        return self.value


class SingularLocusKind(Enum):
    """Zero set of a linear field ``a z + b conj(z) + c``."""

    POINT = "point"
    NONE = "none"
    LINE = "line"
    PLANE = "plane"

    def __str__(self) -> str:
        """Return kind name."""
        return self.value


class SingularLocus(TypedDict):
    """Zero set; a line is ``point + s * direction`` for real ``s``."""

    kind: SingularLocusKind
    point: complex | None
    direction: complex | None


class Classification(TypedDict):
    """Class and Jacobian determinant of a linear field."""

    kind: FieldClass
    det: float


class FieldSample(TypedDict):
    """Field value at one surface point, one entry per branch."""

    face: int
    bary: list[float]
    values: list[complex]
    log_scale: float
    phase: float


class TrivialConnection(TypedDict):
    """Minimum norm adjustment angles and the field they integrate to.

    ``dual_theta`` is indexed by mesh edge and oriented from the slot 0 face
    to the slot 1 face; boundary edges hold zero.
    """

    dual_theta: npt.NDArray[np.float64]
    face_field: npt.NDArray[np.complex128]
    beveled_theta: npt.NDArray[np.float64]
    holonomy_residual: float
    dropped_rows: list[int]


class Streamline(TypedDict):
    """Polyline traced through the field."""

    faces: list[int]
    points: npt.NDArray[np.float64]
    stop: str


class QualityReport(TypedDict):
    """Field comparison between two triangulations of one surface."""

    n_points: int
    deviation: npt.NDArray[np.float64]
    mean_deviation: float
    max_deviation: float
    indices_a: list[str]
    indices_b: list[str]
