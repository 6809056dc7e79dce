"""Mesh types."""

from __future__ import annotations

from enum import Enum, IntEnum
from typing import TYPE_CHECKING, TypedDict

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt


class MeshFormat(Enum):
    """Supported mesh file formats."""

    OBJ = "obj"
    OFF = "off"

    def __str__(self) -> str:
        """Return format name."""
        return self.value

    @classmethod
    def from_suffix(cls, suffix: str) -> MeshFormat:
        """Return format for a file suffix such as ``.obj``."""
        return cls(suffix.lower().lstrip("."))


class PathPieceKind(IntEnum):
    """Kind of a piece produced when splitting a surface path."""

    SEGMENT = 0
    CROSSING = 1
    VERTEX = 2


class LocalBasis(TypedDict):
    """Per face orthonormal frames.

    ``corner_coords[f, c]`` is corner ``c`` of face ``f`` in complex form, with
    corner 0 at the origin and corner 1 on the positive real axis.
    """

    origin: npt.NDArray[np.float64]
    e1: npt.NDArray[np.float64]
    e2: npt.NDArray[np.float64]
    normal: npt.NDArray[np.float64]
    corner_coords: npt.NDArray[np.complex128]


class FlapGeometry(TypedDict):
    """Two triangles across an interior edge unfolded into the plane.

    Vertex ``k`` sits at the origin, ``i`` on the positive real axis, ``j``
    above it (face ``face_f``) and ``l`` below it (face ``face_g``).
    """

    edge: int
    face_f: int
    face_g: int
    vertices: tuple[int, int, int, int]
    points: npt.NDArray[np.complex128]
    rotation_f: complex
    rotation_g: complex
    connection: float


class EdgeLoop(TypedDict):
    """Closed primal loop given as a vertex cycle and its signed edges."""

    vertices: list[int]
    edges: list[int]
    signs: list[int]


class BoundaryLoop(TypedDict):
    """Boundary loop traversed with the surface on its left."""

    vertices: list[int]
    halfedges: list[int]
    edges: list[int]
    curvature: float


class PathSegment(TypedDict):
    """Straight piece of a path inside one face."""

    kind: PathPieceKind
    face: int
    start: npt.NDArray[np.float64]
    end: npt.NDArray[np.float64]


class PathCrossing(TypedDict):
    """Point where a path moves from one face to a neighbour.

    ``t`` is measured along the edge from ``edges[edge][0]``.
    """

    kind: PathPieceKind
    edge: int
    from_face: int
    to_face: int
    t: float


class PathVertexPassing(TypedDict):
    """Point where a path moves between two faces through a shared vertex."""

    kind: PathPieceKind
    vertex: int
    from_face: int
    to_face: int


PathPiece = PathSegment | PathCrossing | PathVertexPassing
