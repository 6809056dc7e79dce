"""Beveled mesh types."""

from __future__ import annotations

from enum import IntEnum
from typing import TYPE_CHECKING, TypedDict

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt
    from scipy import sparse

    from polarfield.core.mesh.types import BoundaryLoop, EdgeLoop


class BeveledFaceKind(IntEnum):
    """Origin of a beveled face."""

    FACE = 0
    EDGE = 1
    VERTEX = 2


class BeveledEdgeKind(IntEnum):
    """Origin of a beveled edge."""

    SPLIT = 0
    JUMP = 1


class CycleOperators(TypedDict):
    """Discrete exterior derivatives and cycle rows of a beveled mesh.

    ``d1`` has one row per beveled face. ``homology`` and ``boundary`` hold
    the right side lifts of the generator and boundary loops. Curvature
    arrays hold the raw (N = 1) curvature of each cycle.
    """

    d0: sparse.csr_matrix
    d1: sparse.csr_matrix
    homology: sparse.csr_matrix
    boundary: sparse.csr_matrix
    face_curvature: npt.NDArray[np.float64]
    homology_curvature: npt.NDArray[np.float64]
    boundary_curvature: npt.NDArray[np.float64]
    generators: list[EdgeLoop]
    loops: list[BoundaryLoop]
