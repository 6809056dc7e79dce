"""Prescription validation against a mesh."""

from __future__ import annotations

from fractions import Fraction
import logging
from typing import TYPE_CHECKING

import numpy as np

from polarfield.core.exceptions import (
    BoundaryEdgeError,
    BoundaryVertexError,
    DegeneratePlacementError,
    DuplicateElementError,
    IndexSumMismatchError,
    OutOfRangeParameterError,
)
from polarfield.core.mesh.topology import boundary_loops
from polarfield.core.prescribe.types import Prescription, Singularity, SingularityKind

if TYPE_CHECKING:
    from polarfield.core.mesh.surface import SurfaceMesh

LOGGER = logging.getLogger(__name__)

PLACEMENT_TOLERANCE = 1e-9


def homology_count(mesh: SurfaceMesh, n_loops: int | None = None) -> int:
    """Return number of homology generators ``2g`` summed over components."""
    n_components, _ = mesh.connected_components()
    if n_loops is None:
        n_loops = len(boundary_loops(mesh))
    return 2 * n_components - mesh.euler_characteristic - n_loops


def _element_count(mesh: SurfaceMesh, kind: SingularityKind) -> int:
    if kind is SingularityKind.VERTEX:
        return mesh.n_vertices
    if kind is SingularityKind.EDGE:
        return mesh.n_edges
    return mesh.n_faces


def _check_placement(item: Singularity) -> None:
    if item["kind"] is SingularityKind.EDGE:
        if "t" not in item:
            msg = f"Edge singularity on edge {item['element']} needs a parameter t"
            raise OutOfRangeParameterError(msg, element=item["element"])
        t = item["t"]
        if not 0.0 <= t <= 1.0:
            msg = f"Edge parameter {t} is outside [0, 1]"
            raise OutOfRangeParameterError(msg, element=item["element"], t=t)
        if min(t, 1.0 - t) < PLACEMENT_TOLERANCE:
            msg = f"Edge parameter {t} collapses onto a vertex"
            raise DegeneratePlacementError(msg, element=item["element"], t=t)
    elif item["kind"] is SingularityKind.FACE:
        bary = np.asarray(item.get("bary", [1 / 3, 1 / 3, 1 / 3]), dtype=np.float64)
        if bary.shape != (3,) or np.any(bary < 0.0) or abs(bary.sum() - 1.0) > PLACEMENT_TOLERANCE:
            msg = f"Invalid barycentric coordinates {bary.tolist()}"
            raise OutOfRangeParameterError(msg, element=item["element"])
        if bary.min() < PLACEMENT_TOLERANCE:
            msg = f"Barycentric coordinates {bary.tolist()} collapse onto an edge"
            raise DegeneratePlacementError(msg, element=item["element"])


def validate(prescription: Prescription, mesh: SurfaceMesh) -> None:
    """Check a prescription against mesh topology.

    Raises:
        OutOfRangeParameterError: N, ids, indices or placements are out of range.
        DegeneratePlacementError: A placement touches a lower dimensional element.
        BoundaryEdgeError: Edge singularity on a boundary edge.
        BoundaryVertexError: Vertex singularity on a boundary vertex.
        DuplicateElementError: Element carries two singularities.
        IndexSumMismatchError: Indices violate the index theorem.
    """
    n = prescription.n
    if n < 1:
        msg = f"Symmetry degree must be >= 1, got {n}"
        raise OutOfRangeParameterError(msg, n=n)

    seen: set[tuple[SingularityKind, int]] = set()
    for item in prescription.singularities:
        kind, element, index = item["kind"], item["element"], item["index"]
        if not 0 <= element < _element_count(mesh, kind):
            msg = f"{kind} {element} does not exist"
            raise OutOfRangeParameterError(msg, element=element)
        if index == 0:
            msg = f"Singularity on {kind} {element} has index 0"
            raise OutOfRangeParameterError(msg, element=element)
        if (kind, element) in seen:
            msg = f"{kind} {element} carries more than one singularity"
            raise DuplicateElementError(msg, element=element)
        seen.add((kind, element))
        _check_placement(item)

        if kind is SingularityKind.EDGE and mesh.is_boundary_edge[element]:
            msg = f"Edge {element} is on the boundary"
            raise BoundaryEdgeError(msg, element=element)
        if kind is SingularityKind.VERTEX and mesh.is_boundary_vertex[element]:
            msg = f"Vertex {element} is on the boundary"
            raise BoundaryVertexError(msg, element=element)
        if kind is SingularityKind.FACE and n == 1 and not prescription.power and abs(index) != 1:
            msg = f"Linear fields need face indices +-1, face {element} has {index}"
            raise OutOfRangeParameterError(msg, element=element, index=index)

    loops = boundary_loops(mesh)
    expected_generators = homology_count(mesh, len(loops))
    if prescription.homology and len(prescription.homology) != expected_generators:
        msg = (
            f"Expected {expected_generators} homology indices, got {len(prescription.homology)}"
        )
        raise OutOfRangeParameterError(msg)
    if prescription.boundary and len(prescription.boundary) != len(loops):
        msg = f"Expected {len(loops)} boundary indices, got {len(prescription.boundary)}"
        raise OutOfRangeParameterError(msg)

    chi = mesh.euler_characteristic
    if prescription.index_sum() != n * chi:
        index_sum = Fraction(prescription.index_sum(), n)
        msg = f"Index sum {index_sum} does not match Euler characteristic {chi}"
        raise IndexSumMismatchError(msg, index_sum=str(index_sum), euler_characteristic=chi)
    LOGGER.debug("Prescription valid: %r", prescription)


def _snap_face(mesh: SurfaceMesh, item: Singularity) -> Singularity:
    bary = np.asarray(item.get("bary", [1 / 3, 1 / 3, 1 / 3]), dtype=np.float64)
    if bary.shape != (3,) or np.any(bary < 0.0):
        return item
    large = np.flatnonzero(bary >= PLACEMENT_TOLERANCE)
    face = mesh.faces[item["element"]]
    if len(large) == 1:
        return Singularity(
            kind=SingularityKind.VERTEX,
            element=int(face[large[0]]),
            index=item["index"],
        )
    if len(large) == 2:  # noqa: PLR2004
        a, b = int(face[large[0]]), int(face[large[1]])
        weight_a, weight_b = bary[large[0]], bary[large[1]]
        edge = mesh.edge_index(a, b)
        weight_high = weight_b if a < b else weight_a
        return Singularity(
            kind=SingularityKind.EDGE,
            element=edge,
            index=item["index"],
            t=float(weight_high / (weight_a + weight_b)),
        )
    return item


def snap_placements(prescription: Prescription, mesh: SurfaceMesh) -> Prescription:
    """Move placements within tolerance of a sub element onto that element.

    Returns:
        Prescription: New prescription, the input is not modified.
    """
    snapped: list[Singularity] = []
    for item in prescription.singularities:
        new_item = item
        if item["kind"] is SingularityKind.EDGE and "t" in item:
            t = item["t"]
            if 0.0 <= t < PLACEMENT_TOLERANCE or 1.0 - PLACEMENT_TOLERANCE < t <= 1.0:
                vertex = int(mesh.edges[item["element"], 0 if t < 0.5 else 1])  # noqa: PLR2004
                new_item = Singularity(
                    kind=SingularityKind.VERTEX,
                    element=vertex,
                    index=item["index"],
                )
        elif item["kind"] is SingularityKind.FACE and 0 <= item["element"] < mesh.n_faces:
            new_item = _snap_face(mesh, item)
        if new_item is not item:
            LOGGER.warning(
                "Snapped %s singularity on %d to %s %d",
                item["kind"],
                item["element"],
                new_item["kind"],
                new_item["element"],
            )
        snapped.append(new_item)
    result = prescription.copy()
    result.singularities[:] = snapped
    return result
