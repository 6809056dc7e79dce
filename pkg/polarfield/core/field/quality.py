"""Field comparison across two triangulations of one surface."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.spatial import cKDTree

from polarfield.core.exceptions import FieldError, ZeroAtFractionalPowerError
from polarfield.core.field.types import QualityReport
from polarfield.core.field.winding import winding_number
from polarfield.core.mesh.geometry import local_basis

if TYPE_CHECKING:
    from collections.abc import Sequence

    import numpy.typing as npt

    from polarfield.core.field.power_linear import PowerLinearField
    from polarfield.core.mesh.paths import Waypoint
    from polarfield.core.mesh.surface import SurfaceMesh

LOGGER = logging.getLogger(__name__)

NEIGHBOURS = 8


def locate_points(
    mesh: SurfaceMesh,
    points: npt.ArrayLike,
    tree: cKDTree | None = None,
) -> list[Waypoint]:
    """Return face and barycentric coordinates of 3D points near ``mesh``.

    Candidate faces come from the nearest face centroids; the point is
    projected into each candidate plane and the face with the smallest
    clamping error wins.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    corners = mesh.positions[mesh.faces]
    if tree is None:
        tree = cKDTree(corners.mean(axis=1))
    basis = local_basis(mesh)
    count = min(NEIGHBOURS, mesh.n_faces)
    _, candidates = tree.query(points, k=count)
    candidates = np.asarray(candidates).reshape(len(points), count)
    located: list[Waypoint] = []
    for point, faces in zip(points, candidates, strict=True):
        best: tuple[float, int, npt.NDArray[np.float64]] | None = None
        for face in faces:
            offset = point - basis["origin"][face]
            z = complex(offset @ basis["e1"][face], offset @ basis["e2"][face])
            coords = basis["corner_coords"][face]
            system = np.array([coords.real, coords.imag, np.ones(3)])
            bary = np.linalg.solve(system, np.array([z.real, z.imag, 1.0]))
            clamped = np.clip(bary, 0.0, None)
            clamped /= clamped.sum()
            error = float(np.linalg.norm(clamped @ corners[face] - point))
            if best is None or error < best[0]:
                best = (error, int(face), clamped)
        if best is None:
            msg = "Mesh has no faces"
            raise FieldError(msg)
        located.append((best[1], best[2]))
    return located


def _unit_directions(
    field: PowerLinearField,
    waypoints: Sequence[Waypoint],
) -> list[complex | None]:
    directions: list[complex | None] = []
    for face, bary in waypoints:
        try:
            value = field.evaluate(face, bary, normalize=True)
        except ZeroAtFractionalPowerError:
            directions.append(None)
            continue
        directions.append(value if value != 0 else None)
    return directions


def compare_triangulations(
    field_a: PowerLinearField,
    mesh_a: SurfaceMesh,
    field_b: PowerLinearField,
    mesh_b: SurfaceMesh,
    points: npt.ArrayLike,
    loops_a: Sequence[Sequence[Waypoint]] = (),
    loops_b: Sequence[Sequence[Waypoint]] = (),
) -> QualityReport:
    """Compare two fields on common 3D surface points.

    Directions are lifted to 3D, projected into the tangent plane of the
    first mesh and compared modulo ``2 pi / N``. Loop indices of both fields
    are reported for structural comparison.

    Raises:
        FieldError: Fields have different symmetry orders or do not live on
            the given meshes.
    """
    if field_a.n != field_b.n:
        msg = f"Symmetry orders differ: {field_a.n} and {field_b.n}"
        raise FieldError(msg)
    if field_a.mesh is not mesh_a or field_b.mesh is not mesh_b:
        msg = "Fields must be defined on the compared meshes"
        raise FieldError(msg)
    n = field_a.n
    located_a = locate_points(mesh_a, points)
    located_b = locate_points(mesh_b, points)
    basis = local_basis(mesh_a)
    directions_a = _unit_directions(field_a, located_a)
    directions_b = _unit_directions(field_b, located_b)

    deviation = np.full(len(located_a), np.nan)
    period = 2.0 * np.pi / n
    for position, ((face, _), value_a, value_b) in enumerate(
        zip(located_a, directions_a, directions_b, strict=True),
    ):
        if value_a is None or value_b is None:
            continue
        world_b = field_b.to_world(located_b[position][0], value_b)
        local_b = complex(world_b @ basis["e1"][face], world_b @ basis["e2"][face])
        difference = float(np.angle(local_b) - np.angle(value_a))
        deviation[position] = abs((difference + period / 2.0) % period - period / 2.0)

    valid = deviation[np.isfinite(deviation)]
    report = QualityReport(
        n_points=len(located_a),
        deviation=deviation,
        mean_deviation=float(valid.mean()) if valid.size else float("nan"),
        max_deviation=float(valid.max()) if valid.size else float("nan"),
        indices_a=[str(winding_number(field_a, loop)) for loop in loops_a],
        indices_b=[str(winding_number(field_b, loop)) for loop in loops_b],
    )
    LOGGER.info(
        "Compared %d points, mean deviation %.4f rad",
        report["n_points"],
        report["mean_deviation"],
    )
    return report
