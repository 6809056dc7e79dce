"""Streamline tracing on the faces of a mesh."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from polarfield.core.exceptions import ZeroAtFractionalPowerError
from polarfield.core.field.types import Streamline
from polarfield.core.mesh.geometry import barycentric, transport_angle

if TYPE_CHECKING:
    from collections.abc import Sequence

    import numpy.typing as npt

    from polarfield.core.field.power_linear import PowerLinearField
    from polarfield.core.mesh.paths import Waypoint
    from polarfield.core.mesh.surface import SurfaceMesh

LOGGER = logging.getLogger(__name__)

ZERO_TOLERANCE = 1e-12
INSIDE_TOLERANCE = 1e-12


class _ZeroReachedError(Exception):
    """Trace step landed on a zero of the field."""


def _direction(
    field: PowerLinearField,
    face: int,
    z: complex,
    heading: complex | None,
) -> complex:
    bary = barycentric(field.mesh, face, z)
    if abs(field.power(face, bary)) <= ZERO_TOLERANCE:
        raise _ZeroReachedError
    try:
        branches = field.branches(face, bary, normalize=True)
    except ZeroAtFractionalPowerError as error:
        raise _ZeroReachedError from error
    if heading is None:
        return branches[0]
    # nearest branch keeps N > 1 traces continuous
    return max(branches, key=lambda value: (value * np.conj(heading)).real)


def _rk4_step(
    field: PowerLinearField,
    face: int,
    z: complex,
    heading: complex | None,
    step: float,
) -> tuple[complex, complex]:
    k1 = _direction(field, face, z, heading)
    k2 = _direction(field, face, z + 0.5 * step * k1, k1)
    k3 = _direction(field, face, z + 0.5 * step * k2, k1)
    k4 = _direction(field, face, z + step * k3, k1)
    return z + step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, k1


def _exit_corner(
    bary_start: npt.NDArray[np.float64],
    bary_end: npt.NDArray[np.float64],
) -> tuple[int, float]:
    """Return corner ``c`` whose halfedge is left first and the step fraction."""
    best_corner, best_fraction = -1, 1.0
    for corner in range(3):
        opposite = (corner + 2) % 3
        if bary_end[opposite] >= -INSIDE_TOLERANCE:
            continue
        denominator = bary_start[opposite] - bary_end[opposite]
        fraction = max(0.0, bary_start[opposite]) / denominator
        if fraction <= best_fraction:
            best_corner, best_fraction = corner, fraction
    return best_corner, best_fraction


def trace_streamline(
    field: PowerLinearField,
    face: int,
    bary: npt.ArrayLike,
    step: float,
    max_steps: int = 500,
) -> Streamline:
    """Follow the field from a seed with fourth order Runge-Kutta steps.

    Steps live in face coordinates. A step leaving the face is clipped to
    the exit edge and continues in the neighbour with the heading carried
    across by the connection. Tracing stops at the boundary, at a zero of
    the field or after ``max_steps`` steps.
    """
    mesh = field.mesh
    z = complex(np.dot(np.asarray(bary, dtype=np.float64), mesh.corner_coords[face]))
    heading: complex | None = None
    faces = [int(face)]
    points = [field.world_point(face, barycentric(mesh, face, z))]
    stop = "max_steps"
    for _ in range(max_steps):
        try:
            target, heading = _rk4_step(field, face, z, heading, step)
        except _ZeroReachedError:
            stop = "zero"
            break
        bary_start = barycentric(mesh, face, z)
        bary_end = barycentric(mesh, face, target)
        corner, fraction = _exit_corner(bary_start, bary_end)
        if corner < 0:
            z = target
            faces.append(face)
            points.append(field.world_point(face, bary_end))
            continue

        exit_bary = bary_start + fraction * (bary_end - bary_start)
        exit_bary = np.clip(exit_bary, 0.0, None)
        exit_bary /= exit_bary.sum()
        faces.append(face)
        points.append(field.world_point(face, exit_bary))
        halfedge = 3 * face + corner
        twin = int(mesh.twin[halfedge])
        if twin < 0:
            stop = "boundary"
            break
        tail, head = exit_bary[corner], exit_bary[(corner + 1) % 3]
        t = head / (tail + head)
        edge = int(mesh.halfedge_edge[halfedge])
        heading = heading * np.exp(1j * transport_angle(mesh, edge, face))
        face = twin // 3
        corners = mesh.corner_coords[face]
        z = complex((1.0 - t) * corners[(twin + 1) % 3] + t * corners[twin % 3])
    LOGGER.debug("Streamline with %d points stopped at %s", len(points), stop)
    return Streamline(faces=faces, points=np.asarray(points), stop=stop)


def seed_points(mesh: SurfaceMesh, count: int, seed: int = 0) -> list[Waypoint]:
    """Return area weighted random seeds, reproducible for a given ``seed``."""
    rng = np.random.default_rng(seed)
    weights = mesh.face_areas / mesh.face_areas.sum()
    faces = rng.choice(mesh.n_faces, size=count, p=weights)
    barys = rng.dirichlet(np.ones(3), size=count)
    return [(int(face), bary) for face, bary in zip(faces, barys, strict=True)]


def trace_streamlines(
    field: PowerLinearField,
    seeds: Sequence[Waypoint],
    step: float,
    max_steps: int = 500,
) -> list[Streamline]:
    """Trace one streamline per seed."""
    lines = [trace_streamline(field, face, bary, step, max_steps) for face, bary in seeds]
    LOGGER.info("Traced %d streamlines", len(lines))
    return lines
