"""Winding number oracle and test loops around mesh elements.

The index of a field along a closed loop is read from two accumulated
angles, both measured in parallel transported face frames: ``S_U`` the
phase of the power field and ``S_T`` the turning of the loop tangent. The
enclosed curvature enters both and cancels in ``S_U - N S_T``.
"""

from __future__ import annotations

from fractions import Fraction
import logging
from typing import TYPE_CHECKING

import numpy as np

from polarfield.core.bevel.complex import build_beveled
from polarfield.core.exceptions import (
    AtSingularityError,
    BoundaryEdgeError,
    BoundaryVertexError,
    PathError,
    UnderResolvedPathError,
)
from polarfield.core.mesh.geometry import barycentric, face_point, flatten_flap, transport_angle
from polarfield.core.mesh.paths import edge_point_bary, split_path
from polarfield.core.mesh.types import PathPieceKind
from polarfield.core.prescribe.types import SingularityKind

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping, Sequence

    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.field.power_linear import PowerLinearField
    from polarfield.core.mesh.paths import Waypoint
    from polarfield.core.mesh.surface import SurfaceMesh
    from polarfield.core.prescribe.types import Singularity

LOGGER = logging.getLogger(__name__)

ACCEPTED_STEP = np.pi / 4
RESOLVED_STEP = np.pi / 2
MAX_DEPTH = 24
ZERO_TOLERANCE = 1e-14
LENGTH_TOLERANCE = 1e-12
INTEGRALITY_TOLERANCE = 1e-6


def _wrap(angle: float) -> float:
    return float((angle + np.pi) % (2.0 * np.pi) - np.pi)


def _root_phase(field: PowerLinearField, face: int, bary: npt.NDArray[np.float64]) -> float:
    value = field.root(face, bary)
    if abs(value) <= ZERO_TOLERANCE:
        msg = f"Loop passes through a zero of the field in face {face}"
        raise AtSingularityError(msg, face=face)
    return float(np.angle(value))


def _follow(
    phase_at: Callable[[float], float],
    face: int,
) -> float:
    """Return unwrapped change of ``phase_at`` over the parameter range ``[0, 1]``."""
    total = 0.0
    stack = [(0.0, 1.0, 0)]
    while stack:
        a, b, depth = stack.pop()
        step = _wrap(phase_at(b) - phase_at(a))
        if abs(step) < ACCEPTED_STEP:
            total += step
            continue
        if depth >= MAX_DEPTH:
            if abs(step) >= RESOLVED_STEP:
                msg = f"Phase step {step:.3f} in face {face} not resolved by refinement"
                raise UnderResolvedPathError(msg, face=face)
            total += step
            continue
        middle = 0.5 * (a + b)
        # pop order keeps the walk from start to end
        stack.append((middle, b, depth + 1))
        stack.append((a, middle, depth + 1))
    return total


def segment_phase_change(
    field: PowerLinearField,
    face: int,
    start: npt.NDArray[np.float64],
    end: npt.NDArray[np.float64],
) -> float:
    """Return change of the power field phase along a straight piece in ``face``.

    The root phase is followed by bisection until every step is below a
    quarter turn; the power field phase is the exponent times that change.

    Raises:
        UnderResolvedPathError: A step stays at or above a half turn at the
            deepest refinement.
    """
    start = np.asarray(start, dtype=np.float64)
    end = np.asarray(end, dtype=np.float64)

    def phase_at(s: float) -> float:
        return _root_phase(field, face, start + s * (end - start))

    return int(field.exponents[face]) * _follow(phase_at, face)


def _tracked_jump(
    field: PowerLinearField,
    edge: int,
    t: float,
    theta: npt.NDArray[np.float64],
    bm: BeveledMesh,
    split: float | None = None,
) -> float:
    """Return the slot 0 to slot 1 jump at ``t``, followed from a corner.

    The jump is followed from the nearer corner, or from the corner on the
    same side as ``split`` when the edge carries a zero at ``split``.
    """
    mesh = field.mesh
    face_f, face_g = mesh.edge_faces(edge)
    v0, v1 = (int(v) for v in mesh.edges[edge])
    if split is None:
        corner_t = 0.0 if t <= 0.5 else 1.0  # noqa: PLR2004
    else:
        corner_t = 0.0 if t < split else 1.0
    explicit = float(theta[bm.jump_edge(edge, v0 if corner_t == 0.0 else v1)])
    transport = field.n * transport_angle(mesh, edge, face_f)

    def raw(u: float) -> float:
        phase_g = _root_phase(field, face_g, edge_point_bary(mesh, face_g, edge, u))
        phase_f = _root_phase(field, face_f, edge_point_bary(mesh, face_f, edge, u))
        exponents = field.exponents
        return float(exponents[face_g] * phase_g - exponents[face_f] * phase_f - transport)

    def along(face: int) -> float:
        def phase_at(s: float) -> float:
            u = corner_t + s * (t - corner_t)
            return _root_phase(field, face, edge_point_bary(mesh, face, edge, u))

        return int(field.exponents[face]) * _follow(phase_at, face)

    return explicit + _wrap(raw(corner_t) - explicit) + along(face_g) - along(face_f)


def _crossing_jump(
    field: PowerLinearField,
    edge: int,
    from_face: int,
    to_face: int,
    t: float,
    theta: npt.NDArray[np.float64] | None,
    bm: BeveledMesh | None,
    split: float | None = None,
) -> tuple[float, float]:
    mesh = field.mesh
    transport = transport_angle(mesh, edge, from_face)
    before = field.exponents[from_face] * _root_phase(
        field, from_face, edge_point_bary(mesh, from_face, edge, t)
    )
    after = field.exponents[to_face] * _root_phase(
        field, to_face, edge_point_bary(mesh, to_face, edge, t)
    )
    base = 0.0
    if theta is not None and bm is not None:
        base = bm.jump_sign(edge, from_face) * _tracked_jump(field, edge, t, theta, bm, split)
    expected = before + field.n * transport + base
    return base + _wrap(after - expected), transport


def winding_number(
    field: PowerLinearField,
    waypoints: Sequence[Waypoint],
    theta: npt.NDArray[np.float64] | None = None,
    bm: BeveledMesh | None = None,
    edge_points: Mapping[int, float] | None = None,
) -> Fraction:
    """Return index of ``field`` along a closed waypoint loop.

    Args:
        field (PowerLinearField): Field to measure.
        waypoints (Sequence[Waypoint]): ``(face, barycentric)`` loop points,
            counterclockwise around the enclosed region. The loop closes
            back to the first waypoint.
        theta (np.ndarray | None): Beveled phases; when given, jumps across
            edges are followed along the edge from the explicit jump at the
            closer endpoint.
        bm (BeveledMesh | None): Beveled complex matching ``theta``.
        edge_points (Mapping[int, float] | None): Edge parameter of the zero on
            each singular edge. A crossing of such an edge is followed from
            the endpoint on its own side of the zero.

    Returns:
        Fraction: Index as a multiple of ``1 / N``.

    Raises:
        PathError: Loop contains no segment of positive length or runs
            through a vertex.
        UnderResolvedPathError: Loop too coarse to follow the field phase.
    """
    mesh = field.mesh
    if theta is not None and bm is None:
        bm = build_beveled(mesh)
    pieces = split_path(mesh, waypoints, closed=True)

    phase = 0.0
    # tangent events: direction of a segment, or transport of a crossing
    events: list[tuple[bool, float]] = []
    for piece in pieces:
        if piece["kind"] is PathPieceKind.SEGMENT:
            face = piece["face"]
            phase += segment_phase_change(field, face, piece["start"], piece["end"])
            step = face_point(mesh, face, piece["end"]) - face_point(mesh, face, piece["start"])
            if abs(step) > LENGTH_TOLERANCE * mesh.bbox_diagonal:
                events.append((True, float(np.angle(step))))
        elif piece["kind"] is PathPieceKind.CROSSING:
            jump, transport = _crossing_jump(
                field,
                piece["edge"],
                piece["from_face"],
                piece["to_face"],
                piece["t"],
                theta,
                bm,
                None if edge_points is None else edge_points.get(piece["edge"]),
            )
            phase += jump
            events.append((False, transport))
        else:
            msg = f"Winding loops may not pass through vertex {piece['vertex']}"
            raise PathError(msg, vertex=piece["vertex"])

    first = next((position for position, (is_segment, _) in enumerate(events) if is_segment), -1)
    if first < 0:
        msg = "Loop has no segment of positive length"
        raise PathError(msg)
    ordered = events[first:] + events[: first + 1]
    turning = 0.0
    previous = ordered[0][1]
    pending = 0.0
    for is_segment, value in ordered[1:]:
        if is_segment:
            turning += _wrap(value - (previous + pending))
            previous, pending = value, 0.0
        else:
            pending += value

    value = (phase - field.n * turning) / (2.0 * np.pi) + field.n
    numerator = round(value)
    if abs(value - numerator) > INTEGRALITY_TOLERANCE:
        LOGGER.warning("Winding value %.6f is not integral", value)
    LOGGER.debug("Winding number %d/%d over %d pieces", numerator, field.n, len(pieces))
    return Fraction(numerator, field.n)


def vertex_loop(mesh: SurfaceMesh, vertex: int, radius: float = 0.2) -> list[Waypoint]:
    """Return counterclockwise loop through every face around an interior vertex.

    Each waypoint sits at barycentric weight ``1 - radius`` on the vertex.

    Raises:
        BoundaryVertexError: Vertex is on the boundary.
    """
    if mesh.is_boundary_vertex[vertex]:
        msg = f"Vertex {vertex} is on the boundary"
        raise BoundaryVertexError(msg, vertex=vertex)
    waypoints: list[Waypoint] = []
    for halfedge in mesh.vertex_fans[vertex]:
        face, corner = int(halfedge) // 3, int(halfedge) % 3
        bary = np.full(3, radius / 2.0)
        bary[corner] = 1.0 - radius
        waypoints.append((face, bary))
    return waypoints


def _line_distance(point: complex, a: complex, b: complex) -> float:
    direction = b - a
    return abs((np.conj(direction) * (point - a)).imag) / abs(direction)


def edge_loop(
    mesh: SurfaceMesh,
    edge: int,
    t: float = 0.5,
    fraction: float = 0.5,
    n_points: int = 8,
) -> list[Waypoint]:
    """Return counterclockwise circle around the point at ``t`` on an interior edge.

    The radius is ``fraction`` of the distance to the nearest other side of
    the flap, and no sample sits on the edge itself.

    Raises:
        BoundaryEdgeError: Edge is on the boundary.
    """
    if mesh.is_boundary_edge[edge]:
        msg = f"Edge {edge} is a boundary edge"
        raise BoundaryEdgeError(msg, edge=edge)
    flap = flatten_flap(mesh, edge)
    k, i, j, l = flap["points"]
    centre = complex(k + t * (i - k))
    radius = fraction * min(
        _line_distance(centre, k, j),
        _line_distance(centre, i, j),
        _line_distance(centre, k, l),
        _line_distance(centre, i, l),
    )
    vertex_k = flap["vertices"][0]
    waypoints: list[Waypoint] = []
    for step in range(n_points):
        angle = np.pi / n_points + 2.0 * np.pi * step / n_points
        w = centre + radius * np.exp(1j * angle)
        if w.imag > 0.0:
            face, rotation = flap["face_f"], flap["rotation_f"]
        else:
            face, rotation = flap["face_g"], flap["rotation_g"]
        origin = mesh.corner_coords[face, mesh.corner(face, vertex_k) % 3]
        waypoints.append((face, barycentric(mesh, face, complex(np.conj(rotation) * w + origin))))
    return waypoints


def face_loop(
    mesh: SurfaceMesh,
    face: int,
    bary: npt.ArrayLike | None = None,
    fraction: float = 0.5,
    n_points: int = 12,
) -> list[Waypoint]:
    """Return counterclockwise circle inside ``face`` around a barycentric point."""
    centre_bary = np.full(3, 1.0 / 3.0) if bary is None else np.asarray(bary, dtype=np.float64)
    corners = mesh.corner_coords[face]
    centre = face_point(mesh, face, centre_bary)
    radius = fraction * min(
        _line_distance(centre, corners[c], corners[(c + 1) % 3]) for c in range(3)
    )
    points = centre + radius * np.exp(2j * np.pi * np.arange(n_points) / n_points)
    return [(face, barycentric(mesh, face, complex(point))) for point in points]


def singularity_loop(mesh: SurfaceMesh, singularity: Singularity) -> list[Waypoint]:
    """Return a small loop enclosing one prescribed singularity."""
    element = singularity["element"]
    if singularity["kind"] is SingularityKind.VERTEX:
        return vertex_loop(mesh, element)
    if singularity["kind"] is SingularityKind.EDGE:
        return edge_loop(mesh, element, singularity.get("t", 0.5))
    return face_loop(mesh, element, singularity.get("bary"))
