"""Alignment of the field to curves on the surface.

Curves are split into face segments, edge crossings and vertex passings.
Each piece asks the corrected phases ``theta + d0 alpha`` to keep the field
parallel along the curve; curves sharing a component are synchronized
through a corner path between their first waypoints. Since ``d1 d0 = 0`` the
correction never changes a cycle sum.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from polarfield.core.bevel.operators import rows_to_matrix
from polarfield.core.exceptions import InconsistentAlignmentError, SolveFailureError
from polarfield.core.mesh.geometry import face_point
from polarfield.core.mesh.paths import split_path
from polarfield.core.mesh.types import PathPieceKind
from polarfield.core.solve.integrate import beveled_connection
from polarfield.core.solve.kkt import solve_kkt, solve_kkt_proximal
from polarfield.core.solve.sigma import scale_pins
from polarfield.core.solve.types import AlignmentResult, CurveAnchor

if TYPE_CHECKING:
    from collections.abc import Sequence

    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.mesh.types import PathPiece
    from polarfield.core.prescribe.types import AlignmentCurve

LOGGER = logging.getLogger(__name__)

WEIGHT_FLOOR = 1e-8
ALIGNMENT_TOLERANCE = 1e-8
SEGMENT_TOLERANCE = 1e-12


def wrap_angle(values: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Wrap angles to ``[-pi, pi)``."""
    return np.mod(np.asarray(values, dtype=np.float64) + np.pi, 2.0 * np.pi) - np.pi


def alignment_weights(bm: BeveledMesh) -> npt.NDArray[np.float64]:
    """Return cotangent weights on split edges and their mean on jump edges."""
    opposite = np.roll(bm.mesh.corner_angles, -2, axis=1).reshape(-1)
    split = np.maximum(0.5 / np.tan(opposite), WEIGHT_FLOOR)
    weights = np.full(bm.n_edges, split.mean())
    weights[: bm.n_split_edges] = split
    return weights


def interpolation_row(face: int, bary: npt.ArrayLike) -> dict[int, float]:
    """Return row giving the phase at ``bary`` relative to the first corner of ``face``."""
    weights = np.asarray(bary, dtype=np.float64)
    return {3 * face: float(weights[1] + weights[2]), 3 * face + 1: float(weights[2])}


def segment_row(face: int, start: npt.ArrayLike, end: npt.ArrayLike) -> dict[int, float]:
    """Return row of the phase change along a straight piece inside ``face``."""
    delta = np.asarray(end, dtype=np.float64) - np.asarray(start, dtype=np.float64)
    return interpolation_row(face, delta)


def crossing_row(bm: BeveledMesh, edge: int, t: float) -> dict[int, float]:
    """Return row of the phase jump across ``edge`` at parameter ``t``.

    The jump is measured through the jump edge at the nearer endpoint.
    """
    h_f, h_g = (int(h) for h in bm.mesh.edge_halfedges[edge])
    v0, v1 = (int(v) for v in bm.mesh.edges[edge])
    if t <= 0.5:  # noqa: PLR2004
        return {bm.jump_edge(edge, v0): 1.0, h_f: -t, h_g: -t}
    return {bm.jump_edge(edge, v1): 1.0, h_f: 1.0 - t, h_g: 1.0 - t}


def vertex_rows(
    bm: BeveledMesh,
    vertex: int,
    from_face: int,
    to_face: int,
) -> list[dict[int, float]]:
    """Return one row per jump edge passed while turning around ``vertex``.

    Interior vertices use the shorter way around; boundary vertices the only
    way that stays on the surface.
    """
    mesh = bm.mesh
    fan = [int(h) for h in mesh.vertex_fans[vertex]]
    faces = [h // 3 for h in fan]
    start, end = faces.index(from_face), faces.index(to_face)
    valence = len(fan)
    forward = (end - start) % valence
    backward = (start - end) % valence
    if mesh.is_boundary_vertex[vertex]:
        use_forward = end > start
    else:
        use_forward = forward <= backward
    if use_forward:
        spokes = [fan[(start + step + 1) % valence] for step in range(forward)]
    else:
        spokes = [fan[(start - step) % valence] for step in range(backward)]
    return [{bm.jump_edge(int(mesh.halfedge_edge[spoke]), vertex): 1.0} for spoke in spokes]


def curve_anchor(
    bm: BeveledMesh,
    pieces: Sequence[PathPiece],
) -> tuple[int, list[float], float]:
    """Return face, barycentric start and tangent angle of the first proper segment.

    Raises:
        InconsistentAlignmentError: Curve has no segment of positive length.
    """
    mesh = bm.mesh
    for piece in pieces:
        if piece["kind"] is not PathPieceKind.SEGMENT:
            continue
        start = face_point(mesh, piece["face"], piece["start"])
        end = face_point(mesh, piece["face"], piece["end"])
        if abs(end - start) > SEGMENT_TOLERANCE * mesh.bbox_diagonal:
            bary = [float(value) for value in piece["start"]]
            return piece["face"], bary, float(np.angle(end - start))
    msg = "Alignment curve has no segment of positive length"
    raise InconsistentAlignmentError(msg)


def _corner_paths(bm: BeveledMesh, source: int) -> npt.NDArray[np.int32]:
    graph = sparse.csr_matrix(
        (np.ones(bm.n_edges), (bm.edge_tail, bm.edge_head)),
        shape=(bm.n_corners, bm.n_corners),
    )
    _, predecessors = csgraph.breadth_first_order(
        graph,
        source,
        directed=False,
        return_predecessors=True,
    )
    return predecessors


def corner_path_row(
    bm: BeveledMesh,
    predecessors: npt.NDArray[np.int32],
    source: int,
    target: int,
) -> dict[int, float]:
    """Return signed beveled edges of the tree path from ``source`` to ``target``."""
    lookup = {
        (int(tail), int(head)): edge
        for edge, (tail, head) in enumerate(zip(bm.edge_tail, bm.edge_head, strict=True))
    }
    row: dict[int, float] = {}
    node = target
    while node != source:
        previous = int(predecessors[node])
        if (previous, node) in lookup:
            edge, sign = lookup[(previous, node)], 1.0
        else:
            edge, sign = lookup[(node, previous)], -1.0
        row[edge] = row.get(edge, 0.0) + sign
        node = previous
    return row


def _add(row: dict[int, float], other: dict[int, float], factor: float = 1.0) -> dict[int, float]:
    merged = dict(row)
    for col, value in other.items():
        merged[col] = merged.get(col, 0.0) + factor * value
    return merged


def solve_alignment(
    theta: npt.NDArray[np.float64],
    curves: Sequence[AlignmentCurve],
    bm: BeveledMesh,
    d0: sparse.spmatrix,
    n: int = 1,
) -> AlignmentResult:
    """Correct phases by an exact 1-form so the field follows ``curves``.

    Minimizes ``alpha^T d0^T W d0 alpha`` subject to ``C d0 alpha = b``, where
    ``C`` holds one row per curve piece and ``b`` is the mismatch of the
    current phases. Jump and synchronization rows are matched modulo ``2 pi``.

    Raises:
        InconsistentAlignmentError: Rows cannot be met simultaneously.
    """
    mesh = bm.mesh
    _, labels = bm.corner_components()
    connection = n * beveled_connection(bm)

    rows: list[dict[int, float]] = []
    targets: list[float] = []
    wrapped: list[bool] = []
    crossings: list[tuple[int, float]] = []
    anchors: list[CurveAnchor] = []
    sources: dict[int, tuple[int, dict[int, float], float]] = {}

    for curve in curves:
        waypoints = [(point["face"], np.asarray(point["bary"])) for point in curve["points"]]
        pieces = split_path(mesh, waypoints, closed=curve["closed"])
        for piece in pieces:
            if piece["kind"] is PathPieceKind.SEGMENT:
                row = segment_row(piece["face"], piece["start"], piece["end"])
                if max(abs(value) for value in row.values()) > SEGMENT_TOLERANCE:
                    rows.append(row)
                    targets.append(0.0)
                    wrapped.append(False)
            elif piece["kind"] is PathPieceKind.CROSSING:
                rows.append(crossing_row(bm, piece["edge"], piece["t"]))
                targets.append(0.0)
                wrapped.append(True)
                crossings.append((piece["edge"], piece["t"]))
            else:
                for row in vertex_rows(bm, piece["vertex"], piece["from_face"], piece["to_face"]):
                    rows.append(row)
                    targets.append(0.0)
                    wrapped.append(True)

        face, bary, tangent = curve_anchor(bm, pieces)
        corner = 3 * face
        component = int(labels[corner])
        point_row = interpolation_row(face, bary)
        if component not in sources:
            sources[component] = (corner, point_row, tangent)
            anchors.append(
                CurveAnchor(component=component, face=face, bary=bary, tangent=tangent),
            )
            continue
        # synchronize with the first curve of the component
        source, source_row, source_tangent = sources[component]
        path = corner_path_row(bm, _corner_paths(bm, source), source, corner)
        row = _add(_add(path, point_row), source_row, -1.0)
        rows.append(row)
        transport = sum(sign * connection[edge] for edge, sign in path.items())
        targets.append(n * (tangent - source_tangent) - transport)
        wrapped.append(True)

    pins = scale_pins(bm)
    for component, (corner, _, _) in sources.items():
        pins[component] = corner

    c_theta = rows_to_matrix(rows, bm.n_edges)
    mismatch = np.asarray(targets) - c_theta @ theta
    is_wrapped = np.asarray(wrapped, dtype=bool)
    mismatch[is_wrapped] = wrap_angle(mismatch[is_wrapped])

    constraint = (c_theta @ d0).tocsr()
    pin_rows = sparse.csr_matrix(
        (np.ones(len(pins)), (np.arange(len(pins)), pins)),
        shape=(len(pins), bm.n_corners),
    )
    system = sparse.vstack([constraint, pin_rows]).tocsr()
    rhs = np.concatenate([mismatch, np.zeros(len(pins))])
    hessian = (d0.T @ sparse.diags(alignment_weights(bm)) @ d0).tocsr()
    gradient = np.zeros(bm.n_corners)
    try:
        alpha, _, _ = solve_kkt(hessian, system, gradient, rhs)
    except SolveFailureError:
        LOGGER.warning("Alignment rows are dependent, using the proximal solve")
        try:
            alpha, _ = solve_kkt_proximal(hessian, system, gradient, rhs)
        except SolveFailureError as error:
            msg = "Alignment system could not be factorized"
            raise InconsistentAlignmentError(msg) from error

    residual = float(np.abs(constraint @ alpha - mismatch).max(initial=0.0))
    if residual > ALIGNMENT_TOLERANCE * (1.0 + float(np.abs(mismatch).max(initial=0.0))):
        msg = f"Alignment rows are inconsistent, residual {residual:.3e}"
        raise InconsistentAlignmentError(msg, residual=residual)

    LOGGER.info("Alignment with %d rows, residual %.3e", len(rows), residual)
    return AlignmentResult(
        alpha=alpha,
        theta=theta + d0 @ alpha,
        constraint_residual=residual,
        n_rows=len(rows),
        crossings=crossings,
        anchors=anchors,
    )
