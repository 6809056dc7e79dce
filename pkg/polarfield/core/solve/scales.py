"""Scale proportionality targets and their constraint rows.

A target fixes the ratios of the scale values at two or three corners so
that the linear interpolation of the root field has the required phase at a
point: zero at a singular point inside a face, the half-turn phase at a
singular point on an edge and the curve phase at an alignment crossing.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from polarfield.core.exceptions import MixedSignKernelError
from polarfield.core.prescribe.types import SingularityKind
from polarfield.core.solve.part_edge import compute_part_edge_theta, corner_pair
from polarfield.core.solve.types import PartEdgePhases, ScaleConstraints, ScaleRowSource

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.prescribe.types import Prescription

LOGGER = logging.getLogger(__name__)

SIGN_TOLERANCE = 1e-12


def _positive(values: npt.NDArray[np.float64], what: str) -> npt.NDArray[np.float64]:
    scale = float(np.abs(values).max(initial=0.0))
    if scale == 0.0:
        msg = f"Zero scale kernel at {what}"
        raise MixedSignKernelError(msg)
    if np.all(values < -SIGN_TOLERANCE * scale):
        values = -values
    if not np.all(values > SIGN_TOLERANCE * scale):
        msg = f"Scale kernel with mixed signs at {what}: {values.tolist()}"
        raise MixedSignKernelError(msg, values=values.tolist())
    return values / values.max()


def face_root_phases(
    theta: npt.NDArray[np.float64],
    face: int,
    exponent: int = 1,
) -> npt.NDArray[np.float64]:
    """Return root phases at the corners of ``face`` relative to its first corner."""
    first, second = theta[3 * face], theta[3 * face + 1]
    return np.array([0.0, first, first + second]) / exponent


def face_scale_targets(
    theta: npt.NDArray[np.float64],
    face: int,
    bary: npt.ArrayLike,
    exponent: int = 1,
) -> npt.NDArray[np.float64]:
    """Return corner scale targets that put a zero of the field at ``bary``.

    The root targets span the kernel of the 2x3 system
    ``sum_c B_c varsigma_c exp(i phi_c) = 0``; the power targets are their
    ``exponent``-th powers.

    Raises:
        MixedSignKernelError: No positive kernel vector exists.
    """
    weights = np.asarray(bary, dtype=np.float64)
    phases = face_root_phases(theta, face, exponent)
    system = np.array([weights * np.cos(phases), weights * np.sin(phases)])
    kernel = np.cross(system[0], system[1])
    return _positive(kernel, f"face {face}") ** exponent


def edge_scale_targets(
    phases: PartEdgePhases,
    exponent_f: int = 1,
    exponent_g: int = 1,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Return ``(k, i)`` scale targets in ``f`` and in ``g`` for an edge singularity.

    In each face the interpolated root field between ``k`` and ``i`` must
    have exactly the singular phase at the point ``t``.

    Raises:
        MixedSignKernelError: The phases do not straddle the singular phase.
    """
    t = phases["t"]
    edge = phases["edge"]
    theta_si_f = -phases["theta_is_f"] / exponent_f
    theta_sk_f = phases["theta_sk_f"] / exponent_f
    theta_si_g = phases["theta_si_g"] / exponent_g
    theta_sk_g = -phases["theta_ks_g"] / exponent_g
    in_f = np.array([-t * np.sin(theta_si_f), (1.0 - t) * np.sin(theta_sk_f)])
    in_g = np.array([-t * np.sin(theta_si_g), (1.0 - t) * np.sin(theta_sk_g)])
    return (
        _positive(in_f, f"edge {edge} in face f") ** exponent_f,
        _positive(in_g, f"edge {edge} in face g") ** exponent_g,
    )


def crossing_scale_targets(phase: float, t: float, exponent: int = 1) -> npt.NDArray[np.float64]:
    """Return ``(k, i)`` targets keeping a linear phase profile at an edge point.

    ``phase`` is the root phase change from ``k`` to ``i`` along the edge.
    """
    root = np.array([np.sinc((1.0 - t) * phase / np.pi), np.sinc(t * phase / np.pi)])
    return _positive(root, f"crossing at t={t:.6g}") ** exponent


def _pair_row(
    corner_a: int,
    corner_b: int,
    hat_a: float,
    hat_b: float,
) -> tuple[list[int], list[float]]:
    norm = float(np.hypot(hat_a, hat_b))
    return [corner_a, corner_b], [hat_b / norm, -hat_a / norm]


def assemble_scale_constraints(
    theta: npt.NDArray[np.float64],
    bm: BeveledMesh,
    prescription: Prescription,
    exponents: npt.NDArray[np.int64],
    part_edges: Mapping[int, PartEdgePhases] | None = None,
    crossings: Iterable[tuple[int, float]] = (),
) -> ScaleConstraints:
    """Build rows ``sigma_a * hat_b - sigma_b * hat_a = 0`` for every target.

    Face singularities give two rows, edge singularities one row per adjacent
    face and each alignment crossing one row per side. Rows are normalized.

    Args:
        theta (np.ndarray): Phase solution.
        bm (BeveledMesh): Beveled complex.
        prescription (Prescription): Singularities to honour.
        exponents (np.ndarray): Per face power exponent.
        part_edges (Mapping[int, PartEdgePhases] | None): Precomputed edge
            phases, computed here when missing.
        crossings (Iterable[tuple[int, float]]): Alignment ``(edge, t)``.

    Returns:
        ScaleConstraints: Sparse rows over beveled corners.
    """
    mesh = bm.mesh
    part_edges = dict(part_edges or {})
    rows: list[tuple[list[int], list[float]]] = []
    sources: list[ScaleRowSource] = []
    elements: list[int] = []

    for item in prescription.singularities:
        element = item["element"]
        if item["kind"] is SingularityKind.FACE:
            bary = item.get("bary", [1 / 3, 1 / 3, 1 / 3])
            hats = face_scale_targets(theta, element, bary, int(exponents[element]))
            corners = 3 * element + np.arange(3)
            for a, b in ((0, 1), (1, 2)):
                rows.append(_pair_row(int(corners[a]), int(corners[b]), hats[a], hats[b]))
                sources.append(ScaleRowSource.FACE)
                elements.append(element)
        elif item["kind"] is SingularityKind.EDGE:
            if element not in part_edges:
                part_edges[element] = compute_part_edge_theta(
                    theta, bm, element, item["t"], item["index"]
                )
            face_f, face_g = mesh.edge_faces(element)
            hats_f, hats_g = edge_scale_targets(
                part_edges[element], int(exponents[face_f]), int(exponents[face_g])
            )
            k_f, i_f, k_g, i_g = corner_pair(bm, element)
            rows.append(_pair_row(k_f, i_f, hats_f[0], hats_f[1]))
            rows.append(_pair_row(k_g, i_g, hats_g[0], hats_g[1]))
            sources += [ScaleRowSource.EDGE, ScaleRowSource.EDGE]
            elements += [element, element]

    for edge, t in crossings:
        face_f, face_g = mesh.edge_faces(edge)
        h_f, h_g = (int(h) for h in mesh.edge_halfedges[edge])
        k_f, i_f, k_g, i_g = corner_pair(bm, edge)
        hats_f = crossing_scale_targets(
            theta[h_f] / exponents[face_f], t, int(exponents[face_f])
        )
        hats_g = crossing_scale_targets(
            -theta[h_g] / exponents[face_g], t, int(exponents[face_g])
        )
        rows.append(_pair_row(k_f, i_f, hats_f[0], hats_f[1]))
        rows.append(_pair_row(k_g, i_g, hats_g[0], hats_g[1]))
        sources += [ScaleRowSource.ALIGNMENT, ScaleRowSource.ALIGNMENT]
        elements += [edge, edge]

    row_ids = [position for position, (cols, _) in enumerate(rows) for _ in cols]
    col_ids = [col for cols, _ in rows for col in cols]
    values = [value for _, row_values in rows for value in row_values]
    matrix = sparse.csr_matrix((values, (row_ids, col_ids)), shape=(len(rows), bm.n_corners))
    LOGGER.debug("Assembled %d scale constraint rows", len(rows))
    return ScaleConstraints(matrix=matrix, sources=sources, elements=elements)
