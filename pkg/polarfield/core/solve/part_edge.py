"""Phases at a singular point on an edge."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from polarfield.core.exceptions import EmptyFeasibleRangeError
from polarfield.core.mesh.surface import next_halfedge
from polarfield.core.solve.types import PartEdgePhases

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh

LOGGER = logging.getLogger(__name__)


def edge_corner_phases(
    theta: npt.NDArray[np.float64],
    bm: BeveledMesh,
    edge: int,
) -> tuple[float, float, float, float]:
    """Return ``(psi_k_f, psi_i_f, psi_k_g, psi_i_g)`` relative to corner ``k`` of ``f``.

    ``k`` and ``i`` are the two endpoints of the edge in sorted order.
    """
    h_f, h_g = (int(h) for h in bm.mesh.edge_halfedges[edge])
    v0, _ = (int(v) for v in bm.mesh.edges[edge])
    psi_k_f = 0.0
    psi_i_f = float(theta[h_f])
    psi_k_g = float(theta[bm.jump_edge(edge, v0)])
    # h_g runs from i to k inside g
    psi_i_g = psi_k_g - float(theta[h_g])
    return psi_k_f, psi_i_f, psi_k_g, psi_i_g


def compute_part_edge_theta(
    theta: npt.NDArray[np.float64],
    bm: BeveledMesh,
    edge: int,
    t: float,
    index: int,
) -> PartEdgePhases:
    """Place the singular phase on an edge and split the edge-face cycle.

    The phase ``psi_f`` at the singular point must lie between the corner
    phases of ``f`` and, shifted by ``pi * I``, between those of ``g``. The
    midpoint of that range is used.

    Raises:
        EmptyFeasibleRangeError: The two ranges do not overlap.
    """
    psi_k_f, psi_i_f, psi_k_g, psi_i_g = edge_corner_phases(theta, bm, edge)
    shift = np.pi * index
    low = max(min(psi_k_f, psi_i_f), min(psi_k_g, psi_i_g) - shift)
    high = min(max(psi_k_f, psi_i_f), max(psi_k_g, psi_i_g) - shift)
    if not low < high:
        msg = f"No feasible singular phase on edge {edge}: [{low:.6g}, {high:.6g}]"
        raise EmptyFeasibleRangeError(msg, edge=edge, low=low, high=high)
    psi_f = 0.5 * (low + high)
    psi_g = psi_f + shift
    LOGGER.debug("Singular phase on edge %d: %.6g in [%.6g, %.6g]", edge, psi_f, low, high)
    return PartEdgePhases(
        edge=edge,
        t=float(t),
        index=int(index),
        psi_f=psi_f,
        psi_g=psi_g,
        feasible=(low, high),
        theta_sk_f=psi_k_f - psi_f,
        theta_is_f=psi_f - psi_i_f,
        theta_ks_g=psi_g - psi_k_g,
        theta_si_g=psi_i_g - psi_g,
    )


def half_cycles(
    phases: PartEdgePhases,
    theta: npt.NDArray[np.float64],
    bm: BeveledMesh,
) -> tuple[float, float]:
    """Return the sums around the two half-cycles of the edge-face.

    The first runs through endpoint ``k`` and the second through ``i``; both
    equal ``pi * I`` for a consistent solve.
    """
    edge = phases["edge"]
    v0, v1 = (int(v) for v in bm.mesh.edges[edge])
    jump_k = float(theta[bm.jump_edge(edge, v0)])
    jump_i = float(theta[bm.jump_edge(edge, v1)])
    first = phases["theta_sk_f"] + jump_k + phases["theta_ks_g"]
    second = phases["theta_si_g"] - jump_i + phases["theta_is_f"]
    return first, second


def corner_pair(bm: BeveledMesh, edge: int) -> tuple[int, int, int, int]:
    """Return corners ``(k_f, i_f, k_g, i_g)`` of an interior edge."""
    h_f, h_g = (int(h) for h in bm.mesh.edge_halfedges[edge])
    return h_f, int(next_halfedge(h_f)), int(next_halfedge(h_g)), h_g
