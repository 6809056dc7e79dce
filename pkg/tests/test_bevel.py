import numpy as np
import pytest

from polarfield.core.bevel.complex import build_beveled
from polarfield.core.bevel.operators import build_operators, vertex_face_entries
from polarfield.core.bevel.types import BeveledEdgeKind, BeveledFaceKind
from tests.conftest import (
    annulus_mesh,
    disk_mesh,
    icosphere_mesh,
    octahedron_mesh,
    plate_mesh,
    torus_mesh,
)

MESHES = [
    octahedron_mesh,
    icosphere_mesh,
    torus_mesh,
    lambda: plate_mesh(5, 3, holes=((1, 1), (3, 1))),
    disk_mesh,
    annulus_mesh,
]


@pytest.mark.parametrize("builder", MESHES)
def test_element_counts(builder):
    mesh = builder()
    bm = build_beveled(mesh)
    n_interior_edges = len(mesh.interior_edges)
    n_interior_vertices = int((~mesh.is_boundary_vertex).sum())
    assert bm.n_corners == 3 * mesh.n_faces
    assert bm.n_edges == 3 * mesh.n_faces + 2 * n_interior_edges
    assert bm.n_faces == mesh.n_faces + n_interior_edges + n_interior_vertices
    assert np.count_nonzero(bm.edge_kind == BeveledEdgeKind.JUMP) == 2 * n_interior_edges
    assert np.count_nonzero(bm.face_kind == BeveledFaceKind.VERTEX) == n_interior_vertices


@pytest.mark.parametrize("builder", MESHES)
def test_jump_edges_join_copies_of_one_vertex(builder):
    bm = build_beveled(builder())
    jumps = bm.edge_kind == BeveledEdgeKind.JUMP
    tails = bm.edge_tail[jumps]
    heads = bm.edge_head[jumps]
    np.testing.assert_array_equal(bm.corner_vertex[tails], bm.corner_vertex[heads])
    assert np.all(bm.corner_face[tails] != bm.corner_face[heads])


@pytest.mark.parametrize("builder", MESHES)
def test_boundary_of_boundary_vanishes(builder):
    mesh = builder()
    ops = build_operators(mesh, build_beveled(mesh))
    assert abs(ops["d1"] @ ops["d0"]).max() == 0.0
    for rows in (ops["homology"], ops["boundary"]):
        if rows.shape[0]:
            assert abs(rows @ ops["d0"]).max() == 0.0


@pytest.mark.parametrize("builder", [octahedron_mesh, icosphere_mesh, torus_mesh])
def test_closed_mesh_edges_bound_two_faces(builder):
    mesh = builder()
    ops = build_operators(mesh, build_beveled(mesh))
    d1 = ops["d1"].tocsc()
    np.testing.assert_array_equal(np.asarray(d1.sum(axis=0)).ravel(), 0.0)
    np.testing.assert_array_equal(np.diff(d1.indptr), 2)


@pytest.mark.parametrize(
    "builder",
    [octahedron_mesh, icosphere_mesh, torus_mesh, lambda: plate_mesh(3, 3, holes=((1, 1),))],
)
def test_face_curvature_sums_to_euler(builder):
    mesh = builder()
    ops = build_operators(mesh, build_beveled(mesh))
    total = ops["face_curvature"].sum()
    assert total == pytest.approx(2.0 * np.pi * mesh.euler_characteristic, abs=1e-9)


@pytest.mark.parametrize(
    ("builder", "n_homology", "n_boundary"),
    [
        (icosphere_mesh, 0, 0),
        (torus_mesh, 2, 0),
        (lambda: plate_mesh(3, 3, holes=((1, 1),)), 2, 0),
        (lambda: plate_mesh(5, 3, holes=((1, 1), (3, 1))), 4, 0),
        (disk_mesh, 0, 1),
        (annulus_mesh, 0, 2),
    ],
)
def test_cycle_rows(builder, n_homology, n_boundary):
    mesh = builder()
    ops = build_operators(mesh, build_beveled(mesh))
    assert ops["homology"].shape[0] == n_homology
    assert ops["boundary"].shape[0] == n_boundary
    assert len(ops["homology_curvature"]) == n_homology
    assert len(ops["boundary_curvature"]) == n_boundary


def test_flat_disk_boundary_turns_once(disk):
    ops = build_operators(disk, build_beveled(disk))
    (turning,) = ops["boundary_curvature"]
    assert turning == pytest.approx(2.0 * np.pi)


def test_annulus_boundary_turning_cancels(annulus):
    ops = build_operators(annulus, build_beveled(annulus))
    assert ops["boundary_curvature"].sum() == pytest.approx(0.0, abs=1e-9)


def test_vertex_face_visits_every_incident_edge(icosphere):
    bm = build_beveled(icosphere)
    for vertex in bm.interior_vertices[:10]:
        entries = vertex_face_entries(bm, int(vertex))
        assert len(entries) == len(icosphere.vertex_fans[vertex])
        assert len({jump for jump, _ in entries}) == len(entries)


def test_jump_lookup_errors(disk):
    bm = build_beveled(disk)
    boundary_edge = int(np.flatnonzero(disk.is_boundary_edge)[0])
    with pytest.raises(ValueError, match="no jump edges"):
        bm.jump_edge(boundary_edge, int(disk.edges[boundary_edge][0]))
    interior_edge = int(disk.interior_edges[0])
    outsider = next(v for v in range(disk.n_vertices) if v not in disk.edges[interior_edge])
    with pytest.raises(ValueError, match="not an endpoint"):
        bm.jump_edge(interior_edge, outsider)
    boundary_vertex = int(np.flatnonzero(disk.is_boundary_vertex)[0])
    with pytest.raises(ValueError, match="no vertex-face"):
        bm.vertex_face(boundary_vertex)
