import numpy as np
import pytest

from polarfield.core.exceptions import (
    DegenerateFaceError,
    InconsistentOrientationError,
    NonManifoldError,
    NonTriangularError,
    ParseError,
)
from polarfield.core.mesh.geometry import (
    flatten_flap,
    gaussian_curvature,
    local_basis,
    transport_angle,
)
from polarfield.core.mesh.io import load_mesh, read_mesh, write_obj
from polarfield.core.mesh.paths import shared_edge
from polarfield.core.mesh.topology import boundary_loops, homology_generators
from polarfield.core.mesh.types import MeshFormat
from tests.conftest import (
    annulus_mesh,
    disk_mesh,
    icosphere_mesh,
    octahedron_mesh,
    plate_mesh,
    torus_mesh,
)

SINGLE_TRIANGLE_OFF = """OFF
3 1 0
0 0 0
1 0 0
0 1 0
3 0 1 2
"""

OCTAHEDRON_OBJ = """# octahedron
v 1 0 0
v -1 0 0
v 0 1 0
v 0 -1 0
v 0 0 1
v 0 0 -1
f 1 3 5
f 3 2 5
f 2 4 5
f 4 1 5
f 3 1 6
f 2 3 6
f 4 2 6
f 1 4 6
"""


def _wrap(angle: float) -> float:
    return (angle + np.pi) % (2.0 * np.pi) - np.pi


def test_single_triangle_off():
    mesh = load_mesh(SINGLE_TRIANGLE_OFF, MeshFormat.OFF)
    assert (mesh.n_vertices, mesh.n_edges, mesh.n_faces) == (3, 3, 1)
    assert not mesh.is_closed


def test_octahedron_obj():
    mesh = load_mesh(OCTAHEDRON_OBJ.encode(), MeshFormat.OBJ)
    assert (mesh.n_vertices, mesh.n_edges, mesh.n_faces) == (6, 12, 8)
    assert mesh.euler_characteristic == 2
    assert mesh.is_closed


def test_opposite_orientation_rejected():
    content = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3\nf 2 3 4\n"
    with pytest.raises(InconsistentOrientationError):
        load_mesh(content, MeshFormat.OBJ)


def test_three_faces_on_an_edge_rejected():
    content = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n"
    with pytest.raises(NonManifoldError):
        load_mesh(content, MeshFormat.OBJ)


def test_polygon_rejected():
    content = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n"
    with pytest.raises(NonTriangularError):
        load_mesh(content, MeshFormat.OBJ)


def test_degenerate_face_rejected():
    content = "OFF\n3 1 0\n0 0 0\n1 0 0\n2 0 0\n3 0 1 2\n"
    with pytest.raises(DegenerateFaceError):
        load_mesh(content, MeshFormat.OFF)


@pytest.mark.parametrize(
    "content",
    ["", "OFF\n", "v 0 0\nf 1 2 3\n", "v 0 0 0\nf 1 x 3\n", "OFF\n3 1 0\n0 0 0\n"],
)
def test_malformed_content(content):
    mesh_format = MeshFormat.OFF if content.startswith("OFF") else MeshFormat.OBJ
    with pytest.raises(ParseError):
        load_mesh(content, mesh_format)


def test_obj_roundtrip(tmp_path):
    mesh = octahedron_mesh()
    path = tmp_path / "octahedron.obj"
    write_obj(path, mesh)
    loaded = read_mesh(path)
    np.testing.assert_allclose(loaded.positions, mesh.positions)
    np.testing.assert_array_equal(loaded.faces, mesh.faces)


def test_unknown_suffix(tmp_path):
    path = tmp_path / "mesh.ply"
    path.write_text("ply\n")
    with pytest.raises(ParseError):
        read_mesh(path)


@pytest.mark.parametrize(
    ("builder", "chi"),
    [
        (octahedron_mesh, 2),
        (icosphere_mesh, 2),
        (torus_mesh, 0),
        (plate_mesh, 2),
        (lambda: plate_mesh(3, 3, holes=((1, 1),)), 0),
        (lambda: plate_mesh(5, 3, holes=((1, 1), (3, 1))), -2),
        (disk_mesh, 1),
        (annulus_mesh, 0),
    ],
)
def test_gauss_bonnet(builder, chi):
    mesh = builder()
    assert mesh.euler_characteristic == chi
    assert gaussian_curvature(mesh).sum() == pytest.approx(2.0 * np.pi * chi, abs=1e-9)


@pytest.mark.parametrize(
    ("builder", "generators", "loops"),
    [
        (icosphere_mesh, 0, 0),
        (torus_mesh, 2, 0),
        (lambda: plate_mesh(5, 3, holes=((1, 1), (3, 1))), 4, 0),
        (disk_mesh, 0, 1),
        (annulus_mesh, 0, 2),
    ],
)
def test_topology_counts(builder, generators, loops):
    mesh = builder()
    assert len(homology_generators(mesh)) == generators
    assert len(boundary_loops(mesh)) == loops


def test_boundary_loop_has_surface_on_left():
    mesh = disk_mesh(4)
    (loop,) = boundary_loops(mesh)
    points = mesh.positions[loop["vertices"], :2]
    x, y = points[:, 0], points[:, 1]
    signed_area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    assert signed_area > 0.0


def test_local_basis_orthonormal(icosphere):
    basis = local_basis(icosphere)
    for first, second in (("e1", "e1"), ("e2", "e2"), ("normal", "normal")):
        np.testing.assert_allclose(np.sum(basis[first] * basis[second], axis=1), 1.0)
    np.testing.assert_allclose(np.sum(basis["e1"] * basis["e2"], axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(np.sum(basis["e1"] * basis["normal"], axis=1), 0.0, atol=1e-12)


def test_local_basis_deterministic(icosphere):
    first = local_basis(icosphere)
    second = local_basis(icosphere_mesh(1))
    np.testing.assert_array_equal(first["e1"], second["e1"])


def test_flap_preserves_lengths(icosphere):
    for edge in range(0, icosphere.n_edges, 7):
        flap = flatten_flap(icosphere, edge)
        k, i, j, l = flap["points"]
        v_k, v_i, v_j, v_l = flap["vertices"]
        positions = icosphere.positions
        for (a, b), (p, q) in (
            ((k, i), (v_k, v_i)),
            ((i, j), (v_i, v_j)),
            ((j, k), (v_j, v_k)),
            ((k, l), (v_k, v_l)),
            ((l, i), (v_l, v_i)),
        ):
            expected = np.linalg.norm(positions[p] - positions[q])
            assert abs(a - b) == pytest.approx(expected, rel=1e-10)
        assert j.imag > 0.0
        assert l.imag < 0.0


def test_vertex_holonomy_matches_curvature(icosphere):
    curvature = gaussian_curvature(icosphere)
    for vertex in range(icosphere.n_vertices):
        fan = [int(h) // 3 for h in icosphere.vertex_fans[vertex]]
        total = 0.0
        for position, face in enumerate(fan):
            following = fan[(position + 1) % len(fan)]
            total += transport_angle(icosphere, shared_edge(icosphere, face, following), face)
        assert _wrap(total - curvature[vertex]) == pytest.approx(0.0, abs=1e-9)


def test_transport_is_antisymmetric(torus):
    edge = int(torus.interior_edges[3])
    face_f, face_g = torus.edge_faces(edge)
    assert transport_angle(torus, edge, face_f) == -transport_angle(torus, edge, face_g)
    other = next(f for f in range(torus.n_faces) if f not in (face_f, face_g))
    with pytest.raises(ValueError, match="not adjacent"):
        transport_angle(torus, edge, other)
