from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import sparse

from polarfield.core.bevel.complex import build_beveled
from polarfield.core.bevel.operators import build_operators
from polarfield.core.discretize.flaps import build_D, build_L, flap_mass
from polarfield.core.exceptions import (
    AtSingularityError,
    DegenerateTriangleError,
    FieldError,
    IndexSumMismatchError,
    NonVertexSingularityError,
    ParseError,
    PathError,
    ZeroAtFractionalPowerError,
)
from polarfield.core.field.energy import dirichlet_energy
from polarfield.core.field.export import (
    parse_field,
    read_field,
    read_vector,
    write_field,
    write_samples,
    write_streamlines,
    write_triplets,
    write_vector,
)
from polarfield.core.field.power_linear import (
    PowerLinearField,
    classify,
    face_coefficients,
    locate_singularity,
    pointwise_phase_gradient,
)
from polarfield.core.field.quality import compare_triangulations
from polarfield.core.field.tracing import seed_points, trace_streamline
from polarfield.core.field.trivial_connections import trivial_connections
from polarfield.core.field.types import FieldClass, SingularLocusKind
from polarfield.core.field.winding import edge_loop, face_loop, vertex_loop, winding_number
from polarfield.core.mesh.geometry import local_basis
from polarfield.core.prescribe.types import Prescription, Singularity, SingularityKind
from tests.conftest import disk_mesh, two_pole_prescription, vertex_singularity

CENTRE = 0.5 + 0.5j
CENTRE_VERTEX = 24
HYPOTHESIS_DISK = disk_mesh()


def _global_field(mesh, function, exponent=1, n=1):
    """Return field whose power value is ``function(z) ** exponent`` in world xy."""
    e1 = local_basis(mesh)["e1"]
    alpha = np.angle(e1[:, 0] + 1j * e1[:, 1])
    corners = mesh.positions[mesh.faces]
    world = corners[..., 0] + 1j * corners[..., 1]
    roots = np.exp(-1j * n * alpha / exponent)[:, None] * function(world)
    exponents = np.full(mesh.n_faces, exponent, dtype=np.int64)
    return PowerLinearField(mesh, roots, exponents, n)


def _source(z):
    return z - CENTRE


def _vortex(z):
    return 1j * (z - CENTRE)


def _constant(z):
    return np.ones_like(z)


def test_face_coefficients_recover_linear_field():
    corners = np.array([0.0, 1.0, 0.2 + 1.0j])
    a, b, c = 1.0 + 2.0j, 0.5 - 0.1j, -1.0
    values = a * corners + b * np.conj(corners) + c
    recovered = face_coefficients(values, corners)
    np.testing.assert_allclose(recovered, [a, b, c], atol=1e-12)


def test_collinear_corners_rejected():
    with pytest.raises(DegenerateTriangleError):
        face_coefficients([1.0, 2.0, 3.0], [0.0, 1.0, 2.0])


@pytest.mark.parametrize(
    ("a", "b", "kind"),
    [
        (1.0, 0.0, FieldClass.ELLIPTIC),
        (0.0, 1.0, FieldClass.HYPERBOLIC),
        (1.0, 1.0, FieldClass.PARABOLIC),
        (1.0j, 1.0, FieldClass.PARABOLIC),
    ],
)
def test_classify(a, b, kind):
    assert classify(a, b)["kind"] is kind


@pytest.mark.parametrize(
    ("coefficients", "kind"),
    [
        ((1.0, 0.0, -(0.3 + 0.2j)), SingularLocusKind.POINT),
        ((1.0, 1.0, 0.0), SingularLocusKind.LINE),
        ((1.0, 1.0, 1.0j), SingularLocusKind.NONE),
        ((0.0, 0.0, 0.0), SingularLocusKind.PLANE),
        ((0.0, 0.0, 1.0), SingularLocusKind.NONE),
    ],
)
def test_singular_locus(coefficients, kind):
    a, b, c = (complex(value) for value in coefficients)
    locus = locate_singularity(a, b, c)
    assert locus["kind"] is kind
    if kind is SingularLocusKind.POINT:
        assert locus["point"] == pytest.approx(0.3 + 0.2j)
    if kind is SingularLocusKind.LINE:
        point, direction = locus["point"], locus["direction"]
        for s in (-1.0, 0.5, 2.0):
            z = point + s * direction
            assert abs(a * z + b * np.conj(z) + c) == pytest.approx(0.0, abs=1e-12)


def test_phase_gradient_of_identity():
    np.testing.assert_allclose(pointwise_phase_gradient(1.0, 0.0, 0.0, 1.0), [0.0, 1.0])
    with pytest.raises(AtSingularityError):
        pointwise_phase_gradient(1.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize(
    ("exponent", "n"),
    [(0, 1), (1, 0)],
)
def test_field_arguments(disk, exponent, n):
    roots = np.ones((disk.n_faces, 3), dtype=np.complex128)
    with pytest.raises(ValueError):  # noqa: PT011
        PowerLinearField(disk, roots, np.full(disk.n_faces, exponent), n)


def test_root_shape_checked(disk):
    with pytest.raises(ValueError, match="faces of corner values"):
        PowerLinearField(disk, np.ones((disk.n_faces, 2), dtype=np.complex128))


@pytest.mark.parametrize(
    ("function", "exponent", "n", "expected"),
    [
        (_source, 1, 1, Fraction(1)),
        (lambda z: np.conj(z - CENTRE), 1, 1, Fraction(-1)),
        (_source, 3, 1, Fraction(3)),
        (_source, 1, 2, Fraction(1, 2)),
        (_source, 1, 4, Fraction(1, 4)),
        (_constant, 1, 1, Fraction(0)),
    ],
)
def test_vertex_winding(disk, function, exponent, n, expected):
    field = _global_field(disk, function, exponent, n)
    assert winding_number(field, vertex_loop(disk, CENTRE_VERTEX)) == expected


def test_edge_winding(disk):
    edge = int(disk.interior_edges[len(disk.interior_edges) // 2])
    midpoint = disk.positions[disk.edges[edge]].mean(axis=0)
    centre = complex(midpoint[0], midpoint[1])
    field = _global_field(disk, lambda z: z - centre)
    assert winding_number(field, edge_loop(disk, edge)) == 1


def test_face_winding_does_not_depend_on_radius(disk):
    face = 40
    centroid = disk.positions[disk.faces[face]].mean(axis=0)
    centre = complex(centroid[0], centroid[1])
    field = _global_field(disk, lambda z: np.conj(z - centre))
    for fraction in (0.3, 0.8):
        assert winding_number(field, face_loop(disk, face, fraction=fraction)) == -1


def test_loop_away_from_zero(disk):
    field = _global_field(disk, _source)
    assert winding_number(field, face_loop(disk, 0)) == 0


def test_loop_errors(disk):
    field = _global_field(disk, _constant)
    centroid = np.full(3, 1.0 / 3.0)
    with pytest.raises(PathError):
        winding_number(field, [(0, centroid), (0, centroid)])
    fan = [int(h) for h in disk.vertex_fans[CENTRE_VERTEX]]
    at_vertex = np.zeros(3)
    at_vertex[fan[0] % 3] = 1.0
    loop = [(fan[0] // 3, at_vertex), (fan[2] // 3, centroid), (fan[1] // 3, centroid)]
    with pytest.raises(PathError):
        winding_number(field, loop)


def test_evaluate_branch_range(disk):
    field = _global_field(disk, _constant, n=2)
    with pytest.raises(ValueError, match="Branch"):
        field.evaluate(0, [1.0, 0.0, 0.0], branch=2)


def test_fractional_power_at_zero(disk):
    field = _global_field(disk, _source, n=2)
    halfedge = int(disk.vertex_fans[CENTRE_VERTEX][0])
    bary = np.zeros(3)
    bary[halfedge % 3] = 1.0
    with pytest.raises(ZeroAtFractionalPowerError):
        field.evaluate(halfedge // 3, bary)
    integer = _global_field(disk, _source, exponent=2, n=2)
    assert integer.evaluate(halfedge // 3, bary) == 0


@given(
    st.integers(0, 71),
    st.floats(0.05, 0.9),
    st.floats(0.05, 0.9),
    st.sampled_from([2, 3, 4, 6]),
)
def test_branches_are_roots_of_power(face, u, v, n):
    field = _global_field(HYPOTHESIS_DISK, _vortex, exponent=1, n=n)
    total = u + v + 0.05
    bary = np.array([0.05, u, v]) / total
    power = field.power(face, bary)
    for branch in field.branches(face, bary):
        assert branch**n == pytest.approx(power, rel=1e-9, abs=1e-12)


def test_rotation_turns_power_values(disk):
    field = _global_field(disk, _vortex, exponent=2, n=2)
    turned = field.rotated(0.3)
    bary = np.array([0.2, 0.3, 0.5])
    for face in (0, 17, 50):
        assert turned.power(face, bary) == pytest.approx(np.exp(0.3j) * field.power(face, bary))


def test_global_field_is_continuous(disk):
    field = _global_field(disk, _vortex)
    for edge in disk.interior_edges[::5]:
        face_f, face_g = disk.edge_faces(int(edge))
        v0, v1 = disk.edges[edge]
        for vertex in (v0, v1):
            value_f = field.to_world(face_f, field.root(face_f, _corner(disk, face_f, vertex)))
            value_g = field.to_world(face_g, field.root(face_g, _corner(disk, face_g, vertex)))
            np.testing.assert_allclose(value_f, value_g, atol=1e-12)


def _corner(mesh, face, vertex):
    bary = np.zeros(3)
    bary[mesh.corner(face, int(vertex)) % 3] = 1.0
    return bary


def test_energy_of_zero_phases(icosphere):
    bm = build_beveled(icosphere)
    ops = build_operators(icosphere, bm)
    _, q = build_L(build_D(bm, icosphere), flap_mass(icosphere), ops["d0"])
    assert dirichlet_energy(np.zeros(bm.n_edges), q, icosphere) == 0.0
    with pytest.raises(ValueError, match="does not match"):
        dirichlet_energy(np.zeros(bm.n_edges + 1), q, icosphere)


def test_trivial_connections_cancel_holonomy(icosphere):
    result = trivial_connections(icosphere, two_pole_prescription(icosphere))
    assert result["holonomy_residual"] <= 1e-8
    assert result["dual_theta"].shape == (icosphere.n_edges,)
    assert result["face_field"].shape == (icosphere.n_faces,)


def test_trivial_connections_on_torus(torus):
    prescription = Prescription(
        n=1,
        singularities=[vertex_singularity(0, 1), vertex_singularity(40, -1)],
        homology=[0, 0],
    )
    result = trivial_connections(torus, prescription)
    assert result["holonomy_residual"] <= 1e-8


def test_trivial_connections_errors(icosphere):
    face = Singularity(kind=SingularityKind.FACE, element=0, index=2)
    with pytest.raises(NonVertexSingularityError):
        trivial_connections(icosphere, Prescription(n=1, singularities=[face]))
    with pytest.raises(IndexSumMismatchError):
        trivial_connections(icosphere, Prescription(n=1, singularities=[vertex_singularity(0, 1)]))


def test_constant_field_traces_straight_lines(disk):
    field = _global_field(disk, _constant)
    line = trace_streamline(field, 0, [0.5, 0.3, 0.2], step=0.05)
    points = line["points"]
    assert line["stop"] == "boundary"
    np.testing.assert_allclose(points[:, 1], points[0, 1], atol=1e-9)
    assert np.all(np.diff(points[:, 0]) > 0.0)
    assert points[-1, 0] == pytest.approx(1.0)


def test_vortex_traces_circles(disk):
    field = _global_field(disk, _vortex)
    line = trace_streamline(field, 54, np.full(3, 1.0 / 3.0), step=0.005, max_steps=300)
    assert line["stop"] == "max_steps"
    radii = np.hypot(line["points"][:, 0] - CENTRE.real, line["points"][:, 1] - CENTRE.imag)
    np.testing.assert_allclose(radii, radii[0], atol=2e-3)


def test_longer_traces_extend_shorter_ones(disk):
    field = _global_field(disk, _vortex)
    short = trace_streamline(field, 54, np.full(3, 1.0 / 3.0), step=0.01, max_steps=10)
    long = trace_streamline(field, 54, np.full(3, 1.0 / 3.0), step=0.01, max_steps=40)
    assert len(short["points"]) == 11
    assert len(long["points"]) == 41
    np.testing.assert_array_equal(long["points"][:11], short["points"])


def test_seed_points_are_reproducible(disk):
    first = seed_points(disk, 20, seed=3)
    second = seed_points(disk, 20, seed=3)
    for (face_a, bary_a), (face_b, bary_b) in zip(first, second, strict=True):
        assert face_a == face_b
        np.testing.assert_array_equal(bary_a, bary_b)
    assert all(0 <= face < disk.n_faces for face, _ in first)
    np.testing.assert_allclose([bary.sum() for _, bary in first], 1.0)


def test_field_file_roundtrip(disk, tmp_path):
    field = _global_field(disk, _vortex, exponent=3, n=2)
    path = tmp_path / "field.json"
    write_field(path, field)
    loaded = read_field(path, disk)
    np.testing.assert_array_equal(loaded.root_values, field.root_values)
    np.testing.assert_array_equal(loaded.exponents, field.exponents)
    assert loaded.n == 2


@pytest.mark.parametrize(
    "content",
    [
        b"{",
        b'{"format": "other"}',
        b'{"format": "polarfield-field", "N": 1, "faces": []}',
        b'{"format": "polarfield-field", "N": 1}',
    ],
)
def test_field_parse_errors(disk, content):
    with pytest.raises(ParseError):
        parse_field(content, disk)


def test_samples_skip_fractional_zeros(disk, tmp_path):
    field = _global_field(disk, _source, n=2)
    halfedge = int(disk.vertex_fans[CENTRE_VERTEX][0])
    face = halfedge // 3
    waypoints = [(face, _corner(disk, face, CENTRE_VERTEX)), (0, np.full(3, 1.0 / 3.0))]
    frame = write_samples(tmp_path / "samples.csv", field, waypoints, unit=True)
    assert list(frame.columns) == [
        "face",
        "b0",
        "b1",
        "b2",
        "re0",
        "im0",
        "re1",
        "im1",
        "log_scale",
        "phase",
    ]
    assert len(frame) == 1
    assert np.hypot(frame["re0"], frame["im0"]).iloc[0] == pytest.approx(1.0)


def test_vector_and_triplet_files(tmp_path):
    write_vector(tmp_path / "sigma.json", "sigma", [1.0, 2.5, 3.0])
    np.testing.assert_array_equal(read_vector(tmp_path / "sigma.json"), [1.0, 2.5, 3.0])
    with pytest.raises(ParseError):
        read_vector(tmp_path / "missing.json")

    write_triplets(tmp_path / "d0.txt", sparse.csr_matrix([[0.0, 1.0], [-1.0, 0.0]]))
    lines = (tmp_path / "d0.txt").read_text().splitlines()
    assert lines[0] == "# 2 2 2"
    assert lines[1:] == ["0 1 1", "1 0 -1"]


def test_streamline_obj(disk, tmp_path):
    field = _global_field(disk, _constant)
    lines = [trace_streamline(field, 0, [0.5, 0.3, 0.2], step=0.05, max_steps=5)]
    write_streamlines(tmp_path / "lines.obj", lines)
    content = (tmp_path / "lines.obj").read_text().splitlines()
    assert sum(row.startswith("v ") for row in content) == 6
    assert content[-1] == "l 1 2 3 4 5 6"


def test_compare_field_with_itself(disk):
    field = _global_field(disk, _vortex, n=2)
    points = disk.positions[disk.faces].mean(axis=1)[::4]
    report = compare_triangulations(
        field,
        disk,
        field,
        disk,
        points,
        loops_a=[vertex_loop(disk, CENTRE_VERTEX)],
    )
    assert report["n_points"] == len(points)
    assert report["max_deviation"] == pytest.approx(0.0, abs=1e-9)
    assert report["indices_a"] == ["1/2"]
    assert report["indices_b"] == []


def test_compare_requires_matching_orders(disk):
    first = _global_field(disk, _vortex)
    second = _global_field(disk, _vortex, n=2)
    with pytest.raises(FieldError):
        compare_triangulations(first, disk, second, disk, disk.positions[:3])
