import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from polarfield.core.bevel.complex import build_beveled
from polarfield.core.exceptions import (
    BoundaryEdgeError,
    BoundaryVertexError,
    DegeneratePlacementError,
    DuplicateElementError,
    IndexSumMismatchError,
    OutOfRangeParameterError,
    ParseError,
)
from polarfield.core.mesh.geometry import gaussian_curvature
from polarfield.core.prescribe.io import dump_prescription, parse_curves, parse_prescription
from polarfield.core.prescribe.targets import (
    assemble_targets,
    edge_targets,
    face_targets,
    vertex_targets,
    winding_targets,
)
from polarfield.core.prescribe.types import Prescription, Singularity, SingularityKind
from polarfield.core.prescribe.validate import homology_count, snap_placements, validate
from tests.conftest import two_pole_prescription, vertex_singularity

PRESCRIPTION_JSON = b"""{
  "N": 2,
  "singularities": [
    {"type": "vertex", "element": 0, "index": 1},
    {"type": "edge", "element": 4, "t": 0.25, "index": 1},
    {"type": "face", "element": 2, "bary": [0.2, 0.3, 0.5], "index": 2}
  ],
  "homology": [],
  "boundary": []
}"""


def test_parse_prescription():
    prescription = parse_prescription(PRESCRIPTION_JSON)
    assert prescription.n == 2
    assert [item["kind"] for item in prescription.singularities] == [
        SingularityKind.VERTEX,
        SingularityKind.EDGE,
        SingularityKind.FACE,
    ]
    assert prescription.singularities[1]["t"] == 0.25
    assert prescription.singularities[2]["bary"] == [0.2, 0.3, 0.5]
    assert prescription.index_sum() == 4
    assert not prescription.is_vertex_only
    assert prescription.power


def test_dump_is_stable():
    prescription = parse_prescription(PRESCRIPTION_JSON)
    dumped = dump_prescription(prescription)
    assert parse_prescription(dumped) == prescription
    assert dump_prescription(parse_prescription(dumped)) == dumped


@pytest.mark.parametrize(
    "content",
    [
        b"{",
        b"[]",
        b'{"singularities": [{"type": "corner", "element": 0, "index": 1}]}',
        b'{"singularities": [{"type": "vertex", "index": 1}]}',
        b'{"N": "two"}',
    ],
)
def test_parse_errors(content):
    with pytest.raises(ParseError):
        parse_prescription(content)


def test_parse_curves():
    curves = parse_curves(
        b'{"curves": [{"points": [{"face": 0, "bary": [1, 0, 0]},'
        b' {"face": 1, "bary": [0, 1, 0]}], "closed": true}]}',
    )
    assert len(curves) == 1
    assert curves[0]["closed"]
    assert curves[0]["points"][1]["face"] == 1
    with pytest.raises(ParseError):
        parse_curves(b'{"curves": [{"points": [{"face": 0, "bary": [1, 0, 0]}]}]}')


def test_symmetry_degree_setter():
    prescription = Prescription()
    prescription.n = 4
    assert prescription.n == 4
    with pytest.raises(ValueError, match=">= 1"):
        prescription.n = 0


def test_copy_is_independent():
    prescription = Prescription(n=1, singularities=[vertex_singularity(0, 1)], boundary=[1])
    copied = prescription.copy()
    copied.singularities[0]["index"] = 3
    copied.boundary = [0]
    assert prescription.singularities[0]["index"] == 1
    assert prescription.boundary == [1]


def test_two_poles_are_valid(icosphere):
    validate(two_pole_prescription(icosphere), icosphere)
    validate(two_pole_prescription(icosphere, n=4), icosphere)


def test_index_sum_mismatch(icosphere):
    prescription = Prescription(n=1, singularities=[vertex_singularity(0, 1)])
    with pytest.raises(IndexSumMismatchError) as info:
        validate(prescription, icosphere)
    assert info.value.details["index_sum"] == "1"
    assert info.value.details["euler_characteristic"] == 2
    assert info.value.error_name == "IndexSumMismatch"


def test_fractional_index_sum_reported(icosphere):
    prescription = Prescription(n=4, singularities=[vertex_singularity(0, 1)])
    with pytest.raises(IndexSumMismatchError) as info:
        validate(prescription, icosphere)
    assert info.value.details["index_sum"] == "1/4"


@pytest.mark.parametrize(
    ("singularities", "error"),
    [
        ([vertex_singularity(999, 2)], OutOfRangeParameterError),
        ([vertex_singularity(0, 0), vertex_singularity(1, 2)], OutOfRangeParameterError),
        ([vertex_singularity(0, 1), vertex_singularity(0, 1)], DuplicateElementError),
        (
            [Singularity(kind=SingularityKind.EDGE, element=0, index=2)],
            OutOfRangeParameterError,
        ),
        (
            [Singularity(kind=SingularityKind.EDGE, element=0, index=2, t=1.5)],
            OutOfRangeParameterError,
        ),
        (
            [Singularity(kind=SingularityKind.FACE, element=0, index=2, bary=[0.5, 0.6, -0.1])],
            OutOfRangeParameterError,
        ),
        (
            [Singularity(kind=SingularityKind.FACE, element=0, index=2, bary=[0.5, 0.5, 0.0])],
            DegeneratePlacementError,
        ),
    ],
)
def test_validation_errors(icosphere, singularities, error):
    with pytest.raises(error):
        validate(Prescription(n=1, singularities=singularities), icosphere)


def test_boundary_placements_rejected(disk):
    boundary_vertex = int(np.flatnonzero(disk.is_boundary_vertex)[0])
    with pytest.raises(BoundaryVertexError):
        validate(
            Prescription(n=1, singularities=[vertex_singularity(boundary_vertex, 1)]),
            disk,
        )
    boundary_edge = int(np.flatnonzero(disk.is_boundary_edge)[0])
    edge_singularity = Singularity(kind=SingularityKind.EDGE, element=boundary_edge, index=1, t=0.5)
    with pytest.raises(BoundaryEdgeError):
        validate(Prescription(n=1, singularities=[edge_singularity]), disk)


def test_linear_field_face_index(icosphere):
    face = Singularity(kind=SingularityKind.FACE, element=0, index=2)
    validate(Prescription(n=1, singularities=[face]), icosphere)
    with pytest.raises(OutOfRangeParameterError):
        validate(Prescription(n=1, singularities=[face], power=False), icosphere)


def test_loop_index_counts(torus, annulus):
    assert homology_count(torus) == 2
    assert homology_count(annulus) == 0
    with pytest.raises(OutOfRangeParameterError):
        validate(Prescription(n=1, homology=[0]), torus)
    validate(Prescription(n=1, homology=[0, 0]), torus)
    validate(Prescription(n=1, boundary=[0, 0]), annulus)
    with pytest.raises(OutOfRangeParameterError):
        validate(Prescription(n=1, boundary=[0]), annulus)


def test_snap_near_vertex_and_edge(icosphere):
    edge = 3
    near_vertex = Singularity(kind=SingularityKind.EDGE, element=edge, index=1, t=1e-12)
    near_edge = Singularity(
        kind=SingularityKind.FACE,
        element=5,
        index=1,
        bary=[0.0, 0.25, 0.75],
    )
    prescription = Prescription(n=1, singularities=[near_vertex, near_edge])
    snapped = snap_placements(prescription, icosphere)

    vertex_item, edge_item = snapped.singularities
    assert vertex_item["kind"] is SingularityKind.VERTEX
    assert vertex_item["element"] == int(icosphere.edges[edge][0])
    assert edge_item["kind"] is SingularityKind.EDGE
    a, b = (int(v) for v in icosphere.faces[5][1:])
    assert edge_item["element"] == icosphere.edge_index(a, b)
    expected_t = 0.75 if a < b else 0.25
    assert edge_item["t"] == pytest.approx(expected_t)
    assert prescription.singularities[0]["kind"] is SingularityKind.EDGE


@given(
    st.floats(0.05, 0.9),
    st.floats(0.05, 0.9),
    st.integers(-5, 5).filter(lambda value: value != 0),
)
def test_winding_targets_sum(u, v, index):
    corners = np.array([0.0, 1.0, 0.3 + 0.8j])
    w = 1.0 - u - v
    assume(w >= 0.05)
    s = complex(np.dot([w, u, v], corners))
    targets = winding_targets(corners, s, index)
    assert targets.sum() == pytest.approx(2.0 * np.pi * index)
    assert np.all(np.sign(targets) == np.sign(index))


def test_winding_targets_reject_boundary_points():
    corners = np.array([0.0, 1.0, 1j])
    with pytest.raises(DegeneratePlacementError):
        winding_targets(corners, 0.5 + 0.0j, 1)
    with pytest.raises(DegeneratePlacementError):
        winding_targets(corners, 2.0 + 2.0j, 1)


def test_face_targets(icosphere):
    group = face_targets(icosphere, 7, [0.2, 0.3, 0.5], -2)
    np.testing.assert_array_equal(group["edges"], [21, 22, 23])
    assert group["values"].sum() == pytest.approx(-4.0 * np.pi)


def test_edge_targets_wind_once(icosphere):
    bm = build_beveled(icosphere)
    edge = int(icosphere.interior_edges[0])
    group = edge_targets(bm, edge, 0.3, 1)
    values = group["values"]
    assert -values[0] - values[3] == pytest.approx(2.0 * np.pi)
    assert values[:3].sum() == pytest.approx(0.0, abs=1e-12)
    assert values[3:6].sum() == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_array_equal(values[6:], 0.0)
    assert group["flaps"] == [edge]


def test_vertex_targets_spread_curvature(icosphere):
    bm = build_beveled(icosphere)
    vertex = 0
    kappa = gaussian_curvature(icosphere)[vertex]
    group = vertex_targets(bm, vertex, 1, n=2)
    valence = len(icosphere.vertex_fans[vertex])
    outer = group["values"][1 : 3 * valence : 3]
    assert outer.sum() == pytest.approx(2.0 * np.pi - 2.0 * kappa)
    assert len(group["flaps"]) == valence


def test_assemble_targets_follows_prescription_order(icosphere):
    prescription = Prescription(
        n=1,
        singularities=[
            Singularity(kind=SingularityKind.FACE, element=3, index=1),
            vertex_singularity(0, 1),
        ],
    )
    targets = assemble_targets(prescription, build_beveled(icosphere))
    assert [group["kind"] for group in targets.groups] == [
        SingularityKind.FACE,
        SingularityKind.VERTEX,
    ]
    assert len(targets) == len(targets.edges) == len(targets.values)
