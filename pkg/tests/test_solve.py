import itertools

import numpy as np
import pytest
from scipy import optimize, sparse

from polarfield.core.bevel.complex import build_beveled
from polarfield.core.bevel.operators import build_operators
from polarfield.core.discretize.flaps import build_D, build_L, flap_mass
from polarfield.core.discretize.singular import build_DS_MS
from polarfield.core.exceptions import InfeasibleError, RankDeficientConstraintsError
from polarfield.core.prescribe.targets import assemble_targets
from polarfield.core.prescribe.types import Prescription, SingularityKind
from polarfield.core.solve.exponents import fixed_exponents, interpolate_indices, round_half_away
from polarfield.core.solve.kkt import (
    constraint_residual,
    kkt_residual,
    solve_kkt,
    solve_kkt_proximal,
)
from polarfield.core.solve.qp import solve_bounded_qp
from polarfield.core.solve.sigma import scale_pins, solve_sigma
from polarfield.core.solve.theta import cycle_constraints, solve_theta
from polarfield.core.solve.types import CycleConstraints, ScaleConstraints
from tests.conftest import two_pole_prescription, vertex_singularity

HESSIAN = sparse.csr_matrix([[6.0, 2.0, 1.0], [2.0, 5.0, 2.0], [1.0, 2.0, 4.0]])
CONSTRAINTS = sparse.csr_matrix([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])


def test_kkt_textbook_example():
    x, y, delta = solve_kkt(HESSIAN, CONSTRAINTS, np.array([8.0, 3.0, 3.0]), np.array([3.0, 0.0]))
    np.testing.assert_allclose(x, [2.0, -1.0, 1.0], atol=1e-6)
    np.testing.assert_allclose(y, [-3.0, 2.0], atol=1e-6)
    assert delta == 1e-10


def test_kkt_without_constraints():
    gradient = np.array([1.0, 2.0, 3.0])
    x, y, _ = solve_kkt(HESSIAN, sparse.csr_matrix((0, 3)), gradient, np.zeros(0))
    np.testing.assert_allclose(HESSIAN @ x, gradient, atol=1e-8)
    assert y.shape == (0,)


def test_proximal_kkt_tolerates_repeated_rows():
    repeated = sparse.vstack([CONSTRAINTS, CONSTRAINTS[0]]).tocsr()
    gradient = np.array([8.0, 3.0, 3.0])
    rhs = np.array([3.0, 0.0, 3.0])
    x, y = solve_kkt_proximal(HESSIAN, repeated, gradient, rhs)
    np.testing.assert_allclose(x, [2.0, -1.0, 1.0], atol=1e-6)
    assert kkt_residual(HESSIAN, repeated, gradient, rhs, x, y) < 1e-6


def test_kkt_shift_is_refined_away():
    # the shift is 1e-2 on the unit diagonal entry and zero on the constrained one
    hessian = sparse.diags([1e8, 1.0, 0.0]).tocsr()
    constraints = sparse.csr_matrix([[0.0, 0.0, 1.0]])
    gradient = np.array([1e8, 3.0, 0.0])
    rhs = np.array([2.0])
    x, y, delta = solve_kkt(hessian, constraints, gradient, rhs)
    np.testing.assert_allclose(x, [1.0, 3.0, 2.0], rtol=1e-9)
    assert delta == 1e-10
    assert kkt_residual(hessian, constraints, gradient, rhs, x, y) < 1e-10


def test_constraint_residual_is_relative():
    constraints = sparse.csr_matrix([[1.0, 0.0], [0.0, 1.0]])
    assert constraint_residual(constraints, np.array([9.0, 0.0]), np.array([8.0, 0.0])) == 0.1
    assert constraint_residual(sparse.csr_matrix((0, 2)), np.zeros(0), np.ones(2)) == 0.0


def _random_qp(seed, n=6, m=2):
    rng = np.random.default_rng(seed)
    basis = rng.normal(size=(n, n))
    p = basis.T @ basis + 0.1 * np.eye(n)
    q = rng.normal(size=n) * 3.0
    a = rng.normal(size=(m, n))
    start = rng.uniform(0.5, 2.0, size=n)
    return p, q, a, a @ start, start


@pytest.mark.parametrize("seed", range(50))
def test_interior_point_matches_slsqp(seed):
    p, q, a, b, start = _random_qp(seed)
    result = solve_bounded_qp(sparse.csr_matrix(p), q, sparse.csr_matrix(a), b, 0.0)
    reference = optimize.minimize(
        lambda x: 0.5 * x @ p @ x + q @ x,
        start,
        jac=lambda x: p @ x + q,
        method="SLSQP",
        bounds=[(0.0, None)] * len(q),
        constraints=[{"type": "eq", "fun": lambda x: a @ x - b, "jac": lambda _: a}],
        options={"ftol": 1e-12, "maxiter": 1000},
    )
    scale = max(1.0, abs(reference.fun))
    assert result["objective"] == pytest.approx(reference.fun, abs=1e-6 * scale)
    assert result["objective"] <= reference.fun + 1e-6 * scale
    assert np.all(result["x"] >= 0.0)
    np.testing.assert_allclose(a @ result["x"], b, atol=1e-8)


def test_inactive_bounds_return_equality_minimizer():
    p = sparse.identity(3, format="csr")
    a = sparse.csr_matrix([[1.0, 1.0, 1.0]])
    result = solve_bounded_qp(p, np.zeros(3), a, np.array([3.0]), 0.0)
    np.testing.assert_allclose(result["x"], [1.0, 1.0, 1.0])
    assert result["iterations"] == 0


def test_active_bound_is_respected():
    p = sparse.identity(2, format="csr")
    a = sparse.csr_matrix((0, 2))
    result = solve_bounded_qp(p, np.array([1.0, -2.0]), a, np.zeros(0), 0.0)
    np.testing.assert_allclose(result["x"], [0.0, 2.0], atol=1e-6)
    assert result["complementarity"] <= 1e-10


def test_polish_lands_on_active_bounds():
    p = sparse.identity(3, format="csr")
    a = sparse.csr_matrix([[0.0, 1.0, 1.0]])
    result = solve_bounded_qp(p, np.array([1.0, -2.0, -1.0]), a, np.array([3.0]), 0.0)
    assert result["x"][0] == 0.0
    np.testing.assert_allclose(result["x"], [0.0, 2.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(a @ result["x"], [3.0], atol=1e-12)
    assert result["z"][0] == pytest.approx(1.0, abs=1e-9)


def test_infeasible_qp():
    p = sparse.identity(2, format="csr")
    a = sparse.csr_matrix([[1.0, 1.0]])
    with pytest.raises(InfeasibleError):
        solve_bounded_qp(p, np.zeros(2), a, np.array([-1.0]), 0.0)


def test_round_half_away():
    np.testing.assert_array_equal(
        round_half_away(np.array([0.5, 1.5, -0.5, -2.5, 0.49, 2.51])),
        [1, 2, -1, -3, 0, 3],
    )


def test_singular_vertex_fixes_fan_exponents(icosphere):
    prescription = Prescription(n=1, singularities=[vertex_singularity(0, 2)])
    theta = np.zeros(3 * icosphere.n_faces)
    fixed = fixed_exponents(theta, prescription, icosphere)
    fan_faces = {int(h) // 3 for h in icosphere.vertex_fans[0]}
    assert set(fixed) == fan_faces
    assert set(fixed.values()) == {2}


def test_large_split_phase_forces_exponent(icosphere):
    theta = np.zeros(3 * icosphere.n_faces)
    theta[3 * 4 + 1] = 2.5 * np.pi
    fixed = fixed_exponents(theta, Prescription(n=1), icosphere)
    assert fixed == {4: 3}


def test_exponents_default_to_one(torus):
    exponents = interpolate_indices(np.zeros(3 * torus.n_faces), Prescription(n=1), torus)
    np.testing.assert_array_equal(exponents, 1)


def test_exponents_between_fixed_faces(icosphere):
    prescription = Prescription(
        n=1,
        singularities=[vertex_singularity(0, 3), vertex_singularity(1, -1)],
    )
    exponents = interpolate_indices(np.zeros(3 * icosphere.n_faces), prescription, icosphere)
    assert exponents.min() >= 1
    assert exponents.max() == 3
    assert exponents.dtype.kind == "i"


def test_cycle_constraints_drop_one_row_per_component(icosphere):
    bm = build_beveled(icosphere)
    ops = build_operators(icosphere, bm)
    constraints = cycle_constraints(ops, bm, two_pole_prescription(icosphere))
    assert constraints["dropped_rows"] == [bm.n_faces - 1]
    assert constraints["n_face_rows"] == bm.n_faces - 1
    assert constraints["matrix"].shape == (bm.n_faces - 1, bm.n_edges)


def _disk_setup(mesh):
    bm = build_beveled(mesh)
    ops = build_operators(mesh, bm)
    flaps = build_D(bm, mesh)
    laplacian, q = build_L(flaps, flap_mass(mesh), ops["d0"])
    return bm, ops, laplacian, q


def test_negative_isotropy_weight_rejected(disk):
    bm, ops, _, q = _disk_setup(disk)
    constraints = cycle_constraints(ops, bm, Prescription(n=1, boundary=[1]))
    with pytest.raises(ValueError, match="lambda_s"):
        solve_theta(q, {"D_S": None, "M_S": None, "b_S": None}, constraints, -1.0)


def test_unconstrained_scales_have_zero_energy(disk):
    bm, _, laplacian, _ = _disk_setup(disk)
    empty = ScaleConstraints(matrix=sparse.csr_matrix((0, bm.n_corners)), sources=[], elements=[])
    solution = solve_sigma(laplacian, empty, bm, 1e-6)
    np.testing.assert_array_equal(solution["pins"], [0])
    assert solution["sigma"][0] == pytest.approx(1.0)
    assert solution["sigma"].min() >= 1e-6 * (1.0 - 1e-6)
    assert solution["objective"] == pytest.approx(0.0, abs=1e-6)


def test_scale_bounds(disk):
    bm, _, laplacian, _ = _disk_setup(disk)
    empty = ScaleConstraints(matrix=sparse.csr_matrix((0, bm.n_corners)), sources=[], elements=[])
    with pytest.raises(ValueError, match="eps"):
        solve_sigma(laplacian, empty, bm, 0.0)


def test_one_pin_per_component(plate_genus_two):
    bm = build_beveled(plate_genus_two)
    np.testing.assert_array_equal(scale_pins(bm), [0])


def _no_isotropy(bm):
    return {
        "D_S": sparse.csr_matrix((0, bm.n_edges)),
        "M_S": sparse.csr_matrix((0, 0)),
        "b_S": np.zeros(0),
    }


def _with_repeated_row(constraints, offset):
    matrix = sparse.vstack([constraints["matrix"], constraints["matrix"][0]]).tocsr()
    rhs = np.append(constraints["rhs"], constraints["rhs"][0] + offset)
    return CycleConstraints(
        matrix=matrix,
        rhs=rhs,
        kept_rows=constraints["kept_rows"],
        dropped_rows=constraints["dropped_rows"],
        n_face_rows=constraints["n_face_rows"],
        n_homology_rows=constraints["n_homology_rows"],
        n_boundary_rows=constraints["n_boundary_rows"] + 1,
    )


def test_dependent_phase_rows_fall_back_to_proximal_solve(disk):
    bm, ops, _, q = _disk_setup(disk)
    constraints = _with_repeated_row(cycle_constraints(ops, bm, Prescription(n=1, boundary=[1])), 0)
    solution = solve_theta(q, _no_isotropy(bm), constraints, 0.0)
    assert solution["cycle_residual"] <= 1e-8
    assert solution["boundary_residual"] <= 1e-8
    assert solution["kkt_residual"] <= 1e-6


def test_inconsistent_phase_rows_are_rejected(disk):
    bm, ops, _, q = _disk_setup(disk)
    base = cycle_constraints(ops, bm, Prescription(n=1, boundary=[1]))
    constraints = _with_repeated_row(base, 1.0)
    with pytest.raises(RankDeficientConstraintsError):
        solve_theta(q, _no_isotropy(bm), constraints, 0.0)


def test_singular_edge_flap_takes_large_phase_exponent(icosphere):
    edge = int(icosphere.interior_edges[0])
    face_f, face_g = icosphere.edge_faces(edge)
    prescription = Prescription(
        n=1,
        singularities=[{"kind": SingularityKind.EDGE, "element": edge, "index": 1, "t": 0.5}],
    )
    theta = np.zeros(3 * icosphere.n_faces)
    theta[3 * face_f] = 1.2 * np.pi
    fixed = fixed_exponents(theta, prescription, icosphere)
    assert fixed[face_f] == 2
    assert fixed[face_g] == 1


def test_face_singularity_keeps_its_exponent(icosphere):
    prescription = Prescription(
        n=1,
        singularities=[{"kind": SingularityKind.FACE, "element": 3, "index": 1}],
    )
    theta = np.zeros(3 * icosphere.n_faces)
    theta[3 * 3 + 2] = 1.5 * np.pi
    assert fixed_exponents(theta, prescription, icosphere) == {3: 1}


def test_isotropy_term_shrinks_as_its_weight_grows(icosphere):
    bm = build_beveled(icosphere)
    ops = build_operators(icosphere, bm)
    flaps = build_D(bm, icosphere)
    _, q = build_L(flaps, flap_mass(icosphere), ops["d0"])
    prescription = two_pole_prescription(icosphere)
    d_s, m_s, b_s = build_DS_MS(assemble_targets(prescription, bm), flaps, bm)
    mass = {"D_S": d_s, "M_S": m_s, "b_S": b_s}
    constraints = cycle_constraints(ops, bm, prescription)
    isotropy = [
        solve_theta(q, mass, constraints, weight)["objective_isotropy"]
        for weight in (0.0, 1.0, 10.0, 100.0)
    ]
    for lower, higher in itertools.pairwise(isotropy):
        assert higher <= lower * (1.0 + 1e-9) + 1e-12
