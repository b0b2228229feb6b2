import numpy as np
import pytest

from nspkit.exceptions import DimensionMismatch
from nspkit.generators import projection_feasible, projection_infeasible
from nspkit.linalg import Definiteness, kernel_basis
from nspkit.projection import (
    ProjectionProblem,
    build_partition_basis,
    check_conditions,
    construct_witness,
    residual_scale,
    strict_check,
    verify_witness,
)

from conftest import EXAMPLE_U_PERP, EXAMPLE_V_PERP


def achieved(prob, X):
    cross = prob.U.T @ X @ prob.V
    return prob.Q + cross + cross.T


class TestExample:
    def test_report(self, example):
        report = check_conditions(ProjectionProblem(*example))
        assert report.feasible
        assert report.coupling_cond
        assert not report.helmersson_cond
        assert report.kernel_cond_U.verdict is Definiteness.PD
        assert report.kernel_cond_V.verdict is Definiteness.PSD

    def test_projected_forms_match_printed_annihilators(self, example):
        # our bases are orthonormal; map them onto the printed ones
        Q, U, V = example
        report = check_conditions(ProjectionProblem(Q, U, V))
        KU, KV = kernel_basis(U), kernel_basis(V)
        CU, CV = KU.T @ EXAMPLE_U_PERP, KV.T @ EXAMPLE_V_PERP
        assert np.allclose(KU @ CU, EXAMPLE_U_PERP, atol=1e-12)
        assert np.allclose(KV @ CV, EXAMPLE_V_PERP, atol=1e-12)
        assert np.allclose(CU.T @ report.projected_U @ CU, [[1.0]], atol=1e-12)
        assert np.allclose(CV.T @ report.projected_V @ CV, [[1.0, -1.0], [-1.0, 1.0]], atol=1e-12)

    def test_partition_widths(self, example):
        basis = build_partition_basis(ProjectionProblem(*example))
        assert basis.widths == (0, 1, 1, 0, 1)
        assert abs(np.linalg.det(basis.T)) > 1e-8

    def test_witness(self, example):
        prob = ProjectionProblem(*example)
        w = construct_witness(prob)
        assert w.X.shape == (2, 1)
        assert np.isrealobj(w.X)
        assert w.residual_min_eig >= -1e-8
        assert verify_witness(prob, w.X) == pytest.approx(w.residual_min_eig, abs=1e-12)

    def test_not_strict(self, example):
        assert not strict_check(ProjectionProblem(*example))


def test_empty_maps_with_psd_q():
    prob = ProjectionProblem(np.diag([1.0, 0.0, 2.0]), np.zeros((0, 3)), np.zeros((0, 3)))
    assert check_conditions(prob).feasible
    assert construct_witness(prob).X.shape == (0, 0)


def test_zero_everything():
    prob = ProjectionProblem(np.zeros((3, 3)), np.zeros((0, 3)), np.zeros((0, 3)))
    basis = build_partition_basis(prob)
    assert basis.widths == (0, 0, 0, 3, 0)
    assert construct_witness(prob).residual_min_eig >= 0.0


def test_infeasible_kernel_condition():
    prob = ProjectionProblem(np.diag([1.0, -1.0]), [[1.0, 0.0]], [[1.0, 0.0]])
    report = check_conditions(prob)
    assert not report.feasible
    assert report.kernel_cond_U.min_eig == pytest.approx(-1.0)


def test_coupling_only_failure():
    """Both kernel forms PSD, yet the coupling condition fails."""
    # ker U = span(e2, e3), ker V = span(e1, e3); only e3 is shared
    Q = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    U = np.array([[1.0, 0.0, 0.0]])
    V = np.array([[0.0, 1.0, 0.0]])
    report = check_conditions(ProjectionProblem(Q, U, V))
    assert not report.coupling_cond
    assert report.offending_vector is not None
    # no X can work: the (e1, e3) block of the achieved matrix never changes
    for X in ([[0.0]], [[10.0]], [[-10.0]]):
        assert verify_witness(ProjectionProblem(Q, U, V), np.array(X)) < 0


def test_full_rank_maps_identity():
    prob = ProjectionProblem(np.diag([-3.0, 1.0]), np.eye(2), np.eye(2))
    basis = build_partition_basis(prob)
    assert basis.widths == (0, 0, 0, 0, 2)
    w = construct_witness(prob)
    assert np.linalg.eigvalsh(achieved(prob, w.X))[0] >= -1e-12
    assert np.allclose(w.X, w.X[0, 0] * np.eye(2))
    assert w.X[0, 0] >= 1.5


def test_strict_examples():
    assert strict_check(ProjectionProblem(np.eye(2), [[1.0, 0.0]], [[1.0, 0.0]]))
    assert not strict_check(ProjectionProblem(np.zeros((2, 2)), [[1.0, 0.0]], [[1.0, 0.0]]))
    assert strict_check(ProjectionProblem(np.zeros((2, 2)), np.eye(2), np.eye(2)))


def test_verify_witness_examples():
    prob = ProjectionProblem(np.diag([2.0, 1.0]), [[1.0, 0.0]], [[0.0, 1.0]])
    assert verify_witness(prob, np.zeros((1, 1))) == pytest.approx(1.0)
    prob = ProjectionProblem(np.diag([1.0, -1.0]), [[1.0, 1.0]], [[1.0, 0.0]])
    assert verify_witness(prob, np.zeros((1, 1))) == pytest.approx(-1.0)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        ProjectionProblem(np.eye(3), np.eye(2), np.eye(3))


def test_report_serializes(example):
    d = check_conditions(ProjectionProblem(*example)).to_dict()
    assert d["feasible"] is True and d["helmersson_cond"] is False


# ---- properties on seeded random families ---------------------------------


def test_round_trip_feasible(rng):
    for _ in range(300):
        p = int(rng.integers(1, 13))
        Q, U, V, X0 = projection_feasible(rng, p)
        prob = ProjectionProblem(Q, U, V)
        report = check_conditions(prob)
        assert report.feasible
        w = construct_witness(prob, report)
        assert w.residual_min_eig >= -1e-8 * residual_scale(prob, w.X)


def test_planted_infeasible(rng):
    for _ in range(300):
        p = int(rng.integers(1, 13))
        Q, U, V, _ = projection_infeasible(rng, p)
        assert not check_conditions(ProjectionProblem(Q, U, V)).feasible


def test_projection_identities(rng):
    for _ in range(200):
        p = int(rng.integers(1, 10))
        Q, U, V, _ = projection_feasible(rng, p)
        prob = ProjectionProblem(Q, U, V)
        basis = build_partition_basis(prob)
        T1, T2, T3, T4, T5 = basis.blocks
        s = max(1.0, np.linalg.norm(U), np.linalg.norm(V))
        assert np.allclose(U @ np.hstack([T1, T3, T4]), 0.0, atol=1e-9 * s)
        assert np.allclose(V @ np.hstack([T2, T3, T4]), 0.0, atol=1e-9 * s)
        assert sum(basis.widths) == p
        assert np.linalg.matrix_rank(basis.T) == p


def test_strict_implies_nonstrict(rng):
    for _ in range(300):
        p = int(rng.integers(1, 9))
        Q = rng.standard_normal((p, p))
        Q = Q + Q.T + rng.uniform(0, 4) * np.eye(p)
        U = rng.standard_normal((int(rng.integers(0, p + 1)), p))
        V = rng.standard_normal((int(rng.integers(0, p + 1)), p))
        prob = ProjectionProblem(Q, U, V)
        if strict_check(prob):
            assert check_conditions(prob).feasible
