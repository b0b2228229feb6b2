import numpy as np
import pytest

from nspkit.exceptions import HypothesisViolated, SlaterViolated
from nspkit.generators import quadratic_instance, slemma_instance
from nspkit.quadratic import (
    QuadraticForm,
    SLemmaPair,
    finsler,
    interpolate,
    interpolation_residuals,
    matrix_s_lemma,
    min_eig_along,
    scalar_s_lemma,
)

N_STD = np.diag([1.0, -1.0])
E1 = np.array([1.0, 0.0])


def graph_form(P, n, Delta):
    G = np.vstack([np.eye(n), Delta])
    return G.T @ P @ G


# ---- forms and interpolation ------------------------------------------------


def test_form_rejects_nonnegative_r():
    with pytest.raises(HypothesisViolated):
        QuadraticForm(np.diag([1.0, 0.0]), 1)


def test_form_rejects_bad_schur_complement():
    with pytest.raises(HypothesisViolated):
        QuadraticForm(np.diag([-1.0, -1.0]), 1)


def test_zero_data_gives_central_solution():
    P = np.array([[2.0, 1.0], [1.0, -1.0]])
    form = QuadraticForm(P, 1)
    Delta = interpolate(form, [0.0], [0.0])
    assert np.allclose(Delta, -np.linalg.solve(form.R, form.S.T))


def test_scalar_interpolation():
    form = QuadraticForm(np.diag([1.0, -1.0]), 1)
    Delta = interpolate(form, [1.0], [0.5])
    assert Delta.shape == (1, 1)
    assert Delta[0, 0] == pytest.approx(0.5)
    assert graph_form(form.P, 1, Delta)[0, 0] == pytest.approx(0.75)


def test_interpolation_on_central_response(rng):
    for _ in range(50):
        n, m = rng.integers(1, 5, 2)
        P, _, _ = quadratic_instance(rng, int(n), int(m))
        form = QuadraticForm(P, int(n))
        z = rng.standard_normal(int(n))
        w = -np.linalg.solve(form.R, form.S.T @ z)
        Delta = interpolate(form, z, w)
        assert np.allclose(Delta @ z, w, atol=1e-9)
        comp = form.Q - form.S @ np.linalg.solve(form.R, form.S.T)
        x = np.concatenate([z, w])
        assert x @ P @ x == pytest.approx(z @ comp @ z, abs=1e-8 * max(1, np.linalg.norm(P)))


def test_interpolation_rejects_negative_value():
    form = QuadraticForm(np.diag([1.0, -1.0]), 1)
    with pytest.raises(HypothesisViolated):
        interpolate(form, [1.0], [2.0])


def test_interpolation_random(rng):
    for _ in range(200):
        n, m = (int(k) for k in rng.integers(1, 7, 2))
        P, z, w = quadratic_instance(rng, n, m)
        form = QuadraticForm(P, n)
        Delta = interpolate(form, z, w)
        err, lam = interpolation_residuals(form, z, w, Delta)
        scale = max(1.0, np.linalg.norm(P, 2)) * max(1.0, np.linalg.norm(Delta, 2) ** 2)
        assert err <= 1e-8 * (1 + np.linalg.norm(w))
        assert lam >= -1e-8 * scale
        # the graph inequality evaluated on z recovers a nonnegative value
        assert z @ graph_form(P, n, Delta) @ z >= -1e-8 * scale * max(1.0, z @ z)


# ---- multiplier searches -----------------------------------------------------


def test_min_eig_along_is_concave(rng):
    M = rng.standard_normal((4, 4))
    N = rng.standard_normal((4, 4))
    f = min_eig_along(M + M.T, N + N.T)
    a, b = -2.0, 3.0
    for t in np.linspace(0, 1, 11):
        assert f(t * a + (1 - t) * b) >= t * f(a) + (1 - t) * f(b) - 1e-12


class TestMatrixSLemma:
    def test_identity_m(self):
        r = matrix_s_lemma(SLemmaPair(np.eye(2), N_STD, 1))
        assert r.feasible
        assert np.linalg.eigvalsh(np.eye(2) - r.alpha * N_STD)[0] > 0
        assert r.alpha >= 0

    def test_shifted(self):
        r = matrix_s_lemma(SLemmaPair(N_STD + np.eye(2), N_STD, 1))
        assert r.feasible and r.alpha >= 0

    def test_infeasible(self):
        r = matrix_s_lemma(SLemmaPair(np.diag([-1.0, 1.0]), N_STD, 1))
        assert not r.feasible and r.status == "infeasible"

    def test_pair_hypotheses(self):
        with pytest.raises(HypothesisViolated):
            SLemmaPair(np.eye(2), np.eye(2), 1)

    def test_sampled_corroboration(self, rng):
        """Every Z with a nonnegative N-graph form also has a positive M-graph form."""
        checked = 0
        for _ in range(40):
            M, N, n, _ = slemma_instance(rng, 4, "matrix")
            pair = SLemmaPair(M, N, n)
            r = matrix_s_lemma(pair)
            if not r.feasible:
                continue
            form = QuadraticForm(N, n)
            for _ in range(100):
                z = rng.standard_normal(n)
                _, _, w = quadratic_instance_like(rng, form, z)
                Z = interpolate(form, z, w)
                G = np.vstack([np.eye(n), Z])
                assert np.linalg.eigvalsh(G.T @ N @ G)[0] >= -1e-7
                assert np.linalg.eigvalsh(G.T @ M @ G)[0] > 0
                checked += 1
        assert checked > 0


def quadratic_instance_like(rng, form, z):
    """A response w with ``[z; w]^T N [z; w] >= 0`` for a fixed form and z."""
    w0 = -np.linalg.solve(form.R, form.S.T @ z)
    comp = form.Q - form.S @ np.linalg.solve(form.R, form.S.T)
    budget = max(float(z @ comp @ z), 0.0)
    d = rng.standard_normal(form.m)
    curv = float(d @ (-form.R) @ d)
    w = w0 + np.sqrt(rng.uniform(0, 0.99) * budget / curv) * d
    return form, z, w


class TestScalarSLemma:
    def test_identity(self):
        r = scalar_s_lemma(np.eye(2), N_STD, E1)
        assert r.feasible and r.alpha >= 0

    def test_proportional_is_infeasible(self):
        assert not scalar_s_lemma(2 * N_STD, N_STD, E1).feasible

    def test_shifted(self):
        r = scalar_s_lemma(N_STD + np.eye(2), N_STD, E1)
        assert r.feasible
        assert np.linalg.eigvalsh(N_STD + np.eye(2) - r.alpha * N_STD)[0] > 0

    def test_slater_violation(self):
        with pytest.raises(SlaterViolated):
            scalar_s_lemma(np.eye(2), N_STD, np.array([0.0, 1.0]))


class TestFinsler:
    def test_zero_n(self):
        r = finsler(np.diag([2.0, 1.0]), np.zeros((2, 2)))
        assert r.feasible

    def test_interval(self):
        r = finsler(np.diag([2.0, 0.0]), N_STD)
        assert r.feasible
        assert 0.0 < r.alpha < 2.0
        assert r.alpha == pytest.approx(1.0, abs=1e-6)

    def test_negative_multiplier(self):
        r = finsler(np.diag([0.0, 2.0]), N_STD)
        assert r.feasible and r.alpha < 0

    def test_all_zero(self):
        r = finsler(np.zeros((2, 2)), np.zeros((2, 2)))
        assert not r.feasible and r.status == "infeasible"

    def test_plateau_is_not_a_cap_hit(self):
        # λ_min(M - αN) = min(α - 1, 0) flattens out at zero
        r = finsler(np.diag([-1.0, 0.0]), np.diag([-1.0, 0.0]))
        assert not r.feasible and r.status == "infeasible"

    def test_unbounded_reports_cap(self):
        # λ_min of [[α, 1], [1, 0]] rises towards 0 without reaching it
        r = finsler(np.array([[0.0, 1.0], [1.0, 0.0]]), np.diag([-1.0, 0.0]))
        assert not r.feasible
        assert r.status == "infeasible_at_cap"


def test_result_serializes():
    d = finsler(np.diag([2.0, 0.0]), N_STD).to_dict()
    assert set(d) == {"alpha", "min_eig", "feasible", "status", "bracket"}
