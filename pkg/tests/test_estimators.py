import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from nspkit import (
    DilationCompleter,
    InfeasibleProblem,
    Interpolator,
    MultiplierSearch,
    NotMarginallyStable,
    ProjectionSolver,
    StabilityCertifier,
)

from conftest import EXAMPLE_Q, rotation


def test_projection_solver(example):
    est = ProjectionSolver().fit(*example)
    assert est.feasible_
    assert est.X_.shape == (2, 1)
    assert est.score() >= -1e-8
    assert est.score(np.zeros((2, 1))) == pytest.approx(np.linalg.eigvalsh(EXAMPLE_Q)[0])


def test_projection_solver_infeasible():
    args = (np.diag([1.0, -1.0]), [[1.0, 0.0]], [[1.0, 0.0]])
    est = ProjectionSolver().fit(*args)
    assert not est.feasible_ and est.X_ is None
    assert est.score() == -np.inf
    with pytest.raises(InfeasibleProblem):
        ProjectionSolver(raise_infeasible=True).fit(*args)


def test_params_and_clone():
    est = ProjectionSolver(tol_psd=1e-6)
    assert est.get_params()["tol_psd"] == 1e-6
    copy = clone(est).set_params(tol_rank=1e-8)
    assert copy.get_params()["tol_rank"] == 1e-8 and est.tol_rank == 1e-10
    assert "form" in StabilityCertifier().get_params()


def test_unfitted():
    with pytest.raises(NotFittedError):
        ProjectionSolver().score()
    with pytest.raises(NotFittedError):
        DilationCompleter().transform()


def test_tolerances_flow_through(example):
    est = ProjectionSolver(tol_psd=1e-5).fit(*example)
    assert est.problem_.tol.tol_psd == 1e-5


@pytest.mark.parametrize("form", ["p", "s"])
def test_stability_certifier(form):
    est = StabilityCertifier(form=form).fit(rotation(0.4))
    assert est.P_.shape == (2, 2) and est.X_.shape == (2, 2)
    assert est.predict(rotation(0.4))
    assert not est.predict(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(NotMarginallyStable):
        StabilityCertifier(form=form).fit(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_dilation_completer():
    est = DilationCompleter().fit([[0.0]], [[1.0]], [[1.0]])
    G = est.transform()
    assert G.shape == (2, 2)
    assert np.linalg.norm(G, 2) <= 1 + 1e-8
    assert est.norm_ == pytest.approx(np.linalg.norm(G, 2))


def test_interpolator():
    est = Interpolator(P=np.diag([1.0, -1.0]), n=1).fit([1.0], [0.5])
    assert est.predict([2.0]) == pytest.approx([1.0])
    assert est.predict(np.array([[1.0], [3.0]])).ravel() == pytest.approx([0.5, 1.5])
    assert est.match_error_ <= 1e-12 and est.min_eig_ >= 0
    with pytest.raises(ValueError):
        Interpolator().fit([1.0], [0.5])


@pytest.mark.parametrize(
    "params, feasible",
    [
        (dict(variant="finsler"), True),
        (dict(variant="matrix", n=1), True),
        (dict(variant="scalar", xbar=np.array([1.0, 0.0])), True),
    ],
)
def test_multiplier_search(params, feasible):
    est = MultiplierSearch(**params).fit(np.eye(2) + np.diag([1.0, -1.0]), np.diag([1.0, -1.0]))
    assert est.feasible_ is feasible
    assert np.linalg.eigvalsh(np.eye(2) + (1 - est.alpha_) * np.diag([1.0, -1.0]))[0] > 0


def test_multiplier_search_errors():
    with pytest.raises(ValueError):
        MultiplierSearch(variant="matrix").fit(np.eye(2), np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        MultiplierSearch(variant="bogus").fit(np.eye(2), np.eye(2))
