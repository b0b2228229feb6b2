"""scikit-learn style front ends.

Each estimator takes its tolerances as constructor parameters (so
``get_params``/``set_params``/``clone`` work) and stores results in trailing
underscore attributes after ``fit``.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .dilation import DilationProblem, complete, verify_dilation
from .linalg import Tolerances
from .projection import ProjectionProblem, check_conditions, construct_witness, verify_witness
from .quadratic import (
    QuadraticForm,
    SLemmaPair,
    finsler,
    interpolate,
    interpolation_residuals,
    matrix_s_lemma,
    scalar_s_lemma,
)
from .stability import certificate_P_form, certificate_S_form, is_marginally_stable
from .validation import check_matrix, check_vector

__all__ = [
    "ProjectionSolver",
    "StabilityCertifier",
    "DilationCompleter",
    "Interpolator",
    "MultiplierSearch",
]


class _TolerantEstimator(BaseEstimator):
    def _tolerances(self):
        return Tolerances(
            tol_rank=self.tol_rank,
            tol_psd=self.tol_psd,
            tol_sym=self.tol_sym,
            tol_residual=self.tol_residual,
        )


class ProjectionSolver(_TolerantEstimator):
    """Find X with ``Q + U^T X V + V^T X^T U >= 0``.

    After ``fit``: ``report_`` always; ``X_``, ``witness_`` and
    ``residual_min_eig_`` only when the problem is feasible (otherwise
    ``X_`` is None, or :class:`InfeasibleProblem` is raised when
    ``raise_infeasible=True``).
    """

    def __init__(self, tol_rank=1e-10, tol_psd=1e-9, tol_sym=1e-12, tol_residual=1e-8,
                 raise_infeasible=False):
        self.tol_rank = tol_rank
        self.tol_psd = tol_psd
        self.tol_sym = tol_sym
        self.tol_residual = tol_residual
        self.raise_infeasible = raise_infeasible

    def fit(self, Q, U, V):
        self.problem_ = ProjectionProblem(Q, U, V, self._tolerances())
        self.report_ = check_conditions(self.problem_)
        self.feasible_ = self.report_.feasible
        self.witness_ = None
        self.X_ = None
        self.residual_min_eig_ = None
        if self.feasible_ or self.raise_infeasible:
            self.witness_ = construct_witness(self.problem_, self.report_)
            self.X_ = self.witness_.X
            self.residual_min_eig_ = self.witness_.residual_min_eig
        return self

    def score(self, X=None):
        """Smallest eigenvalue of the achieved inequality for ``X`` (default ``X_``)."""
        check_is_fitted(self, "report_")
        X = self.X_ if X is None else X
        if X is None:
            return -np.inf
        return verify_witness(self.problem_, X)


class StabilityCertifier(_TolerantEstimator):
    """Marginal stability certificate in P-form or S-form."""

    def __init__(self, form="p", tol_rank=1e-10, tol_psd=1e-9, tol_sym=1e-12, tol_residual=1e-8):
        self.form = form
        self.tol_rank = tol_rank
        self.tol_psd = tol_psd
        self.tol_sym = tol_sym
        self.tol_residual = tol_residual

    def fit(self, A):
        tol = self._tolerances()
        build = {"p": certificate_P_form, "s": certificate_S_form}[self.form.lower()]
        self.certificate_ = build(A, tol)
        self.P_ = self.certificate_.P_or_S
        self.X_ = self.certificate_.X
        return self

    def predict(self, A):
        """Marginal stability verdict for a system matrix (needs no fit)."""
        return is_marginally_stable(A, self._tolerances()).stable


class DilationCompleter(_TolerantEstimator):
    def __init__(self, tol_rank=1e-10, tol_psd=1e-9, tol_sym=1e-12, tol_residual=1e-8):
        self.tol_rank = tol_rank
        self.tol_psd = tol_psd
        self.tol_sym = tol_sym
        self.tol_residual = tol_residual

    def fit(self, A, B, C):
        self.problem_ = DilationProblem(A, B, C, self._tolerances())
        self.D_ = complete(self.problem_)
        self.norm_ = verify_dilation(self.problem_, self.D_)
        return self

    def transform(self, A=None, B=None, C=None):
        """The completed block matrix ``[[A, B], [C, D_]]``."""
        check_is_fitted(self, "D_")
        prob = self.problem_
        return np.block([[prob.A, prob.B], [prob.C, self.D_]])


class Interpolator(_TolerantEstimator):
    """Learn Δ with ``w = Δ z`` inside the quadratic constraint defined by ``P``."""

    def __init__(self, P=None, n=None, tol_rank=1e-10, tol_psd=1e-9, tol_sym=1e-12,
                 tol_residual=1e-8):
        self.P = P
        self.n = n
        self.tol_rank = tol_rank
        self.tol_psd = tol_psd
        self.tol_sym = tol_sym
        self.tol_residual = tol_residual

    def fit(self, z, w):
        if self.P is None or self.n is None:
            raise ValueError("Interpolator needs P and n")
        self.form_ = QuadraticForm(check_matrix(self.P, "P"), int(self.n), self._tolerances())
        self.Delta_ = interpolate(self.form_, z, w)
        self.match_error_, self.min_eig_ = interpolation_residuals(self.form_, z, w, self.Delta_)
        return self

    def predict(self, z):
        check_is_fitted(self, "Delta_")
        z = np.asarray(z, dtype=float)
        if z.ndim == 1:
            return self.Delta_ @ check_vector(z, "z", self.form_.n)
        return z @ self.Delta_.T


class MultiplierSearch(_TolerantEstimator):
    """Search α with ``M - α N > 0``; ``variant`` in {"matrix", "scalar", "finsler"}."""

    def __init__(self, variant="finsler", n=None, xbar=None, tol_rank=1e-10, tol_psd=1e-9,
                 tol_sym=1e-12, tol_residual=1e-8):
        self.variant = variant
        self.n = n
        self.xbar = xbar
        self.tol_rank = tol_rank
        self.tol_psd = tol_psd
        self.tol_sym = tol_sym
        self.tol_residual = tol_residual

    def fit(self, M, N):
        tol = self._tolerances()
        if self.variant == "matrix":
            if self.n is None:
                raise ValueError("the matrix variant needs the block size n")
            self.result_ = matrix_s_lemma(SLemmaPair(M, N, int(self.n), tol))
        elif self.variant == "scalar":
            if self.xbar is None:
                raise ValueError("the scalar variant needs xbar")
            self.result_ = scalar_s_lemma(M, N, self.xbar, tol)
        elif self.variant == "finsler":
            self.result_ = finsler(M, N, tol)
        else:
            raise ValueError(f"unknown variant {self.variant!r}")
        self.alpha_ = self.result_.alpha
        self.feasible_ = self.result_.feasible
        return self
