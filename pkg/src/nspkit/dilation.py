"""Norm-preserving completion of ``[[A, B], [C, ?]]``.

Given ``||[A B]|| <= 1`` and ``||[A; C]|| <= 1`` the missing block D is the
free matrix of the projection inequality obtained by writing
``||[[A, B], [C, D]]|| <= 1`` as ``[[I, G], [G^T, I]] >= 0``.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConditionsViolated, DimensionMismatch
from .linalg import DEFAULT_TOL, Tolerances, spectral_norm
from .projection import ProjectionProblem, construct_witness
from .validation import check_matrix

__all__ = [
    "DilationProblem",
    "DilationReport",
    "check_dilation_conditions",
    "dilation_lmi_data",
    "complete",
    "verify_dilation",
]


@dataclass(frozen=True)
class DilationProblem:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        A = check_matrix(self.A, "A")
        B = check_matrix(self.B, "B")
        C = check_matrix(self.C, "C")
        if B.size == 0 and B.shape[0] != A.shape[0]:
            B = np.zeros((A.shape[0], B.shape[1] if B.shape[0] else 0))
        if C.size == 0 and C.shape[1] != A.shape[1]:
            C = np.zeros((C.shape[0] if C.shape[1] else 0, A.shape[1]))
        if B.shape[0] != A.shape[0]:
            raise DimensionMismatch(f"B has {B.shape[0]} rows, A has {A.shape[0]}")
        if C.shape[1] != A.shape[1]:
            raise DimensionMismatch(f"C has {C.shape[1]} columns, A has {A.shape[1]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def shape_D(self):
        return self.C.shape[0], self.B.shape[1]


@dataclass
class DilationReport:
    row_norm: float
    col_norm: float
    row_ok: bool
    col_ok: bool

    @property
    def passed(self):
        return self.row_ok and self.col_ok

    def to_dict(self):
        return {
            "row_norm": self.row_norm,
            "col_norm": self.col_norm,
            "row_ok": self.row_ok,
            "col_ok": self.col_ok,
            "passed": self.passed,
        }


def check_dilation_conditions(prob):
    """Spectral norms of ``[A B]`` and ``[A; C]`` against ``1 + tol_residual``."""
    bound = 1.0 + prob.tol.tol_residual
    row = spectral_norm(np.hstack([prob.A, prob.B]))
    col = spectral_norm(np.vstack([prob.A, prob.C]))
    return DilationReport(row, col, row <= bound, col <= bound)


def dilation_lmi_data(prob):
    """``(Q, U, V)`` such that ``Q + U^T D V + V^T D^T U`` is the norm LMI."""
    A, B, C = prob.A, prob.B, prob.C
    m, n = A.shape
    p = B.shape[1]
    q = C.shape[0]
    Z = np.zeros
    Q = np.block(
        [
            [np.eye(m), Z((m, q)), A, B],
            [Z((q, m)), np.eye(q), C, Z((q, p))],
            [A.T, C.T, np.eye(n), Z((n, p))],
            [B.T, Z((p, q)), Z((p, n)), np.eye(p)],
        ]
    )
    size = m + q + n + p
    U = np.zeros((q, size))
    U[:, m : m + q] = np.eye(q)
    V = np.zeros((p, size))
    V[:, m + q + n :] = np.eye(p)
    return Q, U, V


def complete(prob):
    """A block D (q x p) with ``||[[A, B], [C, D]]|| <= 1``."""
    report = check_dilation_conditions(prob)
    if not report.passed:
        raise ConditionsViolated(
            f"||[A B]|| = {report.row_norm:.6g}, ||[A; C]|| = {report.col_norm:.6g}; "
            "both must be at most 1"
        )
    q, p = prob.shape_D
    if q == 0 or p == 0:
        return np.zeros((q, p))
    Q, U, V = dilation_lmi_data(prob)
    return construct_witness(ProjectionProblem(Q, U, V, prob.tol)).X


def verify_dilation(prob, D):
    """Spectral norm of the completed block matrix."""
    D = check_matrix(D, "D")
    q, p = prob.shape_D
    if D.size == 0 and q * p == 0:
        D = np.zeros((q, p))
    if D.shape != (q, p):
        raise DimensionMismatch(f"D has shape {D.shape}, expected {(q, p)}")
    G = np.block([[prob.A, prob.B], [prob.C, D]])
    return spectral_norm(G)
