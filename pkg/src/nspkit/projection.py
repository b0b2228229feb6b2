"""Feasibility and witness construction for ``Q + U^T X V + V^T X^T U >= 0``.

The decision uses three conditions: the two projected blocks
``U_perp^T Q U_perp`` and ``V_perp^T Q V_perp`` must be PSD, and every
vector in ``ker U ∩ ker V`` on which the quadratic form of Q vanishes must
lie in ``ker Q``.  When they hold, :func:`construct_witness` builds an
explicit X through a congruence with a structured basis of R^p.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .exceptions import DimensionMismatch, InfeasibleProblem, NumericalBreakdown
from .linalg import (
    DEFAULT_TOL,
    PsdCheck,
    Tolerances,
    image_basis,
    is_psd,
    kernel_basis,
    pinv,
    spectral_norm,
    subspace_intersection,
)
from .validation import check_matrix, check_symmetric

logger = logging.getLogger(__name__)

__all__ = [
    "ProjectionProblem",
    "FeasibilityReport",
    "PartitionBasis",
    "TransformedForm",
    "EliminationWitness",
    "check_conditions",
    "build_partition_basis",
    "construct_witness",
    "verify_witness",
    "residual_scale",
    "strict_check",
]


@dataclass(frozen=True)
class ProjectionProblem:
    Q: np.ndarray
    U: np.ndarray
    V: np.ndarray
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        Q = check_symmetric(self.Q, self.tol.tol_sym, "Q")
        p = Q.shape[0]
        U = check_matrix(self.U, "U")
        V = check_matrix(self.V, "V")
        # An empty map may arrive as 0x0; widen it to 0xp.
        if U.size == 0 and U.shape[1] != p:
            U = np.zeros((U.shape[0], p)) if U.shape[0] == 0 else U
        if V.size == 0 and V.shape[1] != p:
            V = np.zeros((V.shape[0], p)) if V.shape[0] == 0 else V
        if U.shape[1] != p or V.shape[1] != p:
            raise DimensionMismatch(
                f"U {U.shape} and V {V.shape} must both have {p} columns to match Q"
            )
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)

    @property
    def p(self):
        return self.Q.shape[0]

    @property
    def m(self):
        return self.U.shape[0]

    @property
    def n(self):
        return self.V.shape[0]

    @property
    def scale(self):
        return max(1.0, spectral_norm(self.Q))


@dataclass
class FeasibilityReport:
    kernel_cond_U: PsdCheck
    kernel_cond_V: PsdCheck
    coupling_cond: bool
    helmersson_cond: bool
    projected_U: np.ndarray
    projected_V: np.ndarray
    coupling_residual: float = 0.0
    offending_vector: Optional[np.ndarray] = None
    strict: bool = False

    @property
    def feasible(self):
        return self.kernel_cond_U.psd and self.kernel_cond_V.psd and self.coupling_cond

    def to_dict(self):
        def _check(c):
            return {"verdict": c.verdict.value, "min_eig": _finite_or_none(c.min_eig)}

        return {
            "feasible": self.feasible,
            "kernel_cond_U": _check(self.kernel_cond_U),
            "kernel_cond_V": _check(self.kernel_cond_V),
            "coupling_cond": {
                "holds": self.coupling_cond,
                "residual": self.coupling_residual,
                "offending_vector": None
                if self.offending_vector is None
                else self.offending_vector.tolist(),
            },
            "helmersson_cond": self.helmersson_cond,
            "strict_feasible": self.strict,
        }


def _finite_or_none(x):
    return float(x) if np.isfinite(x) else None


@dataclass
class PartitionBasis:
    T: np.ndarray
    widths: tuple

    def block(self, i):
        """Columns of block ``i`` (1-based, matching T1..T5)."""
        edges = np.concatenate([[0], np.cumsum(self.widths)])
        return self.T[:, edges[i - 1] : edges[i]]

    @property
    def blocks(self):
        return tuple(self.block(i) for i in range(1, 6))


@dataclass
class TransformedForm:
    W: np.ndarray
    widths: tuple
    K: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N: np.ndarray
    alpha: float

    def block(self, i, j):
        edges = np.concatenate([[0], np.cumsum(self.widths)])
        return self.W[edges[i - 1] : edges[i], edges[j - 1] : edges[j]]


@dataclass
class EliminationWitness:
    X: np.ndarray
    residual_min_eig: float
    scale: float
    basis: PartitionBasis
    blocks: TransformedForm = field(repr=False)


def _coupling_kernel(Qt, tol):
    """Eigen-split of the compressed form on ker U ∩ ker V.

    Returns ``(null, rest, lam_rest)``: eigenvectors whose eigenvalue lies
    within the PSD slack, the remaining eigenvectors, and their eigenvalues.
    """
    if Qt.shape[0] == 0:
        return Qt[:, :0], Qt[:, :0], np.zeros(0)
    lam, E = np.linalg.eigh((Qt + Qt.T) / 2.0)
    slack = tol.tol_psd * max(1.0, float(np.max(np.abs(lam))))
    zero = np.abs(lam) <= slack
    return E[:, zero], E[:, ~zero], lam[~zero]


def _coupling_threshold(prob):
    # Near-null vectors of a PSD form leak O(sqrt(eps)) into Q x.
    return np.sqrt(prob.tol.tol_psd) * prob.scale


def check_conditions(prob):
    """Evaluate the three feasibility conditions and the Helmersson diagnostic."""
    tol = prob.tol
    Q, U, V = prob.Q, prob.U, prob.V
    Up = kernel_basis(U, tol)
    Vp = kernel_basis(V, tol)
    QU = Up.T @ Q @ Up
    QV = Vp.T @ Q @ Vp
    cond_u = is_psd(QU, tol)
    cond_v = is_psd(QV, tol)

    B = kernel_basis(np.vstack([U, V]), tol)
    null, _, _ = _coupling_kernel(B.T @ Q @ B, tol)
    Z = B @ null
    residual = 0.0
    offending = None
    if Z.shape[1]:
        QZ = Q @ Z
        col_norms = np.linalg.norm(QZ, axis=0)
        residual = float(np.max(col_norms))
        if residual > _coupling_threshold(prob):
            offending = Z[:, int(np.argmax(col_norms))]
    coupling = offending is None

    shared = subspace_intersection(image_basis(U.T, tol), image_basis(V.T, tol), tol)
    return FeasibilityReport(
        kernel_cond_U=cond_u,
        kernel_cond_V=cond_v,
        coupling_cond=coupling,
        helmersson_cond=shared.shape[1] == 0,
        projected_U=QU,
        projected_V=QV,
        coupling_residual=residual,
        offending_vector=offending,
        strict=cond_u.pd and cond_v.pd,
    )


def strict_check(prob):
    """True when both projected blocks are positive definite."""
    tol = prob.tol
    Up = kernel_basis(prob.U, tol)
    Vp = kernel_basis(prob.V, tol)
    return is_psd(Up.T @ prob.Q @ Up, tol).pd and is_psd(Vp.T @ prob.Q @ Vp, tol).pd


def build_partition_basis(prob):
    """Nonsingular T = [T1 T2 T3 T4 T5] adapted to the kernels of U, V and Q.

    ``[T1 T3 T4]`` spans ker U, ``[T2 T3 T4]`` spans ker V, ``[T3 T4]`` spans
    their intersection and T4 the part of it on which Q vanishes.  Each
    block is orthonormal; T3 diagonalizes the compressed form so that
    ``T3^T Q T3`` is diagonal.
    """
    tol = prob.tol
    Q, U, V = prob.Q, prob.U, prob.V
    p = prob.p
    KU = kernel_basis(U, tol)
    KV = kernel_basis(V, tol)
    KUV = kernel_basis(np.vstack([U, V]), tol)

    null, rest, _ = _coupling_kernel(KUV.T @ Q @ KUV, tol)
    T4 = KUV @ null
    T3 = KUV @ rest

    T1 = _extend_within(KU, KUV)
    T2 = _extend_within(KV, KUV)

    head = np.hstack([T1, T2, T3, T4])
    k = head.shape[1]
    if k > p:
        raise NumericalBreakdown(f"kernel blocks have {k} columns in R^{p}")
    Uh, s, _ = np.linalg.svd(head, full_matrices=True)
    if k and s[-1] <= tol.tol_rank * max(1.0, s[0]) * p:
        raise NumericalBreakdown(
            "columns of [T1 T2 T3 T4] are dependent at tolerance "
            f"(smallest singular value {s[-1]:.3e})"
        )
    T5 = Uh[:, k:]
    T = np.hstack([head, T5])
    widths = tuple(int(B.shape[1]) for B in (T1, T2, T3, T4, T5))
    return PartitionBasis(T=T, widths=widths)


def _extend_within(K, inner):
    """Orthonormal columns completing ``inner`` to a basis of im K.

    Both arguments have orthonormal columns and im inner ⊂ im K, so the
    completion has exactly ``cols(K) - cols(inner)`` columns.
    """
    k, j = K.shape[1], inner.shape[1]
    if k == j:
        return K[:, :0]
    coords = K.T @ inner
    Uc, _, _ = np.linalg.svd(coords, full_matrices=True)
    return K @ Uc[:, j:]


def _solve_pd(A, B):
    if A.shape[0] == 0:
        return np.zeros((0, B.shape[1]))
    return scipy.linalg.solve(A, B, assume_a="pos")


def construct_witness(prob, report=None):
    """Build X with ``Q + U^T X V + V^T X^T U >= 0``.

    Raises :class:`InfeasibleProblem` when the conditions fail and
    :class:`NumericalBreakdown` when a step that is exact in theory misses
    its tolerance.
    """
    tol = prob.tol
    if report is None:
        report = check_conditions(prob)
    if not report.feasible:
        raise InfeasibleProblem("feasibility conditions fail", report=report)

    Q, U, V = prob.Q, prob.U, prob.V
    basis = build_partition_basis(prob)
    T = basis.T
    W = T.T @ Q @ T
    W = (W + W.T) / 2.0
    widths = basis.widths
    edges = np.concatenate([[0], np.cumsum(widths)])
    sl = [slice(edges[i], edges[i + 1]) for i in range(5)]

    # Rows and columns through T4 must vanish.
    w4 = W[sl[3], :]
    leak = float(np.max(np.abs(w4))) if w4.size else 0.0
    if leak > _coupling_threshold(prob):
        raise NumericalBreakdown(f"T4 block of T^T Q T is not zero (max {leak:.3e})", leak)
    W[sl[3], :] = 0.0
    W[:, sl[3]] = 0.0

    def Wb(i, j):
        return W[sl[i - 1], sl[j - 1]]

    W33 = Wb(3, 3)
    if W33.size:
        lam33 = float(np.linalg.eigvalsh(W33)[0])
        if lam33 <= 0.0:
            raise NumericalBreakdown(
                f"W33 is not positive definite (min eigenvalue {lam33:.3e})", lam33
            )
    inv13 = _solve_pd(W33, Wb(1, 3).T)  # W33^-1 W13^T
    inv35 = _solve_pd(W33, Wb(3, 5))  # W33^-1 W35

    K = -Wb(1, 2).T + Wb(2, 3) @ inv13
    M = (-Wb(1, 5) + Wb(1, 3) @ inv35).T
    L = -Wb(2, 5) + Wb(2, 3) @ inv35

    Y1 = np.block(
        [
            [Wb(1, 1), Wb(1, 2) + K.T, Wb(1, 3)],
            [Wb(2, 1) + K, Wb(2, 2), Wb(2, 3)],
            [Wb(3, 1), Wb(3, 2), W33],
        ]
    )
    Y1 = (Y1 + Y1.T) / 2.0
    Y2 = np.vstack([Wb(1, 5) + M.T, Wb(2, 5) + L, Wb(3, 5)])
    Y1p = pinv(Y1, tol)
    range_gap = float(np.max(np.abs(Y2.T - Y2.T @ Y1 @ Y1p))) if Y2.size else 0.0
    y_scale = max(1.0, float(np.max(np.abs(Y1))) if Y1.size else 0.0,
                  float(np.max(np.abs(Y2))) if Y2.size else 0.0)
    if range_gap > np.sqrt(tol.tol_psd) * y_scale:
        raise NumericalBreakdown(f"range condition on Y2 fails (gap {range_gap:.3e})", range_gap)

    w5 = widths[4]
    G = Y2.T @ Y1p @ Y2 - Wb(5, 5)
    top = float(np.linalg.eigvalsh((G + G.T) / 2.0)[-1]) if w5 else 0.0
    alpha = max(0.0, top) / 2.0 + 1.0
    N = alpha * np.eye(w5)

    T1, T2, _, _, T5 = basis.blocks
    left = np.vstack([(U @ T2).T, (U @ T5).T])
    right = np.hstack([V @ T1, V @ T5])
    KLMN = np.block([[K, L], [M, N]])
    X = pinv(left, tol) @ KLMN @ pinv(right, tol)

    lam = verify_witness(prob, X)
    scale = residual_scale(prob, X)
    logger.debug("witness: widths=%s alpha=%.3e residual=%.3e", widths, alpha, lam)
    if lam < -tol.tol_residual * scale:
        raise NumericalBreakdown(
            f"constructed X misses the inequality (min eigenvalue {lam:.3e})", lam
        )
    blocks = TransformedForm(W=W, widths=widths, K=K, L=L, M=M, N=N, alpha=alpha)
    return EliminationWitness(X=X, residual_min_eig=lam, scale=scale, basis=basis, blocks=blocks)


def _achieved(prob, X):
    X = check_matrix(X, "X")
    if X.shape != (prob.m, prob.n):
        raise DimensionMismatch(f"X has shape {X.shape}, expected {(prob.m, prob.n)}")
    cross = prob.U.T @ X @ prob.V
    return prob.Q + cross + cross.T, cross


def verify_witness(prob, X):
    """Smallest eigenvalue of ``Q + U^T X V + V^T X^T U``."""
    F, _ = _achieved(prob, X)
    if F.shape[0] == 0:
        return float("inf")
    return float(np.linalg.eigvalsh((F + F.T) / 2.0)[0])


def residual_scale(prob, X):
    """Magnitude against which the residual of a witness is judged."""
    _, cross = _achieved(prob, X)
    return max(1.0, spectral_norm(prob.Q), 2.0 * spectral_norm(cross))
