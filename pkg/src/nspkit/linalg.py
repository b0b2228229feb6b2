"""Dense real matrix kernels with tolerance-aware rank and definiteness decisions.

All rank decisions are SVD based: a singular value counts as zero when it
is at most ``tol_rank * sigma_max * max(rows, cols)``.  Definiteness
decisions compare the smallest eigenvalue against ``tol_psd`` times
``max(1, |lambda|_max)``.  Zero-sized matrices are legal everywhere.
"""

import os
from dataclasses import asdict, dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .exceptions import DimensionMismatch, IndefiniteInput
from .validation import check_matrix, check_symmetric

__all__ = [
    "Tolerances",
    "Definiteness",
    "PsdCheck",
    "EigenResult",
    "SchurVerdict",
    "kernel_basis",
    "image_basis",
    "subspace_intersection",
    "orth_complement",
    "pinv",
    "is_psd",
    "psd_sqrt",
    "schur_psd_check",
    "spectral_norm",
    "sym_eigen",
    "numerical_rank",
]

PROFILE_ENV = "NSPKIT_TOLERANCE_PROFILE"


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances used by every decision in the package."""

    tol_rank: float = 1e-10
    tol_psd: float = 1e-9
    tol_sym: float = 1e-12
    tol_residual: float = 1e-8

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")

    @classmethod
    def from_profile(cls, name="default"):
        try:
            return cls(**_PROFILES[name])
        except KeyError:
            raise ValueError(
                f"unknown tolerance profile {name!r}; choose from {sorted(_PROFILES)}"
            ) from None

    @classmethod
    def from_env(cls):
        return cls.from_profile(os.environ.get(PROFILE_ENV, "default") or "default")

    def replace(self, **changes):
        values = asdict(self)
        values.update({k: v for k, v in changes.items() if v is not None})
        return Tolerances(**values)

    def to_dict(self):
        return asdict(self)


_PROFILES = {
    "default": {},
    "strict": dict(tol_rank=1e-12, tol_psd=1e-11, tol_sym=1e-14, tol_residual=1e-10),
    "loose": dict(tol_rank=1e-8, tol_psd=1e-7, tol_sym=1e-10, tol_residual=1e-6),
}

DEFAULT_TOL = Tolerances()


class Definiteness(str, Enum):
    PD = "PD"
    PSD = "PSD"
    INDEFINITE = "indefinite"


class PsdCheck(NamedTuple):
    verdict: Definiteness
    min_eig: float

    @property
    def psd(self):
        return self.verdict is not Definiteness.INDEFINITE

    @property
    def pd(self):
        return self.verdict is Definiteness.PD


class EigenResult(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


class SchurVerdict(NamedTuple):
    r_psd: bool
    complement_psd: bool
    range_ok: bool
    range_residual: float

    @property
    def psd(self):
        return self.r_psd and self.complement_psd and self.range_ok


def _svd(A):
    return np.linalg.svd(A, full_matrices=True)


def _rank_from_singular_values(s, shape, tol):
    if s.size == 0 or s[0] == 0.0:
        return 0
    cutoff = tol.tol_rank * s[0] * max(shape)
    return int(np.sum(s > cutoff))


def numerical_rank(A, tol=DEFAULT_TOL):
    A = check_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    return _rank_from_singular_values(s, A.shape, tol)


def kernel_basis(A, tol=DEFAULT_TOL):
    """Orthonormal basis of ker A as the columns of a ``cols(A) x k`` matrix."""
    A = check_matrix(A)
    U, s, Vt = _svd(A)
    r = _rank_from_singular_values(s, A.shape, tol)
    return Vt[r:].T.copy()


def image_basis(A, tol=DEFAULT_TOL):
    """Orthonormal basis of im A as the columns of a ``rows(A) x r`` matrix."""
    A = check_matrix(A)
    U, s, Vt = _svd(A)
    r = _rank_from_singular_values(s, A.shape, tol)
    return U[:, :r].copy()


def orth_complement(B, tol=DEFAULT_TOL):
    """Orthonormal basis of the orthogonal complement of im B."""
    B = check_matrix(B)
    return kernel_basis(B.T, tol)


def subspace_intersection(B1, B2, tol=DEFAULT_TOL):
    """Orthonormal basis of im B1 ∩ im B2.

    Solves ``B1 a = B2 b`` through the kernel of ``[B1, -B2]`` and
    orthonormalizes the ``B1 a`` part.
    """
    B1 = check_matrix(B1, "B1")
    B2 = check_matrix(B2, "B2")
    if B1.shape[0] != B2.shape[0]:
        raise DimensionMismatch(f"row counts differ: {B1.shape[0]} vs {B2.shape[0]}")
    k1 = B1.shape[1]
    N = kernel_basis(np.hstack([B1, -B2]), tol)
    if N.shape[1] == 0:
        return np.zeros((B1.shape[0], 0))
    return image_basis(B1 @ N[:k1], tol)


def pinv(A, tol=DEFAULT_TOL):
    """Moore-Penrose pseudoinverse with the package rank cutoff."""
    A = check_matrix(A)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    r = _rank_from_singular_values(s, A.shape, tol)
    return (Vt[:r].T / s[:r]) @ U[:, :r].T


def sym_eigen(M):
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    M = check_symmetric(M, tol_sym=np.inf)
    values, vectors = np.linalg.eigh(M)
    return EigenResult(values, vectors)


def is_psd(M, tol=DEFAULT_TOL):
    """Classify a symmetric matrix as PD, PSD or indefinite.

    Returns a ``PsdCheck`` carrying the smallest eigenvalue as witness; an
    empty matrix is vacuously PD with ``min_eig = inf``.
    """
    M = check_symmetric(M, tol_sym=np.inf)
    if M.shape[0] == 0:
        return PsdCheck(Definiteness.PD, float("inf"))
    lam = np.linalg.eigvalsh(M)
    slack = tol.tol_psd * max(1.0, float(np.max(np.abs(lam))))
    lam_min = float(lam[0])
    if lam_min > slack:
        verdict = Definiteness.PD
    elif lam_min >= -slack:
        verdict = Definiteness.PSD
    else:
        verdict = Definiteness.INDEFINITE
    return PsdCheck(verdict, lam_min)


def psd_sqrt(M, tol=DEFAULT_TOL):
    """Symmetric PSD square root, clamping eigenvalues inside the PSD slack."""
    M = check_symmetric(M, tol_sym=np.inf)
    lam, V = np.linalg.eigh(M)
    if lam.size:
        slack = tol.tol_psd * max(1.0, float(np.max(np.abs(lam))))
        if lam[0] < -slack:
            raise IndefiniteInput(
                f"matrix is indefinite (min eigenvalue {lam[0]:.3e})", min_eig=float(lam[0])
            )
    root = np.sqrt(np.clip(lam, 0.0, None))
    R = (V * root) @ V.T
    return (R + R.T) / 2.0


def schur_psd_check(Q, S, R, tol=DEFAULT_TOL):
    """Decide ``[[Q, S], [S^T, R]] >= 0`` through the non-strict Schur complement.

    The three sub-verdicts are ``R >= 0``, ``Q - S R^+ S^T >= 0`` and
    ``S (I - R R^+) = 0``.  When R is numerically nonsingular the inverse is
    used and the range condition holds trivially.
    """
    Q = check_symmetric(Q, tol.tol_sym, "Q")
    R = check_symmetric(R, tol.tol_sym, "R")
    S = check_matrix(S, "S")
    if S.shape != (Q.shape[0], R.shape[0]):
        raise DimensionMismatch(
            f"S has shape {S.shape}, expected {(Q.shape[0], R.shape[0])}"
        )
    scale = max(1.0, spectral_norm(Q), spectral_norm(S), spectral_norm(R))
    r_check = is_psd(R, tol)
    k = R.shape[0]
    if k and numerical_rank(R, tol) == k:
        SRinv = scipy.linalg.solve(R, S.T, assume_a="sym").T
        complement = Q - SRinv @ S.T
        range_residual = 0.0
    else:
        Rp = pinv(R, tol)
        complement = Q - S @ Rp @ S.T
        range_residual = spectral_norm(S - S @ R @ Rp)
    complement = (complement + complement.T) / 2.0
    return SchurVerdict(
        r_psd=r_check.psd,
        complement_psd=is_psd(complement, tol).psd,
        range_ok=range_residual <= tol.tol_psd * scale,
        range_residual=float(range_residual),
    )


def spectral_norm(A):
    """Largest singular value; 0 for empty matrices."""
    A = check_matrix(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))
