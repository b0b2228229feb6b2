"""Interpolation through a quadratic constraint and multiplier searches.

``interpolate`` finds Δ with ``w = Δ z`` and ``[I; Δ]^T P [I; Δ] >= 0`` by
reducing the problem to a projection inequality in a free matrix H.  The
multiplier searches look for α with ``M - α N > 0`` by maximizing the concave
function ``α -> λ_min(M - α N)``.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from .exceptions import HypothesisViolated, SlaterViolated
from .linalg import DEFAULT_TOL, is_psd, kernel_basis, spectral_norm
from .projection import ProjectionProblem, construct_witness
from .validation import check_symmetric, check_vector

__all__ = [
    "QuadraticForm",
    "SLemmaPair",
    "MultiplierResult",
    "interpolate",
    "interpolation_residuals",
    "matrix_s_lemma",
    "scalar_s_lemma",
    "finsler",
    "min_eig_along",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
CAP_EXPONENT = 60


def _split(P, n):
    return P[:n, :n], P[:n, n:], P[n:, n:]


def _check_negdef_schur(P, n, tol, label):
    """R < 0 and Q - S R^-1 S^T >= 0 for the blocks of P split at n."""
    Q, S, R = _split(P, n)
    if R.shape[0] == 0:
        raise HypothesisViolated(f"{label}: the lower-right block is empty")
    lam_r = np.linalg.eigvalsh(R)
    if not lam_r[-1] < -tol.tol_psd * max(1.0, float(np.max(np.abs(lam_r)))):
        raise HypothesisViolated(
            f"{label}: lower-right block is not negative definite (max eigenvalue {lam_r[-1]:.3e})"
        )
    comp = Q - S @ scipy.linalg.solve(R, S.T, assume_a="sym")
    check = is_psd((comp + comp.T) / 2.0, tol)
    if not check.psd:
        raise HypothesisViolated(
            f"{label}: Schur complement is not PSD (min eigenvalue {check.min_eig:.3e})"
        )


@dataclass(frozen=True)
class QuadraticForm:
    """Symmetric ``P = [[Q, S], [S^T, R]]`` with ``R < 0`` and ``Q - S R^-1 S^T >= 0``."""

    P: np.ndarray
    n: int
    tol: object = DEFAULT_TOL

    def __post_init__(self):
        P = check_symmetric(self.P, self.tol.tol_sym, "P")
        if not 0 <= self.n <= P.shape[0]:
            raise HypothesisViolated(f"block size n={self.n} does not fit P of size {P.shape[0]}")
        object.__setattr__(self, "P", P)
        _check_negdef_schur(P, self.n, self.tol, "QuadraticForm")

    @property
    def m(self):
        return self.P.shape[0] - self.n

    @property
    def Q(self):
        return self.P[: self.n, : self.n]

    @property
    def S(self):
        return self.P[: self.n, self.n :]

    @property
    def R(self):
        return self.P[self.n :, self.n :]


@dataclass(frozen=True)
class SLemmaPair:
    """Matrices M, N of size n+m; N must satisfy the QuadraticForm hypotheses."""

    M: np.ndarray
    N: np.ndarray
    n: int
    tol: object = DEFAULT_TOL

    def __post_init__(self):
        M = check_symmetric(self.M, self.tol.tol_sym, "M")
        N = check_symmetric(self.N, self.tol.tol_sym, "N", dim=M.shape[0])
        if not 0 <= self.n <= M.shape[0]:
            raise HypothesisViolated(f"block size n={self.n} does not fit size {M.shape[0]}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "N", N)
        _check_negdef_schur(N, self.n, self.tol, "SLemmaPair")


@dataclass
class MultiplierResult:
    alpha: float
    min_eig: float
    feasible: bool
    status: str = "feasible"  # feasible | infeasible | infeasible_at_cap
    bracket: Tuple[float, float] = (0.0, 0.0)
    evaluations: int = 0

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "min_eig": self.min_eig,
            "feasible": self.feasible,
            "status": self.status,
            "bracket": list(self.bracket),
        }


def _form_value(P, z, w):
    x = np.concatenate([z, w])
    return float(x @ P @ x)


def interpolate(form, z, w):
    """Δ (m x n) with ``w = Δ z`` and ``[I; Δ]^T P [I; Δ] >= 0``.

    Requires ``[z; w]^T P [z; w] >= 0`` up to tolerance; raises
    :class:`HypothesisViolated` otherwise.
    """
    tol = form.tol
    n, m = form.n, form.m
    z = check_vector(z, "z", n)
    w = check_vector(w, "w", m)
    Q, S, R = form.Q, form.S, form.R
    scale = max(1.0, spectral_norm(form.P)) * max(1.0, float(z @ z + w @ w))
    value = _form_value(form.P, z, w)
    if value < -tol.tol_psd * scale:
        raise HypothesisViolated(f"[z; w]^T P [z; w] = {value:.3e} is negative")

    R_inv_St = scipy.linalg.solve(R, S.T, assume_a="sym")
    if np.linalg.norm(z) <= tol.tol_rank:
        return -R_inv_St

    z_pinv = z / (z @ z)  # row vector z^+
    wz = np.outer(w, z_pinv)  # m x n
    R_inv = scipy.linalg.solve(R, np.eye(m), assume_a="sym")
    Swz = S @ wz
    Psi = np.block([[Q + Swz + Swz.T, wz.T], [wz, -R_inv]])
    # I - z z^+ = K K^T with K an orthonormal basis of z's complement; using
    # K^T keeps V exactly rank n - 1 (and empty when n = 1).
    K = kernel_basis(z.reshape(1, -1), tol)
    U = np.hstack([S.T, np.eye(m)])
    V = np.hstack([K.T, np.zeros((K.shape[1], m))])
    H = construct_witness(ProjectionProblem(Psi, U, V, tol)).X
    return wz + H @ K.T


def interpolation_residuals(form, z, w, Delta):
    """``(||w - Δ z||, λ_min([I; Δ]^T P [I; Δ]))`` for a candidate Δ."""
    z = check_vector(z, "z", form.n)
    w = check_vector(w, "w", form.m)
    Delta = np.asarray(Delta, dtype=float).reshape(form.m, form.n)
    G = np.vstack([np.eye(form.n), Delta])
    F = G.T @ form.P @ G
    lam = float(np.linalg.eigvalsh((F + F.T) / 2.0)[0]) if form.n else float("inf")
    return float(np.linalg.norm(w - Delta @ z)), lam


def min_eig_along(M, N):
    """The concave function ``α -> λ_min(M - α N)``."""

    def f(alpha):
        return float(np.linalg.eigvalsh(M - alpha * N)[0])

    return f


def _golden(f, a, b, rel=1e-10, max_iter=200):
    """Maximize a unimodal f on [a, b]; returns ``(x, f(x), evaluations)``."""
    width = b - a
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    for _ in range(max_iter):
        if b - a <= rel * max(width, 1e-300):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
        evals += 1
    candidates = [(fa, x) for x, fa in ((a, f(a)), (b, f(b)), (c, fc), (d, fd))]
    best_f, best_x = max(candidates)
    return best_x, best_f, evals + 2


def _bracket_right(f, start, cap):
    """Bracket the maximizer of a concave f on [start, ∞) by doubling.

    Returns ``(lo, hi, hit_cap)``.
    """
    f0 = f(start)
    step = 1.0
    prev_lo, x, fx = start, start + step, f(start + step)
    if fx <= f0:
        return start, x, False
    while step < cap:
        step *= 2.0
        x_next = start + step
        f_next = f(x_next)
        if f_next <= fx:
            return prev_lo, x_next, False
        prev_lo, x, fx = x, x_next, f_next
    return prev_lo, start + step, True


def _cap(M, N):
    nN = spectral_norm(N)
    if nN == 0.0:
        return 1.0
    return 2.0**CAP_EXPONENT * max(1.0, spectral_norm(M) / nN)


def _margin(M, N, tol):
    """Strictness margin, fixed by the data so it does not drift with α."""
    return tol.tol_psd * max(1.0, spectral_norm(M), spectral_norm(N))


def _result(M, N, alpha, lam, bracket, hit_cap, tol, evals=0):
    if M.shape[0] == 0:
        return MultiplierResult(alpha, float("inf"), True, "feasible", bracket, evals)
    feasible = lam > _margin(M, N, tol)
    if feasible:
        status = "feasible"
    else:
        status = "infeasible_at_cap" if hit_cap else "infeasible"
    return MultiplierResult(float(alpha), float(lam), bool(feasible), status, bracket, evals)


def _search_nonnegative(M, N, tol):
    if M.shape[0] == 0:
        return _result(M, N, 0.0, float("inf"), (0.0, 0.0), False, tol)
    f = min_eig_along(M, N)
    lo, hi, hit_cap = _bracket_right(f, 0.0, _cap(M, N))
    if hit_cap:
        return _result(M, N, hi, f(hi), (lo, hi), True, tol)
    alpha, lam, evals = _golden(f, lo, hi)
    return _result(M, N, alpha, lam, (lo, hi), False, tol, evals)


def _search_real(M, N, tol):
    if M.shape[0] == 0:
        return _result(M, N, 0.0, float("inf"), (0.0, 0.0), False, tol)
    f = min_eig_along(M, N)
    cap = _cap(M, N)
    f0 = f(0.0)
    if f(1.0) > f0:
        lo, hi, hit_cap = _bracket_right(f, 0.0, cap)
    elif f(-1.0) > f0:
        g = lambda a: f(-a)  # noqa: E731
        lo, hi, hit_cap = _bracket_right(g, 0.0, cap)
        lo, hi = -hi, -lo
    else:
        lo, hi, hit_cap = -1.0, 1.0, False
    if hit_cap:
        edge = hi if abs(hi) >= abs(lo) else lo
        return _result(M, N, edge, f(edge), (lo, hi), True, tol)
    alpha, lam, evals = _golden(f, lo, hi)
    return _result(M, N, alpha, lam, (lo, hi), False, tol, evals)


def matrix_s_lemma(pair):
    """Search α >= 0 with ``M - α N > 0`` for a block pair satisfying the hypotheses.

    When N is negative semidefinite the unconstrained (real α) search is run
    as well and a negative optimum is replaced by α = 0, which dominates it.
    """
    tol = pair.tol
    M, N = pair.M, pair.N
    best = _search_nonnegative(M, N, tol)
    if M.shape[0] and is_psd(-N, tol).psd:
        free = _search_real(M, N, tol)
        if free.alpha < 0.0:
            free = _result(M, N, 0.0, min_eig_along(M, N)(0.0), free.bracket, False, tol)
        if free.min_eig > best.min_eig:
            best = free
    return best


def scalar_s_lemma(M, N, xbar, tol=DEFAULT_TOL):
    """Search α >= 0 with ``M - α N > 0`` given a point with ``xbar^T N xbar > 0``."""
    M = check_symmetric(M, tol.tol_sym, "M")
    N = check_symmetric(N, tol.tol_sym, "N", dim=M.shape[0])
    xbar = check_vector(xbar, "xbar", M.shape[0])
    q = float(xbar @ N @ xbar)
    if not q > tol.tol_psd * max(1.0, spectral_norm(N)) * float(xbar @ xbar):
        raise SlaterViolated(f"xbar^T N xbar = {q:.3e} is not positive")
    return _search_nonnegative(M, N, tol)


def finsler(M, N, tol=DEFAULT_TOL):
    """Search α over the whole real line with ``M - α N > 0``."""
    M = check_symmetric(M, tol.tol_sym, "M")
    N = check_symmetric(N, tol.tol_sym, "N", dim=M.shape[0])
    return _search_real(M, N, tol)
