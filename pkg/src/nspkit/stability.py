"""Marginal stability of ``x[k+1] = A x[k]`` and slack-variable certificates.

A real square A is marginally stable when its spectral radius is at most one
and every eigenvalue on the unit circle is semisimple.  Certificates come in
two forms:

* P-form: ``P > 0`` and ``[[P, A^T X^T], [X A, X + X^T - P]] >= 0``
* S-form: ``S > 0`` and ``[[S, A X], [X^T A^T, X + X^T - S]] >= 0``

In both, X is produced by :func:`nspkit.projection.construct_witness`.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.linalg

from .exceptions import DimensionMismatch, NotMarginallyStable, NumericalBreakdown, SingularX
from .linalg import DEFAULT_TOL, is_psd, spectral_norm
from .projection import ProjectionProblem, construct_witness
from .validation import check_matrix, check_symmetric

__all__ = [
    "StabilityReport",
    "StabilityCertificate",
    "CertificateCheck",
    "SynthesisExtraction",
    "is_marginally_stable",
    "construct_P",
    "certificate_P_form",
    "certificate_S_form",
    "verify_certificate",
    "extract_gain",
]

UNIT_TOL = 1e-6
CLUSTER_GAP = 1e-4


@dataclass
class StabilityReport:
    stable: bool
    spectral_radius: float
    eigenvalues: np.ndarray
    offending: List[complex] = field(default_factory=list)
    reasons: List[str] = field(default_factory=list)

    def __bool__(self):
        return self.stable

    def to_dict(self):
        return {
            "marginally_stable": self.stable,
            "spectral_radius": self.spectral_radius,
            "offending_eigenvalues": [[z.real, z.imag] for z in self.offending],
            "reasons": list(self.reasons),
        }


@dataclass
class StabilityCertificate:
    form: str  # "P" or "S"
    P_or_S: np.ndarray
    X: np.ndarray
    lmi_min_eig: float
    lyap_min_eig: float


@dataclass
class CertificateCheck:
    passed: bool
    pd_min_eig: float
    lyap_min_eig: float
    lmi_min_eig: float
    x_condition: float
    slack_min_eig: float
    failures: List[str] = field(default_factory=list)

    def to_dict(self):
        return {
            "passed": self.passed,
            "pd_min_eig": self.pd_min_eig,
            "lyap_min_eig": self.lyap_min_eig,
            "lmi_min_eig": self.lmi_min_eig,
            "x_sigma_ratio": self.x_condition,
            "slack_min_eig": self.slack_min_eig,
            "failures": list(self.failures),
        }


@dataclass
class SynthesisExtraction:
    X: np.ndarray
    Z: np.ndarray
    gain: np.ndarray
    residual: float


def _check_square(A):
    A = check_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    return A


def _cluster(values, gap):
    """Single-linkage clusters of complex numbers; returns a label per value."""
    n = len(values)
    labels = -np.ones(n, dtype=int)
    current = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        labels[i] = current
        stack = [i]
        while stack:
            j = stack.pop()
            near = np.abs(values - values[j]) <= gap * max(1.0, abs(values[j]))
            for k in np.flatnonzero(near & (labels < 0)):
                labels[k] = current
                stack.append(k)
        current += 1
    return labels


def _unit_clusters(eigs, unit_tol, gap):
    labels = _cluster(eigs, gap)
    clusters = []
    for c in np.unique(labels):
        members = eigs[labels == c]
        if np.max(np.abs(members)) >= 1.0 - unit_tol:
            clusters.append(members)
    return clusters


def is_marginally_stable(A, tol=DEFAULT_TOL, unit_tol=UNIT_TOL, cluster_gap=CLUSTER_GAP):
    """Decide marginal stability and report the offending eigenvalues."""
    A = _check_square(A)
    n = A.shape[0]
    if n == 0:
        return StabilityReport(True, 0.0, np.zeros(0, dtype=complex))
    eigs = np.linalg.eigvals(A)
    rho = float(np.max(np.abs(eigs)))
    report = StabilityReport(True, rho, eigs)
    ref = max(1.0, float(np.linalg.norm(A, 2)))
    for members in _unit_clusters(eigs, unit_tol, cluster_gap):
        lam = complex(np.mean(members))
        if np.max(np.abs(members)) > 1.0 + unit_tol:
            report.stable = False
            report.offending.extend(members.tolist())
            report.reasons.append(f"eigenvalue {lam:.6g} outside the unit circle")
            continue
        k = len(members)
        if _complex_rank(A - lam * np.eye(n), tol, ref) != n - k:
            report.stable = False
            report.offending.append(lam)
            report.reasons.append(f"defective unit eigenvalue {lam:.6g} (multiplicity {k})")
    return report


def _complex_rank(M, tol, ref):
    """Rank of ``A - λI`` with the cutoff taken relative to the scale of A.

    Relative to its own largest singular value the cutoff would be
    meaningless when ``A`` is a multiple of the identity up to round-off.
    """
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol.tol_rank * ref * max(M.shape)))


def _block_diagonalize(A, groups):
    """Similarity ``Phi`` with ``Phi^-1 A Phi`` block diagonal by eigenvalue group.

    ``groups`` is a list of predicates on complex eigenvalues; each block
    collects the eigenvalues accepted by one predicate.  Blocks are split
    off one at a time with a reordered complex Schur form followed by a
    Sylvester solve that removes the coupling term.
    """
    n = A.shape[0]
    Phi = np.eye(n, dtype=complex)
    M = A.astype(complex)
    blocks = []
    offset = 0
    for pred in groups:
        if M.shape[0] == 0:
            break
        T, Z, sdim = scipy.linalg.schur(M, output="complex", sort=pred)
        expected = sum(bool(pred(z)) for z in np.diag(T))
        if sdim != expected:
            raise NumericalBreakdown("eigenvalue reordering lost track of a cluster")
        if sdim == 0:
            blocks.append(np.zeros((0, 0), dtype=complex))
            continue
        T11, T12, T22 = T[:sdim, :sdim], T[:sdim, sdim:], T[sdim:, sdim:]
        Y = scipy.linalg.solve_sylvester(T11, -T22, -T12) if T22.size else T12[:, :0]
        S = np.eye(M.shape[0], dtype=complex)
        S[:sdim, sdim:] = Y
        local = np.eye(n, dtype=complex)
        local[offset:, offset:] = Z @ S
        Phi = Phi @ local
        blocks.append(T11)
        M = T22
        offset += sdim
    return Phi, blocks


def construct_P(A, tol=DEFAULT_TOL, unit_tol=UNIT_TOL, cluster_gap=CLUSTER_GAP):
    """Weak Lyapunov matrix: ``P > 0`` with ``P - A^T P A >= 0``, trace(P) = n.

    The unit-modulus spectrum gets the identity Gram matrix in its
    decoupled coordinates (so the Lyapunov difference vanishes there) and
    the strictly stable part solves ``P - T^H P T = I``.
    """
    A = _check_square(A)
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    report = is_marginally_stable(A, tol, unit_tol, cluster_gap)
    if not report.stable:
        raise NotMarginallyStable("; ".join(report.reasons), report)

    clusters = _unit_clusters(report.eigenvalues, unit_tol, cluster_gap)
    centers = [complex(np.mean(c)) for c in clusters]
    radii = [float(np.max(np.abs(c - z))) + cluster_gap for c, z in zip(clusters, centers)]

    def in_cluster(i):
        return lambda z: abs(z - centers[i]) <= radii[i]

    groups = [in_cluster(i) for i in range(len(centers))]
    groups.append(lambda z: True)  # strictly stable remainder
    Phi, blocks = _block_diagonalize(A, groups)

    grams = []
    for i, Tk in enumerate(blocks):
        if Tk.shape[0] == 0:
            grams.append(Tk.real)
        elif i < len(centers):
            grams.append(np.eye(Tk.shape[0], dtype=complex))
        else:
            Pk = scipy.linalg.solve_discrete_lyapunov(Tk.conj().T, np.eye(Tk.shape[0]))
            grams.append((Pk + Pk.conj().T) / 2.0)
    Phat = scipy.linalg.block_diag(*grams).astype(complex)
    Phi_inv = np.linalg.inv(Phi)
    P = (Phi_inv.conj().T @ Phat @ Phi_inv).real
    P = (P + P.T) / 2.0
    return P * (n / np.trace(P))


def _p_form_data(P, A):
    n = A.shape[0]
    Q = scipy.linalg.block_diag(P, -P)
    U = np.hstack([np.zeros((n, n)), np.eye(n)])
    V = np.hstack([A, np.eye(n)])
    return Q, U, V


def _lmi(form, A, P, X):
    if form == "P":
        top = np.hstack([P, A.T @ X.T])
        bottom = np.hstack([X @ A, X + X.T - P])
    else:
        top = np.hstack([P, A @ X])
        bottom = np.hstack([X.T @ A.T, X + X.T - P])
    F = np.vstack([top, bottom])
    return (F + F.T) / 2.0


def _lyap(form, A, P):
    D = P - A.T @ P @ A if form == "P" else P - A @ P @ A.T
    return (D + D.T) / 2.0


def _min_eig(M):
    return float(np.linalg.eigvalsh(M)[0]) if M.shape[0] else float("inf")


def _certificate(A, form, tol):
    A = _check_square(A)
    base = A if form == "P" else A.T
    P = construct_P(base, tol)
    Q, U, V = _p_form_data(P, base)
    witness = construct_witness(ProjectionProblem(Q, U, V, tol))
    X = witness.X if form == "P" else witness.X.T
    cert = StabilityCertificate(
        form=form,
        P_or_S=P,
        X=X,
        lmi_min_eig=_min_eig(_lmi(form, A, P, X)),
        lyap_min_eig=_min_eig(_lyap(form, A, P)),
    )
    check = verify_certificate(A, cert, tol)
    if not check.passed:
        raise NumericalBreakdown("certificate failed verification: " + "; ".join(check.failures), check)
    return cert


def certificate_P_form(A, tol=DEFAULT_TOL):
    """P and X for ``[[P, A^T X^T], [X A, X + X^T - P]] >= 0``."""
    return _certificate(A, "P", tol)


def certificate_S_form(A, tol=DEFAULT_TOL):
    """S and X for ``[[S, A X], [X^T A^T, X + X^T - S]] >= 0``."""
    return _certificate(A, "S", tol)


def verify_certificate(A, cert, tol=DEFAULT_TOL):
    """Recompute every inequality a certificate claims."""
    A = _check_square(A)
    n = A.shape[0]
    P = check_symmetric(cert.P_or_S, tol.tol_sym, "P_or_S", dim=n)
    X = check_matrix(cert.X, "X", shape=(n, n))
    form = cert.form.upper()
    if form not in ("P", "S"):
        raise ValueError(f"unknown certificate form {cert.form!r}")

    failures = []
    pd = is_psd(P, tol)
    if not pd.pd:
        failures.append(f"{form} is not positive definite (min eigenvalue {pd.min_eig:.3e})")
    lyap = _lyap(form, A, P)
    lyap_min = _min_eig(lyap)
    if lyap_min < -tol.tol_residual * max(1.0, spectral_norm(P), spectral_norm(A) ** 2 * spectral_norm(P)):
        failures.append(f"Lyapunov difference is indefinite (min eigenvalue {lyap_min:.3e})")
    F = _lmi(form, A, P, X)
    lmi_min = _min_eig(F)
    if lmi_min < -tol.tol_residual * max(1.0, spectral_norm(F)):
        failures.append(f"block inequality fails (min eigenvalue {lmi_min:.3e})")
    s = np.linalg.svd(X, compute_uv=False) if n else np.ones(1)
    ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    if not ratio > tol.tol_rank:
        failures.append(f"X is singular (sigma_min/sigma_max = {ratio:.3e})")
    slack = X + X.T - P
    slack_min = _min_eig((slack + slack.T) / 2.0)
    if slack_min < -tol.tol_residual * max(1.0, spectral_norm(F)):
        failures.append(f"X + X^T - {form} is indefinite (min eigenvalue {slack_min:.3e})")
    return CertificateCheck(
        passed=not failures,
        pd_min_eig=pd.min_eig,
        lyap_min_eig=lyap_min,
        lmi_min_eig=lmi_min,
        x_condition=ratio,
        slack_min_eig=slack_min,
        failures=failures,
    )


def extract_gain(X, Z, side="controller", tol=DEFAULT_TOL):
    """Undo the linearizing change of variables.

    ``side="controller"`` inverts ``Z = K X``; ``side="observer"`` inverts
    ``Z = X L``.
    """
    X = check_matrix(X, "X")
    Z = check_matrix(Z, "Z")
    if X.shape[0] != X.shape[1]:
        raise DimensionMismatch(f"X must be square, got {X.shape}")
    s = np.linalg.svd(X, compute_uv=False)
    if s.size and not s[-1] > tol.tol_rank * s[0]:
        raise SingularX(f"X is singular (sigma_min/sigma_max = {s[-1] / s[0] if s[0] else 0.0:.3e})")
    if side == "controller":
        gain = np.linalg.solve(X.T, Z.T).T
        residual = np.linalg.norm(gain @ X - Z)
    elif side == "observer":
        gain = np.linalg.solve(X, Z)
        residual = np.linalg.norm(X @ gain - Z)
    else:
        raise ValueError(f"side must be 'controller' or 'observer', got {side!r}")
    return SynthesisExtraction(X=X, Z=Z, gain=gain, residual=float(residual))
