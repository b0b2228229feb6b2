"""Seeded random instances whose feasibility is known by construction.

All randomness comes from ``numpy.random.Generator(PCG64(seed))`` so that a
seed fully determines every instance.
"""

import numpy as np
import scipy.linalg

__all__ = [
    "make_rng",
    "low_rank",
    "projection_feasible",
    "projection_infeasible",
    "marginal_system",
    "unstable_system",
    "dilation_triple",
    "quadratic_instance",
    "slemma_instance",
]


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def low_rank(rng, rows, cols, rank=None):
    """Gaussian matrix of the given rank (random rank when ``None``)."""
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols))
    if rank is None:
        rank = int(rng.integers(0, min(rows, cols) + 1))
    return rng.standard_normal((rows, rank)) @ rng.standard_normal((rank, cols))


def _psd(rng, p, rank=None):
    F = low_rank(rng, p, p, rank) if p else np.zeros((0, 0))
    return F @ F.T


def projection_feasible(rng, p, m=None, n=None):
    """``Q = G - U^T X0 V - V^T X0^T U`` with ``G >= 0``; X0 is a witness."""
    m = int(rng.integers(0, min(p, 6) + 1)) if m is None else m
    n = int(rng.integers(0, min(p, 6) + 1)) if n is None else n
    U = low_rank(rng, m, p)
    V = low_rank(rng, n, p)
    X0 = rng.standard_normal((m, n))
    G = _psd(rng, p)
    cross = U.T @ X0 @ V
    Q = G - cross - cross.T
    return (Q + Q.T) / 2.0, U, V, X0


def projection_infeasible(rng, p, m=None, n=None):
    """A feasible instance with a planted negative direction in ker U or ker V.

    Requires a nontrivial kernel, so U (or V) is kept rank deficient.
    """
    Q, U, V, _ = projection_feasible(rng, p, m, n)
    target = U if rng.random() < 0.5 else V
    _, s, Vt = np.linalg.svd(target) if target.size else (None, np.zeros(0), np.eye(p))
    rank = int(np.sum(s > 1e-8 * (s[0] if s.size else 1.0)))
    kernel = Vt[rank:].T
    if kernel.shape[1] == 0:
        # full column rank: drop a row direction by zeroing the map
        kernel = np.eye(p)[:, :1]
        if target is U:
            U = U - U @ np.outer(kernel[:, 0], kernel[:, 0])
        else:
            V = V - V @ np.outer(kernel[:, 0], kernel[:, 0])
    u = kernel @ rng.standard_normal(kernel.shape[1])
    u /= np.linalg.norm(u)
    depth = rng.uniform(0.1, 1.0)
    Q = Q - (u @ Q @ u + depth) * np.outer(u, u)
    return (Q + Q.T) / 2.0, U, V, depth


def _rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _similarity(rng, n, spread=2.0):
    Qa, _ = np.linalg.qr(rng.standard_normal((n, n)))
    Qb, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Qa @ np.diag(rng.uniform(1.0 / spread, spread, n)) @ Qb


def _stable_block(rng, k, radius):
    B = rng.standard_normal((k, k))
    rho = np.max(np.abs(np.linalg.eigvals(B)))
    return B * (radius / rho) if rho > 0 else B


def marginal_system(rng, n):
    """Rotations, ±1 scalars and Schur-stable blocks under a random similarity."""
    blocks, size = [], 0
    angles = []
    while size < n:
        kind = rng.integers(0, 3)
        if kind == 0 and size + 2 <= n:
            theta = rng.uniform(0.2, np.pi - 0.2)
            if all(abs(theta - a) > 0.05 for a in angles):
                angles.append(theta)
                blocks.append(_rotation(theta))
                size += 2
        elif kind == 1:
            blocks.append(np.array([[rng.choice([-1.0, 1.0])]]))
            size += 1
        else:
            k = int(min(n - size, rng.integers(1, 4)))
            blocks.append(_stable_block(rng, k, rng.uniform(0.0, 0.9)))
            size += k
    J = scipy.linalg.block_diag(*blocks)
    T = _similarity(rng, n)
    return T @ J @ np.linalg.inv(T)


def unstable_system(rng, n):
    """A system with a defective unit eigenvalue or spectral radius above one."""
    kind = rng.integers(0, 3) if n >= 2 else 2
    if kind == 0:
        lead = np.array([[1.0, 1.0], [0.0, 1.0]]) * rng.choice([-1.0, 1.0])
    elif kind == 1 and n >= 4:
        R = _rotation(rng.uniform(0.2, np.pi - 0.2))
        lead = np.block([[R, np.eye(2)], [np.zeros((2, 2)), R]])
    else:
        lead = np.array([[rng.choice([-1.0, 1.0]) * rng.uniform(1.05, 2.0)]])
    k = lead.shape[0]
    rest = marginal_system(rng, n - k) if n > k else np.zeros((0, 0))
    J = scipy.linalg.block_diag(lead, rest)
    T = _similarity(rng, n)
    return T @ J @ np.linalg.inv(T)


def _scale_to_norm(M, target):
    s = np.linalg.norm(M, 2) if M.size else 0.0
    return M * (target / s) if s > 0 else M


def dilation_triple(rng, m, n, p, q, target):
    """(A, B, C) with ``||[A B]|| = ||[A; C]|| = target``."""
    A = rng.standard_normal((m, n))
    B = rng.standard_normal((m, p))
    C = rng.standard_normal((q, n))
    row = np.hstack([A, B])
    row = _scale_to_norm(row, target)
    A, B = row[:, :n], row[:, n:]
    if q:
        # ||[A; cC]|| grows monotonically in c; bisect to hit the target.
        lo, hi = 0.0, 1.0
        while np.linalg.norm(np.vstack([A, hi * C]), 2) < target:
            hi *= 2.0
        for _ in range(200):
            mid = (lo + hi) / 2.0
            if np.linalg.norm(np.vstack([A, mid * C]), 2) <= target:
                lo = mid
            else:
                hi = mid
        C = lo * C
    return A, B, C


def quadratic_instance(rng, n, m):
    """``(P, z, w)`` with ``R < 0``, ``Q - S R^-1 S^T >= 0`` and ``[z; w]^T P [z; w] >= 0``."""
    F = rng.standard_normal((m, m))
    R = -(F @ F.T + 0.1 * np.eye(m))
    S = rng.standard_normal((n, m))
    G = _psd(rng, n)
    Q = S @ np.linalg.solve(R, S.T) + G
    P = np.block([[Q, S], [S.T, R]])
    P = (P + P.T) / 2.0
    kind = rng.integers(0, 5)
    if kind == 0:
        return P, np.zeros(n), np.zeros(m)
    z = rng.standard_normal(n)
    w0 = -np.linalg.solve(R, S.T @ z)
    budget = float(z @ G @ z)
    d = rng.standard_normal(m)
    curvature = float(d @ (-R) @ d)
    frac = {1: 0.0, 2: 1.0}.get(int(kind), rng.uniform(0.0, 0.999))
    w = w0 + np.sqrt(frac * budget / curvature) * d if curvature > 0 else w0
    return P, z, w


def slemma_instance(rng, size, variant):
    """``(M, N, n, xbar)`` for one of the multiplier searches.

    Roughly half the instances are feasible by construction (``M = a N + D``
    with ``D > 0``); the rest use an unstructured M.
    """
    n = int(rng.integers(1, size)) if size > 1 else 1
    if variant == "matrix":
        m = size - n
        if m == 0:
            n, m = size - 1, 1
        F = rng.standard_normal((m, m))
        N22 = -(F @ F.T + 0.1 * np.eye(m))
        N12 = rng.standard_normal((n, m))
        N11 = N12 @ np.linalg.solve(N22, N12.T) + _psd(rng, n)
        N = np.block([[N11, N12], [N12.T, N22]])
    else:
        N = rng.standard_normal((size, size))
    N = (N + N.T) / 2.0
    xbar = None
    if variant == "scalar":
        lam, E = np.linalg.eigh(N)
        if lam[-1] <= 0.1:
            N = N + (0.1 - lam[-1] + 0.5) * np.outer(E[:, -1], E[:, -1])
            N = (N + N.T) / 2.0
        xbar = np.linalg.eigh(N)[1][:, -1]
    if rng.random() < 0.5:
        a = rng.uniform(0.0, 3.0) if variant != "finsler" else rng.uniform(-3.0, 3.0)
        D = rng.standard_normal((size, size))
        M = a * N + D @ D.T + 0.05 * np.eye(size)
    else:
        M = rng.standard_normal((size, size))
    M = (M + M.T) / 2.0
    return M, N, n, xbar
