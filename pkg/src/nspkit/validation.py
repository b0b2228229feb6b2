"""Input validation helpers.

Every public entry point funnels array-like input through these so that the
numerical code only ever sees finite 2-D float arrays.  Zero-sized
dimensions are accepted everywhere.
"""

import numpy as np

from .exceptions import AsymmetricInput, DimensionMismatch, NonFiniteInput


def _as_real(a, name):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        raise TypeError(f"{name} is complex; only real data is supported")
    return np.asarray(a, dtype=float)


def check_matrix(A, name="matrix", shape=None):
    """Return ``A`` as a finite 2-D float64 array.

    Scalars become 1x1 matrices and 1-D input becomes a column.  ``shape``
    may fix either dimension; ``None`` entries are unconstrained.  Complex
    input is refused rather than silently truncated.
    """
    A = _as_real(A, name)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    elif A.ndim == 1:
        A = A.reshape(-1, 1)
    elif A.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got ndim={A.ndim}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteInput(f"{name} contains NaN or Inf")
    if shape is not None:
        for axis, want in enumerate(shape):
            if want is not None and A.shape[axis] != want:
                raise DimensionMismatch(
                    f"{name} has shape {A.shape}, expected {tuple(shape)}"
                )
    return A


def check_vector(x, name="vector", size=None):
    x = _as_real(x, name)
    if x.ndim == 2 and 1 in x.shape:
        x = x.ravel()
    elif x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1:
        raise DimensionMismatch(f"{name} must be a vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput(f"{name} contains NaN or Inf")
    if size is not None and x.size != size:
        raise DimensionMismatch(f"{name} has length {x.size}, expected {size}")
    return x


def check_symmetric(M, tol_sym=1e-12, name="matrix", dim=None):
    """Return the symmetric part of ``M`` after checking it is nearly symmetric.

    The asymmetry allowed is ``tol_sym * (1 + max|M_ij|)``.
    """
    M = check_matrix(M, name=name, shape=None if dim is None else (dim, dim))
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    if M.size:
        gap = np.max(np.abs(M - M.T))
        if gap > tol_sym * (1.0 + np.max(np.abs(M))):
            raise AsymmetricInput(f"{name} is not symmetric (max asymmetry {gap:.3e})")
    return (M + M.T) / 2.0


def check_same_cols(*named):
    """Check that all ``(name, array)`` pairs share a column count."""
    cols = {name: A.shape[1] for name, A in named}
    if len(set(cols.values())) > 1:
        raise DimensionMismatch(f"column counts differ: {cols}")
    return next(iter(cols.values())) if cols else 0
