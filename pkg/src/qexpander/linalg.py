"""Dense complex matrix kernels: Schatten norms, heights, logarithmic diameters.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Factorizations are delegated to LAPACK through :mod:`numpy.linalg`, which is
deterministic for a fixed input.
"""
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, DomainError, PreconditionError

SELF_ADJOINT_TOL = 1e-10
RANK_CUTOFF = 1e-10


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # columns


class Svd(NamedTuple):
    left: np.ndarray
    singulars: np.ndarray     # descending
    right: np.ndarray         # A = left @ diag(singulars) @ right.conj().T


def as_matrix(a, square=True):
    """Coerce to a finite complex 2-d array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


def as_vector(z):
    v = np.asarray(z, dtype=complex)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError("vector has non-finite entries")
    return v


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def singular_values(a):
    return np.linalg.svd(as_matrix(a, square=False), compute_uv=False)


def schatten_norm(a, p):
    """Schatten-p norm for p in {1, 2, inf}."""
    a = as_matrix(a)
    if p == 2:
        return float(np.sqrt(np.sum(np.abs(a) ** 2)))
    s = np.linalg.svd(a, compute_uv=False)
    if p == 1:
        return float(np.sum(s))
    if p == np.inf or p == "inf":
        return float(s[0]) if s.size else 0.0
    raise DomainError(f"unsupported Schatten index p={p!r}; use 1, 2 or inf")


def hs_inner(a, b):
    """Hilbert-Schmidt inner product tr(A* B)."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def is_self_adjoint(a, tol=SELF_ADJOINT_TOL):
    a = np.asarray(a)
    scale = max(1.0, float(np.linalg.norm(a)))
    return float(np.linalg.norm(a - dagger(a))) <= tol * scale


def hermitian_eig(a):
    a = as_matrix(a)
    scale = max(1.0, float(np.linalg.norm(a, 2)))
    defect = float(np.linalg.norm(a - dagger(a)))
    if defect > SELF_ADJOINT_TOL * scale:
        raise PreconditionError(
            f"matrix is not self-adjoint: ||A - A*||_2 = {defect:.3e} exceeds "
            f"{SELF_ADJOINT_TOL:g} * max(1, ||A||)"
        )
    w, v = np.linalg.eigh((a + dagger(a)) / 2)
    return HermitianEigen(w, v)


def svd(a):
    a = as_matrix(a, square=False)
    u, s, vh = np.linalg.svd(a)
    return Svd(u, s, dagger(vh))


def schatten_height(a):
    """sqrt(||A||_1 ||A||_inf) / ||A||_2, always >= 1."""
    s = singular_values(a)
    two = float(np.sqrt(np.sum(s ** 2)))
    if two == 0.0:
        raise DomainError("Schatten height undefined for the zero matrix")
    return float(np.sqrt(np.sum(s) * s[0]) / two)


def vector_height(z):
    z = np.abs(as_vector(z))
    two = float(np.linalg.norm(z))
    if two == 0.0:
        raise DomainError("height undefined for the zero vector")
    return float(np.sqrt(z.sum() * z.max()) / two)


def lp_operator_norm(m, p):
    """Induced l_p -> l_p norm of a matrix for p in {1, 2, inf}."""
    m = as_matrix(m, square=False)
    if p == 1:
        return float(np.abs(m).sum(axis=0).max())
    if p == 2:
        return float(np.linalg.norm(m, 2))
    if p == np.inf:
        return float(np.abs(m).sum(axis=1).max())
    raise DomainError(f"unsupported l_p index p={p!r}")


def matrix_height(m):
    """Height via l_p-induced norms; a column vector reduces to vector_height."""
    two = lp_operator_norm(m, 2)
    if two == 0.0:
        raise DomainError("height undefined for the zero matrix")
    return float(np.sqrt(lp_operator_norm(m, 1) * lp_operator_norm(m, np.inf)) / two)


def _diameter(moduli):
    top = moduli.max()
    if top == 0.0:
        raise DomainError("logarithmic diameter undefined for zero input")
    return moduli, top


def log_diameter_vector(z):
    """max |z_i| over min nonzero |z_i|; exact zeros are ignored."""
    moduli, top = _diameter(np.abs(as_vector(z)))
    return float(top / moduli[moduli > 0].min())


def log_diameter_matrix(a):
    """Ratio of extreme nonzero singular values, cutoff RANK_CUTOFF * sigma_max."""
    s, top = _diameter(singular_values(a))
    return float(top / s[s > RANK_CUTOFF * top].min())


def toeplitz_split(x):
    """X = A + iB with A = (X + X*)/2 and B = (X - X*)/(2i), both self-adjoint."""
    x = as_matrix(x)
    xh = dagger(x)
    return (x + xh) / 2, (x - xh) / 2j


def cosine(u, v):
    """<u, v> / (|u| |v|) with <u, v> = sum u_i conj(v_i)."""
    u = as_vector(u)
    v = as_vector(v)
    if u.shape != v.shape:
        raise DimensionError(f"length mismatch {u.size} vs {v.size}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise DomainError("cosine undefined for a zero vector")
    return complex(np.vdot(v, u) / (nu * nv))


def diag_extract(a):
    return np.diagonal(np.asarray(a)).copy()


def is_unitary(u, tol=1e-10):
    u = np.asarray(u)
    n = u.shape[0]
    return float(np.linalg.norm(u @ dagger(u) - np.eye(n))) <= tol * np.sqrt(n)


def vec(x):
    """Row-major vectorization; u X u* corresponds to kron(u, conj(u))."""
    return np.asarray(x).reshape(-1)


def unvec(v, n):
    return np.asarray(v).reshape(n, n)
