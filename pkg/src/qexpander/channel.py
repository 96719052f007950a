"""Unitary-mixture channels T(X) = (1/d) sum_j u_j X u_j* and generic linear maps on M(N).

Superoperators use row-major vectorization (``linalg.vec``), under which the
channel matrix is literally ``(1/d) sum_j kron(u_j, conj(u_j))``.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import linalg as la
from .errors import (DegenerateChannel, DimensionError, DomainError,
                     PreconditionError, ResourceError, ValidationError)

UNITARY_TOL = 1e-10
UNIT_EIGEN_TOL = 1e-8
DEGENERATE_RHO = 1e-12
# N^4 complex entries; 64 -> 256 MiB
MAX_SUPEROPERATOR_BYTES = 1 << 30


@dataclass(frozen=True)
class Channel:
    unitaries: tuple

    def __post_init__(self):
        us = tuple(la.as_matrix(u).copy() for u in self.unitaries)
        if not us:
            raise ValidationError("a channel needs at least one unitary")
        n = us[0].shape[0]
        for j, u in enumerate(us):
            if u.shape != (n, n):
                raise ValidationError(f"unitary {j} has shape {u.shape}, expected {(n, n)}")
            if not la.is_unitary(u, UNITARY_TOL):
                err = np.linalg.norm(u @ la.dagger(u) - np.eye(n))
                raise ValidationError(f"unitary {j} fails ||uu* - I||_2 <= 1e-10 sqrt(N) (got {err:.3e})")
            u.setflags(write=False)
        object.__setattr__(self, "unitaries", us)

    @property
    def dim(self):
        return self.unitaries[0].shape[0]

    @property
    def degree(self):
        return len(self.unitaries)

    def __call__(self, eta):
        return apply(self, eta)


@dataclass(frozen=True)
class Superoperator:
    dim: int
    matrix: np.ndarray


class LinearMap:
    """A linear map on M(N) exposing forward and Hilbert-Schmidt adjoint action.

    The N^2 x N^2 matrix is built lazily, either from ``matrix_fn`` or by
    applying the map to the matrix units.
    """

    def __init__(self, dim: int, forward: Callable, backward: Callable,
                 name: str = "map", matrix_fn: Optional[Callable] = None):
        self.dim = int(dim)
        self._forward = forward
        self._backward = backward
        self.name = name
        self._matrix_fn = matrix_fn
        self._matrix = None

    def _check(self, x):
        x = la.as_matrix(x)
        if x.shape != (self.dim, self.dim):
            raise DimensionError(f"{self.name} acts on {self.dim}x{self.dim}, got {x.shape}")
        return x

    def apply(self, x):
        return self._forward(self._check(x))

    __call__ = apply

    def adjoint_apply(self, x):
        return self._backward(self._check(x))

    def adjoint(self):
        if self._matrix is not None:
            mat = self._matrix
            fn = lambda: la.dagger(mat)
        elif self._matrix_fn is not None:
            fn = lambda: la.dagger(self.matrix)
        else:
            fn = None
        name = self.name[:-1] if self.name.endswith("*") else self.name + "*"
        return LinearMap(self.dim, self._backward, self._forward, name, fn)

    @property
    def matrix(self):
        if self._matrix is None:
            _check_budget(self.dim)
            if self._matrix_fn is not None:
                self._matrix = np.asarray(self._matrix_fn(), dtype=complex)
            else:
                n = self.dim
                cols = np.empty((n * n, n * n), dtype=complex)
                for k in range(n * n):
                    e = np.zeros(n * n, dtype=complex)
                    e[k] = 1.0
                    cols[:, k] = la.vec(self._forward(la.unvec(e, n)))
                self._matrix = cols
        return self._matrix

    def __repr__(self):
        return f"LinearMap({self.name!r}, dim={self.dim})"


def _check_budget(n):
    need = 16 * n ** 4
    if need > MAX_SUPEROPERATOR_BYTES:
        raise ResourceError(f"superoperator for N={n} needs {need} bytes")


def _check_dim(T, eta):
    eta = la.as_matrix(eta)
    if eta.shape != (T.dim, T.dim):
        raise DimensionError(f"channel has N={T.dim}, input has shape {eta.shape}")
    return eta


def apply(T: Channel, eta):
    eta = _check_dim(T, eta)
    us = np.stack(T.unitaries)
    return np.einsum("jab,bc,jdc->ad", us, eta, us.conj()) / T.degree


def adjoint_apply(T: Channel, eta):
    eta = _check_dim(T, eta)
    us = np.stack(T.unitaries)
    return np.einsum("jba,bc,jcd->ad", us.conj(), eta, us) / T.degree


def superoperator(T: Channel) -> Superoperator:
    n = T.dim
    _check_budget(n)
    try:
        m = np.zeros((n * n, n * n), dtype=complex)
        for u in T.unitaries:
            m += np.kron(u, u.conj())
    except MemoryError as exc:
        raise ResourceError(f"cannot allocate superoperator for N={n}") from exc
    return Superoperator(n, m / T.degree)


def e_map(eta):
    """Orthogonal projection onto span(I): (tr(eta)/N) I."""
    eta = la.as_matrix(eta)
    n = eta.shape[0]
    return np.trace(eta) / n * np.eye(n, dtype=complex)


def delta_apply(T: Channel, eta):
    return apply(T, eta) - e_map(_check_dim(T, eta))


def _identity_vec(n):
    return la.vec(np.eye(n, dtype=complex)) / np.sqrt(n)


def as_map(T: Channel) -> LinearMap:
    return LinearMap(T.dim, lambda x: apply(T, x), lambda x: adjoint_apply(T, x),
                     "T", lambda: superoperator(T).matrix)


def deflated_map(T: Channel) -> LinearMap:
    """Delta = T - E, which agrees with T on traceless inputs and kills I."""
    n = T.dim

    def matrix():
        v = _identity_vec(n)
        return superoperator(T).matrix - np.outer(v, v.conj())

    return LinearMap(n, lambda x: apply(T, x) - e_map(x),
                     lambda x: adjoint_apply(T, x) - e_map(x), "Delta", matrix)


def identity_map(n) -> LinearMap:
    return LinearMap(n, lambda x: x.copy(), lambda x: x.copy(), "id",
                     lambda: np.eye(n * n, dtype=complex))


def e_linear_map(n) -> LinearMap:
    def matrix():
        v = _identity_vec(n)
        return np.outer(v, v.conj())
    return LinearMap(n, e_map, e_map, "E", matrix)


def superoperator_map(s: Superoperator) -> LinearMap:
    n, m = s.dim, s.matrix
    return LinearMap(n, lambda x: la.unvec(m @ la.vec(x), n),
                     lambda x: la.unvec(la.dagger(m) @ la.vec(x), n), "S", lambda: m)


def reduced_spectral_radius(T: Channel) -> float:
    """Top singular value of Pi S Pi, Pi the projection off vec(I)/sqrt(N)."""
    n = T.dim
    s = superoperator(T).matrix
    v = _identity_vec(n)
    pi = np.eye(n * n) - np.outer(v, v.conj())
    return float(np.linalg.norm(pi @ s @ pi, 2))


def unit_eigen_multiplicity(T: Channel, tol=UNIT_EIGEN_TOL) -> int:
    w = np.linalg.eigvals(superoperator(T).matrix)
    return int(np.sum(np.abs(w - 1.0) <= tol))


def _rank_one_search(fwd, bwd, n, rng, start=None, iters=2000):
    """Alternating ascent of ||fwd(u v*)||_1 over unit u, v."""
    if start is None:
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
    else:
        u, v = start
    best = 0.0
    for _ in range(iters):
        y = fwd(np.outer(u, v.conj()))
        wl, s, wrh = np.linalg.svd(y)
        val = float(s.sum())
        if val <= best + 1e-15:
            best = max(best, val)
            break
        best = val
        # dual unitary attaining the trace norm of y
        w = wl @ wrh
        z = bwd(w)
        zl, _, zrh = np.linalg.svd(z)
        u, v = zl[:, 0], zrh[0].conj()
    return best


def induced_norm(m, p, budget=8, seed=0) -> float:
    """Schatten p -> p induced norm of a linear map.

    p = 2 is exact. For p = 1 and p = inf the value is a lower bound obtained
    from rank-one extreme points of the trace-norm ball with ``budget``
    restarts (restart 0 starts from e_1 e_1*); it is monotone in ``budget``.
    """
    if isinstance(m, Channel):
        m = as_map(m)
    if budget < 1:
        raise DomainError("budget must be >= 1")
    if p == 2:
        return float(np.linalg.norm(m.matrix, 2))
    if p == np.inf:
        return induced_norm(m.adjoint(), 1, budget, seed)
    if p != 1:
        raise DomainError(f"unsupported induced norm index p={p!r}; use 1, 2 or inf")
    n = m.dim
    e1 = np.zeros(n, dtype=complex)
    e1[0] = 1.0
    best = 0.0
    for r in range(budget):
        rng = np.random.default_rng([seed, r])
        start = (e1, e1) if r == 0 else None
        best = max(best, _rank_one_search(m.apply, m.adjoint_apply, n, rng, start))
    return best


def cptp_norm_exact(T: Channel, p) -> float:
    """Induced Schatten norms of a unital CPTP channel: 1 for p in {1, 2, inf}."""
    if p not in (1, 2, np.inf):
        raise DomainError(f"unsupported p={p!r}")
    return 1.0


def operator_height_bound(T: Channel, rho=None) -> float:
    """1/rho, a certified upper bound on the height of T restricted to traceless matrices."""
    rho = reduced_spectral_radius(T) if rho is None else rho
    if rho <= DEGENERATE_RHO:
        raise DegenerateChannel(f"reduced spectral radius {rho:.3e} is zero: perfect mixer", rho)
    return 1.0 / rho


def conjugated_vector_map(m, u1, u2, v1, v2):
    """Matrix of lambda -> diag(U2 m(U1 diag(lambda) V1) V2)."""
    if isinstance(m, Channel):
        m = as_map(m)
    n = m.dim
    mats = []
    for name, u in (("U1", u1), ("U2", u2), ("V1", v1), ("V2", v2)):
        u = la.as_matrix(u)
        if u.shape != (n, n) or not la.is_unitary(u, UNITARY_TOL):
            raise PreconditionError(f"{name} is not an {n}x{n} unitary within 1e-10")
        mats.append(u)
    u1, u2, v1, v2 = mats
    out = np.empty((n, n), dtype=complex)
    for k in range(n):
        x = np.outer(u1[:, k], v1[k, :])  # U1 E_kk V1
        out[:, k] = np.diagonal(u2 @ m.apply(x) @ v2)
    return out


def diagonal_reduced_spectral_radius(T: Channel) -> float:
    """sup |T(x)|_2 / |x|_2 over traceless *diagonal* x.

    For a cyclic Cayley channel this is the classical graph rho; the full
    ``reduced_spectral_radius`` is 1 there, since shift matrices commute.
    """
    n = T.dim
    if n < 2:
        return 0.0
    cols = superoperator(T).matrix[:, [i * n + i for i in range(n)]]
    # orthonormal basis of the traceless subspace of C^n
    q, _ = np.linalg.qr(np.eye(n) - 1.0 / n)
    q = q[:, : n - 1]
    return float(np.linalg.norm(cols @ q, 2))
