"""Constructive converse of the mixing lemma.

Given a channel whose reduced spectral radius rho is not small, extract two
orthogonal projections whose trace correlation under the channel deviates from
the uniform baseline by at least rho / g(1/rho) * sqrt(tr P1 tr P2), where g is
the explicit function ``bound_g``. Every intermediate guarantee is checked at
runtime and a failure raises :class:`ContractViolation`.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg as la
from .channel import (DEGENERATE_RHO, Channel, LinearMap, apply, as_map,
                      conjugated_vector_map, deflated_map, reduced_spectral_radius)
from .errors import ContractViolation, DegenerateChannel, DomainError, PreconditionError
from .generators import RegularGraph, edge_count, graph_rho

HEIGHT_SLACK = 1e-12
BRUTE_FORCE_MAX_N = 20
LEV_GRID = 64


@dataclass(frozen=True)
class Projection:
    matrix: np.ndarray
    rank: int

    def __post_init__(self):
        p = la.as_matrix(self.matrix)
        if not la.is_self_adjoint(p):
            raise DomainError("projection is not self-adjoint")
        if np.linalg.norm(p @ p - p) > 1e-9:
            raise DomainError("projection is not idempotent")
        if abs(np.trace(p).real - self.rank) > 1e-8:
            raise DomainError(f"trace {np.trace(p).real:.6g} does not match rank {self.rank}")
        p.setflags(write=False)
        object.__setattr__(self, "matrix", p)

    @classmethod
    def from_basis(cls, basis, xi):
        """basis diag(xi) basis* for a unitary ``basis`` and binary ``xi``."""
        xi = np.asarray(xi, dtype=float)
        return cls(basis @ np.diag(xi) @ la.dagger(basis), int(round(xi.sum())))

    @property
    def trace(self):
        return float(self.rank)


@dataclass(frozen=True)
class VectorWitness:
    z: np.ndarray
    achieved_ratio: float
    log_diam: float


@dataclass
class WitnessReport:
    dim: int
    degree: int
    rho: float
    K: float
    P1: Projection
    P2: Projection
    inner: float
    inner_imag: float
    baseline: float
    discrepancy: float
    ratio: float
    guaranteed: float
    passed: bool
    c_eff: float

    def to_dict(self, emit_projections=False):
        d = {
            "dim": self.dim, "degree": self.degree, "rho": self.rho, "K": self.K,
            "tr_p1": self.P1.rank, "tr_p2": self.P2.rank, "inner": self.inner,
            "baseline": self.baseline, "discrepancy": self.discrepancy,
            "ratio": self.ratio, "guaranteed": self.guaranteed, "pass": self.passed,
            "c_eff": self.c_eff,
        }
        if emit_projections:
            from .io import matrix_to_literal
            d["P1"] = matrix_to_literal(self.P1.matrix)
            d["P2"] = matrix_to_literal(self.P2.matrix)
        return d


# explicit bound functions ---------------------------------------------------

def bound_f(K):
    """8 sqrt(4 ln(48 K^2) + 2)."""
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    return 8.0 * math.sqrt(4.0 * math.log(48.0 * K * K) + 2.0)


def bound_g(K):
    """2 f(K) sqrt(4 ln(2 K f(K)) + 2); the converse loses a factor 1/bound_g(1/rho)."""
    f = bound_f(K)
    return 2.0 * f * math.sqrt(4.0 * math.log(2.0 * K * f) + 2.0)


def bound_g_quotient(K):
    """bound_g(K) / (ln K + 1); tends to 64 sqrt(2)."""
    return bound_g(K) / (math.log(K) + 1.0)


def projection_bound(K):
    """Guaranteed |<X, P>| / (|X|_2 |P|_2) for Schatten height <= K."""
    return 1.0 / (2.0 * math.sqrt(4.0 * math.log(2.0 * K) + 2.0))


def binary_bound(K):
    """Guaranteed |cos(lambda, xi)| for vector height <= K."""
    return 1.0 / (2.0 * math.sqrt(math.log(2.0 * K * K) + 1.0))


def classical_threshold(rho):
    """Normalized converse constant rho / (32 sqrt 2 (ln(2/rho) + 4))."""
    return rho / (32.0 * math.sqrt(2.0) * (math.log(2.0 / rho) + 4.0))


# vector stage -----------------------------------------------------------------

def _ratio(m, z, mnorm):
    nz = np.linalg.norm(z)
    if nz == 0 or mnorm == 0:
        return 0.0
    return float(np.linalg.norm(m @ z) / (mnorm * nz))


def lev_vector(m, K) -> VectorWitness:
    """A vector z with |Mz| > |M| |z| / 2 and log diameter < 8K^2 + 1.

    Starts from the top right-singular vector and squeezes its moduli into a
    window of width 8K^2 + 0.99, scanning 64 window floors; banded restrictions
    of the singular vector over dyadic modulus levels are the fallback.
    """
    m = la.as_matrix(m, square=False)
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    _, s, vh = np.linalg.svd(m)
    mnorm = float(s[0])
    if mnorm == 0.0:
        raise DomainError("lev_vector needs a nonzero matrix")
    z0 = vh[0].conj()
    mod = np.abs(z0)
    top = mod.max()
    limit = 8.0 * K * K + 1.0
    width = 8.0 * K * K + 0.99
    phase = np.where(mod > 0, z0 / np.where(mod > 0, mod, 1), 1)
    best = None

    def consider(z):
        nonlocal best
        if not np.any(z):
            return None
        r = _ratio(m, z, mnorm)
        ld = la.log_diameter_vector(z)
        cand = VectorWitness(z, r, ld)
        if r > 0.5 and ld < limit:
            return cand
        if best is None or r > best.achieved_ratio:
            best = cand
        return None

    for floor in np.geomspace(top / width, top, LEV_GRID):
        clamped = np.where(mod > 0, np.maximum(mod, floor), 0.0) * phase
        hit = consider(clamped)
        if hit is None:
            hit = consider(np.where(mod >= floor, z0, 0))
        if hit is not None:
            return hit

    levels = np.full(mod.shape, -1)
    nz = mod > 0
    levels[nz] = np.floor(np.log2(top / mod[nz])).astype(int)
    span = int(math.floor(math.log2(width)))
    for lo in range(int(levels.max()) + 1):
        for hi in range(lo, lo + span):
            hit = consider(np.where((levels >= lo) & (levels <= hi), z0, 0))
            if hit is not None:
                return hit
    raise ContractViolation("no vector met both Lev bounds",
                            {"best_ratio": None if best is None else best.achieved_ratio,
                             "best_log_diam": None if best is None else best.log_diam,
                             "K": K})


def _all_binaries(n):
    """Rows of all nonzero binary vectors of length n, in lexicographic order of integers."""
    ints = np.arange(1, 2 ** n, dtype=np.int64)
    return ((ints[:, None] >> np.arange(n)) & 1).astype(float)


def _best_cos(lam, xis):
    inner = xis @ lam
    return np.abs(inner) / (np.linalg.norm(lam) * np.sqrt(xis.sum(axis=1)))


def binary_correlate(lam, K=None):
    """Binary xi maximizing |cos(lam, xi)| over sorted-prefix sets of each sign class.

    For n <= 20 all 2^n - 1 binaries are also searched and the global best
    replaces the prefix choice only when strictly larger. When ``K`` is given
    the guarantee |cos| >= 1/(2 sqrt(ln(2K^2) + 1)) is asserted.
    """
    lam = la.as_vector(lam)
    if not np.any(lam):
        raise DomainError("binary_correlate needs a nonzero vector")
    n = lam.size
    if K is not None and la.vector_height(lam) > K * (1 + HEIGHT_SLACK):
        raise PreconditionError(f"vector height {la.vector_height(lam):.6g} exceeds K={K:.6g}")
    re = lam.real if np.iscomplexobj(lam) else lam
    cands = []
    for sign in (1.0, -1.0):
        idx = [i for i in np.argsort(-sign * re, kind="stable") if sign * re[i] > 0]
        for k in range(1, len(idx) + 1):
            xi = np.zeros(n)
            xi[idx[:k]] = 1.0
            cands.append(xi)
    if not cands:
        # purely imaginary input: fall back to modulus ordering
        for k in range(1, n + 1):
            xi = np.zeros(n)
            xi[np.argsort(-np.abs(lam), kind="stable")[:k]] = 1.0
            cands.append(xi)
    cands = np.array(cands)
    scores = _best_cos(lam, cands)
    pick = int(np.argmax(scores))
    xi, score = cands[pick], float(scores[pick])
    if n <= BRUTE_FORCE_MAX_N:
        for chunk in _binary_chunks(n):
            sc = _best_cos(lam, chunk)
            j = int(np.argmax(sc))
            if sc[j] > score * (1 + 1e-12):
                xi, score = chunk[j], float(sc[j])
    if K is not None and score < binary_bound(K):
        raise ContractViolation("binary correlation below guarantee",
                                {"cos": score, "bound": binary_bound(K), "xi": xi.tolist()})
    return xi.copy()


def _binary_chunks(n, chunk=1 << 16):
    total = 2 ** n
    for start in range(1, total, chunk):
        ints = np.arange(start, min(start + chunk, total), dtype=np.int64)
        yield ((ints[:, None] >> np.arange(n)) & 1).astype(float)


# matrix stage -----------------------------------------------------------------

def top_singular_matrix(m: LinearMap):
    """Unit X with |m(X)|_2 = |m|_{2->2}, from the superoperator's top right-singular vector."""
    _, s, vh = np.linalg.svd(m.matrix)
    if s[0] <= DEGENERATE_RHO:
        raise DegenerateChannel(f"{m.name} is the zero map", float(s[0]))
    return la.unvec(vh[0].conj(), m.dim)


def matrix_witness(m: LinearMap, K):
    """A = U1 diag(z) V1 with |m(A)| > |m| |A| / 4 and log diameter < 32 K^2 + 1."""
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    norm = float(np.linalg.norm(m.matrix, 2))
    x = top_singular_matrix(m)
    u1, _, v1h = np.linalg.svd(x)
    w, _, zh = np.linalg.svd(m.apply(x))
    u2, v2 = la.dagger(w), la.dagger(zh)
    cmap = conjugated_vector_map(m, u1, u2, v1h, v2)
    lev = lev_vector(cmap, 2 * K)
    a = u1 @ np.diag(lev.z) @ v1h
    a_norm = np.linalg.norm(a)
    got = float(np.linalg.norm(m.apply(a)) / a_norm)
    ld = la.log_diameter_matrix(a)
    diag = {"ratio": got, "norm": norm, "log_diam": ld, "K": K,
            "lev_ratio": lev.achieved_ratio}
    if not got > norm / 4:
        raise ContractViolation("|m(A)|_2 <= |m|/4 |A|_2", diag)
    if not ld < 32 * K * K + 1:
        raise ContractViolation("log diameter of A not below 32K^2 + 1", diag)
    return a


def projection_from_matrix(x, K) -> Projection:
    """Nonzero projection P with |<X, P>| >= |X|_2 |P|_2 / (2 sqrt(4 ln(2K) + 2))."""
    x = la.as_matrix(x)
    if not np.any(x):
        raise DomainError("projection_from_matrix needs a nonzero matrix")
    h = la.schatten_height(x)
    if h > K * (1 + HEIGHT_SLACK):
        raise PreconditionError(f"Schatten height {h:.6g} exceeds K={K:.6g}")
    a, b = la.toeplitz_split(x)
    if np.linalg.norm(a) < np.linalg.norm(b):
        a, b = la.toeplitz_split(1j * x)
    eig = la.hermitian_eig(a)
    xi = binary_correlate(eig.eigenvalues, math.sqrt(2) * K)
    p = Projection.from_basis(eig.eigenvectors, xi)
    lhs = abs(la.hs_inner(x, p.matrix))
    rhs = np.linalg.norm(x) * math.sqrt(p.rank) * projection_bound(K)
    if not lhs >= rhs:
        raise ContractViolation("|<X,P>| below projection guarantee",
                                {"lhs": lhs, "rhs": rhs, "K": K, "height": h})
    return p


def expander_projection(m: LinearMap, K) -> Projection:
    """Projection P with |m(P)|_2 / |P|_2 > |m|_{2->2} / bound_f(K)."""
    a = matrix_witness(m.adjoint(), K)
    p = projection_from_matrix(m.adjoint_apply(a), 24 * K * K)
    norm = float(np.linalg.norm(m.matrix, 2))
    got = float(np.linalg.norm(m.apply(p.matrix)) / math.sqrt(p.rank))
    if not got > norm / bound_f(K):
        raise ContractViolation("|m(P)|/|P| not above |m|/f(K)",
                                {"ratio": got, "norm": norm, "K": K, "rank": p.rank})
    return p


def _discrepancy(T: Channel, p1: Projection, p2: Projection):
    inner = la.hs_inner(p1.matrix, apply(T, p2.matrix))
    base = p1.rank * p2.rank / T.dim
    disc = abs(inner.real - base)
    return inner, base, disc, disc / math.sqrt(p1.rank * p2.rank)


def mixing_witnesses(T: Channel, rho: Optional[float] = None) -> WitnessReport:
    """Projection pair realizing the converse bound ratio > rho / bound_g(1/rho).

    P2 is the expander projection of the deflated map Delta = T - E and P1 the
    projection correlated with Delta(P2), so the discrepancy is
    |<P1, T(P2)> - tr P1 tr P2 / N| = |<P1, Delta(P2)>|.
    """
    if rho is None:
        rho = reduced_spectral_radius(T)
    if rho <= 1e-10:
        raise DegenerateChannel(f"reduced spectral radius {rho:.3e}: perfect mixer, no witness", rho)
    K = max(1.0, 1.0 / rho)
    delta = deflated_map(T)
    p2 = expander_projection(delta, K)
    p1 = projection_from_matrix(delta.apply(p2.matrix), K * bound_f(K))
    inner, base, disc, ratio = _discrepancy(T, p1, p2)
    guaranteed = rho / bound_g(K)
    passed = ratio > guaranteed
    c_eff = rho / (ratio * (1.0 - math.log(rho))) if ratio > 0 else math.inf
    report = WitnessReport(T.dim, T.degree, float(rho), K, p1, p2, float(inner.real),
                           float(inner.imag), base, disc, ratio, guaranteed, passed, c_eff)
    if abs(inner.imag) > 1e-9:
        raise ContractViolation("<P1, T P2> is not real", report.to_dict())
    if not passed:
        raise ContractViolation("witness ratio below rho / g(1/rho)", report.to_dict())
    return report


# classical counterpart ----------------------------------------------------------

@dataclass
class ClassicalReport:
    n: int
    d: int
    rho: float
    S1: list
    S2: list
    edges: int
    discrepancy: float
    ratio: float
    threshold: float
    passed: bool
    printed_form_holds: bool

    def to_dict(self):
        return {"n": self.n, "d": self.d, "rho": self.rho, "S1": self.S1, "S2": self.S2,
                "edges": self.edges, "discrepancy": self.discrepancy, "ratio": self.ratio,
                "threshold": self.threshold, "pass": self.passed,
                "printed_form_holds": self.printed_form_holds}


def classical_subset_witnesses(g: RegularGraph) -> ClassicalReport:
    """Vertex sets S1, S2 with |e(S1,S2)/d - |S1||S2|/n| >= classical_threshold(rho) sqrt(|S1||S2|)."""
    if not g.is_connected():
        raise PreconditionError("graph is disconnected")
    if g.is_bipartite():
        raise PreconditionError("graph is bipartite (rho = 1)")
    rho = graph_rho(g)
    if rho <= 1e-10:
        raise DegenerateChannel(f"graph rho {rho:.3e} is zero", rho)
    n, d = g.n, g.d
    K = max(1.0, 1.0 / rho)
    delta = g.markov - np.full((n, n), 1.0 / n)
    z = lev_vector(delta, 2 * K).z.real
    xi2 = binary_correlate(delta @ z)
    xi1 = binary_correlate(delta @ xi2)
    s1 = [int(i) for i in np.nonzero(xi1)[0]]
    s2 = [int(i) for i in np.nonzero(xi2)[0]]
    e = edge_count(g, s1, s2)
    disc = abs(e / d - len(s1) * len(s2) / n)
    scale = math.sqrt(len(s1) * len(s2))
    thr = classical_threshold(rho)
    rep = ClassicalReport(n, d, rho, s1, s2, e, disc, disc / scale, thr,
                          disc >= thr * scale, disc >= d * thr * scale)
    if not rep.passed:
        raise ContractViolation("classical discrepancy below normalized bound", rep.to_dict())
    return rep
