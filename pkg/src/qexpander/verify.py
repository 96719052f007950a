"""Mixing-lemma checkers and the randomized inequality suite."""
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import linalg as la
from .channel import (Channel, apply, as_map, conjugated_vector_map, deflated_map,
                      induced_norm, reduced_spectral_radius, superoperator)
from .errors import DomainError
from .generators import (RegularGraph, derive_seed, edge_count, graph_rho, haar_unitary,
                         random_channel, random_projection)
from .io import channel_to_dict, matrix_to_literal
from .witness import Projection, bound_g_quotient, top_singular_matrix

IDENTITY_TOL = 1e-9
ESTIMATOR_TOL = 1e-6


@dataclass
class CheckResult:
    check: str
    trials: int
    worst_margin: float
    passed: bool
    seed: int
    replay: Optional[dict] = field(default=None, repr=False)

    def to_dict(self):
        d = {"check": self.check, "trials": self.trials, "worst_margin": self.worst_margin,
             "pass": self.passed, "seed": self.seed}
        if self.replay is not None:
            d["replay"] = self.replay
        return d


class _Tracker:
    """Accumulates signed slacks; pass iff worst >= -tol."""

    def __init__(self, name, tol, seed):
        self.name, self.tol, self.seed = name, tol, seed
        self.trials = 0
        self.worst = math.inf
        self.replay = None

    def add(self, margin, instance=None):
        self.trials += 1
        margin = float(margin)
        if margin < self.worst:
            self.worst = margin
            if margin < -self.tol and self.replay is None:
                self.replay = instance() if callable(instance) else instance
        return margin

    def result(self):
        return CheckResult(self.name, self.trials, self.worst, self.worst >= -self.tol,
                           self.seed, self.replay)


def _as_projection(p):
    return p if isinstance(p, Projection) else Projection(p, int(round(np.trace(p).real)))


def discrepancy(T: Channel, p1, p2):
    """(|<P1, T P2> - tr P1 tr P2 / N|, value / sqrt(tr P1 tr P2))."""
    p1, p2 = _as_projection(p1), _as_projection(p2)
    if p1.rank == 0 or p2.rank == 0:
        raise DomainError("discrepancy needs nonzero projections")
    inner = la.hs_inner(p1.matrix, apply(T, p2.matrix))
    value = abs(inner - p1.rank * p2.rank / T.dim)
    return float(value), float(value / math.sqrt(p1.rank * p2.rank))


def check_eml(T: Channel, pairs, rho=None, tol=IDENTITY_TOL, seed=0) -> CheckResult:
    """ratio <= rho for every projection pair."""
    rho = reduced_spectral_radius(T) if rho is None else rho
    tr = _Tracker("eml", tol, seed)
    for p1, p2 in pairs:
        _, ratio = discrepancy(T, p1, p2)
        tr.add(rho - ratio, lambda: {"channel": channel_to_dict(T)})
    return tr.result()


def check_classical_eml(g: RegularGraph, pairs, tol=IDENTITY_TOL) -> CheckResult:
    rho = graph_rho(g)
    tr = _Tracker("classical_eml", tol, 0)
    for s1, s2 in pairs:
        s1, s2 = list(s1), list(s2)
        lhs = abs(edge_count(g, s1, s2) / g.d - len(s1) * len(s2) / g.n)
        tr.add(rho * math.sqrt(len(s1) * len(s2)) - lhs,
               lambda: {"n": g.n, "edges": g.edges, "S1": s1, "S2": s2})
    return tr.result()


def random_projection_pairs(n, count, seed):
    out = []
    for k in range(count):
        rng = np.random.default_rng([seed, k])
        r1, r2 = rng.integers(1, n + 1, size=2)
        out.append((random_projection(n, int(r1), derive_seed(seed, k, 1)),
                    random_projection(n, int(r2), derive_seed(seed, k, 2))))
    return out


def _trial_instance(seed, t, nmin=2, nmax=6):
    rng = np.random.default_rng([seed, t])
    n = int(rng.integers(nmin, nmax + 1))
    d = int(rng.integers(2, 6))
    return n, d, derive_seed(seed, t)


def inequality_suite(seed=1, trials=100, tol=IDENTITY_TOL, est_tol=ESTIMATOR_TOL,
                     budget=4) -> List[CheckResult]:
    if trials < 1:
        raise DomainError("trials must be >= 1")
    names = {
        "schatten_holder": tol, "unitary_invariance": tol, "diag_contraction": tol,
        "toeplitz_pythagoras": tol, "adjoint_l2": tol, "gillespie": est_tol,
        "cptp_norms": 0.0, "height_adjoint": tol, "conjugated_map_upper": 1e-8,
        "conjugated_map_attain": 1e-8, "eml_forward": tol, "restriction_invariance": tol,
    }
    tr = {k: _Tracker(k, v, seed) for k, v in names.items()}

    for t in range(trials):
        n, d, s = _trial_instance(seed, t)
        rng = np.random.default_rng(s)
        T = random_channel(n, d, s)
        inst = lambda: {"trial": t, "seed": s, "channel": channel_to_dict(T)}
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a_inst = lambda: {"trial": t, "seed": s, "matrix": matrix_to_literal(a)}
        n1, n2, ninf = (la.schatten_norm(a, p) for p in (1, 2, np.inf))

        tr["schatten_holder"].add((n1 * ninf - n2 ** 2) / n2 ** 2, a_inst)

        u, v = haar_unitary(n, derive_seed(s, 1)), haar_unitary(n, derive_seed(s, 2))
        uav = u @ a @ v
        tr["unitary_invariance"].add(-max(abs(la.schatten_norm(uav, p) - q) / q
                                          for p, q in ((1, n1), (2, n2), (np.inf, ninf))), a_inst)

        dg = np.abs(la.diag_extract(a))
        tr["diag_contraction"].add(min(n1 - dg.sum(), n2 - np.linalg.norm(dg), ninf - dg.max()), a_inst)

        ah, bh = la.toeplitz_split(a)
        tr["toeplitz_pythagoras"].add(-abs(np.linalg.norm(ah) ** 2 + np.linalg.norm(bh) ** 2 - n2 ** 2) / n2 ** 2, a_inst)

        tr["adjoint_l2"].add(-abs(np.linalg.norm(a, 2) - np.linalg.norm(la.dagger(a), 2)), a_inst)

        tmap, delta = as_map(T), deflated_map(T)
        t2 = induced_norm(tmap, 2)
        rho = induced_norm(delta, 2)
        tr["adjoint_l2"].add(-abs(rho - induced_norm(delta.adjoint(), 2)), inst)

        # unital CPTP: exact 1-norms; the deflation uses lower-bound estimators
        tr["gillespie"].add(1.0 * 1.0 - t2 ** 2, inst)
        d1 = induced_norm(delta, 1, budget, seed=s)
        dinf = induced_norm(delta, np.inf, budget, seed=s)
        tr["gillespie"].add(d1 * dinf - rho ** 2, inst)

        e1 = induced_norm(tmap, 1, budget, seed=s)
        einf = induced_norm(tmap, np.inf, budget, seed=s)
        tr["cptp_norms"].add(min(e1 - (1 - est_tol), 1 + tol - e1,
                                 einf - (1 - est_tol), 1 + tol - einf), inst)

        tr["height_adjoint"].add(-abs(t2 - induced_norm(tmap.adjoint(), 2)), inst)

        for m in (tmap, delta):
            norm = induced_norm(m, 2)
            us = [haar_unitary(n, derive_seed(s, 10 + k)) for k in range(4)]
            cm = conjugated_vector_map(m, *us)
            tr["conjugated_map_upper"].add(norm - np.linalg.norm(cm, 2), inst)
            tr["conjugated_map_attain"].add(-abs(norm - attained_conjugated_norm(m)), inst)

        # traceless matrices are mapped into themselves
        sup = superoperator(T).matrix
        iv = la.vec(np.eye(n)) / math.sqrt(n)
        pi = np.eye(n * n) - np.outer(iv, iv)
        tr["restriction_invariance"].add(-np.linalg.norm(pi @ sup @ pi - sup @ pi, 2), inst)

        for p1, p2 in random_projection_pairs(n, 4, s):
            _, ratio = discrepancy(T, p1, p2)
            tr["eml_forward"].add(rho - ratio, inst)

    results = [x.result() for x in tr.values()]
    q = bound_g_quotient(1e6) / (64 * math.sqrt(2))
    results.append(CheckResult("bound_g_calibration", 1, min(q - 0.8, 1.2 - q), 0.8 <= q <= 1.2, seed))
    return results


def attained_conjugated_norm(m):
    """|M|_{l2->l2} for the conjugated vector map built from the top singular matrix's SVDs."""
    x = top_singular_matrix(m)
    u1, _, v1h = np.linalg.svd(x)
    w, _, zh = np.linalg.svd(m.apply(x))
    cm = conjugated_vector_map(m, u1, la.dagger(w), v1h, la.dagger(zh))
    return float(np.linalg.norm(cm, 2))


def suite_passed(results):
    return all(r.passed for r in results)


def suite_to_json(results):
    return [r.to_dict() for r in results]
