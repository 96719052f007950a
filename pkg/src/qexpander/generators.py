"""Instance constructors: Haar/Weyl/cyclic-Cayley channels and d-regular graphs."""
from collections import deque
from dataclasses import dataclass

import numpy as np

from .channel import Channel
from .errors import DomainError, PreconditionError, ValidationError


def derive_seed(seed, *path):
    """Deterministic child seed for (seed, path...)."""
    ss = np.random.SeedSequence([int(seed), *map(int, path)])
    return int(ss.generate_state(1, np.uint64)[0])


def haar_unitary(n, seed):
    """QR of a complex Ginibre matrix with the phases of diag(R) folded into Q."""
    if n < 1:
        raise DomainError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_channel(n, d, seed) -> Channel:
    if n < 1 or d < 1:
        raise DomainError("dimension and degree must be >= 1")
    return Channel(tuple(haar_unitary(n, derive_seed(seed, j)) for j in range(d)))


def shift_matrix(n, k=1):
    """Permutation unitary e_x -> e_{x+k mod n}."""
    return np.roll(np.eye(n, dtype=complex), k % n, axis=0)


def clock_matrix(n):
    return np.diag(np.exp(2j * np.pi * np.arange(n) / n))


def weyl_channel(n) -> Channel:
    """Average over all X^a Z^b; maps every input to tr(.)I/N."""
    if n < 2:
        raise DomainError("Weyl channel needs N >= 2")
    x, z = shift_matrix(n), clock_matrix(n)
    us = [np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b)
          for a in range(n) for b in range(n)]
    return Channel(tuple(us))


def _check_gens(n, gens):
    gens = [int(g) % n for g in gens]
    if not gens:
        raise PreconditionError("generator list is empty")
    if 0 in gens:
        raise PreconditionError("generator set contains the identity 0")
    if sorted(gens) != sorted((-g) % n for g in gens):
        raise PreconditionError(f"generator set {gens} is not closed under negation mod {n}")
    return gens


def cyclic_cayley_channel(n, gens) -> Channel:
    gens = _check_gens(n, gens)
    return Channel(tuple(shift_matrix(n, g) for g in gens))


@dataclass(frozen=True)
class RegularGraph:
    n: int
    d: int
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=float)
        if a.shape != (self.n, self.n):
            raise ValidationError(f"adjacency has shape {a.shape}, expected {(self.n, self.n)}")
        if not np.isin(a, (0.0, 1.0)).all():
            raise ValidationError("adjacency entries must be 0 or 1")
        if not np.array_equal(a, a.T):
            raise ValidationError("adjacency is not symmetric")
        if np.any(np.diagonal(a)):
            raise ValidationError("graph has a loop")
        for i, s in enumerate(a.sum(axis=1)):
            if s != self.d:
                raise ValidationError(f"row {i} has degree {int(s)}, expected {self.d}")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def markov(self):
        return self.adjacency / self.d

    @property
    def edges(self):
        i, j = np.nonzero(np.triu(self.adjacency))
        return [(int(a), int(b)) for a, b in zip(i, j)]

    def is_connected(self):
        return len(_bfs_colors(self.adjacency)) == self.n

    def is_bipartite(self):
        """True if some connected component admits a proper 2-colouring of all its vertices."""
        colors = {}
        for start in range(self.n):
            if start in colors:
                continue
            comp = _bfs_colors(self.adjacency, start)
            colors.update(comp)
            if all(colors[u] != colors[v] for u, v in self.edges if u in comp):
                return True
        return False


def _bfs_colors(adj, start=0):
    colors = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in np.nonzero(adj[x])[0]:
            y = int(y)
            if y not in colors:
                colors[y] = 1 - colors[x]
                queue.append(y)
    return colors


def graph_from_edges(n, edges) -> RegularGraph:
    if n < 3:
        raise DomainError("graphs need n >= 3")
    a = np.zeros((n, n))
    for e in edges:
        i, j = int(e[0]), int(e[1])
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(f"edge {(i, j)} has a vertex outside 0..{n - 1}")
        if i == j:
            raise ValidationError(f"edge {(i, j)} is a loop (row {i})")
        if a[i, j]:
            raise ValidationError(f"edge {(i, j)} repeated (row {i})")
        a[i, j] = a[j, i] = 1
    degs = a.sum(axis=1)
    if not np.all(degs == degs[0]):
        bad = int(np.nonzero(degs != degs[0])[0][0])
        raise ValidationError(f"row {bad} has degree {int(degs[bad])}, row 0 has {int(degs[0])}")
    return RegularGraph(n, int(degs[0]), a)


def complete_graph(n) -> RegularGraph:
    if n < 3:
        raise DomainError("graphs need n >= 3")
    return RegularGraph(n, n - 1, np.ones((n, n)) - np.eye(n))


def cycle_graph(n) -> RegularGraph:
    return circulant_graph(n, [1, -1])


def circulant_graph(n, gens) -> RegularGraph:
    """Cayley graph of Z_n; the classical shadow of ``cyclic_cayley_channel``."""
    if n < 3:
        raise DomainError("graphs need n >= 3")
    gens = _check_gens(n, gens)
    a = sum(np.roll(np.eye(n), g, axis=0) for g in gens)
    return RegularGraph(n, len(gens), a)


def random_regular_graph(n, d, seed, max_tries=1000) -> RegularGraph:
    """Pairing model with rejection; no uniformity claim. Only connected results are returned."""
    if n * d % 2 or d >= n:
        raise DomainError(f"no simple {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        points = rng.permutation(np.repeat(np.arange(n), d)).reshape(-1, 2)
        if np.any(points[:, 0] == points[:, 1]):
            continue
        keys = {tuple(sorted(map(int, p))) for p in points}
        if len(keys) < len(points):
            continue
        g = graph_from_edges(n, sorted(keys))
        if g.is_connected():
            return g
    raise DomainError(f"pairing model failed {max_tries} times for n={n}, d={d}")


def graph_rho(g: RegularGraph) -> float:
    """max |lambda| over the Markov spectrum with one copy of 1 removed."""
    if not g.is_connected():
        raise PreconditionError("graph_rho requires a connected graph")
    w = np.linalg.eigvalsh(g.markov)
    return float(max(abs(w[0]), abs(w[-2])))


def edge_count(g: RegularGraph, s1, s2) -> int:
    """Ordered pairs (x, y) in S1 x S2 joined by an edge."""
    s1, s2 = _vertex_list(g, s1), _vertex_list(g, s2)
    return int(g.adjacency[np.ix_(s1, s2)].sum())


def _vertex_list(g, s):
    s = sorted({int(v) for v in s})
    for v in s:
        if not 0 <= v < g.n:
            raise DomainError(f"vertex {v} outside 0..{g.n - 1}")
    return s


def random_projection(n, rank, seed):
    """Orthogonal projection onto the span of ``rank`` Haar-random orthonormal columns."""
    if not 0 <= rank <= n:
        raise DomainError(f"rank {rank} outside 0..{n}")
    q = haar_unitary(n, seed)[:, :rank]
    return q @ q.conj().T
