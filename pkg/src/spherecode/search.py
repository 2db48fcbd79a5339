"""Exhaustive Gram-matrix search for the largest code with prescribed products.

Also provides the two classical witnesses used throughout the tests: the
regular simplex and the six diagonals of the icosahedron.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geometry import DEFAULT_CONFIG, Code, ProjectionConfig, check_gram, gram_spectrum

N_MAX_CAP = 12


def check_gram_feasible(G, d: int, cfg: ProjectionConfig = DEFAULT_CONFIG) -> bool:
    """Whether ``G`` is the Gram matrix of unit vectors in R^d."""
    G = check_gram(G, cfg)
    if G.shape[0] == 0:
        return True
    evals, _, threshold, rank = gram_spectrum(G, cfg)
    return bool(evals[0] >= -threshold and rank <= d)


@dataclass(frozen=True)
class SearchConfig:
    candidate_values: tuple[float, ...]
    d: int
    n_max: int = 8
    time_budget: float | None = None
    symmetry_breaking: bool = True
    tol: ProjectionConfig = DEFAULT_CONFIG

    def __post_init__(self):
        values = tuple(sorted(float(v) for v in self.candidate_values))
        if not values:
            raise DomainError("candidate_values must be non-empty")
        if any(not -1 < v < 1 for v in values):
            raise DomainError(f"candidate values must lie in (-1, 1): {values}")
        if len(set(values)) != len(values):
            raise DomainError("candidate values must be distinct")
        if not 1 <= self.n_max <= N_MAX_CAP:
            raise DomainError(f"n_max must lie in [1, {N_MAX_CAP}]")
        if self.d < 1:
            raise DomainError("d must be positive")
        object.__setattr__(self, "candidate_values", values)


@dataclass
class SearchResult:
    best_n: int
    witness: np.ndarray = field(repr=False)
    exhaustive: bool
    nodes_visited: int
    elapsed: float = 0.0

    def to_dict(self):
        return {
            "best_n": self.best_n,
            "exhaustive": self.exhaustive,
            "nodes_visited": self.nodes_visited,
            "witness": self.witness.tolist(),
        }


class _Budget(Exception):
    pass


class _Search:
    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        self.values = cfg.candidate_values
        self.nodes = 0
        self.best_n = 1
        self.best = np.ones((1, 1))
        self.deadline = (time.monotonic() + cfg.time_budget
                         if cfg.time_budget is not None else None)

    def psd(self, M) -> bool:
        evals = np.linalg.eigvalsh(M)
        return evals[0] >= -self.cfg.tol.tol_psd * max(evals[-1], 1.0)

    def run(self):
        G = np.eye(self.cfg.n_max)
        if self.cfg.n_max > 1:
            self.fill(G, 1, 0)

    def fill(self, G, i, j):
        """Assign ``G[i, j]`` (row-major over the strict lower triangle)."""
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _Budget
        rows = list(range(j + 1)) + [i]
        for v in self.values:
            if (self.cfg.symmetry_breaking and j == 0 and i > 1 and v < G[i - 1, 0]):
                continue
            self.nodes += 1
            G[i, j] = G[j, i] = v
            if not self.psd(G[np.ix_(rows, rows)]):
                continue
            if j + 1 < i:
                self.fill(G, i, j + 1)
            else:
                size = i + 1
                block = G[:size, :size]
                _, _, _, rank = gram_spectrum(block, self.cfg.tol)
                if rank > self.cfg.d:
                    continue
                if size > self.best_n:
                    self.best_n = size
                    self.best = block.copy()
                if size < self.cfg.n_max:
                    self.fill(G, size, 0)
            if self.best_n == self.cfg.n_max:
                return
        G[i, j] = G[j, i] = 0.0


def max_code_search(cfg: SearchConfig) -> SearchResult:
    """Depth-first completion of the Gram matrix over the candidate values.

    Entries below the diagonal are filled row by row in ascending value
    order.  A partial row is abandoned as soon as the principal submatrix on
    the filled columns plus the current row stops being PSD; a completed
    leading block is abandoned when its rank exceeds ``d``.  With symmetry
    breaking the first column is kept non-decreasing, which loses nothing
    because vectors after the first can be permuted freely.
    """
    s = _Search(cfg)
    start = time.monotonic()
    exhaustive = True
    try:
        s.run()
    except _Budget:
        exhaustive = False
    return SearchResult(s.best_n, s.best, exhaustive, s.nodes, time.monotonic() - start)


def simplex_code(d: int) -> Code:
    """``d + 1`` unit vectors in R^d meeting pairwise at ``-1/d``."""
    if d < 1:
        raise DomainError("d must be positive")
    n = d + 1
    # rows of the Helmert matrix below the first form an orthonormal basis of 1^perp
    basis = np.zeros((d, n))
    for r in range(1, n):
        basis[r - 1, :r] = 1.0
        basis[r - 1, r] = -r
        basis[r - 1] /= math.sqrt(r * (r + 1))
    centered = np.eye(n) - 1.0 / n
    vecs = centered @ basis.T
    vecs /= np.linalg.norm(vecs, axis=1)[:, None]
    return Code(d, vecs)


def icosahedron_code() -> Code:
    """One direction per antipodal pair of icosahedron vertices.

    The six vectors are the cyclic shifts of ``(0, +-1, phi)`` normalized, and
    meet pairwise at ``+-1/sqrt(5)``.
    """
    phi = (1 + math.sqrt(5)) / 2
    raw = np.array([
        [0, 1, phi], [0, -1, phi],
        [1, phi, 0], [-1, phi, 0],
        [phi, 0, 1], [phi, 0, -1],
    ])
    return Code(3, raw / np.linalg.norm(raw, axis=1)[:, None])
