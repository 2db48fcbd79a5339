"""Edge colorings of codes, the greedy Ramsey chain and the Turan greedy."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HypothesisError, PreconditionError, RamseyFailure
from .geometry import (
    DEFAULT_CONFIG,
    VIOLATION,
    AngleSystem,
    Code,
    ProjectionConfig,
    validate_code,
)

# k^(kt) is only compared exactly when it fits in this many bits
HYPOTHESIS_BITS = 64


@dataclass(frozen=True, eq=False)
class EdgeColoring:
    """A total coloring of the pairs of ``range(n)``; the diagonal is unused."""

    colors: np.ndarray

    def __post_init__(self):
        c = np.array(self.colors, dtype=int)
        if c.size == 0:
            c = np.zeros((0, 0), dtype=int)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DomainError("coloring must be a square matrix")
        n = c.shape[0]
        off = ~np.eye(n, dtype=bool)
        if np.any(c[off] != c.T[off]):
            raise DomainError("coloring must be symmetric")
        if np.any(c[off] < 0):
            raise DomainError("colors must be non-negative")
        np.fill_diagonal(c, VIOLATION)
        c.setflags(write=False)
        object.__setattr__(self, "colors", c)

    @property
    def n(self) -> int:
        return self.colors.shape[0]

    def color(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("loops are not colored")
        return int(self.colors[i, j])

    def palette(self) -> list[int]:
        iu = np.triu_indices(self.n, 1)
        return sorted(set(self.colors[iu].tolist()))

    def row(self, v: int, us) -> np.ndarray:
        return self.colors[v, np.asarray(us, dtype=int)]

    def graph(self, colors) -> np.ndarray:
        """Adjacency matrix of the edges whose color is in ``colors``."""
        adj = np.isin(self.colors, list(colors))
        np.fill_diagonal(adj, False)
        return adj


class RandomColoring:
    """Uniformly random ``k``-coloring of ``K_n`` evaluated on demand.

    Colors come from a 64-bit mix of ``(seed, min(i, j), max(i, j))`` so that
    colorings of very large complete graphs never have to be stored.
    """

    def __init__(self, n: int, k: int, seed: int = 0):
        if n < 0 or k < 1:
            raise DomainError("need n >= 0 and k >= 1")
        self.n = n
        self.k = k
        self.seed = seed

    def _mix(self, lo, hi) -> np.ndarray:
        with np.errstate(over="ignore"):
            z = (np.uint64(self.seed) * np.uint64(0x9E3779B97F4A7C15)
                 + lo.astype(np.uint64) * np.uint64(self.n) + hi.astype(np.uint64))
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
        return (z % np.uint64(self.k)).astype(int)

    def row(self, v: int, us) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        v_arr = np.full_like(us, v)
        return self._mix(np.minimum(v_arr, us), np.maximum(v_arr, us))

    def color(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("loops are not colored")
        return int(self.row(i, [j])[0])

    def palette(self) -> list[int]:
        return list(range(self.k))


def color_graph(code: Code, L: AngleSystem,
                cfg: ProjectionConfig = DEFAULT_CONFIG) -> EdgeColoring:
    cls = validate_code(code, L, cfg)
    if not cls.valid:
        raise PreconditionError(
            f"code is not an L-spherical code; first bad pair {cls.violations[0]}"
        )
    colors = np.array(cls.colors)
    np.fill_diagonal(colors, 0)
    return EdgeColoring(colors)


@dataclass(frozen=True)
class MonoPair:
    X: tuple[int, ...]
    Y: tuple[int, ...]
    color: int
    steps: tuple[tuple[int, int, int], ...] = field(default=())  # (pivot, color, |Y_i|)

    def to_dict(self):
        return {
            "X": list(self.X),
            "Y": list(self.Y),
            "color": self.color,
            "steps": [list(s) for s in self.steps],
        }


def check_mono_pair(coloring: EdgeColoring, pair: MonoPair) -> bool:
    """Every edge inside X u Y that touches X has the pair's color."""
    X, Y = list(pair.X), list(pair.Y)
    if set(X) & set(Y) or len(set(X)) != len(X) or len(set(Y)) != len(Y):
        return False
    for a, x in enumerate(X):
        others = X[a + 1:] + Y
        if others and np.any(coloring.row(x, others) != pair.color):
            return False
    return True


def ramsey_hypothesis(n: int, k: int, t: int, m: int) -> bool | None:
    """Whether ``n > k^(kt) m``; ``None`` if k^(kt) exceeds 64 bits."""
    if k * t * math.log2(max(k, 1)) > HYPOTHESIS_BITS:
        return None
    return n > k ** (k * t) * m


def ramsey_pair(coloring: EdgeColoring, k: int, t: int, m: int, *,
                force: bool = False, truncate: bool = True) -> MonoPair:
    """Find a monochromatic pair ``(X, Y)`` with ``|X| = t`` and ``|Y| >= m``.

    Runs the greedy chain: pick a pivot, keep the neighbours joined to it by a
    majority color, repeat ``k t`` times, then keep ``t`` pivots sharing a
    color.  Pivots are the smallest remaining index and majority ties go to
    the smallest color.  ``Y`` is cut down to ``m`` vertices unless
    ``truncate`` is false.
    """
    if k < 1 or t < 0 or m < 0:
        raise DomainError(f"need k >= 1, t >= 0, m >= 0; got {k}, {t}, {m}")
    n = coloring.n
    palette = coloring.palette()
    if len(palette) > k:
        raise DomainError(f"coloring uses {len(palette)} colors, more than k={k}")
    ok = ramsey_hypothesis(n, k, t, m)
    if not ok and not force:
        if ok is None:
            raise HypothesisError(
                f"k^(kt) = {k}^{k * t} is too large to verify n > k^(kt) m; pass force=True"
            )
        raise HypothesisError(f"n = {n} does not exceed k^(kt) m = {k ** (k * t) * m}")

    Y = np.arange(n)
    steps = []
    for i in range(k * t):
        if not Y.size:
            raise RamseyFailure(i + 1, 0, 1, steps)
        v = int(Y[0])
        rest = Y[1:]
        cols = coloring.row(v, rest)
        # argmax picks the smallest color among tied majorities
        c = int(np.argmax(np.bincount(cols))) if cols.size else min(palette, default=0)
        Y = rest[cols == c]
        steps.append((v, c, int(Y.size)))
    if Y.size < m:
        raise RamseyFailure(k * t, int(Y.size), m, steps)
    Y = [int(u) for u in Y]

    if t == 0:
        pair = MonoPair((), tuple(Y[:m] if truncate else Y), palette[0] if palette else 0,
                        tuple(steps))
    else:
        counts = Counter(c for _, c, _ in steps)
        color = min(c for c in counts if counts[c] >= t)
        X = tuple(v for v, c, _ in steps if c == color)[:t]
        pair = MonoPair(X, tuple(Y[:m] if truncate else Y), color, tuple(steps))
    if not check_mono_pair(coloring, pair):
        raise AssertionError("greedy chain produced a pair that is not monochromatic")
    return pair


def max_degree(adj) -> int:
    adj = np.asarray(adj, dtype=bool)
    return int(adj.sum(axis=1).max()) if adj.size else 0


def greedy_independent(adj) -> list[int]:
    """Take vertices in index order, deleting each chosen one's neighbourhood.

    The result has at least ``n / (max_degree + 1)`` vertices.
    """
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    alive = np.ones(n, dtype=bool)
    chosen = []
    for v in range(n):
        if alive[v]:
            chosen.append(v)
            alive[v] = False
            alive[adj[v]] = False
    return chosen


def is_independent(adj, vertices) -> bool:
    adj = np.asarray(adj, dtype=bool)
    vs = list(vertices)
    return not adj[np.ix_(vs, vs)].any() if vs else True
