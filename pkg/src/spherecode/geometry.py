"""Unit vectors, Gram matrices and normalized projections.

A code is stored as an ``(n, d)`` array whose rows are unit vectors.  Gram
matrices are plain ``(n, n)`` numpy arrays.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import (
    AmbiguousMatchError,
    DomainError,
    NonUnitVectorError,
    NotPSDError,
    PoleError,
    RankExcessError,
    SchemaError,
    SingularProjectionError,
)

VIOLATION = -1


@dataclass(frozen=True)
class ProjectionConfig:
    tol_unit: float = 1e-9
    tol_sym: float = 1e-9
    tol_psd: float = 1e-8
    tol_match: float = 1e-9

    def __post_init__(self):
        for name in ("tol_unit", "tol_sym", "tol_psd", "tol_match"):
            value = getattr(self, name)
            if not 0 < value <= 1e-3:
                raise DomainError(f"{name} must lie in (0, 1e-3], got {value!r}")

    def with_tol(self, tol: float) -> "ProjectionConfig":
        """Scale every tolerance from a single value; tol_psd stays 10x looser."""
        return replace(
            self, tol_unit=tol, tol_sym=tol, tol_match=tol, tol_psd=min(10 * tol, 1e-3)
        )

    @classmethod
    def from_env(cls) -> "ProjectionConfig":
        raw = os.environ.get("SPHERECODE_TOL")
        return cls().with_tol(float(raw)) if raw else cls()


DEFAULT_CONFIG = ProjectionConfig()


@dataclass(frozen=True, eq=False)
class Code:
    """``n`` vectors in R^dim, stored row-wise."""

    dim: int
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dim must be a positive integer, got {self.dim!r}")
        vecs = np.array(self.vectors, dtype=float)
        if vecs.size == 0:
            vecs = np.zeros((0, self.dim))
        if vecs.ndim != 2 or vecs.shape[1] != self.dim:
            raise DomainError(f"vectors must have shape (n, {self.dim})")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def from_vectors(cls, vectors, dim: int | None = None) -> "Code":
        arr = np.asarray(vectors, dtype=float)
        if dim is None:
            if arr.ndim != 2 or arr.shape[0] == 0:
                raise DomainError("cannot infer dimension of an empty code")
            dim = arr.shape[1]
        elif arr.size and (arr.ndim != 2 or arr.shape[1] != dim):
            raise DomainError(f"vectors must have shape (n, {dim})")
        return cls(dim, arr)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def subset(self, indices: Sequence[int]) -> "Code":
        return Code(self.dim, self.vectors[list(indices)])

    def check_unit(self, cfg: ProjectionConfig = DEFAULT_CONFIG) -> None:
        norms = np.linalg.norm(self.vectors, axis=1)
        for i, nrm in enumerate(norms):
            if abs(nrm - 1.0) > cfg.tol_unit:
                raise NonUnitVectorError(i, float(nrm))


@dataclass(frozen=True)
class AngleSystem:
    """The admissible set ``[-1, -beta]`` together with finitely many angles."""

    beta: float
    angles: tuple[float, ...] = ()

    def __post_init__(self):
        beta = float(self.beta)
        if not 0 < beta < 1:
            raise DomainError(f"beta must lie in (0, 1), got {beta!r}")
        angles = tuple(float(a) for a in self.angles)
        for a in angles:
            if not -1 < a < 1:
                raise DomainError(f"angle {a!r} outside (-1, 1)")
            if a <= -beta:
                raise DomainError(
                    f"angle {a!r} lies in the interval [-1, {-beta!r}]"
                )
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise DomainError(f"angles must be strictly increasing: {angles}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "angles", angles)

    @property
    def k(self) -> int:
        return len(self.angles)


@dataclass(frozen=True, eq=False)
class Classification:
    """Per-pair colors of a code against an angle system.

    ``colors[i, j]`` is 0 for the interval, ``l`` for the angle ``a_l`` and
    ``VIOLATION`` when neither matches.  The diagonal is ``VIOLATION`` too but
    never counted.
    """

    colors: np.ndarray
    products: np.ndarray
    violations: tuple[tuple[int, int], ...]

    @property
    def valid(self) -> bool:
        return not self.violations


def gram_of(code: Code, cfg: ProjectionConfig = DEFAULT_CONFIG) -> np.ndarray:
    code.check_unit(cfg)
    G = code.vectors @ code.vectors.T
    G = (G + G.T) / 2
    np.fill_diagonal(G, 1.0)
    return G


def check_gram(G, cfg: ProjectionConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Return ``G`` as a float array after checking symmetry and unit diagonal."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise SchemaError(f"Gram matrix must be square, got shape {G.shape}")
    if G.size and np.max(np.abs(G - G.T)) > cfg.tol_sym:
        raise SchemaError("Gram matrix is not symmetric")
    diag = np.diag(G)
    bad = np.flatnonzero(np.abs(diag - 1.0) > cfg.tol_unit)
    if bad.size:
        raise NonUnitVectorError(int(bad[0]), float(np.sqrt(abs(diag[bad[0]]))))
    return G


def match_angle(value: float, L: AngleSystem, cfg: ProjectionConfig = DEFAULT_CONFIG,
                pair=None) -> int:
    """Color of a single inner product; nearest angle first, then the interval."""
    if L.angles:
        dist = np.abs(np.asarray(L.angles) - value)
        close = np.flatnonzero(dist <= 2 * cfg.tol_match)
        if close.size > 1:
            raise AmbiguousMatchError(pair, value, [L.angles[i] for i in close])
        best = int(np.argmin(dist))
        if dist[best] <= cfg.tol_match:
            return best + 1
    if value <= -L.beta + cfg.tol_match:
        return 0
    return VIOLATION


def classify_products(G: np.ndarray, L: AngleSystem,
                      cfg: ProjectionConfig = DEFAULT_CONFIG) -> Classification:
    n = G.shape[0]
    colors = np.full((n, n), VIOLATION, dtype=int)
    violations = []
    for i in range(n):
        for j in range(i + 1, n):
            c = match_angle(float(G[i, j]), L, cfg, pair=(i, j))
            colors[i, j] = colors[j, i] = c
            if c == VIOLATION:
                violations.append((i, j))
    colors.setflags(write=False)
    return Classification(colors, G, tuple(violations))


def validate_code(code: Code, L: AngleSystem,
                  cfg: ProjectionConfig = DEFAULT_CONFIG) -> Classification:
    return classify_products(gram_of(code, cfg), L, cfg)


def project_normalized(x, y, cfg: ProjectionConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Normalized projection of ``x`` onto the orthogonal complement of ``y``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = float(x @ y)
    if abs(c) >= 1 - cfg.tol_match:
        raise SingularProjectionError(f"|x.y| = {abs(c)!r} is too close to 1")
    return (x - c * y) / np.sqrt(1 - c * c)


def project_chain(X, Y, cfg: ProjectionConfig = DEFAULT_CONFIG):
    """Project every row of ``X`` away from ``span(Y)`` one basis vector at a time.

    Step ``i`` projects all remaining vectors with ``p_{y_i}`` where ``y_i`` has
    already been projected away from ``y_1..y_{i-1}``.  Returns the projected
    rows of ``X`` and, for each step, the inner products of the pivot with the
    vectors still to be processed (rows of ``Y`` after it, then rows of ``X``).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.asarray(Y, dtype=float).reshape(-1, X.shape[1])
    k = Y.shape[0]
    if k:
        det = np.linalg.det(Y @ Y.T)
        if det <= cfg.tol_psd:
            raise SingularProjectionError(
                f"basis is linearly dependent (Gram determinant {det!r})", step=0
            )
    rows = np.vstack([Y, X])
    pivot_products = []
    for i in range(k):
        pivot = rows[i]
        rest = rows[i + 1:]
        c = rest @ pivot
        pivot_products.append(c.copy())
        bad = np.flatnonzero(np.abs(c) >= 1 - cfg.tol_match)
        if bad.size:
            raise SingularProjectionError(
                f"step {i + 1}: vector {i + 1 + int(bad[0])} is collinear with the pivot",
                step=i + 1,
            )
        rows[i + 1:] = (rest - np.outer(c, pivot)) / np.sqrt(1 - c * c)[:, None]
    return rows[k:], pivot_products


def project_complement(x, Y, cfg: ProjectionConfig = DEFAULT_CONFIG) -> np.ndarray:
    out, _ = project_chain(np.atleast_2d(x), Y, cfg)
    return out[0]


def g_closed_form(a: float, c: float, k: int) -> float:
    """Inner product after projecting two vectors away from ``k`` vectors at ``c``.

    Valid when both vectors and the ``k`` basis vectors all meet pairwise at
    ``c``, except the pair itself which meets at ``a``.
    """
    if k < 0 or int(k) != k:
        raise DomainError(f"k must be a non-negative integer, got {k!r}")
    if k == 0:
        return a
    if not -1 < c < 1:
        raise DomainError(f"c must lie in (-1, 1), got {c!r}")
    if c == 0:
        raise DomainError("c = 0 is outside the domain when k > 0")
    denom = 1 + k * c
    if abs(denom) < 1e-15:
        raise PoleError(f"1 + k*c = 0 for k={k}, c={c!r}")
    # (1/c + k)^{-1} written as c / (1 + k c) to stay finite for tiny c
    ck = c / denom
    return 1 - (1 - ck) * (1 - a) / (1 - c)


def gram_spectrum(G, cfg: ProjectionConfig = DEFAULT_CONFIG):
    """Eigen-decomposition plus the PSD threshold and numerical rank."""
    evals, evecs = np.linalg.eigh(G)
    lam_max = max(float(evals[-1]), 0.0) if evals.size else 0.0
    threshold = cfg.tol_psd * max(lam_max, 1.0)
    rank = int(np.sum(evals > threshold))
    return evals, evecs, threshold, rank


def factor_gram(G, d: int, cfg: ProjectionConfig = DEFAULT_CONFIG) -> Code:
    """Unit vectors in R^d realizing ``G``, or raise if none exist."""
    G = check_gram(G, cfg)
    n = G.shape[0]
    if n == 0:
        return Code(d, np.zeros((0, d)))
    evals, evecs, threshold, rank = gram_spectrum(G, cfg)
    if evals[0] < -threshold:
        raise NotPSDError(float(evals[0]), threshold)
    if rank > d:
        raise RankExcessError(rank, d, float(evals[n - rank]))
    keep = slice(n - rank, n)
    vecs = evecs[:, keep][:, ::-1] * np.sqrt(evals[keep][::-1])
    vecs /= np.linalg.norm(vecs, axis=1)[:, None]
    out = np.zeros((n, d))
    out[:, :rank] = vecs
    return Code(d, out)
