"""Closed-form size bounds for spherical codes and the recursive constant f_k.

The recursive constant is astronomically large even for tiny ``k``, so every
quantity that feeds into it is carried as a base-2 logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, total_ordering
from typing import Sequence

import numpy as np

from .errors import DomainError, PreconditionError
from .geometry import (
    DEFAULT_CONFIG,
    AngleSystem,
    Code,
    ProjectionConfig,
    gram_of,
    validate_code,
)

NEG_GUARD = 1e-12


@total_ordering
@dataclass(frozen=True)
class LogValue:
    """A positive number stored as its base-2 logarithm."""

    log2: float

    def __post_init__(self):
        value = float(self.log2)
        if not math.isfinite(value):
            raise OverflowError(f"log2 magnitude {value!r} is not finite")
        object.__setattr__(self, "log2", value)

    @classmethod
    def of(cls, x) -> "LogValue":
        if x <= 0:
            raise DomainError(f"LogValue needs a positive quantity, got {x!r}")
        if isinstance(x, int) and x.bit_length() > 1000:
            shift = x.bit_length() - 64
            return cls(math.log2(x >> shift) + shift)
        return cls(math.log2(x))

    def __mul__(self, other) -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.of(other)
        return LogValue(self.log2 + other.log2)

    __rmul__ = __mul__

    def __add__(self, other) -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.of(other)
        return LogValue(float(np.logaddexp2(self.log2, other.log2)))

    __radd__ = __add__

    def __pow__(self, p: float) -> "LogValue":
        return LogValue(self.log2 * p)

    def __lt__(self, other) -> bool:
        if not isinstance(other, LogValue):
            return other > 0 and self.log2 < math.log2(other)
        return self.log2 < other.log2

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogValue):
            return other > 0 and self.log2 == math.log2(other)
        return self.log2 == other.log2

    def __hash__(self):
        return hash(self.log2)

    def value(self) -> float:
        """The plain float, ``inf`` when out of range."""
        return 2.0 ** self.log2 if self.log2 < 1024 else math.inf

    def __repr__(self):
        return f"LogValue(2**{self.log2!r})"


def dgs_bound(d: int, k: int) -> int:
    if d < 1 or k < 0:
        raise DomainError(f"need d >= 1 and k >= 0, got d={d}, k={k}")
    return math.comb(d + k, k)


def dgs_bound_log2(d: int, k: int) -> LogValue:
    """log2 of binomial(d+k, k) without forming the integer."""
    lg = math.lgamma(d + k + 1) - math.lgamma(d + 1) - math.lgamma(k + 1)
    return LogValue(lg / math.log(2))


def neg_bound(beta: float) -> int:
    """Largest size of a code whose inner products all lie in ``[-1, -beta]``."""
    if not 0 < beta < 1:
        raise DomainError(f"beta must lie in (0, 1), got {beta!r}")
    return math.floor(1 / beta + 1 + NEG_GUARD)


@dataclass(frozen=True)
class NegSumReport:
    norm_sq: float
    size: int
    beta_eff: float | None
    upper: float | None
    size_bound_holds: bool | None

    @property
    def passed(self) -> bool:
        return self.norm_sq >= -1e-9 and self.size_bound_holds is not False


def neg_sum_check(code: Code, cfg: ProjectionConfig = DEFAULT_CONFIG) -> NegSumReport:
    """Evaluate the squared norm of the vector sum against its upper estimate.

    With every off-diagonal product at most ``-beta_eff`` the squared norm is at
    most ``n (1 - (n - 1) beta_eff)``, which forces ``n <= 1/beta_eff + 1``.
    """
    n = len(code)
    v = code.vectors.sum(axis=0)
    norm_sq = float(v @ v)
    if n < 2:
        return NegSumReport(norm_sq, n, None, None, None)
    G = gram_of(code, cfg)
    off = G[~np.eye(n, dtype=bool)]
    beta_eff = -float(off.max())
    upper = n * (1 - (n - 1) * beta_eff)
    holds = None
    if beta_eff > 0:
        holds = n <= 1 / beta_eff + 1 + NEG_GUARD
    return NegSumReport(norm_sq, n, beta_eff, upper, holds)


@dataclass(frozen=True)
class KoornwinderReport:
    passed: bool
    scale: float
    max_offdiag: float
    diag_rel_error: float
    size: int
    bound: int

    def __bool__(self):
        return self.passed


def koornwinder_certificate(code: Code, angles, cfg: ProjectionConfig = DEFAULT_CONFIG,
                            rtol: float = 1e-8) -> KoornwinderReport:
    """Check that the entrywise product of ``G - a`` over all angles is diagonal.

    ``angles`` is either a plain sequence of admissible products or an
    ``AngleSystem``; in the latter case pairs falling in the negative interval
    are a precondition error since the certificate only applies to finite sets.
    A diagonal result makes the polynomial functions attached to the code
    linearly independent, capping its size at ``dgs_bound(d, len(angles))``.
    """
    if isinstance(angles, AngleSystem):
        cls = validate_code(code, angles, cfg)
        n = len(code)
        iu = np.triu_indices(n, 1)
        if np.any(cls.colors[iu] == 0):
            raise PreconditionError("code has pairs in the negative interval")
        angles = angles.angles
    angles: Sequence[float] = [float(a) for a in angles]
    G = gram_of(code, cfg)
    n = G.shape[0]
    M = np.ones_like(G)
    for a in angles:
        M *= G - a
    scale = float(np.prod([1 - a for a in angles]))
    off = M[~np.eye(n, dtype=bool)]
    max_off = float(np.max(np.abs(off))) if off.size else 0.0
    diag_err = float(np.max(np.abs(np.diag(M) - scale))) / abs(scale) if n else 0.0
    passed = max_off <= rtol * abs(scale) and diag_err <= rtol
    bound = dgs_bound(code.dim, len(angles))
    return KoornwinderReport(passed, scale, max_off, diag_err, n, bound)


def beta_prime(beta: float, k: int) -> float:
    """``(beta/2)^(2^k)``; underflows to 0.0 for large ``k``, see ``beta_prime_log2``."""
    if not 0 < beta < 1 or k < 1:
        raise DomainError(f"need beta in (0, 1) and k >= 1, got {beta!r}, {k}")
    return (beta / 2) ** (2 ** k)


def beta_prime_log2(beta: float, k: int) -> LogValue:
    if not 0 < beta < 1 or k < 1:
        raise DomainError(f"need beta in (0, 1) and k >= 1, got {beta!r}, {k}")
    return LogValue(2 ** k * (math.log2(beta) - 1))


def _log2_d_zero(log2_beta: float, k: int) -> float:
    return 2 * k * 2.0 ** (-log2_beta) * math.log2(2 * k)


def d_zero(beta: float, k: int) -> LogValue:
    """Dimension floor ``(2k)^(2k/beta)`` used by the main induction."""
    if k < 1 or beta <= 0:
        raise DomainError(f"need k >= 1 and beta > 0, got {beta!r}, {k}")
    return LogValue(_log2_d_zero(math.log2(beta), k))


@dataclass(frozen=True)
class FkPolicy:
    """Which threshold expressions enter the maximum defining f_k."""

    small_ak: bool = True
    gap: bool = True
    ramsey_small: bool = True
    ramsey_gap: bool = True
    d0_inflation: bool = True

    def __post_init__(self):
        if not (self.small_ak or self.gap or self.ramsey_small or self.ramsey_gap):
            raise DomainError("at least one threshold must be enabled")


DEFAULT_POLICY = FkPolicy()


def _lae(*terms: float) -> float:
    return float(np.logaddexp2.reduce(np.array(terms)))


def ramsey_t_log2(log2_beta: float, k: int) -> float:
    """log2 of ``t = ceil(1/beta')``; the ceiling is exact below 2^52."""
    log2_inv = -(2 ** k) * (log2_beta - 1)
    if log2_inv < 52:
        return math.log2(math.ceil(2.0 ** log2_inv))
    return log2_inv


@lru_cache(maxsize=None)
def _log2_fk(log2_beta: float, k: int, policy: FkPolicy) -> float:
    inv_beta_log2 = -log2_beta
    if k == 0:
        if inv_beta_log2 < 1000:
            return math.log2(2.0 ** inv_beta_log2 + 1)
        return inv_beta_log2
    small = 2 + _lae(2 * inv_beta_log2, 0.0)  # 4/beta^2 + 4
    log2_bp = 2 ** k * (log2_beta - 1)
    t_log2 = ramsey_t_log2(log2_beta, k)
    # (k+1)^((k+1) t)
    ramsey_log2 = 2.0 ** (t_log2 + math.log2((k + 1) * math.log2(k + 1)))
    gaps = [
        1 + math.log2(k)
        + _log2_fk(log2_beta, ell - 1, policy)
        + _log2_fk(log2_bp, k - ell + 1, policy)
        for ell in range(2, k + 1)
    ]
    terms = []
    if policy.small_ak:
        terms.append(small)
    if policy.gap and gaps:
        terms.append(max(gaps))
    if policy.ramsey_small:
        terms.append(ramsey_log2 + small)
    if policy.ramsey_gap and gaps:
        terms.append(ramsey_log2 + max(gaps))
    if not terms:
        terms.append(small)
    out = _lae(0.0, max(terms))
    if policy.d0_inflation:
        out += k * _log2_d_zero(log2_beta, k)
    if not math.isfinite(out):
        raise OverflowError(f"f_{k} exceeds the double-precision log2 range")
    return out


def f_k(beta: float, k: int, policy: FkPolicy = DEFAULT_POLICY) -> LogValue:
    """Instance-independent constant with ``|C| <= f_k(beta) d^k``.

    ``f_0 = 1/beta + 1``.  For ``k >= 1`` the value is
    ``d0^k * (1 + max(thresholds))`` where the recursive thresholds are maximized
    over the gap index.
    """
    if not 0 < beta < 1 or k < 0:
        raise DomainError(f"need beta in (0, 1) and k >= 0, got {beta!r}, {k}")
    return LogValue(_log2_fk(math.log2(beta), k, policy))
