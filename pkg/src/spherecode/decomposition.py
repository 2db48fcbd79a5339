"""Recursive case analysis of an L-spherical code with a checkable trace.

Each node of the trace holds the vectors it was run on, the admissible set,
the case that applied, the choices made (pivots, colors, subsets), the
children it recursed into and an exact integer bound on its size.  The bound
at a node only depends on the bounds of its children, so ``verify_trace`` can
recompute everything bottom-up from the stored vectors.

Cases, for ``L = [-1, -beta] u {a_1 < ... < a_k}``:

``BASE_K0``
    ``k = 0``; at most ``floor(1/beta + 1)`` vectors.
``SMALL_AK``
    ``a_k < beta^2/2``.  The interval graph has degree at most
    ``2/beta^2 + 1``, a greedy independent set in it is a ``{a_i}``-code and
    ``n <= (degree + 1) * binom(d + k, k)``.
``GAP_ELL``
    Some ``a_{l-1} < a_l^2 / 2`` (largest such ``l``).  A greedy clique ``Q`` in
    the colors below ``l`` recurses with the first ``l - 1`` angles; the
    neighbourhood of a max-degree vertex in the remaining colors, restricted
    to one color ``s``, is projected away from that vertex and recurses with
    the last ``k - l + 1`` angles and a much smaller ``beta'``.  Then
    ``n <= (k * B_suffix + 1) * B_prefix``.
``RAMSEY``
    Neither of the above.  A monochromatic pair ``(T, M)`` of positive color
    ``r`` with ``|T| = t = ceil(1/beta')`` is found, ``M`` is projected away
    from ``span(T)`` and recurses with the angles mapped through ``g``.
    Desk-scale codes never meet the size hypothesis, which gives
``SIZE_TRIVIAL``
    A leaf whose bound is its own size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bounds import (
    DEFAULT_POLICY,
    FkPolicy,
    LogValue,
    beta_prime,
    dgs_bound,
    f_k,
    koornwinder_certificate,
    neg_bound,
    neg_sum_check,
)
from .combinatorics import (
    EdgeColoring,
    MonoPair,
    check_mono_pair,
    color_graph,
    greedy_independent,
    is_independent,
    max_degree,
    ramsey_pair,
)
from .errors import (
    InternalInconsistencyError,
    PreconditionError,
    RamseyFailure,
    SingularProjectionError,
    SphereCodeError,
)
from .geometry import (
    DEFAULT_CONFIG,
    AngleSystem,
    Code,
    ProjectionConfig,
    g_closed_form,
    gram_of,
    project_chain,
    project_normalized,
    validate_code,
)

FORMULA_TOL = 1e-9


class Case(str, Enum):
    BASE_K0 = "BASE_K0"
    SMALL_AK = "SMALL_AK"
    GAP_ELL = "GAP_ELL"
    RAMSEY = "RAMSEY"
    SIZE_TRIVIAL = "SIZE_TRIVIAL"


LEAF_CASES = (Case.BASE_K0, Case.SMALL_AK, Case.SIZE_TRIVIAL)


@dataclass(eq=False)
class CaseRecord:
    case: Case
    angles: AngleSystem
    code: Code
    bound: int
    params: dict = field(default_factory=dict)
    children: list["CaseRecord"] = field(default_factory=list)
    fk_threshold: LogValue | None = None
    invalid: str | None = None

    @property
    def n(self) -> int:
        return len(self.code)

    def walk(self, path="root"):
        yield path, self
        for i, child in enumerate(self.children):
            yield from child.walk(f"{path}.{i}")


@dataclass(eq=False)
class DecompositionTrace:
    root: CaseRecord
    claimed_bound: int
    fk_bound: LogValue | None
    verified: bool | None = None

    @property
    def dim(self) -> int:
        return self.root.code.dim


def classify_case(L: AngleSystem) -> tuple[Case, int | None]:
    """Which case applies, with the gap index for ``GAP_ELL``."""
    a, beta = L.angles, L.beta
    if not a:
        return Case.BASE_K0, None
    if a[-1] < beta ** 2 / 2:
        return Case.SMALL_AK, None
    for ell in range(len(a), 1, -1):
        if a[ell - 2] < a[ell - 1] ** 2 / 2:
            return Case.GAP_ELL, ell
    return Case.RAMSEY, None


def gap_projected_angle(a: float, a_s: float) -> float:
    return (a - a_s ** 2) / (1 - a_s ** 2)


def ramsey_t(beta: float, k: int) -> int:
    return math.ceil(1 / beta_prime(beta, k))


def _ramsey_power_log2(k: int, t: int) -> float:
    return (k + 1) * t * math.log2(k + 1)


def _ramsey_hypothesis_fails(n: int, k: int, t: int) -> bool:
    """``n <= (k+1)^((k+1)t) + (k+1)t``, decided without forming huge powers."""
    if n == 0 or math.log2(n) <= _ramsey_power_log2(k, t):
        return True
    return n <= (k + 1) ** ((k + 1) * t) + (k + 1) * t


def _kept_angles(values, beta: float) -> tuple[list[float], list[int]]:
    """Split mapped angles into those kept and the positions merged into the interval."""
    kept, merged = [], []
    for i, v in enumerate(values):
        if v > -beta:
            kept.append(v)
        else:
            merged.append(i)
    return kept, merged


def _safe_log(fn):
    try:
        return fn()
    except OverflowError:
        return None


# -- construction ---------------------------------------------------------


def _leaf_trivial(code, L, reason, **extra) -> CaseRecord:
    params = {"reason": reason, **extra}
    return CaseRecord(Case.SIZE_TRIVIAL, L, code, len(code), params)


def _base_k0(code: Code, L: AngleSystem, cfg) -> CaseRecord:
    bound = neg_bound(L.beta)
    report = neg_sum_check(code, cfg)
    if len(code) > bound or not report.passed:
        raise InternalInconsistencyError(
            f"{len(code)} vectors exceed the negative-interval bound {bound}"
        )
    return CaseRecord(Case.BASE_K0, L, code, bound,
                      {"norm_sq": report.norm_sq},
                      fk_threshold=f_k(L.beta, 0))


def _interval_degree_check(code: Code, G0: np.ndarray, beta: float, cfg) -> None:
    """Projected interval-neighbourhoods of each vertex meet below ``-beta^2/2``."""
    cap = neg_bound(beta ** 2 / 2)
    for y in range(len(code)):
        J = np.flatnonzero(G0[y])
        if len(J) > cap:
            raise InternalInconsistencyError(
                f"vertex {y} has {len(J)} interval neighbours, cap {cap}"
            )
        if len(J) < 2:
            continue
        try:
            P = np.array([project_normalized(code.vectors[j], code.vectors[y], cfg)
                          for j in J])
        except SingularProjectionError as exc:
            raise InternalInconsistencyError(f"vertex {y}: {exc}") from exc
        prods = (P @ P.T)[~np.eye(len(J), dtype=bool)]
        if prods.max() >= -beta ** 2 / 2:
            raise InternalInconsistencyError(
                f"vertex {y}: projected product {prods.max()!r} >= -beta^2/2"
            )


def case_small_ak(code: Code, L: AngleSystem,
                  cfg: ProjectionConfig = DEFAULT_CONFIG) -> CaseRecord:
    coloring = color_graph(code, L, cfg)
    G0 = coloring.graph([0])
    _interval_degree_check(code, G0, L.beta, cfg)
    delta = max_degree(G0)
    S = greedy_independent(G0)
    n = len(code)
    if len(S) * (delta + 1) < n:
        raise InternalInconsistencyError("greedy independent set below n/(degree+1)")
    cert = koornwinder_certificate(code.subset(S), L.angles, cfg)
    if not cert.passed or len(S) > cert.bound:
        raise InternalInconsistencyError(
            f"Koornwinder certificate failed on the independent set "
            f"(off-diagonal {cert.max_offdiag!r})"
        )
    bound = (delta + 1) * dgs_bound(code.dim, L.k)
    params = {"max_degree": delta, "independent_set": S,
              "degree_cap": neg_bound(L.beta ** 2 / 2)}
    return CaseRecord(Case.SMALL_AK, L, code, bound, params,
                      fk_threshold=LogValue.of(4 / L.beta ** 2 + 4))


def _gap_choice(coloring: EdgeColoring, ell: int, k: int):
    """Max-degree vertex in colors >= ell and the largest-enough color class."""
    Hbar = coloring.graph(range(ell, k + 1))
    deg = Hbar.sum(axis=1)
    y = int(np.argmax(deg))
    J = np.flatnonzero(Hbar[y])
    s = None
    for col in range(ell, k + 1):
        if k * sum(1 for j in J if coloring.color(y, j) == col) >= len(J):
            s = col
            break
    Jp = [int(j) for j in J if coloring.color(y, j) == s]
    return Hbar, y, len(J), s, Jp


def case_gap_project(code: Code, L: AngleSystem, ell: int, pivot: int, s: int,
                     cfg: ProjectionConfig = DEFAULT_CONFIG, subset=None):
    """Project the ``color s`` neighbours of ``pivot`` away from it.

    Returns the projected code and ``L' = [-1, -beta'] u {a'_ell..a'_k}`` with
    ``a'_i = (a_i - a_s^2) / (1 - a_s^2)``; mapped angles at or below
    ``-beta'`` are merged into the interval (their indices are returned).
    """
    k = L.k
    a_s = L.angles[s - 1]
    if s < ell:
        raise PreconditionError(f"color {s} is below the gap index {ell}")
    G = gram_of(code, cfg)
    if subset is None:
        subset = [j for j in range(len(code))
                  if j != pivot and abs(G[pivot, j] - a_s) <= cfg.tol_match]
    for j in subset:
        if abs(G[pivot, j] - a_s) > cfg.tol_match:
            raise PreconditionError(f"vertex {j} does not meet the pivot at a_s")
    x_y = code.vectors[pivot]
    projected = np.array([project_normalized(code.vectors[j], x_y, cfg) for j in subset])
    projected = projected.reshape(-1, code.dim)
    bp = beta_prime(L.beta, k)
    mapped = [gap_projected_angle(a, a_s) for a in L.angles[ell - 1:]]
    kept, merged = _kept_angles(mapped, bp)
    L_new = AngleSystem(bp, kept)
    child = Code(code.dim, projected)
    cls = validate_code(child, L_new, cfg)
    if not cls.valid:
        i, j = cls.violations[0]
        raise InternalInconsistencyError(
            f"projected pair {(subset[i], subset[j])} with product "
            f"{cls.products[i, j]!r} is outside the projected angle system"
        )
    return child, L_new, {"mapped_angles": mapped, "merged": merged}


def _gap_ell(code, L, ell, cfg, force_t) -> CaseRecord:
    k, beta = L.k, L.beta
    coloring = color_graph(code, L, cfg)
    Hbar, y, deg_y, s, Jp = _gap_choice(coloring, ell, k)
    Q = greedy_independent(Hbar)
    prefix = _decompose(code.subset(Q), AngleSystem(beta, L.angles[:ell - 1]), cfg, force_t)
    bp = beta_prime(beta, k)
    a_ell = L.angles[ell - 1]
    if a_ell ** 2 / 2 < bp:
        raise InternalInconsistencyError(f"a_ell^2/2 = {a_ell ** 2 / 2!r} < beta' = {bp!r}")
    params = {"ell": ell, "clique": Q, "beta_prime": bp, "max_degree": deg_y}
    children = [prefix]
    if deg_y == 0:
        bound = prefix.bound
    else:
        child, L_new, info = case_gap_project(code, L, ell, y, s, cfg, subset=Jp)
        suffix = _decompose(child, L_new, cfg, force_t)
        children.append(suffix)
        params.update({"pivot": y, "color": s, "subset": Jp, "projected": L_new,
                       "merged": info["merged"]})
        bound = (k * suffix.bound + 1) * prefix.bound
    threshold = _safe_log(
        lambda: LogValue(1 + math.log2(k)) * f_k(beta, ell - 1) * f_k(bp, k - ell + 1)
    )
    return CaseRecord(Case.GAP_ELL, L, code, bound, params, children, threshold)


def case_ramsey_project(code: Code, L: AngleSystem,
                        cfg: ProjectionConfig = DEFAULT_CONFIG, *,
                        t: int | None = None, force_t=None):
    """Ramsey step: returns ``(sub_code, L', record)``; sub-code is None for a leaf.

    With ``t`` given (a small-scale exercise hook) the greedy chain is run
    regardless of the size hypothesis and the node's bound is its own size.
    """
    k, beta = L.k, L.beta
    forced = t is not None
    if L.angles[0] <= 0:
        raise InternalInconsistencyError("Ramsey case requires a_1 > 0")
    t_real = ramsey_t(beta, k)
    if not forced:
        t = t_real
    n = len(code)
    base = {"t": t, "classified": Case.RAMSEY.value, "forced": forced}
    if not forced and _ramsey_hypothesis_fails(n, k, t):
        leaf = _leaf_trivial(code, L, "ramsey_hypothesis", **base)
        leaf.fk_threshold = LogValue(_ramsey_power_log2(k, t)) + (k + 1) * t
        return None, None, leaf
    coloring = color_graph(code, L, cfg)
    try:
        if forced:
            pair = ramsey_pair(coloring, k + 1, t, 1, force=True, truncate=False)
        else:
            m = (n - 1) // (k + 1) ** ((k + 1) * t)
            pair = ramsey_pair(coloring, k + 1, t, m)
    except RamseyFailure as exc:
        if not forced:
            raise InternalInconsistencyError(str(exc)) from exc
        return None, None, _leaf_trivial(code, L, "ramsey_failure", step=exc.step, **base)
    r = pair.color
    if r == 0:
        if not forced:
            raise InternalInconsistencyError("monochromatic color is the interval")
        return None, None, _leaf_trivial(code, L, "interval_color", **base)
    a_r = L.angles[r - 1]
    T, M = list(pair.X), list(pair.Y)
    projected, _ = project_chain(code.vectors[M], code.vectors[T], cfg)
    projected = projected.reshape(-1, code.dim)
    mapped = [g_closed_form(a, a_r, t) for a in L.angles]
    if g_closed_form(-beta, a_r, t) > -beta:
        raise InternalInconsistencyError("interval image g(-beta) exceeds -beta")
    kept, merged = _kept_angles(mapped, beta)
    L_new = AngleSystem(beta, kept)
    child = Code(code.dim, projected)
    G = gram_of(code, cfg)
    Gc = gram_of(child, cfg)
    for i in range(len(M)):
        for j in range(i + 1, len(M)):
            want = g_closed_form(G[M[i], M[j]], a_r, t)
            if abs(Gc[i, j] - want) > FORMULA_TOL:
                raise InternalInconsistencyError(
                    f"projected product {Gc[i, j]!r} differs from g = {want!r}"
                )
    params = {**base, "T": T, "M": M, "color": r, "projected": L_new, "merged": merged}
    if not forced:
        params["m"] = len(M)
    record = CaseRecord(Case.RAMSEY, L, code, n, params,
                        fk_threshold=LogValue(_ramsey_power_log2(k, t))
                        * LogValue.of(4 / beta ** 2 + 4))
    return child, L_new, record


def _ramsey(code, L, cfg, force_t) -> CaseRecord:
    child, L_new, record = case_ramsey_project(code, L, cfg, t=force_t)
    if child is None:
        return record
    sub = _decompose(child, L_new, cfg, force_t)
    record.children.append(sub)
    if not record.params["forced"]:
        k, t = L.k, record.params["t"]
        record.bound = (k + 1) ** ((k + 1) * t) * (sub.bound + 1)
    return record


def _decompose(code: Code, L: AngleSystem, cfg, force_t) -> CaseRecord:
    if len(code) == 0:
        return _leaf_trivial(code, L, "empty")
    case, ell = classify_case(L)
    try:
        if case is Case.BASE_K0:
            return _base_k0(code, L, cfg)
        if case is Case.SMALL_AK:
            return case_small_ak(code, L, cfg)
        if case is Case.GAP_ELL:
            return _gap_ell(code, L, ell, cfg, force_t)
        return _ramsey(code, L, cfg, force_t)
    except (InternalInconsistencyError, SingularProjectionError) as exc:
        return CaseRecord(case, L, code, len(code), {"ell": ell} if ell else {},
                          invalid=str(exc))


def decompose(code: Code, L: AngleSystem, cfg: ProjectionConfig = DEFAULT_CONFIG, *,
              force_t: int | None = None,
              policy: FkPolicy = DEFAULT_POLICY) -> DecompositionTrace:
    """Run the case analysis on a validated code and verify the result.

    ``force_t`` replaces the Ramsey block size ``ceil(1/beta')`` so that the
    projection step can be exercised on small codes; such nodes only claim
    their own size as a bound.
    """
    cls = validate_code(code, L, cfg)
    if not cls.valid:
        raise PreconditionError(
            f"code is not an L-spherical code; first bad pair {cls.violations[0]}"
        )
    root = _decompose(code, L, cfg, force_t)
    fk = _safe_log(lambda: f_k(L.beta, L.k, policy) * LogValue.of(code.dim) ** L.k)
    trace = DecompositionTrace(root, root.bound, fk)
    trace.verified = verify_trace(trace, cfg, policy=policy).passed
    return trace


# -- verification -----------------------------------------------------------


@dataclass
class VerifyReport:
    passed: bool
    bound: int | None
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def first_failure(self) -> str | None:
        return self.failures[0][0] if self.failures else None

    def __bool__(self):
        return self.passed


class _Fail(Exception):
    pass


def _require(cond, message):
    if not cond:
        raise _Fail(message)


def _close_vectors(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and (a.size == 0 or np.max(np.abs(a - b)) <= FORMULA_TOL)


def _same_angles(L1: AngleSystem, L2: AngleSystem) -> bool:
    return (
        abs(L1.beta - L2.beta) <= 1e-12 * L2.beta
        and len(L1.angles) == len(L2.angles)
        and all(abs(x - y) <= FORMULA_TOL for x, y in zip(L1.angles, L2.angles))
    )


class _Verifier:
    def __init__(self, cfg):
        self.cfg = cfg
        self.failures = []

    def node(self, rec: CaseRecord, path: str) -> int | None:
        """Certified bound of ``rec`` or None if it (or a child) fails."""
        try:
            return self._node(rec, path)
        except _Fail as exc:
            self.failures.append((path, str(exc)))
        except SphereCodeError as exc:
            self.failures.append((path, f"{type(exc).__name__}: {exc}"))
        return None

    def _child(self, rec, i, path):
        _require(len(rec.children) > i, f"missing child {i}")
        out = self.node(rec.children[i], f"{path}.{i}")
        if out is None:
            raise _Fail(f"child {i} failed verification")
        return out

    def _node(self, rec: CaseRecord, path: str) -> int:
        cfg = self.cfg
        _require(rec.invalid is None, f"node was invalidated: {rec.invalid}")
        L = AngleSystem(rec.angles.beta, rec.angles.angles)
        code = rec.code
        n = len(code)
        if n:
            cls = validate_code(code, L, cfg)
            _require(cls.valid, f"pair {cls.violations[:1]} is outside L")
        case = Case(rec.case)
        k, beta = L.k, L.beta
        classified, ell = classify_case(L)

        if case is Case.SIZE_TRIVIAL:
            _require(not rec.children, "trivial leaf has children")
            reason = rec.params.get("reason")
            if reason == "empty":
                _require(n == 0, "non-empty code marked empty")
            elif reason == "ramsey_hypothesis":
                _require(classified is Case.RAMSEY, f"case is {classified.value}, not RAMSEY")
                t = ramsey_t(beta, k)
                _require(rec.params.get("t") == t, f"t should be {t}")
                _require(_ramsey_hypothesis_fails(n, k, t), "Ramsey hypothesis holds here")
            else:
                _require(rec.params.get("forced"), f"unexpected trivial reason {reason!r}")
            bound = n
        elif case is Case.BASE_K0:
            _require(k == 0, "BASE_K0 with angles")
            _require(neg_sum_check(code, cfg).passed, "vector sum check failed")
            bound = neg_bound(beta)
        elif case is Case.SMALL_AK:
            _require(classified is Case.SMALL_AK, f"case is {classified.value}")
            bound = self._small_ak(rec, L)
        elif case is Case.GAP_ELL:
            _require(classified is Case.GAP_ELL, f"case is {classified.value}")
            _require(rec.params.get("ell") == ell, f"gap index should be {ell}")
            bound = self._gap(rec, L, ell, path)
        else:
            _require(classified is Case.RAMSEY, f"case is {classified.value}")
            bound = self._ramsey(rec, L, path)

        _require(rec.bound == bound, f"stored bound {rec.bound} != recomputed {bound}")
        _require(n <= bound, f"size {n} exceeds bound {bound}")
        return bound

    def _small_ak(self, rec, L) -> int:
        cfg, code = self.cfg, rec.code
        coloring = color_graph(code, L, cfg)
        G0 = coloring.graph([0])
        try:
            _interval_degree_check(code, G0, L.beta, cfg)
        except InternalInconsistencyError as exc:
            raise _Fail(str(exc)) from exc
        delta = max_degree(G0)
        S = list(rec.params.get("independent_set", []))
        _require(len(set(S)) == len(S) and all(0 <= s < len(code) for s in S),
                 "independent set has bad indices")
        _require(is_independent(G0, S), "stored set is not independent")
        _require(len(S) * (delta + 1) >= len(code), "independent set too small")
        cert = koornwinder_certificate(code.subset(S), L.angles, cfg)
        _require(cert.passed, f"Koornwinder certificate fails ({cert.max_offdiag!r})")
        _require(len(S) <= cert.bound, "independent set exceeds the DGS bound")
        return (delta + 1) * dgs_bound(code.dim, L.k)

    def _gap(self, rec, L, ell, path) -> int:
        cfg, code, p = self.cfg, rec.code, rec.params
        k, beta = L.k, L.beta
        n = len(code)
        coloring = color_graph(code, L, cfg)
        Hbar = coloring.graph(range(ell, k + 1))
        deg = Hbar.sum(axis=1)
        delta = int(deg.max())
        Q = list(p.get("clique", []))
        _require(is_independent(Hbar, Q), "prefix set is not a clique in the low colors")
        _require(len(Q) * (delta + 1) >= n, "prefix clique below n/(degree+1)")
        prefix = rec.children[0] if rec.children else None
        _require(prefix is not None and np.array_equal(prefix.code.vectors, code.vectors[Q]),
                 "prefix child vectors differ from the clique")
        _require(_same_angles(prefix.angles, AngleSystem(beta, L.angles[:ell - 1])),
                 "prefix child angle system is wrong")
        bp = beta_prime(beta, k)
        _require(L.angles[ell - 1] ** 2 / 2 >= bp, "a_ell^2/2 < beta'")
        B1 = self._child(rec, 0, path)
        if delta == 0:
            _require(len(rec.children) == 1, "unexpected suffix child")
            return B1
        y, s, Jp = p.get("pivot"), p.get("color"), list(p.get("subset", []))
        _require(y is not None and deg[y] == delta, "pivot is not of maximum degree")
        _require(s is not None and ell <= s <= k, "color outside [ell, k]")
        _require(all(j != y and coloring.color(y, j) == s for j in Jp),
                 "subset vertex not joined to the pivot by color s")
        count = sum(1 for j in range(n) if j != y and coloring.color(y, j) == s)
        _require(len(Jp) == count and len(set(Jp)) == count, "subset is not the full color class")
        _require(k * len(Jp) >= delta, "color class smaller than degree/k")
        a_s = L.angles[s - 1]
        mapped = [gap_projected_angle(a, a_s) for a in L.angles[ell - 1:]]
        kept, _ = _kept_angles(mapped, bp)
        expected = AngleSystem(bp, kept)
        stored = p.get("projected")
        _require(stored is not None and _same_angles(stored, expected),
                 f"projected angle system {stored} != recomputed {expected}")
        suffix = rec.children[1]
        _require(_same_angles(suffix.angles, expected), "suffix child angle system is wrong")
        x_y = code.vectors[y]
        recomputed = np.array([project_normalized(code.vectors[j], x_y, cfg) for j in Jp])
        _require(_close_vectors(suffix.code.vectors, recomputed.reshape(-1, code.dim)),
                 "suffix vectors differ from the recomputed projections")
        G = gram_of(code, cfg)
        Gc = gram_of(suffix.code, cfg)
        for i in range(len(Jp)):
            for j in range(i + 1, len(Jp)):
                c1, c2 = G[y, Jp[i]], G[y, Jp[j]]
                want = (G[Jp[i], Jp[j]] - c1 * c2) / math.sqrt((1 - c1 ** 2) * (1 - c2 ** 2))
                _require(abs(Gc[i, j] - want) <= FORMULA_TOL,
                         f"projected product {Gc[i, j]!r} != formula {want!r}")
        B2 = self._child(rec, 1, path)
        return (k * B2 + 1) * B1

    def _ramsey(self, rec, L, path) -> int:
        cfg, code, p = self.cfg, rec.code, rec.params
        k, beta = L.k, L.beta
        n = len(code)
        _require(L.angles[0] > 0, "a_1 <= 0 in the Ramsey case")
        forced = bool(p.get("forced"))
        t = p.get("t")
        if not forced:
            _require(t == ramsey_t(beta, k), "t != ceil(1/beta')")
        T, M, r = list(p.get("T", [])), list(p.get("M", [])), p.get("color")
        _require(len(T) == t, f"|T| = {len(T)} != t = {t}")
        _require(r is not None and 1 <= r <= k, "monochromatic color must be positive")
        coloring = color_graph(code, L, cfg)
        _require(check_mono_pair(coloring, MonoPair(tuple(T), tuple(M), r)),
                 "(T, M) is not monochromatic")
        if not forced:
            power = (k + 1) ** ((k + 1) * t)
            _require(len(M) == (n - 1) // power and n > power * len(M),
                     "|M| does not match the Ramsey hypothesis")
        a_r = L.angles[r - 1]
        _require(g_closed_form(-beta, a_r, t) <= -beta, "g(-beta) > -beta")
        mapped = [g_closed_form(a, a_r, t) for a in L.angles]
        kept, _ = _kept_angles(mapped, beta)
        expected = AngleSystem(beta, kept)
        stored = p.get("projected")
        _require(stored is not None and _same_angles(stored, expected),
                 f"projected angle system {stored} != recomputed {expected}")
        _require(len(rec.children) == 1, "Ramsey node needs one child")
        child = rec.children[0]
        _require(_same_angles(child.angles, expected), "child angle system is wrong")
        recomputed, _ = project_chain(code.vectors[M], code.vectors[T], cfg)
        _require(_close_vectors(child.code.vectors, recomputed.reshape(-1, code.dim)),
                 "child vectors differ from the recomputed projections")
        G = gram_of(code, cfg)
        Gc = gram_of(child.code, cfg)
        for i in range(len(M)):
            for j in range(i + 1, len(M)):
                want = g_closed_form(G[M[i], M[j]], a_r, t)
                _require(abs(Gc[i, j] - want) <= FORMULA_TOL,
                         f"projected product {Gc[i, j]!r} != g value {want!r}")
        B = self._child(rec, 0, path)
        if forced:
            return n
        return (k + 1) ** ((k + 1) * t) * (B + 1)


def verify_trace(trace: DecompositionTrace, cfg: ProjectionConfig = DEFAULT_CONFIG, *,
                 policy: FkPolicy = DEFAULT_POLICY) -> VerifyReport:
    """Re-derive every node of ``trace`` from its stored vectors."""
    v = _Verifier(cfg)
    bound = v.node(trace.root, "root")
    if bound is not None:
        if trace.claimed_bound != bound:
            v.failures.append(("root", f"claimed bound {trace.claimed_bound} != {bound}"))
        L = trace.root.angles
        fk = _safe_log(lambda: f_k(L.beta, L.k, policy) * LogValue.of(trace.dim) ** L.k)
        if bound > 0 and fk is not None and LogValue.of(bound) > fk:
            v.failures.append(("root", f"bound {bound} exceeds f_k(beta) d^k = {fk}"))
    return VerifyReport(not v.failures, bound, v.failures)
