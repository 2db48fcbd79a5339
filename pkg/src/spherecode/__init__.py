"""Executable bounds, projections and case analysis for L-spherical codes."""

from .bounds import (
    FkPolicy,
    LogValue,
    beta_prime,
    d_zero,
    dgs_bound,
    f_k,
    koornwinder_certificate,
    neg_bound,
    neg_sum_check,
)
from .combinatorics import (
    EdgeColoring,
    MonoPair,
    RandomColoring,
    check_mono_pair,
    color_graph,
    greedy_independent,
    max_degree,
    ramsey_pair,
)
from .decomposition import (
    Case,
    CaseRecord,
    DecompositionTrace,
    case_gap_project,
    case_ramsey_project,
    case_small_ak,
    classify_case,
    decompose,
    verify_trace,
)
from .geometry import (
    AngleSystem,
    Code,
    ProjectionConfig,
    factor_gram,
    g_closed_form,
    gram_of,
    project_complement,
    project_normalized,
    validate_code,
)
from .search import (
    SearchConfig,
    SearchResult,
    check_gram_feasible,
    icosahedron_code,
    max_code_search,
    simplex_code,
)

__version__ = "0.1.0"
