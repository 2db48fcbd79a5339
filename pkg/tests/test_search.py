import math

import numpy as np
import pytest

from conftest import simplex_gram
from spherecode import (
    AngleSystem,
    SearchConfig,
    check_gram_feasible,
    dgs_bound,
    gram_of,
    icosahedron_code,
    max_code_search,
    simplex_code,
    validate_code,
)
from spherecode.errors import DomainError


def search(values, d, n_max=8, **kw):
    result = max_code_search(SearchConfig(tuple(values), d, n_max, **kw))
    if result.exhaustive:
        assert result.best_n <= dgs_bound(d, len(values))
    return result


def test_feasibility():
    assert check_gram_feasible(simplex_gram(4, -1 / 3), 3)
    assert not check_gram_feasible(simplex_gram(4, -1 / 3), 2)
    assert not check_gram_feasible(np.array([[1, 0.9, -0.9], [0.9, 1, 0.9], [-0.9, 0.9, 1]]), 3)
    assert check_gram_feasible(np.zeros((0, 0)), 1)


def test_config_validation():
    with pytest.raises(DomainError):
        SearchConfig((), 2)
    with pytest.raises(DomainError):
        SearchConfig((1.0,), 2)
    with pytest.raises(DomainError):
        SearchConfig((0.1, 0.1), 2)
    with pytest.raises(DomainError):
        SearchConfig((0.1,), 2, n_max=13)
    assert SearchConfig((0.5, -0.5), 2).candidate_values == (-0.5, 0.5)


@pytest.mark.parametrize("beta,d,want", [(1 / 2, 2, 3), (1 / 3, 3, 4), (1 / 4, 4, 5)])
def test_negative_value_extremal(beta, d, want):
    r = search([-beta], d)
    assert r.exhaustive and r.best_n == want


def test_orthogonal_vectors():
    r = search([0.0], 3)
    assert r.best_n == 3 and np.allclose(r.witness, np.eye(3))


@pytest.mark.parametrize("values,d,want", [((-0.5, 0.5), 2, 3), ((-1 / 3, 1 / 3), 3, 4),
                                           ((-1 / math.sqrt(5), 1 / math.sqrt(5)), 3, 6)])
def test_equiangular(values, d, want):
    r = search(values, d, n_max=7)
    assert r.exhaustive and r.best_n == want


def test_symmetry_breaking_changes_nothing_but_work():
    on = search([-1 / 3, 1 / 3], 3, n_max=6)
    off = search([-1 / 3, 1 / 3], 3, n_max=6, symmetry_breaking=False)
    assert on.best_n == off.best_n
    assert on.nodes_visited <= off.nodes_visited


def test_witness_is_feasible():
    r = search([-1 / math.sqrt(5), 1 / math.sqrt(5)], 3, n_max=7)
    assert check_gram_feasible(r.witness, 3)


def test_budget_exhaustion():
    r = max_code_search(SearchConfig((-0.3, 0.0, 0.3), 6, 12, time_budget=0.0))
    assert not r.exhaustive


def test_stops_at_n_max():
    r = search([0.0], 5, n_max=3)
    assert r.best_n == 3 and r.exhaustive


@pytest.mark.parametrize("d", [1, 2, 5, 9])
def test_simplex_code(d):
    code = simplex_code(d)
    assert len(code) == d + 1
    assert np.allclose(gram_of(code), simplex_gram(d + 1, -1 / d), atol=1e-12)


def test_icosahedron_code():
    code = icosahedron_code()
    s = 1 / math.sqrt(5)
    assert len(code) == 6
    assert validate_code(code, AngleSystem(0.9, [-s, s])).valid
    off = np.abs(gram_of(code)[~np.eye(6, dtype=bool)])
    assert np.allclose(off, s)
