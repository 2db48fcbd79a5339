from pathlib import Path

import numpy as np
import pytest

from spherecode import Code, factor_gram

FIXTURES = Path(__file__).parent / "fixtures"


def simplex_gram(n, value):
    G = np.full((n, n), value, dtype=float)
    np.fill_diagonal(G, 1.0)
    return G


def common_angle_gram(k, c, a):
    """Gram of y_1..y_k, x, x' with every product c except x.x' = a."""
    G = simplex_gram(k + 2, c)
    G[k, k + 1] = G[k + 1, k] = a
    return G


def realize(G, d=None, rng=None):
    """Vectors for ``G``, randomly rotated into R^d when ``rng`` is given."""
    n = G.shape[0]
    d = d or n
    code = factor_gram(G, d)
    if rng is None:
        return code
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return Code(d, code.vectors @ Q)


def random_common_angle_config(rng, cs=(-0.2, 0.2, 1 / 3, 0.5), k_max=6):
    """Sample (c, k, a) whose Gram is positive definite, and realize it."""
    while True:
        c = float(rng.choice(cs))
        k = int(rng.integers(1, k_max + 1))
        for _ in range(50):
            a = float(rng.uniform(-1, 1))
            G = common_angle_gram(k, c, a)
            if np.linalg.eigvalsh(G)[0] > 1e-6:
                code = realize(G, k + 4, rng)
                return c, k, a, code.vectors[:k], code.vectors[k:]


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def fixtures():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
