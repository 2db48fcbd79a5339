import math

import numpy as np
import pytest

from conftest import simplex_gram
from spherecode import (
    AngleSystem,
    Code,
    FkPolicy,
    LogValue,
    beta_prime,
    d_zero,
    dgs_bound,
    f_k,
    factor_gram,
    icosahedron_code,
    koornwinder_certificate,
    neg_bound,
    neg_sum_check,
    simplex_code,
)
from spherecode.bounds import beta_prime_log2, dgs_bound_log2
from spherecode.errors import DomainError, PreconditionError


class TestLogValue:
    def test_of_and_value(self):
        assert LogValue.of(8).log2 == 3
        assert LogValue.of(8).value() == 8

    def test_big_int(self):
        assert LogValue.of(2 ** 2000).log2 == pytest.approx(2000)

    def test_arithmetic(self):
        a, b = LogValue.of(3), LogValue.of(5)
        assert (a * b).value() == pytest.approx(15)
        assert (a + b).value() == pytest.approx(8)
        assert (a ** 2).value() == pytest.approx(9)

    def test_compare_with_numbers(self):
        assert LogValue.of(3) < 4
        assert LogValue.of(3) > 2.5

    def test_rejects_non_finite(self):
        with pytest.raises(OverflowError):
            LogValue(float("inf"))


class TestDgs:
    @pytest.mark.parametrize("d,k,want", [(3, 1, 4), (3, 2, 10), (2, 2, 6), (10, 3, 286)])
    def test_values(self, d, k, want):
        assert dgs_bound(d, k) == want

    def test_log2(self):
        assert dgs_bound_log2(10, 3).log2 == pytest.approx(math.log2(286))

    def test_exact_for_large_arguments(self):
        assert dgs_bound(1000, 50) == math.comb(1050, 50)


class TestNeg:
    @pytest.mark.parametrize("beta,want", [(0.5, 3), (1 / 3, 4), (0.25, 5), (0.3, 4),
                                           (0.3333333333, 4)])
    def test_values(self, beta, want):
        assert neg_bound(beta) == want

    @pytest.mark.parametrize("beta", [0.0, 1.0, -0.1])
    def test_domain(self, beta):
        with pytest.raises(DomainError):
            neg_bound(beta)

    @pytest.mark.parametrize("d", [2, 3, 4, 7])
    def test_simplex_sum_vanishes(self, d):
        rep = neg_sum_check(simplex_code(d))
        assert abs(rep.norm_sq) <= 1e-12
        assert rep.beta_eff == pytest.approx(1 / d)
        assert rep.size_bound_holds and rep.passed

    def test_pair_at_minus_half(self):
        code = factor_gram(simplex_gram(2, -0.5), 2)
        rep = neg_sum_check(code)
        assert rep.norm_sq == pytest.approx(1.0)
        assert rep.upper == pytest.approx(1.0)

    def test_single_vector(self):
        rep = neg_sum_check(Code(2, [[1.0, 0.0]]))
        assert rep.size == 1 and rep.beta_eff is None


class TestKoornwinder:
    @pytest.mark.parametrize("d", [1, 4, 10])
    def test_orthonormal(self, d):
        rep = koornwinder_certificate(Code(d, np.eye(d)), [0.0])
        assert rep.passed and rep.scale == 1.0 and rep.bound == d + 1

    @pytest.mark.parametrize("d", [2, 5, 10])
    def test_simplex(self, d):
        rep = koornwinder_certificate(simplex_code(d), [-1 / d])
        assert rep.passed
        assert rep.scale == pytest.approx(1 + 1 / d)
        assert rep.max_offdiag <= 1e-8

    def test_icosahedron(self):
        s = 1 / math.sqrt(5)
        rep = koornwinder_certificate(icosahedron_code(), [-s, s])
        assert rep.passed
        assert rep.scale == pytest.approx(4 / 5)
        assert rep.bound == 10

    def test_perturbed_product_fails(self):
        G = simplex_gram(4, -1 / 3)
        G[0, 1] = G[1, 0] = -1 / 3 + 1e-3
        code = factor_gram(G, 4)
        assert not koornwinder_certificate(code, [-1 / 3]).passed

    def test_interval_pairs_rejected(self):
        with pytest.raises(PreconditionError):
            koornwinder_certificate(simplex_code(3), AngleSystem(0.25, [0.5]))


class TestBetaPrime:
    def test_values(self):
        assert beta_prime(0.5, 1) == 1 / 16
        assert beta_prime(0.5, 2) == 1 / 256

    def test_log2_survives_underflow(self):
        assert beta_prime(0.5, 12) == 0.0
        assert beta_prime_log2(0.5, 12).log2 == -2 * 4096

    def test_d_zero(self):
        assert d_zero(0.5, 1).value() == pytest.approx(2 ** 4)


class TestFk:
    def test_base_cases_exact(self):
        assert f_k(0.5, 0).value() == 3
        assert f_k(1 / 3, 0).value() == 4

    def test_f1_half_independent(self):
        # d0 = 2^4, beta' = 1/16 -> t = 16, Ramsey factor 2^(2*16), small = 20
        want = math.log2(16 * (1 + 2 ** 32 * 20))
        assert f_k(0.5, 1).log2 == pytest.approx(want, rel=1e-9)

    @pytest.mark.parametrize("k", [1, 2])
    def test_antitone(self, k):
        betas = np.linspace(0.1, 0.9, 10)
        vals = [f_k(b, k).log2 for b in betas]
        assert all(x >= y for x, y in zip(vals, vals[1:]))

    def test_policy_monotone(self):
        full = f_k(0.5, 2).log2
        lean = f_k(0.5, 2, FkPolicy(ramsey_small=False, ramsey_gap=False)).log2
        assert lean <= full

    def test_policy_needs_a_threshold(self):
        with pytest.raises(DomainError):
            FkPolicy(small_ak=False, gap=False, ramsey_small=False, ramsey_gap=False)

    def test_overflow_reported(self):
        with pytest.raises(OverflowError):
            f_k(0.5, 6)
