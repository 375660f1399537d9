import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from levshap.combinatorics import (
    SetSizeProfile,
    combo_rank,
    combo_unrank,
    leverage_score,
    log_binomial,
    log_leverage_score,
    log_shapley_weight,
    shapley_weight,
)


def exact_weight(n: int, s: int) -> Fraction:
    """Independent oracle: w(s) = (s-1)! (n-s-1)! / n!."""
    return Fraction(math.factorial(s - 1) * math.factorial(n - s - 1), math.factorial(n))


def lex_subsets(n: int, s: int) -> list[tuple[int, ...]]:
    """Independent oracle: all 0-based size-s subsets in lexicographic order."""
    return list(itertools.combinations(range(n), s))


class TestShapleyWeight:
    def test_small_values(self):
        assert shapley_weight(2, 1) == 0.5
        assert shapley_weight(4, 1) == pytest.approx(1 / 12, rel=1e-15)

    def test_symmetry(self):
        assert shapley_weight(7, 3) == shapley_weight(7, 4)
        for n in (5, 16, 31):
            for s in range(1, n):
                assert shapley_weight(n, s) == shapley_weight(n, n - s)

    def test_matches_factorial_identity(self):
        cases = [(n, s) for n in (2, 3, 7, 20, 60, 200) for s in range(1, n)]
        cases += [(10_000, s) for s in (1, 2, 3, 50, 9999)]
        for n, s in cases:
            w = exact_weight(n, s)
            got = shapley_weight(n, s)
            assert got == pytest.approx(float(w), rel=1e-12), (n, s)
            assert log_shapley_weight(n, s) == pytest.approx(
                math.log(w.numerator) - math.log(w.denominator), rel=1e-12, abs=1e-12
            )

    def test_recurrence(self):
        # w(s) * s = w(s+1) * (n-s-1), the telescoping identity behind the
        # marginal-contribution weighting
        for n in (2, 3, 10, 47, 200):
            for s in range(1, n - 1):
                lhs = shapley_weight(n, s) * s
                rhs = shapley_weight(n, s + 1) * (n - s - 1)
                assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_out_of_range(self):
        for bad_s in (0, 5, -1):
            with pytest.raises(ValueError):
                shapley_weight(5, bad_s)
        with pytest.raises(ValueError):
            shapley_weight(1, 1)


class TestLeverageScore:
    def test_small_values(self):
        assert leverage_score(4, 2) == pytest.approx(1 / 6, rel=1e-15)
        for n in (2, 5, 33):
            assert leverage_score(n, 1) == pytest.approx(1 / n, rel=1e-15)

    def test_equals_weight_times_pair_product(self):
        n = 10
        for s in range(1, n):
            assert leverage_score(n, s) == pytest.approx(
                shapley_weight(n, s) * s * (n - s), rel=1e-12
            )

    def test_matches_big_integer_reciprocal(self):
        for n in range(2, 61):
            for s in range(1, n):
                exact = Fraction(1, math.comb(n, s))
                assert leverage_score(n, s) == pytest.approx(float(exact), rel=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            leverage_score(6, 6)


class TestLogBinomial:
    def test_trivial(self):
        assert log_binomial(4, 2) == pytest.approx(math.log(6), rel=1e-15)
        for n in (2, 9, 40):
            assert log_binomial(n, 0) == 0.0
            assert log_binomial(n, n) == 0.0

    def test_against_big_integers(self):
        for n in range(0, 61):
            for s in range(n + 1):
                want = math.log(math.comb(n, s)) if math.comb(n, s) > 1 else 0.0
                assert log_binomial(n, s) == pytest.approx(want, rel=1e-12, abs=1e-12)
        assert log_binomial(52, 26) == pytest.approx(
            math.log(math.comb(52, 26)), rel=1e-15
        )

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            log_binomial(5, 6)


class TestSetSizeProfile:
    def test_symmetry_of_weights(self):
        for n in (5, 12, 200):
            prof = SetSizeProfile.for_players(n)
            got = prof.log_weight[1 : n]
            np.testing.assert_allclose(got, got[::-1], rtol=1e-12)

    def test_weight_recurrence_in_log_space(self):
        for n in (3, 50, 200):
            prof = SetSizeProfile.for_players(n)
            s = np.arange(1, n - 1)
            lhs = prof.log_weight[s] + np.log(s)
            rhs = prof.log_weight[s + 1] + np.log(n - s - 1)
            np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_total_leverage_is_rank(self):
        # each set size contributes total leverage exactly 1
        for n in (2, 13, 200, 1000):
            prof = SetSizeProfile.for_players(n)
            s = np.arange(1, n)
            total = np.exp(prof.log_binom[s] + prof.log_leverage[s]).sum()
            assert total == pytest.approx(n - 1, rel=1e-10)

    def test_weight_normalization_identity(self):
        # C(n,s) * w(s) * s * (n-s) = 1 for every size
        for n in (2, 7, 64, 200):
            prof = SetSizeProfile.for_players(n)
            s = np.arange(1, n)
            terms = np.exp(prof.log_binom[s] + prof.log_weight[s] + np.log(s) + np.log(n - s))
            assert terms.sum() == pytest.approx(n - 1, rel=1e-10)

    def test_scalar_agreement(self):
        for n in (6, 300, 2000):
            prof = SetSizeProfile.for_players(n)
            for s in (1, 2, n // 2, n - 1):
                assert prof.log_weight[s] == pytest.approx(
                    log_shapley_weight(n, s), rel=1e-12, abs=5e-11
                )
                assert prof.log_leverage[s] == pytest.approx(
                    log_leverage_score(n, s), rel=1e-12, abs=5e-11
                )

    def test_tables_are_frozen(self):
        prof = SetSizeProfile.for_players(9)
        with pytest.raises(ValueError):
            prof.log_weight[3] = 0.0


class TestComboUnrank:
    def test_documented_cases(self):
        np.testing.assert_array_equal(combo_unrank(4, 2, 0), [1, 1, 0, 0])
        np.testing.assert_array_equal(combo_unrank(4, 2, 5), [0, 0, 1, 1])
        for k in range(5):
            want = np.zeros(5, dtype=np.uint8)
            want[k] = 1
            np.testing.assert_array_equal(combo_unrank(5, 1, k), want)

    def test_matches_lexicographic_enumeration(self):
        for n in range(1, 13):
            for s in range(1, n + 1):
                subsets = lex_subsets(n, s)
                assert len(subsets) == math.comb(n, s)
                seen = set()
                for i, combo in enumerate(subsets):
                    z = combo_unrank(n, s, i)
                    assert tuple(np.flatnonzero(z)) == combo
                    seen.add(z.tobytes())
                assert len(seen) == math.comb(n, s)

    def test_big_rank_arithmetic_is_exact(self):
        # ranks beyond 2^63 must still unrank/rank exactly
        n, s = 200, 100
        total = math.comb(n, s)
        for i in (0, 1, total // 3, total - 1):
            z = combo_unrank(n, s, i)
            assert int(z.sum()) == s
            assert combo_rank(n, s, z) == i

    def test_range_errors(self):
        with pytest.raises(ValueError):
            combo_unrank(4, 2, 6)
        with pytest.raises(ValueError):
            combo_unrank(4, 2, -1)
        with pytest.raises(ValueError):
            combo_unrank(4, 0, 0)


class TestComboRank:
    def test_documented_cases(self):
        assert combo_rank(4, 2, [1, 1, 0, 0]) == 0
        assert combo_rank(4, 2, [0, 0, 1, 1]) == 5

    def test_round_trip_identity(self):
        for n in range(1, 13):
            for s in range(1, n + 1):
                for i in range(math.comb(n, s)):
                    assert combo_rank(n, s, combo_unrank(n, s, i)) == i

    def test_popcount_mismatch(self):
        with pytest.raises(ValueError):
            combo_rank(4, 2, [1, 1, 1, 0])
