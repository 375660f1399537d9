import math

import numpy as np
import pytest

from levshap.combinatorics import shapley_weight
from levshap.exact import row_masks
from levshap.masks import popcount
from levshap.sampling import (
    bernoulli_sample,
    mask_log_probability,
    sample_with_replacement,
    size_distribution,
    solve_c,
)


def expected_rows(n: int, c: float) -> float:
    """Independent evaluation of the budget equation's left side."""
    return sum(min(2 * c, math.comb(n, s)) for s in range(1, n))


class TestSolveC:
    def test_full_budget_returns_minimal_saturating_constant(self):
        # at m = 2^n every inclusion probability must hit 1; the smallest
        # such c is half the middle binomial coefficient
        assert solve_c(4, 16) == 3.0
        assert solve_c(6, 64) == 10.0

    def test_unsaturated_branch_closed_form(self):
        # n=4, m=9: all sizes unsaturated, F(2c) = 6c, so c = 7/6
        assert solve_c(4, 9) == pytest.approx(7 / 6, rel=1e-9)

    @pytest.mark.parametrize("n,m", [(10, 50), (20, 200), (100, 1000)])
    def test_budget_equation_holds(self, n, m):
        c = solve_c(n, m)
        assert expected_rows(n, c) == pytest.approx(m - 2, rel=1e-6)

    def test_rejects_bad_budgets(self):
        with pytest.raises(ValueError):
            solve_c(10, 9)
        with pytest.raises(ValueError):
            solve_c(4, 17)


class TestBernoulliSample:
    def test_saturated_constant_enumerates_everything(self):
        masks, plan = bernoulli_sample(4, c=3.0, rng=np.random.default_rng(0))
        assert plan.total_pairs == 7  # 2^(4-1) - 1 pairs
        assert masks.shape == (14, 4)
        # all proper nonempty masks exactly once
        assert len({m.tobytes() for m in masks}) == 14

    def test_pairs_are_adjacent_complements(self):
        masks, _ = bernoulli_sample(9, c=2.0, rng=np.random.default_rng(1))
        assert masks.shape[0] % 2 == 0
        for i in range(0, masks.shape[0], 2):
            np.testing.assert_array_equal(masks[i] + masks[i + 1], np.ones(9, dtype=np.uint8))
            assert 0 < popcount(masks[i]) < 9

    def test_no_duplicate_masks_within_run(self):
        for seed in range(20):
            masks, _ = bernoulli_sample(10, c=4.0, rng=np.random.default_rng(seed))
            assert len({m.tobytes() for m in masks}) == masks.shape[0]

    def test_middle_layer_partition_anchor(self):
        n = 6
        masks, plan = bernoulli_sample(n, c=9.0, rng=np.random.default_rng(2))
        assert plan.middle_partitioned
        middle = masks[popcount(masks) == n // 2]
        # pairs stay adjacent: even rows carry the anchor player, odd rows do not
        assert middle.shape[0] % 2 == 0
        assert np.all(middle[0::2, n - 1] == 1)
        assert np.all(middle[1::2, n - 1] == 0)

    def test_pair_count_expectation(self):
        n, m = 5, 12
        c = solve_c(n, m)
        counts = [
            bernoulli_sample(n, c, np.random.default_rng(seed))[1].total_pairs
            for seed in range(10_000)
        ]
        mean = np.mean(counts)
        assert mean == pytest.approx((m - 2) / 2, rel=0.03)

    def test_inclusion_marginals(self):
        # fixed probe pairs, unsaturated c: empirical inclusion within
        # 3 binomial standard errors of min(1, 2c / C(n, s))
        n, m, runs = 10, 60, 10_000
        c = solve_c(n, m)
        probes = {}
        rng0 = np.random.default_rng(123)
        for _ in range(10):
            z = np.zeros(n, dtype=np.uint8)
            s = int(rng0.integers(1, n))
            z[rng0.choice(n, size=min(s, n // 2), replace=False)] = 1
            if 0 < z.sum() < n:
                probes[z.tobytes()] = 0
        hits = dict.fromkeys(probes, 0)
        for seed in range(runs):
            masks, _ = bernoulli_sample(n, c, np.random.default_rng(seed))
            seen = {m.tobytes() for m in masks}
            for key in hits:
                if key in seen:
                    hits[key] += 1
        for key, count in hits.items():
            s = int(np.frombuffer(key, dtype=np.uint8).sum())
            p = min(1.0, 2 * c / math.comb(n, s))
            se = math.sqrt(p * (1 - p) / runs)
            assert abs(count / runs - p) <= 3 * se + 1e-12, (s, count / runs, p)

    def test_deterministic_counts_hand_checked(self):
        # n=6, m=20: c = 1.8, per-size expectations (3.6, 3.6, 1.8) round to
        # (4, 3, 2) under largest-remainder with total 9 pairs
        n, m = 6, 20
        c = solve_c(n, m)
        assert c == pytest.approx(1.8, rel=1e-9)
        masks, plan = bernoulli_sample(
            n, c, np.random.default_rng(0), deterministic_counts=True
        )
        assert plan.pair_counts == {1: 4, 2: 3, 3: 2}
        assert plan.total_pairs == (m - 2) // 2
        assert masks.shape == (m - 2, n)

    def test_deterministic_counts_total_is_stable(self):
        for n, m in [(7, 31), (8, 50), (12, 100)]:
            c = solve_c(n, m)
            totals = {
                bernoulli_sample(
                    n,
                    c,
                    np.random.default_rng(seed),
                    deterministic_counts=True,
                    pair_target=(m - 2) // 2,
                )[1].total_pairs
                for seed in range(5)
            }
            assert totals == {(m - 2) // 2}


class TestWithReplacement:
    def test_leverage_sizes_uniform(self):
        n, draws = 12, 100_000
        masks = sample_with_replacement(
            n, draws, "leverage", paired=False, rng=np.random.default_rng(0)
        )
        sizes = popcount(masks)
        counts = np.bincount(sizes, minlength=n)[1:n]
        expected = draws / (n - 1)
        # 5 sigma multinomial slack per bin
        slack = 5 * math.sqrt(draws * (1 / (n - 1)) * (1 - 1 / (n - 1)))
        assert np.all(np.abs(counts - expected) <= slack)

    def test_kernel_size_ratio(self):
        # P(size=1) / P(size=2) = 2(n-2)/(n-1) under the kernel distribution
        n, draws = 10, 100_000
        masks = sample_with_replacement(
            n, draws, "kernel", paired=False, rng=np.random.default_rng(1)
        )
        sizes = popcount(masks)
        _, pmf = size_distribution(n, "kernel")
        counts = np.bincount(sizes, minlength=n)[1:n]
        for s_idx, p in enumerate(pmf):
            se = math.sqrt(draws * p * (1 - p))
            assert abs(counts[s_idx] - draws * p) <= 3 * se, (s_idx + 1,)
        assert pmf[0] / pmf[1] == pytest.approx(2 * (n - 2) / (n - 1), rel=1e-12)

    def test_paired_mode_adjacency(self):
        masks = sample_with_replacement(
            7, 30, "kernel", paired=True, rng=np.random.default_rng(2)
        )
        assert masks.shape == (30, 7)
        for i in range(0, 30, 2):
            np.testing.assert_array_equal(masks[i] + masks[i + 1], np.ones(7, dtype=np.uint8))

    def test_paired_mode_floors_odd_counts(self):
        masks = sample_with_replacement(
            5, 9, "leverage", paired=True, rng=np.random.default_rng(3)
        )
        assert masks.shape == (8, 5)

    def test_restricted_sizes(self):
        masks = sample_with_replacement(
            8, 200, "kernel", paired=True, rng=np.random.default_rng(4), sizes=[2, 3, 5, 6]
        )
        assert set(np.unique(popcount(masks))) <= {2, 3, 5, 6}


class TestWeightCorrections:
    def test_bernoulli_weighted_gram_is_unbiased(self):
        # E[sum over sampled rows of (w/q) z z'] must equal the full
        # kernel-weighted Gram sum over every row
        n, m, runs = 6, 20, 4000
        full = np.zeros((n, n))
        masks, sizes = row_masks(n)
        for z, s in zip(masks.astype(float), sizes):
            full += shapley_weight(n, int(s)) * np.outer(z, z)
        c = solve_c(n, m)
        prof_w = np.array([0.0] + [shapley_weight(n, s) for s in range(1, n)] + [0.0])
        acc = np.zeros((n, n))
        for seed in range(runs):
            drawn, plan = bernoulli_sample(n, c, np.random.default_rng(seed))
            if drawn.shape[0] == 0:
                continue
            ds = drawn.sum(axis=1)
            q = np.exp(plan.log_inclusion[np.minimum(ds, n - ds)])
            w = prof_w[ds] / q
            zf = drawn.astype(float)
            acc += (zf * w[:, None]).T @ zf
        acc /= runs
        assert np.max(np.abs(acc - full)) <= 0.05 * np.max(np.abs(full))

    @pytest.mark.parametrize("distribution", ["kernel", "leverage"])
    def test_replacement_weighted_gram_is_unbiased(self, distribution):
        n, rows, runs = 6, 30, 4000
        full = np.zeros((n, n))
        masks, sizes = row_masks(n)
        for z, s in zip(masks.astype(float), sizes):
            full += shapley_weight(n, int(s)) * np.outer(z, z)
        prof_w = np.array([0.0] + [shapley_weight(n, s) for s in range(1, n)] + [0.0])
        acc = np.zeros((n, n))
        for seed in range(runs):
            drawn = sample_with_replacement(
                n, rows, distribution, paired=(seed % 2 == 0), rng=np.random.default_rng(seed)
            )
            ds = drawn.sum(axis=1)
            log_p = mask_log_probability(n, ds, distribution)
            w = prof_w[ds] / (drawn.shape[0] * np.exp(log_p))
            zf = drawn.astype(float)
            acc += (zf * w[:, None]).T @ zf
        acc /= runs
        assert np.max(np.abs(acc - full)) <= 0.05 * np.max(np.abs(full))


class TestMaskLogProbability:
    @pytest.mark.parametrize("distribution", ["kernel", "leverage"])
    def test_total_mass_is_one(self, distribution):
        n = 8
        _, sizes = row_masks(n)
        logp = mask_log_probability(n, sizes, distribution)
        assert np.exp(logp).sum() == pytest.approx(1.0, rel=1e-12)

    def test_restricted_mass_is_one(self):
        n = 9
        masks, sizes = row_masks(n)
        keep = np.isin(sizes, [3, 4, 5, 6])
        logp = mask_log_probability(n, sizes[keep], "kernel", sizes=[3, 4, 5, 6])
        assert np.exp(logp).sum() == pytest.approx(1.0, rel=1e-12)
