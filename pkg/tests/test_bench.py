import numpy as np
import pytest

from levshap.bench import (
    CSV_COLUMNS,
    ExperimentSpec,
    MetricRow,
    aggregate,
    rows_to_csv_bytes,
    run_gamma_sweep,
    run_noise_sweep,
    run_size_sweep,
    summary_json,
    write_csv,
)
from levshap.gamespec import parse_game_spec


def small_size_spec(**overrides):
    base = dict(
        game="interaction:seed=0",
        n=6,
        estimators=("leverage", "kernel"),
        m_grid=(12, 24),
        seeds=3,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


class TestSpecValidation:
    def test_rejects_bad_fields(self):
        with pytest.raises(ValueError):
            small_size_spec(seeds=0)
        with pytest.raises(ValueError):
            small_size_spec(estimators=("nope",))
        with pytest.raises(ValueError):
            small_size_spec(sigma_grid=(-0.1,))
        with pytest.raises(ValueError):
            small_size_spec(jobs=0)


class TestSizeSweep:
    def test_row_accounting_and_order(self):
        spec = small_size_spec()
        rows = run_size_sweep(spec)
        assert len(rows) == 2 * 2 * 3  # m x estimator x seed
        keys = [(r.m, r.estimator, r.seed) for r in rows]
        assert keys == [
            (m, fam, seed)
            for m in (12, 24)
            for fam in ("leverage", "kernel")
            for seed in range(3)
        ]
        for r in rows:
            assert r.error is None
            assert r.l2_error >= 0
            assert r.sigma == 0.0

    def test_additive_game_is_exact_everywhere(self):
        # zero-residual game: exact whenever the sample has full projected
        # rank, which the default-grid budgets (5n and up) deliver
        spec = ExperimentSpec(
            game="additive:1,2,3,4,5,6",
            estimators=("leverage", "kernel_optimized", "kernel"),
            m_grid=(30, 64),
            seeds=2,
        )
        for r in run_size_sweep(spec):
            assert r.l2_error <= 1e-10

    def test_saturated_budget_reaches_machine_precision(self):
        spec = small_size_spec(m_grid=(64,), estimators=("leverage", "kernel_optimized"))
        for r in run_size_sweep(spec):
            assert r.l2_error <= 1e-16

    def test_leverage_median_error_nonincreasing_in_budget(self):
        spec = ExperimentSpec(
            game="interaction:seed=0",
            n=12,
            estimators=("leverage",),
            m_grid=tuple(f * 12 for f in (5, 10, 20, 40, 80, 160)),
            seeds=100,
        )
        rows = run_size_sweep(spec)
        medians = []
        for m in spec.m_grid:
            medians.append(np.median([r.l2_error for r in rows if r.m == m]))
        assert all(medians[i + 1] <= medians[i] for i in range(len(medians) - 1)), medians

    def test_kernel_median_error_decreases_across_budgets(self):
        spec = ExperimentSpec(
            game="interaction:seed=0",
            n=10,
            estimators=("kernel",),
            m_grid=tuple(f * 10 for f in (5, 10, 20, 40, 80, 160)),
            seeds=200,
        )
        rows = run_size_sweep(spec)
        medians = []
        for m in spec.m_grid:
            medians.append(np.median([r.l2_error for r in rows if r.m == m]))
        assert all(medians[i + 1] < medians[i] for i in range(len(medians) - 1)), medians

    def test_objective_ratio_at_least_one(self):
        for r in run_size_sweep(small_size_spec()):
            assert r.objective_ratio is not None
            assert r.objective_ratio >= 1 - 1e-9

    def test_analytic_ground_truth_beyond_brute_force_limit(self):
        # additive games have analytic values, so sweeps work past n = 22
        coeffs = ",".join(str(i) for i in range(1, 31))
        spec = ExperimentSpec(
            game=f"additive:{coeffs}", estimators=("leverage",), m_grid=(150,), seeds=1
        )
        (row,) = run_size_sweep(spec)
        assert row.error is None
        assert row.l2_error <= 1e-10
        assert row.objective_ratio is None

    def test_objective_ratio_absent_beyond_explicit_system_limit(self):
        # n = 16: ground truth still comes from brute force, but the
        # explicit system no longer fits, so the ratio column stays empty
        spec = ExperimentSpec(
            game="interaction:seed=0", n=16, estimators=("leverage",),
            m_grid=(80,), seeds=1,
        )
        (row,) = run_size_sweep(spec)
        assert row.l2_error is not None
        assert row.objective_ratio is None

    def test_byte_identical_reruns(self):
        spec = small_size_spec()
        a = rows_to_csv_bytes(run_size_sweep(spec))
        b = rows_to_csv_bytes(run_size_sweep(spec))
        assert a == b

    def test_jobs_do_not_change_output(self):
        serial = rows_to_csv_bytes(run_size_sweep(small_size_spec(jobs=1)))
        threaded = rows_to_csv_bytes(run_size_sweep(small_size_spec(jobs=4)))
        assert serial == threaded

    def test_wall_ms_opt_in(self):
        rows = run_size_sweep(small_size_spec(m_grid=(12,), seeds=1))
        assert all(r.wall_ms is None for r in rows)
        timed = run_size_sweep(small_size_spec(m_grid=(12,), seeds=1, record_timing=True))
        assert all(r.wall_ms is not None and r.wall_ms >= 0 for r in timed)


class TestNoiseSweep:
    def test_zero_sigma_matches_size_sweep(self):
        base = small_size_spec(m_grid=(24,))
        size_rows = {(r.estimator, r.seed): r.l2_error for r in run_size_sweep(base)}
        noise_rows = run_noise_sweep(small_size_spec(m_grid=(24,), sigma_grid=(0.0, 0.5)))
        for r in noise_rows:
            if r.sigma == 0.0:
                assert r.l2_error == size_rows[(r.estimator, r.seed)]

    def test_noise_hurts_on_average(self):
        rows = run_noise_sweep(
            small_size_spec(m_grid=(24,), seeds=20, sigma_grid=(0.0, 1.0), estimators=("leverage",))
        )
        by_sigma = {}
        for r in rows:
            by_sigma.setdefault(r.sigma, []).append(r.l2_error)
        assert np.median(by_sigma[1.0]) > np.median(by_sigma[0.0])


class TestErrorRows:
    def test_cell_failures_become_error_rows_and_sweep_continues(self, capsys):
        # a single unpaired draw can never span: retries exhaust per seed
        spec = ExperimentSpec(
            game="interaction:seed=0", n=3, estimators=("kernel", "leverage"),
            m_grid=(3,), seeds=2,
        )
        rows = run_size_sweep(spec)
        assert len(rows) == 4
        kernel_rows = [r for r in rows if r.estimator == "kernel"]
        assert all(r.error is not None and r.l2_error is None for r in kernel_rows)
        leverage_rows = [r for r in rows if r.estimator == "leverage"]
        assert all(r.error is None for r in leverage_rows)
        assert "failed" in capsys.readouterr().err
        # error rows serialize with empty metric fields
        body = rows_to_csv_bytes(rows).decode().splitlines()
        bad = next(line for line in body if ",kernel," in line)
        assert ",,," in bad


class TestGammaSweep:
    def test_rows_carry_achieved_gamma(self):
        spec = ExperimentSpec(
            game="gamma:seed=0",
            n=8,
            estimators=("leverage",),
            m_grid=(40,),
            gamma_grid=(0.5, 2.0),
            seeds=2,
        )
        rows = run_gamma_sweep(spec)
        assert len(rows) == 2 * 2
        gammas = sorted({r.gamma for r in rows})
        assert gammas[0] == pytest.approx(0.5, rel=1e-6)
        assert gammas[1] == pytest.approx(2.0, rel=1e-6)

    def test_requires_gamma_game(self):
        with pytest.raises(ValueError, match="gamma"):
            run_gamma_sweep(small_size_spec())


class TestAggregate:
    def test_single_row_group(self):
        row = MetricRow("g", 4, "leverage", 16, 0.0, None, 0, 3.5, 1.25, 16, None)
        (group,) = aggregate([row])
        assert group["l2_error"] == {"mean": 3.5, "q1": 3.5, "median": 3.5, "q3": 3.5}
        assert group["objective_ratio"]["median"] == 1.25

    def test_documented_quartile_convention(self):
        rows = [
            MetricRow("g", 4, "leverage", 16, 0.0, None, seed, float(v), None, 16, None)
            for seed, v in enumerate([1, 2, 3, 4])
        ]
        (group,) = aggregate(rows)
        assert group["l2_error"]["q1"] == pytest.approx(1.75)
        assert group["l2_error"]["median"] == pytest.approx(2.5)
        assert group["l2_error"]["q3"] == pytest.approx(3.25)

    def test_matches_reference_implementation(self):
        # independent oracle: textbook linear interpolation of order statistics
        def reference_quantile(data, q):
            xs = sorted(data)
            h = (len(xs) - 1) * q
            lo = int(np.floor(h))
            hi = min(lo + 1, len(xs) - 1)
            return xs[lo] + (h - lo) * (xs[hi] - xs[lo])

        rng = np.random.default_rng(0)
        values = rng.exponential(size=100)
        rows = [
            MetricRow("g", 4, "leverage", 16, 0.0, None, i, float(v), None, 16, None)
            for i, v in enumerate(values)
        ]
        (group,) = aggregate(rows)
        for key, q in (("q1", 0.25), ("median", 0.5), ("q3", 0.75)):
            assert group["l2_error"][key] == pytest.approx(
                reference_quantile(values, q), rel=1e-12
            )

    def test_empty_group_dropped_with_warning(self, capsys):
        bad = MetricRow("g", 4, "leverage", 16, 0.0, None, 0, None, None, None, None, error="x")
        assert aggregate([bad]) == []
        assert "dropping empty group" in capsys.readouterr().err


class TestCsvContract:
    def test_header_and_shape(self, tmp_path):
        spec = small_size_spec(m_grid=(12,), seeds=2)
        rows = run_size_sweep(spec)
        out = tmp_path / "rows.csv"
        write_csv(rows, out)
        text = out.read_text().splitlines()
        assert text[0] == ",".join(CSV_COLUMNS)
        assert len(text) == 1 + len(rows)
        # absent gamma and wall_ms serialize as empty fields
        assert text[1].endswith(",")

    def test_game_labels_with_commas_are_quoted(self, tmp_path):
        spec = ExperimentSpec(game="additive:1,2,3", m_grid=(8,), seeds=1, estimators=("leverage",))
        rows = run_size_sweep(spec)
        out = tmp_path / "rows.csv"
        write_csv(rows, out)
        body = out.read_text().splitlines()[1]
        assert body.startswith('"additive(1,2,3)"')

    def test_summary_json_is_valid(self):
        import json

        rows = run_size_sweep(small_size_spec(m_grid=(12,), seeds=2))
        for line in summary_json(rows).splitlines():
            payload = json.loads(line)
            assert payload["count"] == 2


class TestGameSpecParsing:
    def test_round_trips(self):
        g = parse_game_spec("additive:1,2,3;offset=0.5")
        assert g.values == (1.0, 2.0, 3.0)
        assert g.options["offset"] == 0.5
        assert g.player_count() == 3
        v = parse_game_spec("voting:1,1,1;quota=2")
        assert v.build().eval_one([1, 1, 0]) == 1.0
        assert parse_game_spec("glove").player_count() == 3
        ext = parse_game_spec('external:"python3 server.py"', n=5)
        assert ext.command == "python3 server.py"

    def test_requires_n_when_ambiguous(self):
        with pytest.raises(ValueError, match="player count"):
            parse_game_spec("interaction:seed=0").player_count()

    def test_rejects_unknown_game(self):
        with pytest.raises(ValueError):
            parse_game_spec("mystery:1,2")

    def test_fresh_builds_are_identical(self):
        g = parse_game_spec("interaction:seed=3", n=6)
        masks = np.eye(6, dtype=np.uint8)
        np.testing.assert_array_equal(g.build().eval_batch(masks), g.build().eval_batch(masks))
