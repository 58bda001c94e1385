"""Tests of the verification machinery: KS tests, empirical CFs, moment and
density checks, and the suite runner / report serialization."""

import json
import math

import numpy as np
import pytest
import scipy.stats
from scipy.optimize import brentq

from expnormal.analytic import CONSTANTS, cf_exact, cf_gamma, cf_truncated_series, std_normal_cdf
from expnormal.sampling import RandomStream, TruncationConfig, make_batch
from expnormal.verify import (
    CheckResult,
    ECDF,
    SuiteConfig,
    VerificationReport,
    compare_cf,
    density_check,
    empirical_cf,
    kolmogorov_sf,
    ks_one_sample,
    ks_two_sample,
    moment_check,
    render_json,
    run_suite,
)

ALPHA = 0.001

SMALL = SuiteConfig(seed=3, n=20_000, J=500, moment_n=100_000, oracle_J=100, factor_ks=(1, 2))


def normal_quantile_batch(n=1000):
    qs = (np.arange(1, n + 1) - 0.5) / n
    return scipy.stats.norm.ppf(qs)


class TestKolmogorovSF:
    def test_reference_values(self):
        assert abs(kolmogorov_sf(1.0) - 0.26999967167735452) < 1e-10
        assert abs(kolmogorov_sf(1.9494746035043753) - 0.001) < 1e-6

    def test_limits_and_monotonicity(self):
        assert kolmogorov_sf(0.0) == 1.0
        lams = np.linspace(0.3, 3.0, 30)
        vals = [kolmogorov_sf(l) for l in lams]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert kolmogorov_sf(10.0) < 1e-50


class TestECDF:
    def test_evaluation(self):
        e = ECDF(np.array([3.0, 1.0, 2.0]))
        assert e(0.5) == 0.0
        assert e(1.0) == pytest.approx(1 / 3)
        assert e(2.5) == pytest.approx(2 / 3)
        assert e(9.0) == 1.0

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            ECDF(np.array([]))


class TestKSOneSample:
    def test_probability_point_batch(self):
        # quantiles at (i-1/2)/n give the exact minimal statistic 1/(2n)
        n = 1000
        res = ks_one_sample(normal_quantile_batch(n), std_normal_cdf)
        assert res.statistic == pytest.approx(0.5 / n, abs=1e-12)
        assert res.passed

    def test_null_batch_passes(self):
        x = make_batch("expnormal-direct", 100_000, seed=101)
        cdf = lambda u: 2.0 * std_normal_cdf(math.exp(u)) - 1.0
        res = ks_one_sample(x, cdf, alpha=ALPHA)
        assert res.passed and res.p_value > ALPHA

    def test_shifted_batch_fails(self):
        x = normal_quantile_batch(2000) + 1.0
        res = ks_one_sample(x, std_normal_cdf)
        assert res.statistic > 0.3  # sup_x Phi(x)-Phi(x-1) ~ 0.38292
        assert not res.passed

    def test_agrees_with_scipy(self):
        x = make_batch("expnormal-direct", 5_000, seed=102).values
        mine = ks_one_sample(np.exp(x), scipy.stats.chi2(1).cdf)  # wrong law on purpose
        ref = scipy.stats.kstest(np.exp(x), scipy.stats.chi2(1).cdf)
        assert mine.statistic == pytest.approx(ref.statistic, abs=1e-12)

    def test_monotone_transform_invariance(self):
        g = lambda x: x**3 + x
        ginv = lambda y: brentq(lambda x: g(x) - y, -50, 50)
        x = make_batch("expnormal-direct", 500, seed=103).values
        base = ks_one_sample(x, std_normal_cdf)
        moved = ks_one_sample(np.array([g(v) for v in x]), lambda y: std_normal_cdf(ginv(y)))
        assert moved.statistic == pytest.approx(base.statistic, abs=1e-12)

    def test_rejects_small_or_empty(self):
        with pytest.raises(ValueError):
            ks_one_sample(np.array([]), std_normal_cdf)
        with pytest.raises(ValueError):
            ks_one_sample(np.arange(5.0), std_normal_cdf)


class TestKSTwoSample:
    def test_identical_batches(self):
        x = make_batch("expnormal-direct", 1000, seed=104)
        assert ks_two_sample(x, x).statistic == 0.0

    def test_two_null_batches_pass(self):
        a = make_batch("expnormal-direct", 100_000, seed=105)
        b = make_batch("expnormal-direct", 100_000, seed=106)
        res = ks_two_sample(a, b, alpha=ALPHA)
        assert res.passed and res.n_effective == pytest.approx(50_000.0)

    def test_different_laws_fail_decisively(self):
        a = make_batch("expnormal-direct", 50_000, seed=107).values
        b = -make_batch("exponential", 50_000, seed=108).values
        res = ks_two_sample(a, b, alpha=ALPHA)
        assert not res.passed and res.statistic > 0.1

    def test_agrees_with_scipy(self):
        a = make_batch("expnormal-direct", 3_000, seed=109).values
        b = make_batch("expnormal-direct", 2_000, seed=110).values
        assert ks_two_sample(a, b).statistic == pytest.approx(
            scipy.stats.ks_2samp(a, b, method="asymp").statistic, abs=1e-12
        )

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            ks_two_sample(np.array([]), np.arange(10.0))


class TestEmpiricalCF:
    def test_exact_one_at_zero(self):
        x = make_batch("expnormal-direct", 1000, seed=111)
        assert empirical_cf(x, [0.0])[0] == 1.0 + 0.0j

    def test_constant_batch(self):
        c = 0.7
        vals = empirical_cf(np.full(100, c), [0.0, 1.0, 2.5])
        for t, v in zip([0.0, 1.0, 2.5], vals):
            assert abs(v - np.exp(1j * t * c)) < 1e-14

    def test_modulus_bounded_by_one(self):
        x = make_batch("expnormal-direct", 10_000, seed=112)
        grid = np.arange(-5, 5.01, 0.5)
        assert np.all(np.abs(empirical_cf(x, grid)) <= 1.0 + 1e-12)

    def test_oracle_batch_near_exact_cf(self):
        x = make_batch("expnormal-direct", 100_000, seed=113)
        assert abs(empirical_cf(x, [1.0])[0] - cf_exact(1.0)) < 4.0 / math.sqrt(x.n)


class TestCompareCF:
    def test_right_law_passes(self):
        cfg = TruncationConfig(J=200)
        x = make_batch("expnormal-series", 50_000, seed=114, cfg=cfg)
        grid = np.arange(-5.0, 5.01, 0.25)
        cmp = compare_cf(x, grid, lambda t: cf_truncated_series(t, cfg, 1))
        assert cmp.passed
        assert cmp.clt_band == pytest.approx(4.0 / math.sqrt(50_000))

    def test_wrong_law_fails(self):
        x = make_batch("expnormal-direct", 50_000, seed=115)
        grid = np.arange(-5.0, 5.01, 0.25)
        assert not compare_cf(x, grid, lambda t: cf_gamma(t, 1.0)).passed

    def test_root_factor_log_magnitude_against_its_law(self):
        cfg = TruncationConfig(J=100)
        w = make_batch("root-factor", 50_000, seed=120, k=2, cfg=cfg)
        grid = np.arange(-5.0, 5.01, 0.25)
        cmp = compare_cf(
            np.log(np.abs(w.values)), grid, lambda t: cf_truncated_series(t, cfg, 2)
        )
        assert cmp.passed


class TestMomentCheck:
    def test_oracle_batch_passes(self):
        x = make_batch("expnormal-direct", 200_000, seed=116)
        entries = moment_check(x, CONSTANTS.mean_expnormal, CONSTANTS.var_expnormal)
        assert all(e.passed for e in entries)

    def test_constant_batch_fails_variance(self):
        entries = moment_check(np.full(500, 1.25), 1.25, CONSTANTS.var_expnormal)
        by_name = {e.name: e for e in entries}
        assert by_name["moment_mean"].passed
        assert not by_name["moment_var"].passed

    def test_rejects_tiny(self):
        with pytest.raises(ValueError):
            moment_check(np.arange(50.0), 0.0, 1.0)


class TestDensityCheck:
    def test_oracle_batch_passes(self):
        x = make_batch("expnormal-direct", 100_000, seed=117)
        res = density_check(x, bins=50, alpha=ALPHA)
        assert res.passed
        assert abs(res.inputs["prob_sum"] - 1.0) < 1e-9

    def test_wrong_law_fails(self):
        x = -make_batch("exponential", 100_000, seed=118).values
        assert not density_check(x, bins=50, alpha=ALPHA).passed

    def test_validation(self):
        with pytest.raises(ValueError):
            density_check(np.arange(100.0), bins=50)
        x = make_batch("expnormal-direct", 10_000, seed=119)
        with pytest.raises(ValueError):
            density_check(x, bins=5)


class TestRenderJson:
    def test_float_17_digits_and_sorted_keys(self):
        out = render_json({"b": 0.1, "a": 1})
        assert out.index('"a"') < out.index('"b"')
        assert "0.10000000000000001" in out

    def test_round_trip(self):
        payload = {"x": [1.5, 2.0], "flag": True, "none": None, "s": "hi"}
        assert json.loads(render_json(payload)) == payload


class TestSuites:
    def test_analytic_passes_without_seed(self):
        rep = run_suite("analytic")
        assert rep.passed and rep.seed is None
        assert all(isinstance(c, CheckResult) for c in rep.checks)

    def test_analytic_is_seed_independent(self):
        a = run_suite("analytic", SuiteConfig(seed=1))
        b = run_suite("analytic", SuiteConfig(seed=2))
        strip = lambda r: [(c.name, c.observed, c.threshold, c.passed) for c in r.checks]
        assert strip(a) == strip(b)

    def test_sampling_suites_require_seed(self):
        for name in ("series", "factorization"):
            with pytest.raises(ValueError):
                run_suite(name, SuiteConfig())

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_suite("nope")

    def test_series_suite_passes_small(self):
        rep = run_suite("series", SMALL)
        assert rep.passed
        names = {c.name for c in rep.checks}
        assert "ks_series_vs_direct" in names
        assert "cf_series_vs_truncated_oracle" in names
        assert "direct_mean" in names

    def test_factorization_suite_passes_small(self):
        rep = run_suite("factorization", SMALL)
        assert rep.passed
        assert {c.name for c in rep.checks} >= {
            "ks_product_vs_normal_k1",
            "ks_product_vs_normal_k2",
            "product_var_k2",
            "product_sign_balance_k1",
        }

    def test_all_aggregates_in_order(self):
        rep = run_suite("all", SMALL)
        parts = (
            run_suite("analytic", SMALL),
            run_suite("series", SMALL),
            run_suite("factorization", SMALL),
        )
        assert [c.name for c in rep.checks] == [
            c.name for part in parts for c in part.checks
        ]
        assert rep.passed

    def test_byte_identical_reports(self):
        a = run_suite("series", SMALL).to_json()
        b = run_suite("series", SMALL).to_json()
        assert a == b

    def test_report_overall_flag(self):
        good = CheckResult("x", 0.0, 1.0, True)
        bad = CheckResult("y", 2.0, 1.0, False)
        assert VerificationReport("analytic", None, [good]).passed
        assert not VerificationReport("analytic", None, [good, bad]).passed

    def test_report_json_shape(self):
        rep = run_suite("analytic")
        payload = json.loads(rep.to_json())
        assert payload["suite"] == "analytic"
        assert payload["passed"] is True
        assert {"name", "inputs", "observed", "threshold", "passed"} <= set(
            payload["checks"][0]
        )
