import math
from datetime import date

import numpy as np
import pytest

from volrisk.market_data import (
    DataError,
    DegenerateSeriesError,
    PriceSeries,
    ReturnPanel,
    ReturnSeries,
    adf_test,
    align_panel,
    describe,
    jarque_bera,
    kpss_test,
    load_price_series,
    log_returns,
    pearson_correlation,
)

GOOD_CSV = """date,close
2020-01-02,100.0
2020-01-03,101.5
2020-01-06,99.8
2020-01-07,102.2
"""


class TestLoadPriceSeries:
    def test_basic(self, write_csv):
        p = load_price_series(write_csv("ACME.csv", GOOD_CSV))
        assert p.symbol == "ACME"
        assert p.dates[0] == date(2020, 1, 2)
        assert len(p) == 4
        np.testing.assert_allclose(p.close, [100.0, 101.5, 99.8, 102.2])

    def test_explicit_symbol_wins(self, write_csv):
        p = load_price_series(write_csv("whatever.csv", GOOD_CSV), symbol="DJI")
        assert p.symbol == "DJI"

    def test_column_mapping(self, write_csv):
        text = "Date,Adj Close\n2020-01-02,10\n2020-01-03,11\n"
        p = load_price_series(
            write_csv("m.csv", text), columns={"date": "Date", "close": "Adj Close"}
        )
        np.testing.assert_allclose(p.close, [10.0, 11.0])

    def test_rows_sorted_by_date(self, write_csv):
        text = "date,close\n2020-01-03,2\n2020-01-02,1\n2020-01-06,3\n"
        p = load_price_series(write_csv("u.csv", text))
        assert p.dates == (date(2020, 1, 2), date(2020, 1, 3), date(2020, 1, 6))
        np.testing.assert_allclose(p.close, [1.0, 2.0, 3.0])

    def test_missing_file(self):
        with pytest.raises(DataError, match="cannot read"):
            load_price_series("/does/not/exist.csv")

    def test_missing_column(self, write_csv):
        with pytest.raises(DataError, match="close"):
            load_price_series(write_csv("h.csv", "date,price\n2020-01-02,1\n"))

    def test_malformed_row_reports_position(self, write_csv):
        text = "date,close\n2020-01-02,100\nnot-a-date,101\n"
        with pytest.raises(DataError, match="row 3"):
            load_price_series(write_csv("bad.csv", text))

    def test_non_positive_price(self, write_csv):
        text = "date,close\n2020-01-02,100\n2020-01-03,-5\n"
        with pytest.raises(DataError, match="non-positive"):
            load_price_series(write_csv("neg.csv", text))

    def test_duplicate_date(self, write_csv):
        text = "date,close\n2020-01-02,100\n2020-01-02,101\n"
        with pytest.raises(DataError, match="duplicate"):
            load_price_series(write_csv("dup.csv", text))

    def test_too_short(self, write_csv):
        with pytest.raises(DataError):
            load_price_series(write_csv("one.csv", "date,close\n2020-01-02,1\n"))


class TestPriceSeriesValidation:
    def test_dates_must_increase(self):
        with pytest.raises(DataError):
            PriceSeries(
                symbol="x",
                dates=(date(2020, 1, 2), date(2020, 1, 1)),
                close=np.array([1.0, 2.0]),
            )

    def test_close_must_be_positive_finite(self):
        dates = (date(2020, 1, 1), date(2020, 1, 2))
        for bad in ([1.0, 0.0], [1.0, math.inf], [1.0, math.nan]):
            with pytest.raises(DataError):
                PriceSeries(symbol="x", dates=dates, close=np.array(bad))


def test_log_returns_hand_values(write_csv):
    p = load_price_series(write_csv("r.csv", GOOD_CSV))
    r = log_returns(p)
    assert len(r) == 3
    assert r.dates[0] == date(2020, 1, 3)
    expected = [math.log(101.5 / 100.0), math.log(99.8 / 101.5), math.log(102.2 / 99.8)]
    np.testing.assert_allclose(r.values, expected, atol=1e-15)


class TestAlign:
    def test_intersection(self, make_series):
        a = make_series([0.01, 0.02, 0.03], symbol="a", start=date(2020, 1, 1))
        b = make_series([0.1, 0.2, 0.3], symbol="b", start=date(2020, 1, 2))
        panel = align_panel([a, b])
        assert panel.dates == (date(2020, 1, 2), date(2020, 1, 3))
        np.testing.assert_allclose(panel.series[0].values, [0.02, 0.03])
        np.testing.assert_allclose(panel.series[1].values, [0.1, 0.2])
        assert panel.symbols == ("a", "b")

    def test_empty_intersection(self, make_series):
        a = make_series([0.01, 0.02], start=date(2020, 1, 1), symbol="a")
        b = make_series([0.01, 0.02], start=date(2021, 1, 1), symbol="b")
        with pytest.raises(DataError, match="empty"):
            align_panel([a, b])

    def test_needs_two(self, make_series):
        with pytest.raises(DataError):
            align_panel([make_series([0.01, 0.02])])

    def test_unknown_policy(self, make_series):
        a = make_series([0.01, 0.02], symbol="a")
        b = make_series([0.01, 0.02], symbol="b")
        with pytest.raises(ValueError):
            align_panel([a, b], policy="union")


class TestDescribe:
    def test_matches_plain_python_oracle(self, make_series):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(257) * 0.02 + 0.001
        s = describe(make_series(x))
        vals = [float(v) for v in x]
        n = len(vals)
        mean = sum(vals) / n
        cen = [v - mean for v in vals]
        m2 = sum(c * c for c in cen) / n
        m3 = sum(c**3 for c in cen) / n
        m4 = sum(c**4 for c in cen) / n
        assert s.n == n
        assert s.mean == pytest.approx(mean, abs=1e-15)
        assert s.std == pytest.approx(math.sqrt(sum(c * c for c in cen) / (n - 1)), rel=1e-12)
        assert s.skewness == pytest.approx(m3 / m2**1.5, rel=1e-10)
        assert s.excess_kurtosis == pytest.approx(m4 / m2**2 - 3.0, rel=1e-10)
        assert s.min == min(vals)
        assert s.max == max(vals)

    def test_quartiles_linear_interpolation(self, make_series):
        # order-statistics rule: q = x_(j) + g (x_(j+1) - x_(j)), j = floor((n-1)p)
        rng = np.random.default_rng(4)
        x = rng.standard_normal(41)
        s = describe(make_series(x))
        xs = sorted(float(v) for v in x)
        for q, p in ((s.q25, 0.25), (s.q75, 0.75)):
            pos = (len(xs) - 1) * p
            j = int(pos)
            g = pos - j
            expected = xs[j] + g * (xs[j + 1] - xs[j]) if g else xs[j]
            assert q == pytest.approx(expected, abs=1e-14)

    def test_sharpe_optional(self, make_series):
        x = [0.01, -0.02, 0.015, 0.002, -0.004]
        plain = describe(make_series(x))
        assert plain.sharpe is None
        with_rf = describe(make_series(x), risk_free=0.001)
        assert with_rf.sharpe == pytest.approx((plain.mean - 0.001) / plain.std)

    def test_too_short(self, make_series):
        with pytest.raises(DataError):
            describe(make_series([0.01, 0.02, 0.03]))

    def test_degenerate(self, make_series):
        with pytest.raises(DegenerateSeriesError):
            describe(make_series([0.01] * 50))


class TestJarqueBera:
    def test_statistic_brute_force(self, make_series):
        rng = np.random.default_rng(8)
        x = rng.standard_t(5, size=400)
        s = describe(make_series(x))
        t = jarque_bera(s)
        vals = [float(v) for v in x]
        n = len(vals)
        mean = sum(vals) / n
        cen = [v - mean for v in vals]
        m2 = sum(c * c for c in cen) / n
        S = (sum(c**3 for c in cen) / n) / m2**1.5
        K = (sum(c**4 for c in cen) / n) / m2**2
        expected = n / 6.0 * (S**2 + (K - 3.0) ** 2 / 4.0)
        assert t.statistic == pytest.approx(expected, rel=1e-9)

    def test_critical_values_closed_form(self, make_series):
        s = describe(make_series(np.random.default_rng(0).standard_normal(100)))
        t = jarque_bera(s)
        crits = t.decision_inputs["critical_values"]
        for a in (0.01, 0.05, 0.10):
            assert crits[f"{a:.2f}"] == pytest.approx(-2.0 * math.log(a), rel=1e-12)

    def test_decisions(self, make_series):
        rng = np.random.default_rng(12)
        normal = describe(make_series(rng.standard_normal(5000)))
        heavy = describe(make_series(rng.standard_t(3, size=5000)))
        assert not jarque_bera(normal).reject_null
        assert jarque_bera(heavy).reject_null

    def test_significance_validation(self, make_series):
        s = describe(make_series(np.random.default_rng(0).standard_normal(50)))
        with pytest.raises(ValueError):
            jarque_bera(s, significance=0.03)


class TestUnitRoot:
    def test_adf_decisions(self, make_series):
        rng = np.random.default_rng(0)
        wn = rng.standard_normal(800)
        rw = np.cumsum(rng.standard_normal(800))
        assert adf_test(make_series(wn)).reject_null
        assert not adf_test(make_series(rw)).reject_null

    def test_kpss_decisions(self, make_series):
        rng = np.random.default_rng(1)
        wn = rng.standard_normal(800)
        rw = np.cumsum(rng.standard_normal(800))
        assert not kpss_test(make_series(wn)).reject_null
        assert kpss_test(make_series(rw)).reject_null

    def test_adf_default_lag_rule(self, make_series):
        rng = np.random.default_rng(2)
        t = adf_test(make_series(rng.standard_normal(500)))
        assert t.decision_inputs["lags"] == int(12.0 * (500 / 100.0) ** 0.25)

    def test_adf_lag_override(self, make_series):
        rng = np.random.default_rng(2)
        t = adf_test(make_series(rng.standard_normal(500)), lags=3)
        assert t.decision_inputs["lags"] == 3

    def test_kpss_bandwidth_rule(self, make_series):
        rng = np.random.default_rng(2)
        t = kpss_test(make_series(rng.standard_normal(500)))
        assert t.decision_inputs["bandwidth"] == int(4.0 * (500 / 100.0) ** 0.25)

    def test_too_short(self, make_series):
        with pytest.raises(DataError):
            adf_test(make_series(np.random.default_rng(0).standard_normal(12)))

    def test_constant_series(self, make_series):
        with pytest.raises(DataError):
            kpss_test(make_series([0.005] * 300))

    def test_to_dict_round_trips_json(self, make_series):
        import json

        t = adf_test(make_series(np.random.default_rng(5).standard_normal(300)))
        blob = json.dumps(t.to_dict(), sort_keys=True)
        assert "unit root" in blob


class TestPearson:
    def test_matches_numpy(self, make_series):
        rng = np.random.default_rng(6)
        base = rng.standard_normal(300)
        a = make_series(base + 0.3 * rng.standard_normal(300), symbol="a")
        b = make_series(-0.5 * base + rng.standard_normal(300), symbol="b")
        c = make_series(rng.standard_normal(300), symbol="c")
        panel = ReturnPanel(series=(a, b, c), dates=a.dates)
        C = pearson_correlation(panel)
        expected = np.corrcoef(np.vstack([s.values for s in panel.series]))
        np.testing.assert_allclose(C, expected, atol=1e-12)

    def test_exact_symmetry_and_diagonal(self, make_series):
        rng = np.random.default_rng(7)
        series = tuple(
            make_series(rng.standard_normal(100), symbol=f"s{i}") for i in range(4)
        )
        panel = ReturnPanel(series=series, dates=series[0].dates)
        C = pearson_correlation(panel)
        assert np.array_equal(C, C.T)
        assert np.all(np.diagonal(C) == 1.0)
        assert np.all(np.abs(C) <= 1.0)

    def test_needs_two_series(self, make_series):
        s = make_series([0.01, 0.02, 0.03])
        with pytest.raises(DataError):
            pearson_correlation(ReturnPanel(series=(s,), dates=s.dates))


def test_return_series_rejects_non_finite():
    with pytest.raises(DataError):
        ReturnSeries(
            symbol="x",
            dates=(date(2020, 1, 1), date(2020, 1, 2)),
            values=np.array([0.01, math.nan]),
        )


def test_panel_calendar_mismatch(make_series):
    a = make_series([0.01, 0.02], symbol="a", start=date(2020, 1, 1))
    b = make_series([0.01, 0.02], symbol="b", start=date(2020, 1, 2))
    with pytest.raises(DataError):
        ReturnPanel(series=(a, b), dates=a.dates)
