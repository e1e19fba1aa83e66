import math
from datetime import date, timedelta

import numpy as np
import pytest

from volrisk.distributions import InnovationDist, mvt_logpdf
from volrisk.dcc import (
    DccParams,
    conditional_covariance,
    dcc_filter,
    dcc_loglik,
    dynamic_correlation,
    fit_dcc,
    simulate_dcc_panel,
    unconditional_corr,
)
from volrisk.egarch import EgarchParams, MeanParams, fit_egarch
from volrisk.market_data import DataError, ReturnSeries

D8 = InnovationDist("student_t", shape=8.0)


def _asset(omega=-0.005, a_mag=0.15, xi=-0.08, b_pers=0.95):
    return EgarchParams(
        mean=MeanParams(), omega=omega, a_mag=a_mag, xi=xi, b_pers=b_pers, dist=D8
    )


def _panel(n=600, k=3, seed=0):
    assets = [_asset(b_pers=0.95 - 0.02 * i) for i in range(k)]
    Qbar = np.full((k, k), 0.4)
    np.fill_diagonal(Qbar, 1.0)
    truth = DccParams(alpha=0.05, beta=0.90, joint_shape=8.0)
    return simulate_dcc_panel(assets, truth, Qbar, n=n, seed=seed)


def _series(values, symbol):
    d0 = date(2019, 1, 1)
    dates = tuple(d0 + timedelta(days=i) for i in range(len(values)))
    return ReturnSeries(symbol=symbol, dates=dates, values=np.asarray(values, float))


class TestParams:
    def test_stationarity_enforced(self):
        with pytest.raises(ValueError):
            DccParams(alpha=0.1, beta=0.9, joint_shape=8.0)
        with pytest.raises(ValueError):
            DccParams(alpha=0.0, beta=0.5, joint_shape=8.0)
        with pytest.raises(ValueError):
            DccParams(alpha=0.05, beta=-0.1, joint_shape=8.0)
        with pytest.raises(ValueError):
            DccParams(alpha=0.05, beta=0.9, joint_shape=2.0)


class TestUnconditionalCorr:
    def test_matches_manual_outer_products(self):
        _, Z = _panel(n=200, k=2, seed=1)
        Qbar = unconditional_corr(Z)
        n = Z.shape[0]
        manual = sum(np.outer(Z[t], Z[t]) for t in range(n)) / n
        np.testing.assert_allclose(Qbar, manual, atol=1e-12)
        assert np.array_equal(Qbar, Qbar.T)

    def test_too_short(self):
        with pytest.raises(DataError):
            unconditional_corr(np.zeros((5, 3)) + np.random.default_rng(0).standard_normal((5, 3)))

    def test_degenerate_column(self):
        Z = np.random.default_rng(0).standard_normal((100, 2))
        Z[:, 1] = 0.5
        with pytest.raises(Exception, match="degenerate"):
            unconditional_corr(Z)


class TestFilter:
    def test_two_asset_three_step_unroll(self):
        Z = np.array([[0.5, -0.3], [1.2, 0.4], [-0.7, -0.9]])
        Qbar = np.array([[1.0, 0.45], [0.45, 1.0]])
        p = DccParams(alpha=0.06, beta=0.91, joint_shape=8.0)
        Q, R = dcc_filter(Z, p, Qbar)

        q0 = Qbar
        q1 = Qbar * (1 - 0.06 - 0.91) + 0.06 * np.outer(Z[0], Z[0]) + 0.91 * q0
        q2 = Qbar * (1 - 0.06 - 0.91) + 0.06 * np.outer(Z[1], Z[1]) + 0.91 * q1
        np.testing.assert_allclose(Q[0], q0, atol=1e-12)
        np.testing.assert_allclose(Q[1], q1, atol=1e-12)
        np.testing.assert_allclose(Q[2], q2, atol=1e-12)
        for t, q in enumerate((q0, q1, q2)):
            d = np.sqrt(np.diag(q))
            np.testing.assert_allclose(R[t], q / np.outer(d, d), atol=1e-12)

    def test_unit_diagonal_exact_and_pd(self):
        _, Z = _panel(n=800, k=3, seed=2)
        Qbar = unconditional_corr(Z)
        Q, R = dcc_filter(Z, DccParams(alpha=0.05, beta=0.9, joint_shape=8.0), Qbar)
        idx = np.arange(3)
        assert np.all(R[:, idx, idx] == 1.0)
        assert np.linalg.eigvalsh(R).min() > 0.0
        off = R[:, 0, 1:]
        assert np.all(np.abs(off) <= 1.0)

    def test_path_read_only(self):
        _, Z = _panel(n=100, k=2, seed=3)
        Q, R = dcc_filter(Z, DccParams(alpha=0.05, beta=0.9, joint_shape=8.0),
                          unconditional_corr(Z))
        with pytest.raises(ValueError):
            R[0, 0, 1] = 0.0

    def test_qbar_shape_checked(self):
        _, Z = _panel(n=100, k=2, seed=3)
        with pytest.raises(ValueError):
            dcc_filter(Z, DccParams(alpha=0.05, beta=0.9, joint_shape=8.0), np.eye(3))


class TestLoglik:
    def test_matches_per_step_oracle(self):
        _, Z = _panel(n=150, k=2, seed=4)
        Qbar = unconditional_corr(Z)
        p = DccParams(alpha=0.04, beta=0.92, joint_shape=6.5)
        _, R = dcc_filter(Z, p, Qbar)
        expected = sum(mvt_logpdf(Z[t], R[t], 6.5) for t in range(Z.shape[0]))
        assert dcc_loglik(Z, p, Qbar) == pytest.approx(expected, abs=1e-8)

    def test_infeasible_path_minus_inf(self):
        Z = np.random.default_rng(5).standard_normal((60, 2))
        bad_qbar = np.array([[1.0, 1.0], [1.0, 1.0]])  # singular target
        p = DccParams(alpha=0.01, beta=0.01, joint_shape=8.0)
        assert dcc_loglik(Z, p, bad_qbar) == -math.inf


class TestFit:
    def test_two_stage_smoke(self):
        returns, _ = _panel(n=1000, k=2, seed=6)
        fits = [fit_egarch(_series(returns[:, j], f"A{j}")) for j in range(2)]
        joint = fit_dcc(fits)
        p = joint.params
        assert 0.0 < p.alpha and 0.0 <= p.beta and p.alpha + p.beta < 1.0
        assert p.alpha == pytest.approx(0.05, abs=0.06)
        assert joint.k_stage1 == sum(f.k_params for f in fits)
        assert joint.k_stage2 == 3
        assert joint.k_total == joint.k_stage1 + 3
        assert joint.aic_joint == pytest.approx(
            2 * joint.k_total - 2 * joint.loglik_joint, abs=1e-9
        )
        assert joint.aic_joint_per_obs == pytest.approx(
            joint.aic_joint / joint.n_obs, abs=1e-12
        )
        assert joint.n_obs == 1000
        assert joint.symbols == ("A0", "A1")
        assert joint.R_path.shape == (1000, 2, 2)
        # stage-2 loglik is reproducible from the stored pieces
        Z = np.column_stack([f.z for f in fits])
        assert dcc_loglik(Z, p, joint.Qbar) == pytest.approx(joint.loglik_joint, abs=1e-9)

    def test_needs_two_fits(self):
        returns, _ = _panel(n=300, k=2, seed=7)
        fit = fit_egarch(_series(returns[:, 0], "A0"))
        with pytest.raises(DataError):
            fit_dcc([fit])

    def test_calendar_mismatch_rejected(self):
        returns, _ = _panel(n=300, k=2, seed=8)
        a = fit_egarch(_series(returns[:, 0], "A0"))
        shifted = ReturnSeries(
            symbol="A1",
            dates=tuple(d + timedelta(days=1) for d in a.dates),
            values=returns[:, 1],
        )
        b = fit_egarch(shifted)
        with pytest.raises(DataError):
            fit_dcc([a, b])

    def test_to_dict_correlation_columns(self):
        returns, _ = _panel(n=300, k=2, seed=9)
        fits = [fit_egarch(_series(returns[:, j], f"A{j}")) for j in range(2)]
        joint = fit_dcc(fits)
        d = joint.to_dict()
        assert list(d["dynamic_correlation"]) == ["A0/A1"]
        col = d["dynamic_correlation"]["A0/A1"]
        assert len(col) == 300
        assert all(-1.0 <= v <= 1.0 for v in col)


class TestFitOutputs:
    def test_conditional_covariance_oracle(self):
        returns, _ = _panel(n=300, k=2, seed=10)
        fits = [fit_egarch(_series(returns[:, j], f"A{j}")) for j in range(2)]
        joint = fit_dcc(fits)
        h_paths = np.column_stack([f.h for f in fits])
        t = 123
        H = conditional_covariance(joint, h_paths, t)
        s = np.sqrt(h_paths[t])
        expected = np.diag(s) @ joint.R_path[t] @ np.diag(s)
        np.testing.assert_allclose(H, expected, atol=1e-12)
        np.testing.assert_allclose(np.diag(H), h_paths[t], atol=1e-12)
        assert np.linalg.eigvalsh(H).min() > 0.0

    def test_conditional_covariance_accepts_column_list(self):
        returns, _ = _panel(n=200, k=2, seed=11)
        fits = [fit_egarch(_series(returns[:, j], f"A{j}")) for j in range(2)]
        joint = fit_dcc(fits)
        H1 = conditional_covariance(joint, [f.h for f in fits], 50)
        H2 = conditional_covariance(joint, np.column_stack([f.h for f in fits]), 50)
        np.testing.assert_array_equal(H1, H2)
        with pytest.raises(IndexError):
            conditional_covariance(joint, [f.h for f in fits], 200)

    def test_dynamic_correlation_series(self):
        returns, _ = _panel(n=200, k=2, seed=12)
        fits = [fit_egarch(_series(returns[:, j], f"A{j}")) for j in range(2)]
        joint = fit_dcc(fits)
        series = dynamic_correlation(joint, 0, 1)
        assert len(series) == 200
        assert series[0][0] == fits[0].dates[0]
        with pytest.raises(ValueError):
            dynamic_correlation(joint, 1, 1)
        with pytest.raises(IndexError):
            dynamic_correlation(joint, 0, 5)


class TestSimulate:
    def test_deterministic(self):
        r1, z1 = _panel(n=150, k=2, seed=13)
        r2, z2 = _panel(n=150, k=2, seed=13)
        np.testing.assert_array_equal(r1, r2)
        np.testing.assert_array_equal(z1, z2)

    def test_shapes_and_finiteness(self):
        r, z = _panel(n=150, k=3, seed=14)
        assert r.shape == z.shape == (150, 3)
        assert np.all(np.isfinite(r))

    def test_innovations_nearly_standardized(self):
        _, z = _panel(n=20_000, k=2, seed=15)
        np.testing.assert_allclose(z.var(axis=0), 1.0, atol=0.1)
        np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=0.05)

    def test_rejects_arma_means(self):
        bad = EgarchParams(
            mean=MeanParams(mu=0.0, ar=(0.3,)), omega=-0.005, a_mag=0.15,
            xi=-0.08, b_pers=0.95, dist=D8,
        )
        with pytest.raises(NotImplementedError):
            simulate_dcc_panel(
                [bad, _asset()], DccParams(alpha=0.05, beta=0.9, joint_shape=8.0),
                np.eye(2), n=50, seed=0,
            )
