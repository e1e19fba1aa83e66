"""Volatility, correlation, and downside-risk toolkit for daily return
panels: asymmetric log-variance models per asset, a two-stage dynamic
correlation layer, and VaR/drawdown reporting."""

from .distributions import InnovationDist
from .market_data import (
    DataError,
    DegenerateSeriesError,
    DescriptiveStats,
    PriceSeries,
    ReturnPanel,
    ReturnSeries,
    TestResult,
    adf_test,
    align_panel,
    describe,
    jarque_bera,
    kpss_test,
    load_price_series,
    log_returns,
    pearson_correlation,
)
from .optimize import OptResult, ParamSpace, finite_diff_gradient, minimize
from .egarch import (
    EgarchFit,
    EgarchParams,
    Garch11Params,
    MeanParams,
    MeanSpec,
    aic,
    egarch_filter,
    egarch_loglik,
    fit_egarch,
    fit_garch11,
    garch11_filter,
    garch11_loglik,
    simulate_egarch,
    simulate_garch11,
)
from .dcc import (
    DccFit,
    DccParams,
    conditional_covariance,
    dcc_filter,
    dcc_loglik,
    dynamic_correlation,
    fit_dcc,
    simulate_dcc_panel,
    unconditional_corr,
)
from .risk import (
    RiskReport,
    RiskSpec,
    cf_var,
    cornish_fisher_z,
    drawdown,
    empirical_var,
    gaussian_var,
    risk_report,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "InnovationDist",
    "DataError",
    "DegenerateSeriesError",
    "DescriptiveStats",
    "PriceSeries",
    "ReturnPanel",
    "ReturnSeries",
    "TestResult",
    "adf_test",
    "align_panel",
    "describe",
    "jarque_bera",
    "kpss_test",
    "load_price_series",
    "log_returns",
    "pearson_correlation",
    "OptResult",
    "ParamSpace",
    "finite_diff_gradient",
    "minimize",
    "EgarchFit",
    "EgarchParams",
    "Garch11Params",
    "MeanParams",
    "MeanSpec",
    "aic",
    "egarch_filter",
    "egarch_loglik",
    "fit_egarch",
    "fit_garch11",
    "garch11_filter",
    "garch11_loglik",
    "simulate_egarch",
    "simulate_garch11",
    "DccFit",
    "DccParams",
    "conditional_covariance",
    "dcc_filter",
    "dcc_loglik",
    "dynamic_correlation",
    "fit_dcc",
    "simulate_dcc_panel",
    "unconditional_corr",
    "RiskReport",
    "RiskSpec",
    "cf_var",
    "cornish_fisher_z",
    "drawdown",
    "empirical_var",
    "gaussian_var",
    "risk_report",
]
