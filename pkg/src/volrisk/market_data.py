"""Price ingestion, return panels, descriptive statistics, and the
normality/stationarity test battery.

All container types are immutable after construction and safe to share
across threads; every operation is a pure function.
"""
from __future__ import annotations

import csv
import io
import math
import urllib.request
from dataclasses import dataclass
from datetime import date as Date
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "DataError",
    "DegenerateSeriesError",
    "PriceSeries",
    "ReturnSeries",
    "ReturnPanel",
    "DescriptiveStats",
    "TestResult",
    "load_price_series",
    "log_returns",
    "align_panel",
    "describe",
    "jarque_bera",
    "adf_test",
    "kpss_test",
    "pearson_correlation",
]


class DataError(Exception):
    """Input data violates a documented contract."""


class DegenerateSeriesError(DataError):
    """A computation requires nonzero variance and the series has none."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PriceSeries:
    symbol: str
    dates: tuple
    close: np.ndarray
    open: Optional[np.ndarray] = None
    high: Optional[np.ndarray] = None
    low: Optional[np.ndarray] = None
    volume: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "close", _freeze(self.close))
        for name in ("open", "high", "low", "volume"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, _freeze(v))
        n = len(self.dates)
        if n < 2:
            raise DataError(f"{self.symbol}: need at least 2 observations, got {n}")
        if self.close.shape != (n,):
            raise DataError(f"{self.symbol}: {n} dates but {self.close.shape[0]} closes")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if not cur > prev:
                raise DataError(f"{self.symbol}: dates not strictly increasing at {cur}")
        if not np.all(np.isfinite(self.close)) or np.any(self.close <= 0.0):
            raise DataError(f"{self.symbol}: close prices must be positive and finite")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnSeries:
    symbol: str
    dates: tuple
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _freeze(self.values))
        n = len(self.dates)
        if n < 1:
            raise DataError(f"{self.symbol}: empty return series")
        if self.values.shape != (n,):
            raise DataError(f"{self.symbol}: {n} dates but {self.values.shape[0]} returns")
        if not np.all(np.isfinite(self.values)):
            raise DataError(f"{self.symbol}: returns must be finite")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnPanel:
    series: tuple
    dates: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "series", tuple(self.series))
        object.__setattr__(self, "dates", tuple(self.dates))
        if not self.series:
            raise DataError("panel needs at least one series")
        for s in self.series:
            if s.dates != self.dates:
                raise DataError(f"{s.symbol}: dates differ from the panel calendar")

    @property
    def symbols(self) -> tuple:
        return tuple(s.symbol for s in self.series)

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    std: float
    min: float
    max: float
    skewness: float
    excess_kurtosis: float
    q25: float
    q75: float
    sharpe: Optional[float] = None

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "mean": self.mean,
            "std": self.std,
            "min": self.min,
            "max": self.max,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "q25": self.q25,
            "q75": self.q75,
        }
        if self.sharpe is not None:
            d["sharpe"] = self.sharpe
        return d


@dataclass(frozen=True)
class TestResult:
    test_name: str
    statistic: float
    decision_inputs: dict
    reject_null: bool
    significance: float

    def to_dict(self) -> dict:
        return {
            "test": self.test_name,
            "statistic": self.statistic,
            "reject_null": self.reject_null,
            "significance": self.significance,
            **self.decision_inputs,
        }


_SIGNIFICANCE_LEVELS = (0.01, 0.05, 0.10)

# chi-square(2) upper quantiles; closed form -2 ln(alpha)
_CHI2_2_CRIT = {a: -2.0 * math.log(a) for a in _SIGNIFICANCE_LEVELS}

# Dickey-Fuller critical-value response surface, constant-only regression,
# one unit root: c(N) = b0 + b1/N + b2/N^2 + b3/N^3 (MacKinnon 2010, tau_c_1)
_ADF_SURFACE = {
    0.01: (-3.43035, -6.5393, -16.786, -79.433),
    0.05: (-2.86154, -2.8903, -4.234, -40.040),
    0.10: (-2.56677, -1.5384, -2.809, 0.0),
}

# KPSS level-stationarity asymptotic critical values
_KPSS_CRIT = {0.10: 0.347, 0.05: 0.463, 0.01: 0.739}


def _check_significance(significance: float) -> None:
    if significance not in _SIGNIFICANCE_LEVELS:
        raise ValueError(
            f"significance must be one of {_SIGNIFICANCE_LEVELS}, got {significance}"
        )


# ---------------------------------------------------------------------------
# ingestion

_DEFAULT_COLUMNS = {"date": "date", "close": "close"}
_OPTIONAL_FIELDS = ("open", "high", "low", "volume")


def _read_text(source: str) -> str:
    if isinstance(source, str) and source.startswith(("http://", "https://")):
        with urllib.request.urlopen(source, timeout=60) as resp:
            return resp.read().decode("utf-8")
    try:
        with open(source, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {source}: {exc}") from exc


def _parse_date(text: str) -> Date:
    # intraday timestamps truncated to the calendar day
    return Date.fromisoformat(text.strip()[:10])


def load_price_series(source: str, columns: "dict | None" = None, *, symbol: "str | None" = None) -> PriceSeries:
    """Load a PriceSeries from a CSV file path or plain-GET URL.

    ``columns`` maps the logical fields (date, close, and optionally
    open/high/low/volume) to the header names used in the file.  Rows are
    sorted by date; malformed rows and duplicate dates are rejected with
    the offending row reported.
    """
    mapping = dict(_DEFAULT_COLUMNS)
    if columns:
        mapping.update(columns)
    text = _read_text(source)
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise DataError(f"{source}: empty file, header row required")
    for logical in ("date", "close"):
        if mapping[logical] not in reader.fieldnames:
            raise DataError(
                f"{source}: missing column {mapping[logical]!r} "
                f"(have {reader.fieldnames})"
            )
    extras_present = [
        f for f in _OPTIONAL_FIELDS if mapping.get(f) and mapping[f] in reader.fieldnames
    ]

    rows = []
    for idx, row in enumerate(reader, start=2):  # header is row 1
        raw_date = row.get(mapping["date"])
        raw_close = row.get(mapping["close"])
        if raw_date is None or raw_close is None or raw_close.strip() == "":
            raise DataError(f"{source}: malformed row {idx}")
        try:
            d = _parse_date(raw_date)
            c = float(raw_close)
        except (ValueError, TypeError) as exc:
            raise DataError(f"{source}: malformed row {idx}: {exc}") from exc
        if not math.isfinite(c) or c <= 0.0:
            raise DataError(f"{source}: non-positive price at row {idx}")
        extra_vals = {}
        for f in extras_present:
            try:
                extra_vals[f] = float(row[mapping[f]])
            except (ValueError, TypeError) as exc:
                raise DataError(f"{source}: malformed row {idx}: {exc}") from exc
        rows.append((d, idx, c, extra_vals))

    rows.sort(key=lambda t: (t[0], t[1]))
    for (d1, _, _, _), (d2, i2, _, _) in zip(rows, rows[1:]):
        if d1 == d2:
            raise DataError(f"{source}: duplicate date {d2} at row {i2}")

    name = symbol if symbol is not None else _infer_symbol(source)
    kwargs = {}
    for f in extras_present:
        kwargs[f] = np.array([r[3][f] for r in rows])
    return PriceSeries(
        symbol=name,
        dates=tuple(r[0] for r in rows),
        close=np.array([r[2] for r in rows]),
        **kwargs,
    )


def _infer_symbol(source: str) -> str:
    stem = source.rstrip("/").rsplit("/", 1)[-1]
    return stem.rsplit(".", 1)[0] if "." in stem else stem


# ---------------------------------------------------------------------------
# returns and panels

def log_returns(p: PriceSeries) -> ReturnSeries:
    """r_t = ln(P_t / P_{t-1}), attached to the later date."""
    if len(p) < 2:
        raise DataError(f"{p.symbol}: need at least 2 prices")
    values = np.diff(np.log(p.close))
    return ReturnSeries(symbol=p.symbol, dates=p.dates[1:], values=values)


def align_panel(series: Sequence[ReturnSeries], policy: str = "intersection") -> ReturnPanel:
    """Restrict every series to the dates present in all of them."""
    if policy != "intersection":
        raise ValueError(f"unknown alignment policy {policy!r}")
    if len(series) < 2:
        raise DataError("alignment needs at least 2 series")
    common = set(series[0].dates)
    for s in series[1:]:
        common &= set(s.dates)
    if not common:
        raise DataError("empty calendar intersection")
    dates = tuple(sorted(common))
    aligned = []
    for s in series:
        pos = {d: i for i, d in enumerate(s.dates)}
        idx = [pos[d] for d in dates]
        aligned.append(ReturnSeries(symbol=s.symbol, dates=dates, values=s.values[idx]))
    return ReturnPanel(series=tuple(aligned), dates=dates)


# ---------------------------------------------------------------------------
# descriptive statistics and tests

def describe(r: ReturnSeries, risk_free: "float | None" = None) -> DescriptiveStats:
    """Sample moments of a return series.

    Skewness and excess kurtosis are the population central-moment ratios
    m3/m2^1.5 and m4/m2^2 - 3; std uses denominator n-1.  ``risk_free`` is
    a per-period rate; when supplied the Sharpe ratio (mean - rf)/std is
    included.
    """
    x = r.values
    n = x.size
    if n < 4:
        raise DataError(f"{r.symbol}: need at least 4 observations, got {n}")
    mean = float(x.mean())
    c = x - mean
    m2 = float((c * c).mean())
    if m2 == 0.0:
        raise DegenerateSeriesError(f"{r.symbol}: degenerate: zero variance")
    m3 = float((c * c * c).mean())
    m4 = float((c * c * c * c).mean())
    std = float(x.std(ddof=1))
    q25, q75 = (float(q) for q in np.quantile(x, [0.25, 0.75]))
    sharpe = None if risk_free is None else (mean - risk_free) / std
    return DescriptiveStats(
        n=n,
        mean=mean,
        std=std,
        min=float(x.min()),
        max=float(x.max()),
        skewness=m3 / m2 ** 1.5,
        excess_kurtosis=m4 / (m2 * m2) - 3.0,
        q25=q25,
        q75=q75,
        sharpe=sharpe,
    )


def jarque_bera(s: DescriptiveStats, significance: float = 0.05) -> TestResult:
    """JB = n/6 (S^2 + (K - 3)^2 / 4) with K the raw kurtosis."""
    _check_significance(significance)
    if s.std <= 0.0:
        raise DegenerateSeriesError("degenerate: zero variance")
    stat = s.n / 6.0 * (s.skewness ** 2 + s.excess_kurtosis ** 2 / 4.0)
    crits = {f"{a:.2f}": _CHI2_2_CRIT[a] for a in _SIGNIFICANCE_LEVELS}
    return TestResult(
        test_name="jarque_bera",
        statistic=stat,
        decision_inputs={"critical_values": crits, "null": "normality"},
        reject_null=stat > _CHI2_2_CRIT[significance],
        significance=significance,
    )


def _schwert_lags(n: int) -> int:
    return int(12.0 * (n / 100.0) ** 0.25)


def adf_test(r: ReturnSeries, lags: "int | None" = None, significance: float = 0.05) -> TestResult:
    """Augmented Dickey-Fuller test, constant and no trend.

    Null: unit root.  Lag order defaults to the Schwert rule
    floor(12 (n/100)^0.25); critical values come from the embedded
    response-surface constants evaluated at the effective sample size.
    """
    _check_significance(significance)
    x = r.values
    n = x.size
    p = _schwert_lags(n) if lags is None else int(lags)
    if p < 0:
        raise ValueError(f"lags must be nonnegative, got {p}")
    if n <= p + 10:
        raise DataError(f"{r.symbol}: need more than lags + 10 = {p + 10} observations, got {n}")
    dx = np.diff(x)
    y = dx[p:]
    cols = [np.ones(y.size), x[p:-1]]
    for i in range(1, p + 1):
        cols.append(dx[p - i : dx.size - i])
    X = np.column_stack(cols)
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise DegenerateSeriesError(f"{r.symbol}: collinear regressors in ADF regression")
    resid = y - X @ beta
    dof = y.size - X.shape[1]
    s2 = float(resid @ resid) / dof
    cov11 = s2 * np.linalg.inv(X.T @ X)[1, 1]
    stat = float(beta[1] / math.sqrt(cov11))
    nobs = y.size
    crits = {}
    for a in _SIGNIFICANCE_LEVELS:
        b0, b1, b2, b3 = _ADF_SURFACE[a]
        crits[a] = b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3
    return TestResult(
        test_name="adf",
        statistic=stat,
        decision_inputs={
            "lags": p,
            "nobs": nobs,
            "critical_values": {f"{a:.2f}": crits[a] for a in _SIGNIFICANCE_LEVELS},
            "null": "unit root",
        },
        reject_null=stat < crits[significance],
        significance=significance,
    )


def kpss_test(r: ReturnSeries, bandwidth: "int | None" = None, significance: float = 0.05) -> TestResult:
    """KPSS level-stationarity test.

    Null: (level) stationarity.  Long-run variance uses the Bartlett
    kernel with bandwidth floor(4 (n/100)^0.25) unless overridden.
    """
    _check_significance(significance)
    x = r.values
    n = x.size
    l = int(4.0 * (n / 100.0) ** 0.25) if bandwidth is None else int(bandwidth)
    if l < 0:
        raise ValueError(f"bandwidth must be nonnegative, got {l}")
    if n <= l + 10:
        raise DataError(f"{r.symbol}: need more than bandwidth + 10 = {l + 10} observations, got {n}")
    e = x - x.mean()
    if float(e @ e) == 0.0:
        raise DegenerateSeriesError(f"{r.symbol}: degenerate: zero variance")
    s = np.cumsum(e)
    eta = float(s @ s) / (n * n)
    lrv = float(e @ e) / n
    for j in range(1, l + 1):
        gamma_j = float(e[j:] @ e[:-j]) / n
        lrv += 2.0 * (1.0 - j / (l + 1.0)) * gamma_j
    stat = eta / lrv
    return TestResult(
        test_name="kpss",
        statistic=stat,
        decision_inputs={
            "bandwidth": l,
            "critical_values": {f"{a:.2f}": _KPSS_CRIT[a] for a in _SIGNIFICANCE_LEVELS},
            "null": "stationarity",
        },
        reject_null=stat > _KPSS_CRIT[significance],
        significance=significance,
    )


def pearson_correlation(panel: ReturnPanel) -> np.ndarray:
    """Sample Pearson correlation matrix of the panel (exactly symmetric,
    unit diagonal)."""
    if len(panel.series) < 2:
        raise DataError("correlation needs at least 2 series")
    X = np.column_stack([s.values for s in panel.series])
    X = X - X.mean(axis=0)
    cov = X.T @ X
    d = np.sqrt(np.diagonal(cov))
    for s, dv in zip(panel.series, d):
        if dv == 0.0:
            raise DegenerateSeriesError(f"{s.symbol}: degenerate: zero variance")
    C = cov / np.outer(d, d)
    C = 0.5 * (C + C.T)
    C = np.clip(C, -1.0, 1.0)
    np.fill_diagonal(C, 1.0)
    return C
